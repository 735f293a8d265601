//===- xflow.cpp - Command-line driver -------------------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Stages communicate through a working directory:
//
//   vocab.tsv, pairs.bin       written by `pairs`
//   embeddings.i2v             written by `train`
//   report.tsv                 written by `eval`
//   programs.nccx, programs.manifest.tsv   written by `export`
//
// Every artifact has a `.meta.json` sidecar recording the settings that
// produced it; stages refuse inputs whose sidecars disagree.
//
//===----------------------------------------------------------------------===//

#include "xflow/error.hpp"
#include "xflow/hash.hpp"
#include "xflow/normalizer.hpp"
#include "xflow/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace xflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEval = 1;
constexpr int kExitFatal = 2;

// Settings given on the command line, applied last.
struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  bool keep_going = false;
  fs::path dir = "xflow-out";
};

void add_setting(CLI::App *cmd, Flags &f, const std::string &flag,
                 const std::string &key, const std::string &help) {
  cmd->add_option_function<std::string>(
      flag, [&f, key](const std::string &v) { f.values[key] = v; }, help);
}

void add_corpus_flags(CLI::App *cmd, Flags &f) {
  add_setting(cmd, f, "-n,--context-size", "context_size",
              "Dual-graph radius for context pairs (default 2)");
  add_setting(cmd, f, "-c,--context-type", "context_type",
              "xfg, cfg or dfg (default xfg)");
  add_setting(cmd, f, "--cutoff", "cutoff",
              "Minimum statement count to enter the vocabulary (default 2)");
  add_setting(cmd, f, "--subsample", "subsample",
              "Pair subsampling threshold t (default 1e-4)");
  add_setting(cmd, f, "--phi-label", "phi_label",
              "Label feeding phi statements: predecessor or own-block");
}

void add_train_flags(CLI::App *cmd, Flags &f) {
  add_setting(cmd, f, "--dim", "dim", "Embedding dimension (default 200)");
  add_setting(cmd, f, "--epochs", "epochs", "Training epochs (default 5)");
  add_setting(cmd, f, "--objective", "objective",
              "full-softmax, sampled-softmax or negative-sampling");
  add_setting(cmd, f, "--negatives", "negatives",
              "Negatives per pair for the sampled objectives (default 5)");
  add_setting(cmd, f, "--batch", "batch", "Mini-batch size (default 512)");
  add_setting(cmd, f, "--alpha", "alpha", "Adam learning rate (default 0.001)");
  add_setting(cmd, f, "--threads", "threads",
              "Gradient workers per batch (default 1)");
}

void add_common_flags(CLI::App *cmd, Flags &f) {
  cmd->add_option("--config", f.config, "Flat key=value settings file");
  add_setting(cmd, f, "--seed", "seed",
              "Seed for every randomized stage (default $XFLOW_SEED, else 1)");
  add_setting(cmd, f, "-j,--jobs", "jobs",
              "Files processed in parallel (default: logical cores)");
  cmd->add_option("-d,--dir", f.dir, "Working directory for artifacts")
      ->capture_default_str();
}

// Defaults, then $XFLOW_SEED, then the config file, then flags.
PipelineConfig resolve(const Flags &f) {
  PipelineConfig cfg;
  if (const char *env = std::getenv("XFLOW_SEED"); env && *env)
    cfg.set("seed", env);
  if (!f.config.empty())
    cfg.load_file(f.config);
  for (const auto &[k, v] : f.values)
    cfg.set(k, v);
  cfg.train.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

// Inputs with the output stem each one maps to.
std::vector<std::pair<fs::path, std::string>>
expand_inputs(const std::vector<std::string> &inputs) {
  std::vector<std::pair<fs::path, std::string>> out;
  for (const auto &in : inputs) {
    fs::path p(in);
    auto files = collect_inputs({p});
    for (auto &file : files) {
      std::string stem;
      if (fs::is_directory(p)) {
        auto rel = fs::relative(file, p);
        rel.replace_extension();
        stem = rel.generic_string();
        std::replace(stem.begin(), stem.end(), '/', '_');
      } else {
        stem = file.stem().string();
      }
      out.emplace_back(file, stem);
    }
  }
  return out;
}

std::vector<fs::path> paths_of(
    const std::vector<std::pair<fs::path, std::string>> &inputs) {
  std::vector<fs::path> out;
  for (const auto &[p, _] : inputs)
    out.push_back(p);
  return out;
}

// Prints diagnostics; returns false if any file failed to parse.
bool report_diagnostics(const std::vector<FileArtifacts> &files) {
  bool ok = true;
  std::size_t warnings = 0;
  for (const auto &f : files) {
    warnings += f.diagnostics.warnings.size();
    if (f.diagnostics.fatal) {
      ok = false;
      std::cerr << fmt::format("{}:{}: error: {}\n", f.path.string(),
                               f.diagnostics.fatal->line,
                               f.diagnostics.fatal->message);
    }
  }
  if (warnings)
    std::cerr << fmt::format("{} warning(s) in {} file(s)\n", warnings,
                             files.size());
  return ok;
}

std::string dual_graph_text(const StatementGraph &g) {
  std::string out;
  for (std::uint32_t i = 0; i < g.size(); ++i)
    out += fmt::format("n\t{}\t{}\n", i, g.text(i));
  for (const auto &e : g.edges()) {
    std::string_view kind = e.flags == (kDataAdjacency | kExecutionAdjacency)
                                ? "both"
                            : e.flags == kDataAdjacency ? "data"
                                                        : "execution";
    out += fmt::format("e\t{}\t{}\t{}\n", e.a, e.b, kind);
  }
  return out;
}

void write_text(const fs::path &p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw Error(ErrorCode::Io, "cannot write " + p.string());
}

struct Workdir {
  fs::path dir;
  fs::path vocab() const { return dir / "vocab.tsv"; }
  fs::path pairs() const { return dir / "pairs.bin"; }
  fs::path embedding() const { return dir / "embeddings.i2v"; }
  fs::path report() const { return dir / "report.tsv"; }
  fs::path records() const { return dir / "programs.nccx"; }
  fs::path manifest() const { return dir / "programs.manifest.tsv"; }
};

void apply_settings(PipelineConfig &cfg,
                    const std::map<std::string, std::string> &settings) {
  for (const auto &[k, v] : settings)
    cfg.set(k, v);
}

// Loads vocabulary and embedding, checking that they belong together.
std::pair<StmtVocab, EmbeddingMatrix> load_model(const Workdir &w,
                                                 PipelineConfig &cfg) {
  auto vocab = StmtVocab::load(w.vocab());
  auto vmeta = read_meta(w.vocab());
  auto emeta = read_meta(w.embedding());
  if (emeta.facts["corpus_hash"] != vmeta.config_hash)
    throw Error(ErrorCode::ConfigMismatch,
                fmt::format("{} was trained from a different corpus "
                            "configuration than {}",
                            w.embedding().string(), w.vocab().string()));
  auto m = load_embedding(w.embedding(), vocab.hash());
  apply_settings(cfg, emeta.settings);
  return {std::move(vocab), std::move(m)};
}

std::uint32_t resolve_statement(const StmtVocab &vocab, const std::string &s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), ::isdigit)) {
    auto id = std::stoul(s);
    if (id >= vocab.size())
      throw Error(ErrorCode::UnknownId,
                  fmt::format("id {} is outside a vocabulary of {}", id,
                              vocab.size()));
    return static_cast<std::uint32_t>(id);
  }
  auto text = normalize_text(s).text;
  if (auto id = vocab.find(text))
    return *id;
  if (auto id = vocab.find(s))
    return *id;
  throw Error(ErrorCode::UnknownId, "statement not in vocabulary: " + text);
}

int cmd_xfg(const Flags &f, const std::vector<std::string> &inputs) {
  auto cfg = resolve(f);
  auto expanded = expand_inputs(inputs);
  auto files = process_files(paths_of(expanded), cfg);
  bool ok = report_diagnostics(files);
  fs::create_directories(f.dir);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto &fa = files[i];
    if (!fa.xfg)
      continue;
    auto base = f.dir / expanded[i].second;
    write_text(fs::path(base) += ".xfg", fa.xfg->to_edge_list());
    write_text(fs::path(base) += ".dot", fa.xfg->to_dot());
    write_text(fs::path(base) += ".dual.tsv", dual_graph_text(*fa.graph));
  }
  return ok || f.keep_going ? kExitOk : kExitFatal;
}

int cmd_pairs(const Flags &f, const std::vector<std::string> &inputs) {
  auto cfg = resolve(f);
  auto expanded = expand_inputs(inputs);
  auto files = process_files(paths_of(expanded), cfg);
  if (!report_diagnostics(files) && !f.keep_going)
    return kExitFatal;
  auto corpus = build_corpus(files, cfg);
  Workdir w{f.dir};
  fs::create_directories(w.dir);
  corpus.vocab.save(w.vocab());
  save_pairs(corpus.pairs, w.pairs());
  const auto hash = cfg.corpus_hash();
  const auto vocab_hash = to_hex(corpus.vocab.hash());
  write_meta(w.vocab(), {"vocab", hash, cfg.corpus_settings(),
                         {{"vocab_hash", vocab_hash},
                          {"entries", std::to_string(corpus.vocab.size())}}});
  write_meta(w.pairs(),
             {"pairs", hash, cfg.corpus_settings(),
              {{"vocab_hash", vocab_hash},
               {"pairs", std::to_string(corpus.pairs.pairs.size())},
               {"pairs_before_subsampling",
                std::to_string(corpus.all_pairs.pairs.size())}}});
  std::cout << corpus_stats({corpus.manifest}).to_tsv();
  return kExitOk;
}

int cmd_train(const Flags &f) {
  auto cfg = resolve(f);
  Workdir w{f.dir};
  auto vocab = StmtVocab::load(w.vocab());
  auto vmeta = read_meta(w.vocab());
  auto pmeta = read_meta(w.pairs());
  if (vmeta.config_hash != pmeta.config_hash)
    throw Error(ErrorCode::ConfigMismatch,
                "vocabulary and pairs come from different configurations");
  if (pmeta.facts["vocab_hash"] != to_hex(vocab.hash()))
    throw Error(ErrorCode::HashMismatch,
                "pairs were mapped with a different vocabulary");
  // Corpus settings come from the artifacts; trainer settings from flags.
  auto trainer = cfg.train;
  apply_settings(cfg, vmeta.settings);
  cfg.train = trainer;
  auto pairs = load_pairs(w.pairs());
  auto result = train(pairs, vocab, cfg.train,
                      [](std::size_t step, std::uint32_t epoch, double loss) {
                        if (step % 1000 == 0)
                          std::cerr << fmt::format(
                              "epoch {} step {} loss {:.6f}\n", epoch, step,
                              loss);
                      });
  save(result.matrix, w.embedding());
  std::map<std::string, std::string> facts = result.matrix.meta;
  facts["corpus_hash"] = vmeta.config_hash;
  facts["vocab_hash"] = to_hex(vocab.hash());
  facts["initial_loss"] = fmt::format("{}", result.initial_loss);
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
    facts[fmt::format("loss_epoch_{}", e + 1)] =
        fmt::format("{}", result.epoch_losses[e]);
  write_meta(w.embedding(),
             {"embedding", cfg.train_hash(), cfg.train_settings(), facts});
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
    std::cout << fmt::format("epoch {}\tloss {:.6f}\n", e + 1,
                             result.epoch_losses[e]);
  return kExitOk;
}

int cmd_eval(const Flags &f, const std::string &clusters) {
  auto cfg = resolve(f);
  Workdir w{f.dir};
  auto seed = cfg.seed;
  auto [vocab, m] = load_model(w, cfg);
  cfg.seed = seed;
  auto report = evaluate(vocab, m, cfg);
  auto tsv = report.to_tsv();
  write_text(w.report(), tsv);
  std::cout << tsv;
  if (!clusters.empty())
    write_text(clusters, export_clusters(m, vocab));
  if (report.analogies.overall().total == 0 && report.distance.total == 0) {
    std::cerr << "no analogy or distance test could be built from this "
                 "vocabulary\n";
    return kExitEval;
  }
  return kExitOk;
}

int cmd_nn(const Flags &f, const std::string &query, std::size_t k) {
  auto cfg = resolve(f);
  auto [vocab, m] = load_model(Workdir{f.dir}, cfg);
  auto id = resolve_statement(vocab, query);
  std::cout << fmt::format("#\t{}\t{}\n", id, vocab.text(id));
  for (const auto &[n, sim] : nearest(m, id, k))
    std::cout << fmt::format("{:.6f}\t{}\t{}\n", sim, n, vocab.text(n));
  return kExitOk;
}

int cmd_analogy(const Flags &f, const std::vector<std::string> &terms,
                std::size_t k) {
  auto cfg = resolve(f);
  auto [vocab, m] = load_model(Workdir{f.dir}, cfg);
  AnalogyItem item;
  item.a = resolve_statement(vocab, terms.at(0));
  item.b = resolve_statement(vocab, terms.at(1));
  item.c = resolve_statement(vocab, terms.at(2));
  std::vector<double> q(m.dim);
  for (std::uint32_t d = 0; d < m.dim; ++d)
    q[d] = double{m.row(item.a)[d]} - m.row(item.b)[d] + m.row(item.c)[d];
  for (const auto &[n, sim] : rank(m, q, k, {item.a, item.b, item.c}))
    std::cout << fmt::format("{:.6f}\t{}\t{}\n", sim, n, vocab.text(n));
  return kExitOk;
}

int cmd_export(const Flags &f, const std::vector<std::string> &inputs,
               const std::string &labels_path) {
  auto cfg = resolve(f);
  auto layout = cfg.layout;
  Workdir w{f.dir};
  auto [vocab, m] = load_model(w, cfg);
  cfg.layout = layout;

  std::map<std::string, std::string> labels;
  if (!labels_path.empty()) {
    std::ifstream in(labels_path);
    if (!in)
      throw Error(ErrorCode::Io, "cannot read " + labels_path);
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab != std::string::npos)
        labels[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  RecordFile records;
  records.dim = m.dim;
  std::vector<std::pair<std::string, std::string>> manifest;
  bool ok = true;
  for (const auto &[path, stem] : expand_inputs(inputs)) {
    ParseDiagnostics diag;
    std::optional<IrModule> module;
    try {
      module = read_module(path, &diag);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::FatalSyntax)
        throw;
      std::cerr << e.what() << "\n";
      ok = false;
      continue;
    }
    NormalizedModule norm(*module);
    std::vector<std::string> warnings;
    records.programs.push_back(export_program(program_sequence(norm, vocab), m,
                                              cfg.layout, &warnings));
    for (const auto &wmsg : warnings)
      std::cerr << path.string() << ": " << wmsg << "\n";
    auto label = labels.find(path.string());
    if (label == labels.end())
      label = labels.find(stem);
    manifest.emplace_back(path.string(),
                          label == labels.end() ? "" : label->second);
  }
  if (!ok && !f.keep_going)
    return kExitFatal;
  save(records, w.records());
  write_text(w.manifest(), manifest_tsv(manifest));
  write_meta(w.records(),
             {"records", read_meta(w.embedding()).config_hash,
              cfg.train_settings(),
              {{"vocab_hash", to_hex(vocab.hash())},
               {"mode", std::string(to_string(cfg.layout.mode))},
               {"imm_width", std::to_string(cfg.layout.imm_width)},
               {"pad", fmt::format("{}", cfg.layout.pad)},
               {"programs", std::to_string(records.programs.size())}}});
  return kExitOk;
}

int cmd_stats(const Flags &f, const std::vector<std::string> &sources) {
  auto cfg = resolve(f);
  std::vector<FileArtifacts> all;
  std::vector<SourceManifest> manifests;
  bool ok = true;
  for (const auto &src : sources) {
    auto eq = src.find('=');
    std::string name = eq == std::string::npos ? src : src.substr(0, eq);
    std::string path = eq == std::string::npos ? src : src.substr(eq + 1);
    auto files = process_files(collect_inputs({path}), cfg);
    ok = report_diagnostics(files) && ok;
    auto corpus = build_corpus(files, cfg, name);
    manifests.push_back(corpus.manifest);
  }
  if (!ok && !f.keep_going)
    return kExitFatal;
  std::cout << corpus_stats(manifests).to_tsv();
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Contextual flow graphs and statement embeddings for LLVM IR"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "xflow 0.1.0");

  Flags flags;
  std::vector<std::string> inputs;
  std::string clusters, labels, query;
  std::vector<std::string> terms;
  std::size_t k = 5;

  auto *xfg = app.add_subcommand("xfg", "Write .xfg, .dot and dual graphs per input file");
  xfg->add_option("inputs", inputs, ".ll files or directories")->required();
  add_common_flags(xfg, flags);
  add_corpus_flags(xfg, flags);
  xfg->add_flag("--keep-going", flags.keep_going, "Skip files that fail to parse");

  auto *pairs = app.add_subcommand("pairs", "Build the vocabulary and context pairs");
  pairs->add_option("inputs", inputs, ".ll files or directories")->required();
  add_common_flags(pairs, flags);
  add_corpus_flags(pairs, flags);
  pairs->add_flag("--keep-going", flags.keep_going, "Skip files that fail to parse");

  auto *tr = app.add_subcommand("train", "Train statement embeddings from pairs");
  add_common_flags(tr, flags);
  add_train_flags(tr, flags);

  auto *ev = app.add_subcommand("eval", "Score analogies and distance tests");
  add_common_flags(ev, flags);
  add_setting(ev, flags, "--analogies", "analogies_per_family",
              "Analogy items per family (default 1000)");
  add_setting(ev, flags, "--distance-tests", "distance_tests",
              "Number of distance tests (default 1000)");
  ev->add_option("--clusters", clusters,
                 "Also write id, category and vector per statement to FILE");

  auto *nn = app.add_subcommand("nn", "Nearest statements to a statement or id");
  nn->add_option("statement", query, "Vocabulary id or statement text")->required();
  nn->add_option("-k", k, "Neighbours to print")->capture_default_str();
  add_common_flags(nn, flags);

  auto *an = app.add_subcommand("analogy", "Neighbours of a - b + c");
  an->add_option("terms", terms, "Three ids or statement texts: a b c")
      ->required()
      ->expected(3);
  an->add_option("-k", k, "Neighbours to print")->capture_default_str();
  add_common_flags(an, flags);

  auto *ex = app.add_subcommand("export", "Write embedded program records");
  ex->add_option("inputs", inputs, ".ll files or directories")->required();
  add_common_flags(ex, flags);
  add_setting(ex, flags, "--mode", "export_mode",
              "ignore, concat_naive, concat_embed or extract_concat");
  add_setting(ex, flags, "--imm-width", "imm_width",
              "Immediate slots per statement (default 4)");
  add_setting(ex, flags, "--pad", "pad", "Value of unused slots (default 0)");
  ex->add_option("--labels", labels, "program<TAB>label file for the manifest");
  ex->add_flag("--keep-going", flags.keep_going, "Skip files that fail to parse");

  auto *st = app.add_subcommand("stats", "Corpus statistics per source");
  st->add_option("sources", inputs, "NAME=PATH or PATH, one per source")->required();
  add_common_flags(st, flags);
  add_corpus_flags(st, flags);
  st->add_flag("--keep-going", flags.keep_going, "Skip files that fail to parse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (xfg->parsed())
      return cmd_xfg(flags, inputs);
    if (pairs->parsed())
      return cmd_pairs(flags, inputs);
    if (tr->parsed())
      return cmd_train(flags);
    if (ev->parsed())
      return cmd_eval(flags, clusters);
    if (nn->parsed())
      return cmd_nn(flags, query, k);
    if (an->parsed())
      return cmd_analogy(flags, terms, k);
    if (ex->parsed())
      return cmd_export(flags, inputs, labels);
    if (st->parsed())
      return cmd_stats(flags, inputs);
  } catch (const Error &e) {
    std::cerr << "xflow: " << e.what() << "\n";
    return e.code() == ErrorCode::UnknownId ? kExitEval : kExitFatal;
  } catch (const std::exception &e) {
    std::cerr << "xflow: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
