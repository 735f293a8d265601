//===- pipeline.cpp - Corpus to embeddings orchestration -------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/pipeline.hpp"

#include "binary_io.hpp"
#include "xflow/error.hpp"
#include "xflow/hash.hpp"
#include "xflow/normalizer.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <thread>

namespace xflow {
namespace fs = std::filesystem;
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("invalid value '{}' for {}", value, key));
}

template <class T> T number(std::string_view key, std::string_view value) {
  T v{};
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size())
    bad_value(key, value);
  return v;
}

std::string hash_settings(const std::map<std::string, std::string> &kv) {
  std::string canon;
  for (const auto &[k, v] : kv)
    canon += k + "=" + v + "\n";
  return to_hex(sha256(canon));
}

std::string_view to_string(PhiLabelSource p) {
  return p == PhiLabelSource::Predecessor ? "predecessor" : "own-block";
}

} // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "context_size") {
    context_size = number<int>(key, value);
  } else if (key == "context_type") {
    auto t = context_type_from_string(value);
    if (!t)
      bad_value(key, value);
    context_type = *t;
  } else if (key == "cutoff") {
    cutoff = number<std::uint64_t>(key, value);
  } else if (key == "subsample") {
    subsample = number<double>(key, value);
  } else if (key == "seed") {
    seed = number<std::uint64_t>(key, value);
  } else if (key == "phi_label") {
    if (value == "predecessor")
      phi_label = PhiLabelSource::Predecessor;
    else if (value == "own-block")
      phi_label = PhiLabelSource::OwnBlock;
    else
      bad_value(key, value);
  } else if (key == "dim") {
    train.dim = number<std::uint32_t>(key, value);
  } else if (key == "epochs") {
    train.epochs = number<std::uint32_t>(key, value);
  } else if (key == "objective") {
    auto o = objective_from_string(value);
    if (!o)
      bad_value(key, value);
    train.objective = *o;
  } else if (key == "negatives") {
    train.negatives = number<std::uint32_t>(key, value);
  } else if (key == "batch") {
    train.batch = number<std::uint32_t>(key, value);
  } else if (key == "alpha") {
    train.alpha = number<double>(key, value);
  } else if (key == "train_seed") {
    train.seed = number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    train.threads = number<unsigned>(key, value);
  } else if (key == "export_mode") {
    auto m = export_mode_from_string(value);
    if (!m)
      bad_value(key, value);
    layout.mode = *m;
  } else if (key == "imm_width") {
    layout.imm_width = number<std::uint32_t>(key, value);
  } else if (key == "pad") {
    layout.pad = number<float>(key, value);
  } else if (key == "analogies_per_family") {
    analogies_per_family = number<std::size_t>(key, value);
  } else if (key == "distance_tests") {
    distance_tests = number<std::size_t>(key, value);
  } else if (key == "jobs") {
    jobs = number<unsigned>(key, value);
  } else {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("unknown setting '{}'", key));
  }
}

void PipelineConfig::load_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot read config file " + path.string());
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = trim(s);
    if (s.empty())
      continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("{}:{}: expected key=value", path.string(), n));
    set(trim(s.substr(0, eq)), s.substr(eq + 1));
  }
}

void PipelineConfig::validate() const {
  if (context_size < 1)
    throw Error(ErrorCode::InvalidArgument, "context_size must be >= 1");
  if (cutoff < 1)
    throw Error(ErrorCode::InvalidArgument, "cutoff must be >= 1");
  if (!(subsample > 0))
    throw Error(ErrorCode::InvalidArgument, "subsample must be > 0");
  train.validate();
}

std::map<std::string, std::string> PipelineConfig::corpus_settings() const {
  return {
      {"context_size", std::to_string(context_size)},
      {"context_type", std::string(to_string(context_type))},
      {"cutoff", std::to_string(cutoff)},
      {"subsample", fmt::format("{}", subsample)},
      {"seed", std::to_string(seed)},
      {"phi_label", std::string(to_string(phi_label))},
  };
}

std::map<std::string, std::string> PipelineConfig::train_settings() const {
  auto kv = corpus_settings();
  kv["dim"] = std::to_string(train.dim);
  kv["epochs"] = std::to_string(train.epochs);
  kv["objective"] = std::string(to_string(train.objective));
  kv["negatives"] = std::to_string(train.negatives);
  kv["batch"] = std::to_string(train.batch);
  kv["alpha"] = fmt::format("{}", train.alpha);
  kv["threads"] = std::to_string(train.threads);
  kv["train_seed"] = std::to_string(train.seed);
  return kv;
}

std::string PipelineConfig::corpus_hash() const {
  return hash_settings(corpus_settings());
}

std::string PipelineConfig::train_hash() const {
  return hash_settings(train_settings());
}

unsigned effective_jobs(unsigned jobs) noexcept {
  if (jobs)
    return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<fs::path> collect_inputs(const std::vector<fs::path> &inputs) {
  std::vector<fs::path> out;
  for (const auto &in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<fs::path> found;
      for (const auto &e : fs::recursive_directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".ll")
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(in, ec)) {
      out.push_back(in);
    } else {
      throw Error(ErrorCode::Io, "no such file or directory: " + in.string());
    }
  }
  return out;
}

FileArtifacts process_source(std::string_view source, std::string path,
                             const PipelineConfig &cfg) {
  FileArtifacts fa;
  fa.path = path;
  fa.ir_lines = static_cast<std::size_t>(
      std::count(source.begin(), source.end(), '\n'));
  if (!source.empty() && source.back() != '\n')
    ++fa.ir_lines;
  auto parsed = parse_module(source, std::move(path));
  fa.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.module)
    return fa;
  fa.module = std::make_shared<const IrModule>(std::move(*parsed.module));
  XfgOptions opts;
  opts.phi_label = cfg.phi_label;
  fa.xfg = build_xfg(*fa.module, opts);
  fa.graph = dual_graph(*fa.xfg).filtered(cfg.context_type);
  fa.node_pairs = context_pairs(*fa.graph, cfg.context_size);
  return fa;
}

FileArtifacts process_file(const fs::path &path, const PipelineConfig &cfg) {
  return process_source(detail::read_file(path), path.string(), cfg);
}

std::vector<FileArtifacts> process_files(const std::vector<fs::path> &files,
                                         const PipelineConfig &cfg) {
  std::vector<FileArtifacts> out(files.size());
  const unsigned workers = std::min<std::size_t>(
      effective_jobs(cfg.jobs), std::max<std::size_t>(1, files.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i)
      out[i] = process_file(files[i], cfg);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(files.size());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
        try {
          out[i] = process_file(files[i], cfg);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  // Report the first failure in input order, as a serial run would.
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

Corpus build_corpus(const std::vector<FileArtifacts> &files,
                    const PipelineConfig &cfg, std::string source_name) {
  Corpus c;
  c.manifest.name = std::move(source_name);
  StatementCounts counts;
  for (const auto &f : files) {
    if (!f.graph)
      continue;
    ++c.manifest.files;
    c.manifest.ir_lines += f.ir_lines;
    for (const auto &t : f.graph->texts())
      counts.add(t);
  }
  for (const auto &[text, _] : counts.counts())
    c.manifest.statements.push_back(text);
  c.vocab = build_vocab(counts, cfg.cutoff);
  for (const auto &f : files) {
    if (!f.graph)
      continue;
    append_pairs(c.all_pairs, c.vocab, f.graph->texts(), f.node_pairs);
    c.all_pairs.sources.push_back(f.path.string());
  }
  c.pairs = subsample(c.all_pairs, cfg.subsample, cfg.seed);
  c.manifest.pairs = c.all_pairs.pairs.size();
  c.manifest.pairs_subsampled = c.pairs.pairs.size();
  return c;
}

EvalReport evaluate(const StmtVocab &vocab, const EmbeddingMatrix &m,
                    const PipelineConfig &cfg) {
  if (m.rows != vocab.size())
    throw Error(ErrorCode::VocabMismatch,
                "embedding and vocabulary have different sizes");
  EvalReport r;
  r.context_type = cfg.context_type;
  r.context_size = cfg.context_size;
  AnalogyOptions opts;
  opts.max_per_family = cfg.analogies_per_family;
  opts.seed = cfg.seed;
  r.analogies = score_analogies(generate_analogies(vocab, opts), m);
  r.distance = score_distance_tests(
      generate_distance_tests(vocab, cfg.distance_tests, cfg.seed), m);
  return r;
}

fs::path sidecar_path(const fs::path &artifact) {
  fs::path p = artifact;
  p += ".meta.json";
  return p;
}

void write_meta(const fs::path &artifact, const ArtifactMeta &meta) {
  nlohmann::ordered_json j;
  j["kind"] = meta.kind;
  j["config_hash"] = meta.config_hash;
  j["settings"] = meta.settings;
  j["facts"] = meta.facts;
  detail::write_file(sidecar_path(artifact), j.dump(2) + "\n");
}

ArtifactMeta read_meta(const fs::path &artifact) {
  auto path = sidecar_path(artifact);
  auto text = detail::read_file(path);
  try {
    auto j = nlohmann::json::parse(text);
    ArtifactMeta m;
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.settings = j.at("settings").get<std::map<std::string, std::string>>();
    m.facts = j.at("facts").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::Io,
                fmt::format("{}: malformed metadata: {}", path.string(), e.what()));
  }
}

} // namespace xflow
