#include "support.hpp"

#include "xflow/error.hpp"
#include "xflow/pipeline.hpp"
#include "xflow/synthetic.hpp"

#include <doctest.h>

using namespace xflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char *name) {
  auto dir = fs::temp_directory_path() / "xflow_pipeline_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("defaults") {
  PipelineConfig cfg;
  CHECK(cfg.context_size == 2);
  CHECK(cfg.context_type == ContextType::Xfg);
  CHECK(cfg.cutoff == 2);
  CHECK(cfg.subsample == 1e-4);
  CHECK(cfg.train.dim == 200);
  CHECK(cfg.train.epochs == 5);
  CHECK(cfg.train.alpha == 0.001);
  CHECK(cfg.train.beta1 == 0.9);
  CHECK(cfg.train.beta2 == 0.999);
  CHECK(cfg.train.epsilon == 1e-8);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("settings by key") {
  PipelineConfig cfg;
  cfg.set("context_type", "dfg");
  cfg.set("context_size", " 3 ");
  cfg.set("phi_label", "own-block");
  cfg.set("objective", "negative-sampling");
  cfg.set("export_mode", "extract_concat");
  CHECK(cfg.context_type == ContextType::Dfg);
  CHECK(cfg.context_size == 3);
  CHECK(cfg.phi_label == PhiLabelSource::OwnBlock);
  CHECK(cfg.train.objective == Objective::NegativeSampling);
  CHECK(cfg.layout.mode == ExportMode::ExtractConcat);
  CHECK_THROWS_AS(cfg.set("context_size", "two"), Error);
  CHECK_THROWS_AS(cfg.set("colour", "blue"), Error);
  CHECK_THROWS_AS(cfg.set("context_type", "ast"), Error);
  cfg.set("context_size", "0");
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("config file with comments") {
  auto dir = scratch_dir("cfg");
  auto path = dir / "run.cfg";
  std::ofstream(path) << "# experiment\n"
                         "cutoff = 300\n"
                         "\n"
                         "dim=16   # small\n";
  PipelineConfig cfg;
  cfg.load_file(path);
  CHECK(cfg.cutoff == 300);
  CHECK(cfg.train.dim == 16);
  std::ofstream(dir / "bad.cfg") << "cutoff 3\n";
  CHECK_THROWS_AS(cfg.load_file(dir / "bad.cfg"), Error);
  CHECK_THROWS_AS(cfg.load_file(dir / "missing.cfg"), Error);
}

TEST_CASE("stage hashes track exactly their settings") {
  PipelineConfig a, b;
  CHECK(a.corpus_hash() == b.corpus_hash());
  CHECK(a.corpus_hash().size() == 64);
  b.train.dim = 17;
  CHECK(a.corpus_hash() == b.corpus_hash());
  CHECK(a.train_hash() != b.train_hash());
  b.set("cutoff", "3");
  CHECK(a.corpus_hash() != b.corpus_hash());
  b = a;
  b.analogies_per_family = 5;
  b.jobs = 7;
  CHECK(a.train_hash() == b.train_hash());
}

TEST_CASE("inputs are collected recursively and sorted") {
  auto dir = scratch_dir("inputs");
  fs::create_directories(dir / "sub");
  for (auto name : {"b.ll", "a.ll", "sub/c.ll", "notes.txt"})
    std::ofstream(dir / name) << "\n";
  auto files = collect_inputs({dir});
  REQUIRE(files.size() == 3);
  CHECK(files[0].filename() == "a.ll");
  CHECK(files[1].filename() == "b.ll");
  CHECK(files[2].filename() == "c.ll");
  try {
    collect_inputs({dir / "nope"});
    FAIL("expected Io");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("parallel processing matches serial processing") {
  auto files = collect_inputs({test::data_dir() / "synthetic"});
  REQUIRE(files.size() == 50);
  files.resize(8);
  PipelineConfig serial;
  serial.jobs = 1;
  PipelineConfig parallel;
  parallel.jobs = 4;
  auto a = build_corpus(process_files(files, serial), serial);
  auto b = build_corpus(process_files(files, parallel), parallel);
  CHECK(a.vocab == b.vocab);
  CHECK(a.all_pairs == b.all_pairs);
  CHECK(a.pairs == b.pairs);
  CHECK(a.manifest.ir_lines == b.manifest.ir_lines);
}

TEST_CASE("a file that fails to parse keeps its diagnostics") {
  PipelineConfig cfg;
  auto fa = process_source("define void @f() {\n", "broken.ll", cfg);
  CHECK_FALSE(fa.module);
  CHECK_FALSE(fa.graph);
  CHECK(fa.diagnostics.fatal);
  auto ok = process_source(synthetic_module({.seed = 2}), "ok.ll", cfg);
  auto corpus = build_corpus({fa, ok}, cfg);
  CHECK(corpus.manifest.files == 1);
}

TEST_CASE("vocabulary does not depend on the context type") {
  auto src = synthetic_module({.seed = 6});
  std::vector<StmtVocab> vocabs;
  for (auto t : {ContextType::Xfg, ContextType::Cfg, ContextType::Dfg}) {
    PipelineConfig cfg;
    cfg.context_type = t;
    vocabs.push_back(build_corpus({process_source(src, "m.ll", cfg)}, cfg).vocab);
  }
  CHECK(vocabs[0] == vocabs[1]);
  CHECK(vocabs[0] == vocabs[2]);
}

TEST_CASE("corpus pairs and manifest") {
  PipelineConfig cfg;
  cfg.cutoff = 1;
  auto src = test::slurp(test::fixtures_dir() / "xfg/straight_line.ll");
  auto c = build_corpus({process_source(src, "s.ll", cfg)}, cfg);
  // Four distinct statements on a path: 2 * (3 + 2) ordered pairs at N = 2.
  CHECK(c.all_pairs.pairs.size() == 10);
  CHECK(c.manifest.statements.size() == 4);
  CHECK(c.manifest.ir_lines == 6);
  CHECK(c.vocab.size() == 5);
}

TEST_CASE("metadata sidecars round-trip") {
  auto dir = scratch_dir("meta");
  auto artifact = dir / "vocab.tsv";
  ArtifactMeta m{"vocab", "abc", {{"cutoff", "2"}}, {{"entries", "9"}}};
  write_meta(artifact, m);
  CHECK(fs::exists(dir / "vocab.tsv.meta.json"));
  CHECK(read_meta(artifact) == m);
  std::ofstream(sidecar_path(artifact)) << "{ not json";
  try {
    read_meta(artifact);
    FAIL("expected Io");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

} // TEST_SUITE
