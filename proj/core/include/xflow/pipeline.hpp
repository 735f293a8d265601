//===- xflow/pipeline.hpp - Corpus to embeddings orchestration --*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/dual_graph.hpp"
#include "xflow/eval.hpp"
#include "xflow/ncc_export.hpp"
#include "xflow/parser.hpp"
#include "xflow/trainer.hpp"
#include "xflow/vocab.hpp"
#include "xflow/xfg.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xflow {

struct PipelineConfig {
  int context_size = 2;
  ContextType context_type = ContextType::Xfg;
  std::uint64_t cutoff = 2;
  double subsample = 1e-4;
  std::uint64_t seed = 1;
  PhiLabelSource phi_label = PhiLabelSource::Predecessor;
  TrainConfig train;
  ExportLayout layout;
  std::size_t analogies_per_family = 1000;
  std::size_t distance_tests = 1000;
  /// File-level workers; 0 means one per hardware thread.
  unsigned jobs = 0;

  /// Applies one `key=value` setting. Throws Error(InvalidArgument) for
  /// unknown keys and malformed values.
  void set(std::string_view key, std::string_view value);
  /// Reads a flat `key=value` file; `#` starts a comment.
  void load_file(const std::filesystem::path &path);
  void validate() const;

  /// Canonical settings of the pair-producing stages, in key order.
  std::map<std::string, std::string> corpus_settings() const;
  /// Corpus settings plus the trainer's.
  std::map<std::string, std::string> train_settings() const;
  std::string corpus_hash() const;
  std::string train_hash() const;
};

unsigned effective_jobs(unsigned jobs) noexcept;

/// `.ll` files named directly or found (recursively) under directories,
/// sorted per argument. Throws Error(Io) for paths that do not exist.
std::vector<std::filesystem::path>
collect_inputs(const std::vector<std::filesystem::path> &inputs);

/// Everything derived from one IR file.
struct FileArtifacts {
  std::filesystem::path path;
  std::size_t ir_lines = 0;
  ParseDiagnostics diagnostics;
  /// Null when parsing failed; the graph refers into it.
  std::shared_ptr<const IrModule> module;
  std::optional<Xfg> xfg;
  /// Dual graph restricted to the configured context type.
  std::optional<StatementGraph> graph;
  std::vector<IdPair> node_pairs;
};

FileArtifacts process_source(std::string_view source, std::string path,
                             const PipelineConfig &cfg);
/// Throws Error(Io) when the file cannot be read.
FileArtifacts process_file(const std::filesystem::path &path,
                           const PipelineConfig &cfg);

/// Runs `process_file` over `files` on up to `cfg.jobs` threads; results
/// keep the input order.
std::vector<FileArtifacts>
process_files(const std::vector<std::filesystem::path> &files,
              const PipelineConfig &cfg);

struct Corpus {
  StmtVocab vocab;
  /// Before subsampling.
  PairStream all_pairs;
  PairStream pairs;
  SourceManifest manifest;
};

/// Counts statements of every parsed file (regardless of context type),
/// builds the vocabulary, maps and subsamples the pairs. Files whose parse
/// failed are skipped.
Corpus build_corpus(const std::vector<FileArtifacts> &files,
                    const PipelineConfig &cfg, std::string source_name = "corpus");

EvalReport evaluate(const StmtVocab &vocab, const EmbeddingMatrix &m,
                    const PipelineConfig &cfg);

/// Sidecar next to an artifact: `<path>.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path &artifact);

struct ArtifactMeta {
  std::string kind;
  std::string config_hash;
  std::map<std::string, std::string> settings;
  /// Hex digests and counts describing the artifact and its inputs.
  std::map<std::string, std::string> facts;

  friend bool operator==(const ArtifactMeta &, const ArtifactMeta &) = default;
};

void write_meta(const std::filesystem::path &artifact, const ArtifactMeta &meta);
/// Throws Error(Io) when the sidecar is missing or malformed.
ArtifactMeta read_meta(const std::filesystem::path &artifact);

} // namespace xflow
