//===- xflow/ncc_export.hpp - Embedded program sequences --------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Per-program statement sequences, embedded with a trained matrix, with the
// stripped immediate values reattached in one of four layouts. Records are
// meant for an external sequence model.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/embedding.hpp"
#include "xflow/normalizer.hpp"
#include "xflow/vocab.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xflow {

enum class ExportMode : std::uint8_t {
  Ignore = 0,
  ConcatNaive = 1,
  /// Same payload as ConcatNaive; tells the consumer to project each step
  /// back to the embedding dimension.
  ConcatEmbed = 2,
  ExtractConcat = 3,
};

std::string_view to_string(ExportMode m) noexcept;
std::optional<ExportMode> export_mode_from_string(std::string_view s);

struct ExportLayout {
  ExportMode mode = ExportMode::Ignore;
  std::uint32_t imm_width = 4;
  float pad = 0.0f;
};

struct ProgramSequence {
  std::vector<std::uint32_t> stmt_ids;
  std::vector<std::vector<Immediate>> immediates;
  /// Program-level scalars such as data or work-group sizes.
  std::vector<float> aux;
};

/// Statements in textual order, mapped through the vocabulary.
ProgramSequence program_sequence(const NormalizedModule &module,
                                 const StmtVocab &vocab);

/// Numeric value of an immediate. Strings become their byte length; hex
/// floating literals are decoded from their bit pattern.
float immediate_value(const Immediate &imm);

struct ProgramRecord {
  ExportMode mode = ExportMode::Ignore;
  std::uint32_t imm_width = 0;
  std::uint32_t length = 0;
  /// length x (D + imm_width) row-major; imm_width is 0 for Ignore and
  /// ExtractConcat.
  std::vector<float> steps;
  /// ExtractConcat only: all immediates in order, and the index of the
  /// first immediate of each step.
  std::vector<float> imm_values;
  std::vector<std::uint32_t> imm_offsets;
  std::vector<float> aux;

  friend bool operator==(const ProgramRecord &, const ProgramRecord &) = default;
};

/// Throws VocabMismatch for ids outside the matrix. Statements with more
/// immediates than slots are truncated and reported in `warnings`.
ProgramRecord export_program(const ProgramSequence &seq,
                             const EmbeddingMatrix &m,
                             const ExportLayout &layout,
                             std::vector<std::string> *warnings = nullptr);

/// `NCCX1`, u32 D, then per program: u32 length, u8 mode, u32 imm_width,
/// the step matrix, the immediate channel (ExtractConcat only) and u32
/// count plus f32 auxiliary values.
struct RecordFile {
  std::uint32_t dim = 0;
  std::vector<ProgramRecord> programs;

  friend bool operator==(const RecordFile &, const RecordFile &) = default;
};

std::string serialize(const RecordFile &f);
/// Throws BadMagic or TruncatedFile.
RecordFile parse_records(std::string_view data);
void save(const RecordFile &f, const std::filesystem::path &path);
RecordFile load_records(const std::filesystem::path &path);

/// `program<TAB>label` lines, in record order.
std::string manifest_tsv(
    const std::vector<std::pair<std::string, std::string>> &entries);

} // namespace xflow
