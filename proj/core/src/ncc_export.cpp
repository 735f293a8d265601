//===- ncc_export.cpp - Embedded program sequences -------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/ncc_export.hpp"

#include "binary_io.hpp"
#include "xflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace xflow {
namespace {

constexpr std::string_view kMagic = "NCCX1";

int hex_digit(char c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  return -1;
}

std::optional<std::uint64_t> parse_hex(std::string_view s) {
  if (s.empty() || s.size() > 16)
    return std::nullopt;
  std::uint64_t v = 0;
  for (char c : s) {
    int d = hex_digit(c);
    if (d < 0)
      return std::nullopt;
    v = v << 4 | static_cast<std::uint64_t>(d);
  }
  return v;
}

float half_to_float(std::uint16_t h) {
  int exp = (h >> 10) & 0x1f;
  int mant = h & 0x3ff;
  double v;
  if (exp == 0)
    v = std::ldexp(mant, -24);
  else if (exp == 31)
    v = mant ? NAN : INFINITY;
  else
    v = std::ldexp(mant | 0x400, exp - 25);
  return static_cast<float>((h & 0x8000) ? -v : v);
}

// LLVM prints doubles and floats as `0x` + 16 hex digits of the double bit
// pattern; `0xH` is half. The extended formats (K, L, M, R) export as 0.
float hex_float(std::string_view lit) {
  auto body = lit.substr(2);
  if (!body.empty() && std::isupper(static_cast<unsigned char>(body[0])) &&
      hex_digit(body[0]) < 0) {
    char kind = body[0];
    auto bits = parse_hex(body.substr(1));
    if (kind == 'H' && bits)
      return half_to_float(static_cast<std::uint16_t>(*bits));
    return 0.0f;
  }
  auto bits = parse_hex(body);
  if (!bits)
    return 0.0f;
  return static_cast<float>(std::bit_cast<double>(*bits));
}

// Byte length of a quoted IR string, `\XX` escapes counting as one byte.
float string_length(std::string_view lit) {
  auto open = lit.find('"');
  auto close = lit.rfind('"');
  if (open == std::string_view::npos || close <= open)
    return static_cast<float>(lit.size());
  auto body = lit.substr(open + 1, close - open - 1);
  std::size_t n = 0;
  for (std::size_t i = 0; i < body.size(); ++n) {
    if (body[i] == '\\' && i + 2 < body.size() &&
        hex_digit(body[i + 1]) >= 0 && hex_digit(body[i + 2]) >= 0)
      i += 3;
    else if (body[i] == '\\' && i + 1 < body.size() && body[i + 1] == '\\')
      i += 2;
    else
      i += 1;
  }
  return static_cast<float>(n);
}

void check_id(std::uint32_t id, const EmbeddingMatrix &m) {
  if (id >= m.rows)
    throw Error(ErrorCode::VocabMismatch,
                fmt::format("statement id {} is outside a matrix of {} rows",
                            id, m.rows));
}

void put_floats(std::string &out, const std::vector<float> &v) {
  out.append(reinterpret_cast<const char *>(v.data()), v.size() * 4);
}

std::vector<float> take_floats(detail::Reader &r, std::uint64_t n) {
  if (n * 4 > r.remaining())
    throw Error(ErrorCode::TruncatedFile,
                fmt::format("{}: payload ends early", r.what()));
  std::vector<float> v(n);
  auto bytes = r.take(n * 4);
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

} // namespace

std::string_view to_string(ExportMode m) noexcept {
  switch (m) {
  case ExportMode::Ignore:
    return "ignore";
  case ExportMode::ConcatNaive:
    return "concat_naive";
  case ExportMode::ConcatEmbed:
    return "concat_embed";
  case ExportMode::ExtractConcat:
    return "extract_concat";
  }
  return "?";
}

std::optional<ExportMode> export_mode_from_string(std::string_view s) {
  for (auto m : {ExportMode::Ignore, ExportMode::ConcatNaive,
                 ExportMode::ConcatEmbed, ExportMode::ExtractConcat})
    if (to_string(m) == s)
      return m;
  return std::nullopt;
}

ProgramSequence program_sequence(const NormalizedModule &module,
                                 const StmtVocab &vocab) {
  ProgramSequence seq;
  for (const auto &st : module.statements()) {
    seq.stmt_ids.push_back(vocab.id(st.text));
    seq.immediates.push_back(st.immediates);
  }
  return seq;
}

float immediate_value(const Immediate &imm) {
  std::string_view lit = imm.literal;
  switch (imm.kind) {
  case ImmKind::String:
    return string_length(lit);
  case ImmKind::Float:
    if (lit.size() > 2 && lit[0] == '0' && (lit[1] == 'x' || lit[1] == 'X'))
      return hex_float(lit);
    return std::strtof(imm.literal.c_str(), nullptr);
  case ImmKind::Int:
    return static_cast<float>(std::strtod(imm.literal.c_str(), nullptr));
  }
  return 0.0f;
}

ProgramRecord export_program(const ProgramSequence &seq,
                             const EmbeddingMatrix &m,
                             const ExportLayout &layout,
                             std::vector<std::string> *warnings) {
  if (seq.immediates.size() != seq.stmt_ids.size())
    throw Error(ErrorCode::InvalidArgument,
                "program has a different number of statements and immediate "
                "lists");
  ProgramRecord rec;
  rec.mode = layout.mode;
  rec.length = static_cast<std::uint32_t>(seq.stmt_ids.size());
  rec.aux = seq.aux;
  const bool inline_imm = layout.mode == ExportMode::ConcatNaive ||
                          layout.mode == ExportMode::ConcatEmbed;
  rec.imm_width = inline_imm ? layout.imm_width : 0;
  const std::size_t width = m.dim + rec.imm_width;
  rec.steps.reserve(rec.length * width);

  for (std::size_t i = 0; i < seq.stmt_ids.size(); ++i) {
    auto id = seq.stmt_ids[i];
    check_id(id, m);
    auto row = m.row(id);
    rec.steps.insert(rec.steps.end(), row.begin(), row.end());
    const auto &imms = seq.immediates[i];
    if (inline_imm) {
      if (imms.size() > rec.imm_width && warnings)
        warnings->push_back(fmt::format(
            "TruncatedImmediates: statement {} has {} immediates, {} slots", i,
            imms.size(), rec.imm_width));
      for (std::uint32_t s = 0; s < rec.imm_width; ++s)
        rec.steps.push_back(s < imms.size() ? immediate_value(imms[s])
                                            : layout.pad);
    } else if (layout.mode == ExportMode::ExtractConcat) {
      rec.imm_offsets.push_back(static_cast<std::uint32_t>(rec.imm_values.size()));
      for (const auto &imm : imms)
        rec.imm_values.push_back(immediate_value(imm));
    }
  }
  return rec;
}

std::string serialize(const RecordFile &f) {
  std::string out(kMagic);
  detail::put_u32(out, f.dim);
  for (const auto &p : f.programs) {
    const std::size_t width = std::size_t{f.dim} + p.imm_width;
    if (p.steps.size() != p.length * width)
      throw Error(ErrorCode::InvalidArgument,
                  "program record shape does not match its data");
    detail::put_u32(out, p.length);
    detail::put_u8(out, static_cast<std::uint8_t>(p.mode));
    detail::put_u32(out, p.imm_width);
    put_floats(out, p.steps);
    if (p.mode == ExportMode::ExtractConcat) {
      if (p.imm_offsets.size() != p.length)
        throw Error(ErrorCode::InvalidArgument,
                    "immediate offsets do not match the program length");
      detail::put_u32(out, static_cast<std::uint32_t>(p.imm_values.size()));
      put_floats(out, p.imm_values);
      for (auto o : p.imm_offsets)
        detail::put_u32(out, o);
    }
    detail::put_u32(out, static_cast<std::uint32_t>(p.aux.size()));
    put_floats(out, p.aux);
  }
  return out;
}

RecordFile parse_records(std::string_view data) {
  detail::Reader r(data, "record file");
  if (data.size() < kMagic.size())
    throw Error(ErrorCode::TruncatedFile, "record file: header is incomplete");
  if (r.take(kMagic.size()) != kMagic)
    throw Error(ErrorCode::BadMagic, "record file: bad magic");
  RecordFile f;
  f.dim = r.u32();
  while (!r.done()) {
    ProgramRecord p;
    p.length = r.u32();
    auto mode = r.u8();
    if (mode > static_cast<std::uint8_t>(ExportMode::ExtractConcat))
      throw Error(ErrorCode::BadMagic,
                  fmt::format("record file: unknown layout {}", mode));
    p.mode = static_cast<ExportMode>(mode);
    p.imm_width = r.u32();
    p.steps = take_floats(r, std::uint64_t{p.length} *
                                 (std::uint64_t{f.dim} + p.imm_width));
    if (p.mode == ExportMode::ExtractConcat) {
      p.imm_values = take_floats(r, r.u32());
      p.imm_offsets.reserve(p.length);
      for (std::uint32_t i = 0; i < p.length; ++i)
        p.imm_offsets.push_back(r.u32());
    }
    p.aux = take_floats(r, r.u32());
    f.programs.push_back(std::move(p));
  }
  return f;
}

void save(const RecordFile &f, const std::filesystem::path &path) {
  detail::write_file(path, serialize(f));
}

RecordFile load_records(const std::filesystem::path &path) {
  return parse_records(detail::read_file(path));
}

std::string manifest_tsv(
    const std::vector<std::pair<std::string, std::string>> &entries) {
  std::string out;
  for (const auto &[program, label] : entries)
    out += program + "\t" + label + "\n";
  return out;
}

} // namespace xflow
