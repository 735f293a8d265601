//===- xflow/synthetic.hpp - Synthetic LLVM IR generator --------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Small random programs in LLVM IR text form, for tests and benchmarks. The
// output is shaped like clang -O0/-O1 output (typed pointers, named struct
// types, loops with phis, internal and external calls) but is not meant to
// be compiled.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace xflow {

struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t functions = 12;
  std::size_t min_ops = 4;
  std::size_t max_ops = 12;
  /// Prepended to every global and function name, so that several modules
  /// can be concatenated into one file.
  std::string prefix;
  /// Emit the shared declarations (types, globals, external functions).
  bool preamble = true;
};

std::string synthetic_module(const SynthOptions &opts);

/// A module of roughly `statements` statements, for scaling measurements.
std::string synthetic_module_of_size(std::size_t statements, std::uint64_t seed,
                                     const std::string &prefix = {},
                                     bool preamble = true);

/// Straight-line functions alternating between an i32 family and a double
/// family; no statement text is shared between the two.
std::string two_family_module(std::uint64_t seed, std::size_t functions,
                              std::size_t ops);

} // namespace xflow
