//===- xflow_synth.cpp - Synthetic IR corpus generator ---------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

bool write(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "xflow-synth: cannot write " << p.string() << "\n";
    return false;
  }
  return true;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Generate synthetic LLVM IR for tests and benchmarks"};
  app.require_subcommand(1);

  std::string out;
  std::uint64_t seed = 1;
  std::size_t files = 50, functions = 12, statements = 100000, ops = 8;

  auto *corpus = app.add_subcommand("corpus", "A directory of small modules");
  corpus->add_option("-o,--out", out, "Output directory")->required();
  corpus->add_option("--files", files, "Number of modules")->capture_default_str();
  corpus->add_option("--functions", functions, "Functions per module")
      ->capture_default_str();
  corpus->add_option("--seed", seed, "Seed of the first module")
      ->capture_default_str();

  auto *sized = app.add_subcommand("sized", "One module of about N statements");
  sized->add_option("-o,--out", out, "Output file")->required();
  sized->add_option("--statements", statements, "Statement count")
      ->capture_default_str();
  sized->add_option("--seed", seed, "Seed")->capture_default_str();

  auto *fam = app.add_subcommand("families", "Two disjoint statement families");
  fam->add_option("-o,--out", out, "Output file")->required();
  fam->add_option("--functions", functions, "Functions")->capture_default_str();
  fam->add_option("--ops", ops, "Statements per function")->capture_default_str();
  fam->add_option("--seed", seed, "Seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (corpus->parsed()) {
    std::error_code ec;
    fs::create_directories(out, ec);
    for (std::size_t i = 0; i < files; ++i) {
      xflow::SynthOptions o;
      o.seed = seed + i;
      o.functions = functions;
      if (!write(fs::path(out) / fmt::format("prog{:03}.ll", i),
                 xflow::synthetic_module(o)))
        return 2;
    }
  } else if (sized->parsed()) {
    if (!write(out, xflow::synthetic_module_of_size(statements, seed)))
      return 2;
  } else if (fam->parsed()) {
    if (!write(out, xflow::two_family_module(seed, functions, ops)))
      return 2;
  }
  return 0;
}
