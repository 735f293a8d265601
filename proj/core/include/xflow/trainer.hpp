//===- xflow/trainer.hpp - Skip-gram statement embeddings -------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "xflow/embedding.hpp"
#include "xflow/random.hpp"
#include "xflow/vocab.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace xflow {

enum class Objective { FullSoftmax, SampledSoftmax, NegativeSampling };

std::string_view to_string(Objective o) noexcept;
std::optional<Objective> objective_from_string(std::string_view s);

struct TrainConfig {
  std::uint32_t dim = 200;
  std::uint32_t epochs = 5;
  Objective objective = Objective::FullSoftmax;
  std::uint32_t negatives = 5;
  std::uint32_t batch = 512;
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  /// Workers computing partial gradients of a batch. With more than one,
  /// the summation order varies and results are reproducible only in
  /// expectation.
  unsigned threads = 1;

  /// Throws Error(InvalidArgument) when inconsistent.
  void validate() const;
};

/// Input (published) and output vector tables, |V| x D each.
struct SkipGramParams {
  std::uint32_t vocab = 0;
  std::uint32_t dim = 0;
  std::vector<double> in;
  std::vector<double> out;

  /// Input table uniform in [-0.5/D, 0.5/D], output table zero.
  static SkipGramParams initialize(std::uint32_t vocab, std::uint32_t dim,
                                   std::uint64_t seed);
};

struct Example {
  std::uint32_t target = 0;
  std::uint32_t context = 0;
  /// Sampled ids for the sampled objectives; ignored by full softmax.
  std::vector<std::uint32_t> negatives;
};

struct LossAndGradient {
  double loss = 0; // mean over the batch
  std::vector<double> grad_in;
  std::vector<double> grad_out;
};

/// Draws ids proportionally to count^0.75 (the unknown token included when
/// it has occurrences).
class NegativeSampler {
public:
  explicit NegativeSampler(const std::vector<std::uint64_t> &counts);
  std::uint32_t draw(Rng &rng) const;
  /// Sampling probability of `id`.
  double probability(std::uint32_t id) const { return prob_.at(id); }
  /// `k` draws, none equal to `exclude` (when another id has mass).
  std::vector<std::uint32_t> draw_excluding(Rng &rng, std::uint32_t k,
                                            std::uint32_t exclude) const;

private:
  std::vector<double> cumulative_;
  std::vector<double> prob_;
};

/// Analytic loss and gradient of the configured objective. For sampled
/// softmax, `sampler` supplies the log-probability correction of the
/// sampled logits; without it the proposal is taken as uniform.
LossAndGradient loss_and_gradient(const std::vector<Example> &batch,
                                  const SkipGramParams &params,
                                  const TrainConfig &cfg,
                                  const NegativeSampler *sampler = nullptr);

struct TrainResult {
  EmbeddingMatrix matrix;
  /// Mean loss over the whole stream before the first update.
  double initial_loss = 0;
  std::vector<double> epoch_losses;
  std::vector<double> step_losses;
};

using StepCallback =
    std::function<void(std::size_t step, std::uint32_t epoch, double loss)>;

/// Throws VocabMismatch for ids outside the vocabulary and NonFiniteLoss
/// (naming the step) when training diverges.
TrainResult train(const PairStream &pairs, const StmtVocab &vocab,
                  const TrainConfig &cfg, const StepCallback &on_step = {});

/// Same, for callers that only have counts (tests and benchmarks).
TrainResult train(const std::vector<IdPair> &pairs,
                  const std::vector<std::uint64_t> &counts,
                  const TrainConfig &cfg, const StepCallback &on_step = {});

} // namespace xflow
