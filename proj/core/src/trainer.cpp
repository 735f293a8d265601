//===- trainer.cpp - Skip-gram statement embeddings ------------------------===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "xflow/trainer.hpp"

#include "xflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace xflow {

std::string_view to_string(Objective o) noexcept {
  switch (o) {
  case Objective::FullSoftmax:
    return "full-softmax";
  case Objective::SampledSoftmax:
    return "sampled-softmax";
  case Objective::NegativeSampling:
    return "negative-sampling";
  }
  return "?";
}

std::optional<Objective> objective_from_string(std::string_view s) {
  for (auto o : {Objective::FullSoftmax, Objective::SampledSoftmax,
                 Objective::NegativeSampling})
    if (to_string(o) == s)
      return o;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (dim == 0)
    throw Error(ErrorCode::InvalidArgument, "embedding dimension must be > 0");
  if (batch == 0)
    throw Error(ErrorCode::InvalidArgument, "batch size must be > 0");
  if (objective != Objective::FullSoftmax && negatives < 1)
    throw Error(ErrorCode::InvalidArgument,
                "sampled objectives need at least one negative");
  if (!(alpha > 0) || !(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) ||
      !(epsilon > 0))
    throw Error(ErrorCode::InvalidArgument, "invalid Adam hyperparameters");
  if (threads == 0)
    throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
}

SkipGramParams SkipGramParams::initialize(std::uint32_t vocab,
                                          std::uint32_t dim,
                                          std::uint64_t seed) {
  SkipGramParams p;
  p.vocab = vocab;
  p.dim = dim;
  const std::size_t n = std::size_t{vocab} * dim;
  p.in.resize(n);
  p.out.assign(n, 0.0);
  Rng rng(seed);
  const double half = 0.5 / dim;
  for (auto &x : p.in)
    x = (2.0 * uniform01(rng) - 1.0) * half;
  return p;
}

NegativeSampler::NegativeSampler(const std::vector<std::uint64_t> &counts) {
  prob_.resize(counts.size());
  double total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    total += prob_[i] = std::pow(static_cast<double>(counts[i]), 0.75);
  if (total == 0) {
    std::fill(prob_.begin(), prob_.end(), 1.0);
    total = static_cast<double>(prob_.size());
  }
  cumulative_.resize(prob_.size());
  double acc = 0;
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    prob_[i] /= total;
    acc += prob_[i];
    cumulative_[i] = acc;
  }
}

std::uint32_t NegativeSampler::draw(Rng &rng) const {
  double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= cumulative_.size())
    i = cumulative_.size() - 1;
  // Skip zero-mass ids that upper_bound can land on at range ends.
  while (i + 1 < prob_.size() && prob_[i] == 0)
    ++i;
  return static_cast<std::uint32_t>(i);
}

std::vector<std::uint32_t>
NegativeSampler::draw_excluding(Rng &rng, std::uint32_t k,
                                std::uint32_t exclude) const {
  const bool others = exclude >= prob_.size() || prob_[exclude] < 1.0;
  std::vector<std::uint32_t> out;
  out.reserve(k);
  while (out.size() < k) {
    std::uint32_t id = draw(rng);
    for (int tries = 0; others && id == exclude && tries < 64; ++tries)
      id = draw(rng);
    out.push_back(id);
  }
  return out;
}

namespace {

double dot(const double *a, const double *b, std::uint32_t d) {
  double s = 0;
  for (std::uint32_t i = 0; i < d; ++i)
    s += a[i] * b[i];
  return s;
}

void axpy(double a, const double *x, double *y, std::uint32_t d) {
  for (std::uint32_t i = 0; i < d; ++i)
    y[i] += a * x[i];
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0)
    return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Adds the un-normalized loss and gradient of one example.
double accumulate(const Example &ex, const SkipGramParams &p,
                  const TrainConfig &cfg, const NegativeSampler *sampler,
                  double *gin, double *gout, std::vector<double> &scratch) {
  const std::uint32_t D = p.dim;
  const double *h = &p.in[std::size_t{ex.target} * D];
  double *gh = gin + std::size_t{ex.target} * D;
  auto out_row = [&](std::uint32_t j) { return &p.out[std::size_t{j} * D]; };
  auto gout_row = [&](std::uint32_t j) { return gout + std::size_t{j} * D; };

  switch (cfg.objective) {
  case Objective::FullSoftmax: {
    scratch.resize(p.vocab);
    double m = -INFINITY;
    for (std::uint32_t j = 0; j < p.vocab; ++j) {
      scratch[j] = dot(out_row(j), h, D);
      m = std::max(m, scratch[j]);
    }
    double z = 0;
    for (std::uint32_t j = 0; j < p.vocab; ++j)
      z += std::exp(scratch[j] - m);
    const double lse = m + std::log(z);
    const double loss = lse - scratch[ex.context];
    for (std::uint32_t j = 0; j < p.vocab; ++j) {
      double g = std::exp(scratch[j] - lse) - (j == ex.context ? 1.0 : 0.0);
      axpy(g, h, gout_row(j), D);
      axpy(g, out_row(j), gh, D);
    }
    return loss;
  }
  case Objective::SampledSoftmax: {
    // Candidates: the true context followed by the non-colliding samples.
    const std::size_t k = ex.negatives.size();
    scratch.clear();
    std::vector<std::uint32_t> cand;
    cand.reserve(k + 1);
    cand.push_back(ex.context);
    for (auto n : ex.negatives)
      if (n != ex.context)
        cand.push_back(n);
    double m = -INFINITY;
    for (auto j : cand) {
      double logit = dot(out_row(j), h, D);
      if (sampler) {
        double q = sampler->probability(j) * static_cast<double>(k);
        logit -= std::log(std::max(q, 1e-300));
      }
      scratch.push_back(logit);
      m = std::max(m, logit);
    }
    double z = 0;
    for (double s : scratch)
      z += std::exp(s - m);
    const double lse = m + std::log(z);
    const double loss = lse - scratch[0];
    for (std::size_t i = 0; i < cand.size(); ++i) {
      double g = std::exp(scratch[i] - lse) - (i == 0 ? 1.0 : 0.0);
      axpy(g, h, gout_row(cand[i]), D);
      axpy(g, out_row(cand[i]), gh, D);
    }
    return loss;
  }
  case Objective::NegativeSampling: {
    double s = dot(out_row(ex.context), h, D);
    double loss = -log_sigmoid(s);
    double g = sigmoid(s) - 1.0;
    axpy(g, h, gout_row(ex.context), D);
    axpy(g, out_row(ex.context), gh, D);
    for (auto n : ex.negatives) {
      if (n == ex.context)
        continue;
      double sn = dot(out_row(n), h, D);
      loss -= log_sigmoid(-sn);
      double gn = sigmoid(sn);
      axpy(gn, h, gout_row(n), D);
      axpy(gn, out_row(n), gh, D);
    }
    return loss;
  }
  }
  return 0;
}

LossAndGradient compute(const std::vector<Example> &batch,
                        const SkipGramParams &p, const TrainConfig &cfg,
                        const NegativeSampler *sampler) {
  if (batch.empty())
    throw Error(ErrorCode::InvalidArgument, "empty batch");
  const std::size_t n = std::size_t{p.vocab} * p.dim;
  LossAndGradient r;
  r.grad_in.assign(n, 0.0);
  r.grad_out.assign(n, 0.0);
  const unsigned workers =
      std::min<unsigned>(cfg.threads, static_cast<unsigned>(batch.size()));
  if (workers <= 1) {
    std::vector<double> scratch;
    for (const auto &ex : batch)
      r.loss += accumulate(ex, p, cfg, sampler, r.grad_in.data(),
                           r.grad_out.data(), scratch);
  } else {
    std::mutex mu;
    std::vector<std::thread> pool;
    const std::size_t chunk = (batch.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::vector<double> gin(n, 0.0), gout(n, 0.0), scratch;
        double loss = 0;
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(batch.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i)
          loss += accumulate(batch[i], p, cfg, sampler, gin.data(),
                             gout.data(), scratch);
        std::lock_guard<std::mutex> lock(mu);
        r.loss += loss;
        for (std::size_t i = 0; i < n; ++i) {
          r.grad_in[i] += gin[i];
          r.grad_out[i] += gout[i];
        }
      });
    }
    for (auto &t : pool)
      t.join();
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  r.loss *= inv;
  for (auto &g : r.grad_in)
    g *= inv;
  for (auto &g : r.grad_out)
    g *= inv;
  return r;
}

class Adam {
public:
  Adam(std::size_t n, const TrainConfig &cfg)
      : cfg_(cfg), m_in_(n), v_in_(n), m_out_(n), v_out_(n) {}

  void step(SkipGramParams &p, const LossAndGradient &g) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    update(p.in, g.grad_in, m_in_, v_in_, c1, c2);
    update(p.out, g.grad_out, m_out_, v_out_, c1, c2);
  }

private:
  void update(std::vector<double> &w, const std::vector<double> &g,
              std::vector<double> &m, std::vector<double> &v, double c1,
              double c2) const {
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      w[i] -= cfg_.alpha * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
    }
  }

  const TrainConfig &cfg_;
  std::vector<double> m_in_, v_in_, m_out_, v_out_;
  std::uint64_t t_ = 0;
};

void fill_batch(std::vector<Example> &batch, const std::vector<IdPair> &pairs,
                const std::vector<std::size_t> &order, std::size_t lo,
                std::size_t hi, const TrainConfig &cfg,
                const NegativeSampler &sampler, Rng &rng) {
  batch.resize(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    auto &ex = batch[i - lo];
    const auto &pr = pairs[order[i]];
    ex.target = pr.first;
    ex.context = pr.second;
    if (cfg.objective == Objective::FullSoftmax)
      ex.negatives.clear();
    else
      ex.negatives = sampler.draw_excluding(rng, cfg.negatives, pr.second);
  }
}

EmbeddingMatrix to_matrix(const SkipGramParams &p) {
  EmbeddingMatrix m(p.vocab, p.dim);
  for (std::size_t i = 0; i < p.in.size(); ++i)
    m.values[i] = static_cast<float>(p.in[i]);
  return m;
}

} // namespace

LossAndGradient loss_and_gradient(const std::vector<Example> &batch,
                                  const SkipGramParams &params,
                                  const TrainConfig &cfg,
                                  const NegativeSampler *sampler) {
  return compute(batch, params, cfg, sampler);
}

TrainResult train(const std::vector<IdPair> &pairs,
                  const std::vector<std::uint64_t> &counts,
                  const TrainConfig &cfg, const StepCallback &on_step) {
  cfg.validate();
  const auto V = static_cast<std::uint32_t>(counts.size());
  if (V == 0)
    throw Error(ErrorCode::EmptyVocab, "cannot train on an empty vocabulary");
  for (const auto &[a, b] : pairs)
    if (a >= V || b >= V)
      throw Error(ErrorCode::VocabMismatch,
                  fmt::format("pair ({}, {}) is outside a vocabulary of {}", a,
                              b, V));

  SkipGramParams params = SkipGramParams::initialize(V, cfg.dim, cfg.seed);
  Rng rng(cfg.seed + 0x2545f4914f6cdd1dULL);
  NegativeSampler sampler(counts);
  TrainResult result;

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  const NegativeSampler *sp =
      cfg.objective == Objective::SampledSoftmax ? &sampler : nullptr;

  if (!pairs.empty()) {
    // Separate stream so the training draws do not depend on this pass.
    Rng eval_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    double total = 0;
    for (std::size_t lo = 0; lo < pairs.size(); lo += cfg.batch) {
      std::size_t hi = std::min(pairs.size(), lo + cfg.batch);
      fill_batch(batch, pairs, order, lo, hi, cfg, sampler, eval_rng);
      total += compute(batch, params, cfg, sp).loss *
               static_cast<double>(hi - lo);
    }
    result.initial_loss = total / static_cast<double>(pairs.size());
  }

  Adam adam(params.in.size(), cfg);
  std::size_t step = 0;
  for (std::uint32_t epoch = 0; epoch < cfg.epochs && !pairs.empty();
       ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t lo = 0; lo < pairs.size(); lo += cfg.batch) {
      std::size_t hi = std::min(pairs.size(), lo + cfg.batch);
      fill_batch(batch, pairs, order, lo, hi, cfg, sampler, rng);
      auto lg = compute(batch, params, cfg, sp);
      if (!std::isfinite(lg.loss))
        throw Error(ErrorCode::NonFiniteLoss,
                    fmt::format("loss became non-finite at step {}", step));
      adam.step(params, lg);
      result.step_losses.push_back(lg.loss);
      if (on_step)
        on_step(step, epoch, lg.loss);
      total += lg.loss * static_cast<double>(hi - lo);
      ++step;
    }
    result.epoch_losses.push_back(total / static_cast<double>(pairs.size()));
  }

  result.matrix = to_matrix(params);
  auto &meta = result.matrix.meta;
  meta["epochs"] = std::to_string(cfg.epochs);
  meta["dim"] = std::to_string(cfg.dim);
  meta["objective"] = std::string(to_string(cfg.objective));
  meta["fidelity"] = cfg.objective == Objective::FullSoftmax
                         ? "exact softmax"
                         : "sampled approximation";
  meta["negatives"] = std::to_string(cfg.negatives);
  meta["batch"] = std::to_string(cfg.batch);
  meta["seed"] = std::to_string(cfg.seed);
  meta["alpha"] = fmt::format("{}", cfg.alpha);
  meta["threads"] = std::to_string(cfg.threads);
  return result;
}

TrainResult train(const PairStream &pairs, const StmtVocab &vocab,
                  const TrainConfig &cfg, const StepCallback &on_step) {
  std::vector<std::uint64_t> counts(vocab.size());
  for (std::uint32_t i = 0; i < vocab.size(); ++i)
    counts[i] = vocab.count(i);
  auto r = train(pairs.pairs, counts, cfg, on_step);
  r.matrix.vocab_hash = vocab.hash();
  return r;
}

} // namespace xflow
