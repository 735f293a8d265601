#include "gradcheck.hpp"

#include "xflow/error.hpp"
#include "xflow/trainer.hpp"

#include <doctest.h>

#include <cmath>

using namespace xflow;

TEST_SUITE("trainer") {

TEST_CASE("analytic gradients match central differences") {
  Rng rng(5);
  for (auto obj : {Objective::FullSoftmax, Objective::SampledSoftmax,
                   Objective::NegativeSampling}) {
    TrainConfig cfg;
    cfg.objective = obj;
    for (int trial = 0; trial < 20; ++trial) {
      auto V = static_cast<std::uint32_t>(2 + uniform_below(rng, 9));
      auto D = static_cast<std::uint32_t>(1 + uniform_below(rng, 8));
      auto inst = test::random_instance(rng, V, D, 3);
      NegativeSampler sampler(inst.counts);
      const NegativeSampler *sp =
          obj == Objective::SampledSoftmax && trial % 2 ? &sampler : nullptr;
      double err = test::max_relative_error(inst, cfg, sp);
      CHECK_MESSAGE(err < 1e-4, to_string(obj), " V=", V, " D=", D);
    }
  }
}

TEST_CASE("the five-token, seven-dimension case") {
  Rng rng(57);
  auto inst = test::random_instance(rng, 5, 7, 4);
  for (auto obj : {Objective::FullSoftmax, Objective::SampledSoftmax,
                   Objective::NegativeSampling}) {
    TrainConfig cfg;
    cfg.objective = obj;
    CHECK(test::max_relative_error(inst, cfg, nullptr) < 1e-4);
  }
}

TEST_CASE("uniform logits give ln 2 on two tokens") {
  SkipGramParams p = SkipGramParams::initialize(2, 3, 1);
  TrainConfig cfg;
  cfg.objective = Objective::FullSoftmax;
  auto lg = loss_and_gradient({{0, 1, {}}, {1, 0, {}}}, p, cfg);
  CHECK(lg.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("negative-sampling loss falls as the positive score grows") {
  SkipGramParams p;
  p.vocab = 2;
  p.dim = 1;
  p.in = {1.0, 0.0};
  p.out = {0.0, 0.0};
  TrainConfig cfg;
  cfg.objective = Objective::NegativeSampling;
  double prev = INFINITY;
  for (double s : {0.0, 1.0, 2.0, 5.0, 10.0, 30.0}) {
    p.out[1] = s;
    double loss = loss_and_gradient({{0, 1, {}}}, p, cfg).loss;
    CHECK(loss < prev);
    prev = loss;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("initialization is uniform in half a unit over D") {
  auto p = SkipGramParams::initialize(50, 8, 3);
  for (double x : p.in)
    CHECK(std::abs(x) <= 0.5 / 8);
  for (double x : p.out)
    CHECK(x == 0.0);
}

TEST_CASE("zero epochs reproduce the initialization") {
  TrainConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 0;
  cfg.seed = 12;
  auto r = train(std::vector<IdPair>{{1, 2}, {2, 1}}, {0, 3, 3}, cfg);
  auto p = SkipGramParams::initialize(3, 6, 12);
  REQUIRE(r.matrix.values.size() == p.in.size());
  for (std::size_t i = 0; i < p.in.size(); ++i)
    CHECK(r.matrix.values[i] == static_cast<float>(p.in[i]));
  CHECK(r.epoch_losses.empty());
}

TEST_CASE("two-token corpus: loss drops below the initial loss") {
  std::vector<IdPair> pairs;
  for (int i = 0; i < 200; ++i) {
    pairs.push_back({1, 2});
    pairs.push_back({2, 1});
  }
  for (auto obj : {Objective::FullSoftmax, Objective::NegativeSampling}) {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 5;
    cfg.batch = 16;
    cfg.alpha = 0.01;
    cfg.objective = obj;
    cfg.negatives = 2;
    auto r = train(pairs, {0, 200, 200, 1}, cfg);
    CHECK(r.epoch_losses.back() < r.initial_loss);
  }
}

// Input vectors align with the output vectors of their contexts, so two
// tokens meet only through a shared context (each of 1 and 2 sees only 3).
TEST_CASE("tokens sharing a context pull together") {
  std::vector<IdPair> pairs;
  for (int i = 0; i < 200; ++i)
    for (IdPair p : {IdPair{1, 3}, IdPair{3, 1}, IdPair{2, 3}, IdPair{3, 2}})
      pairs.push_back(p);
  for (auto obj : {Objective::FullSoftmax, Objective::NegativeSampling}) {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 5;
    cfg.batch = 16;
    cfg.alpha = 0.01;
    cfg.objective = obj;
    cfg.negatives = 2;
    // Slot 4 is a control that never appears in any pair.
    auto r = train(pairs, {0, 200, 200, 400, 1}, cfg);
    CHECK(r.epoch_losses.back() < r.initial_loss);
    auto cos12 = cosine(r.matrix.row(1), r.matrix.row(2));
    CHECK_MESSAGE(cos12 > cosine(r.matrix.row(1), r.matrix.row(4)), to_string(obj));
    CHECK_MESSAGE(cos12 > cosine(r.matrix.row(2), r.matrix.row(4)), to_string(obj));
  }
}

TEST_CASE("loss after one epoch is below the initial loss") {
  std::vector<IdPair> pairs;
  Rng rng(8);
  for (int i = 0; i < 600; ++i) {
    auto a = static_cast<std::uint32_t>(1 + uniform_below(rng, 6));
    pairs.push_back({a, a % 6 + 1});
  }
  for (auto obj : {Objective::FullSoftmax, Objective::SampledSoftmax,
                   Objective::NegativeSampling}) {
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 1;
    cfg.batch = 32;
    cfg.alpha = 0.01;
    cfg.objective = obj;
    cfg.negatives = 3;
    auto r = train(pairs, {0, 10, 10, 10, 10, 10, 10}, cfg);
    CHECK_MESSAGE(r.epoch_losses.at(0) < r.initial_loss, to_string(obj));
  }
}

TEST_CASE("single-threaded training is bit-exact") {
  std::vector<IdPair> pairs{{1, 2}, {2, 3}, {3, 1}, {1, 3}, {2, 1}};
  TrainConfig cfg;
  cfg.dim = 5;
  cfg.batch = 2;
  cfg.objective = Objective::NegativeSampling;
  auto a = train(pairs, {0, 4, 4, 4}, cfg);
  auto b = train(pairs, {0, 4, 4, 4}, cfg);
  CHECK(a.matrix == b.matrix);
  CHECK(a.step_losses == b.step_losses);
  cfg.seed = 2;
  CHECK_FALSE(train(pairs, {0, 4, 4, 4}, cfg).matrix == a.matrix);
}

TEST_CASE("bad ids, configs and divergence are reported") {
  TrainConfig cfg;
  cfg.dim = 2;
  try {
    train(std::vector<IdPair>{{0, 5}}, {1, 1}, cfg);
    FAIL("expected VocabMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::VocabMismatch);
  }
  cfg.objective = Objective::NegativeSampling;
  cfg.negatives = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);

  TrainConfig hot;
  hot.dim = 2;
  hot.alpha = std::numeric_limits<double>::infinity();
  try {
    train(std::vector<IdPair>{{1, 2}, {2, 1}}, {0, 1, 1}, hot);
    FAIL("expected NonFiniteLoss");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::NonFiniteLoss);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("negative sampler follows count^0.75") {
  NegativeSampler s({0, 1, 16});
  CHECK(s.probability(0) == 0.0);
  CHECK(s.probability(2) / s.probability(1) == doctest::Approx(8.0));
  Rng rng(1);
  auto draws = s.draw_excluding(rng, 200, 2);
  for (auto d : draws)
    CHECK(d == 1);
}

TEST_CASE("objective names") {
  for (auto o : {Objective::FullSoftmax, Objective::SampledSoftmax,
                 Objective::NegativeSampling})
    CHECK(objective_from_string(to_string(o)) == o);
}

} // TEST_SUITE
