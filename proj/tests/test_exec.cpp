#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/exec/logit.hpp"
#include "cohortsim/exec/markov.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/util/errors.hpp"

using namespace cohortsim;

namespace {

using Sequences = std::vector<std::vector<std::string>>;

data::ColumnSchema cont_col(std::string name) {
  return data::ColumnSchema{std::move(name), data::ColumnKind::kContinuous, {}};
}

data::ColumnSchema cat_col(std::string name, std::vector<std::string> labels) {
  return data::ColumnSchema{std::move(name), data::ColumnKind::kCategorical,
                            std::move(labels)};
}

// Binary-target dataset y ~ logit(b0 + b1*x1 + b2*x2) with x ~ N(0,1).
data::MixedDataset logistic_sample(int n, double b0, double b1, double b2,
                                   std::uint64_t seed) {
  stat::Rng rng(seed);
  auto out = data::MixedDataset::empty(
      {cont_col("x1"), cont_col("x2"), cat_col("y", {"no", "yes"})});
  for (int i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = rng.normal();
    const double eta = b0 + b1 * x1 + b2 * x2;
    const double p = 1.0 / (1.0 + std::exp(-eta));
    out.append_row({x1, x2, rng.uniform01() <= p ? 1.0 : 0.0});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constant Markov models
// ---------------------------------------------------------------------------

TEST_CASE("markov fit matches hand-counted transitions") {
  const auto model = exec::fit_constant_markov({{"A", "A", "B", "A"}});
  REQUIRE(model.states == std::vector<std::string>{"A", "B"});
  // From A: A->A once, A->B once; from B: B->A once.
  CHECK(model.matrix.at(0, 0) == 0.5);
  CHECK(model.matrix.at(0, 1) == 0.5);
  CHECK(model.matrix.at(1, 0) == 1.0);
  CHECK(model.matrix.at(1, 1) == 0.0);
}

TEST_CASE("markov fit gives a constant sequence an identity row") {
  const auto model = exec::fit_constant_markov({{"A", "A", "A"}});
  REQUIRE(model.states == std::vector<std::string>{"A"});
  CHECK(model.matrix.at(0, 0) == 1.0);
}

TEST_CASE("markov fit gives never-source states a self-loop") {
  // C appears only as a final state, never as a source.
  const auto model =
      exec::fit_constant_markov({{"A", "B"}, {"B", "C"}}, {"A", "B", "C"});
  CHECK(model.matrix.at(2, 2) == 1.0);
  CHECK(model.matrix.at(2, 0) == 0.0);
  CHECK(model.matrix.at(2, 1) == 0.0);
  // And so does a state that never appears at all under a fixed universe.
  const auto fixed =
      exec::fit_constant_markov({{"A", "B", "A"}}, {"A", "B", "Z"});
  CHECK(fixed.matrix.at(2, 2) == 1.0);
}

TEST_CASE("markov fit equals a brute-force pair-counting oracle") {
  stat::Rng rng(42);
  const std::vector<std::string> universe = {"S0", "S1", "S2", "S3"};
  for (int trial = 0; trial < 50; ++trial) {
    Sequences seqs;
    const int n_seq = 1 + static_cast<int>(rng.uniform_index(4));
    for (int s = 0; s < n_seq; ++s) {
      std::vector<std::string> seq;
      const int len = 2 + static_cast<int>(rng.uniform_index(10));
      for (int i = 0; i < len; ++i) {
        seq.push_back(universe[rng.uniform_index(universe.size())]);
      }
      seqs.push_back(std::move(seq));
    }

    const auto model = exec::fit_constant_markov(seqs, universe);

    // Independent oracle: integer pair counts, exact rational division.
    std::vector<std::vector<long long>> counts(4, std::vector<long long>(4, 0));
    for (const auto& seq : seqs) {
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        int a = -1, b = -1;
        for (int k = 0; k < 4; ++k) {
          if (universe[k] == seq[i]) a = k;
          if (universe[k] == seq[i + 1]) b = k;
        }
        ++counts[a][b];
      }
    }
    for (int i = 0; i < 4; ++i) {
      long long row = 0;
      for (int j = 0; j < 4; ++j) row += counts[i][j];
      for (int j = 0; j < 4; ++j) {
        const double expected =
            row == 0 ? (i == j ? 1.0 : 0.0)
                     : static_cast<double>(counts[i][j]) /
                           static_cast<double>(row);
        CHECK(model.matrix.at(i, j) == expected);  // identical arithmetic
      }
    }
  }
}

TEST_CASE("markov fit rejects empty input and foreign labels") {
  CHECK_THROWS_AS(exec::fit_constant_markov({}), DataError);
  CHECK_THROWS_AS(exec::fit_constant_markov({{"A"}, {"B"}}), DataError);
  CHECK_THROWS_AS(exec::fit_constant_markov({{"A", "X"}}, {"A", "B"}),
                  DataError);
  CHECK_THROWS_AS(exec::fit_constant_markov({{"A", "B"}}, {"A", "A"}),
                  DataError);
}

TEST_CASE("markov stepping follows the row distribution") {
  exec::ConstantMarkovModel stay;
  stay.states = {"A", "B"};
  stay.matrix = stat::Matrix(2, 2);
  stay.matrix.at(0, 0) = 1.0;
  stay.matrix.at(1, 0) = 0.5;
  stay.matrix.at(1, 1) = 0.5;

  stat::Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    CHECK(exec::step_markov(stay, "A", rng) == "A");
  }

  int to_a = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    if (exec::step_markov(stay, "B", rng) == "A") ++to_a;
  }
  CHECK(std::fabs(static_cast<double>(to_a) / n - 0.5) <= 0.02);
}

TEST_CASE("markov absorbing state never exits") {
  exec::ConstantMarkovModel model;
  model.states = {"alive", "dead"};
  model.matrix = stat::Matrix(2, 2);
  model.matrix.at(0, 0) = 0.9;
  model.matrix.at(0, 1) = 0.1;
  model.matrix.at(1, 1) = 1.0;  // absorbing

  stat::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    CHECK(exec::step_markov(model, "dead", rng) == "dead");
  }
  CHECK_THROWS_AS(exec::step_markov(model, "ghost", rng), DataError);
}

TEST_CASE("markov stepping is deterministic given the seed") {
  const auto model = exec::fit_constant_markov(
      {{"A", "B", "C", "A", "B", "A", "C", "C", "B"}});
  CHECK(exec::step_markov(model, "A", std::uint64_t{99}) ==
        exec::step_markov(model, "A", std::uint64_t{99}));
}

TEST_CASE("markov model serialization round-trips") {
  const auto model =
      exec::fit_constant_markov({{"A", "B", "A", "C", "B", "B", "A"}});
  const auto loaded =
      exec::constant_markov_from_json(exec::constant_markov_to_json(model));
  CHECK(loaded.states == model.states);
  for (int i = 0; i < model.matrix.rows(); ++i) {
    for (int j = 0; j < model.matrix.cols(); ++j) {
      CHECK(loaded.matrix.at(i, j) == model.matrix.at(i, j));
    }
  }
  auto j = exec::constant_markov_to_json(model);
  j["matrix"][0][0] = 0.75;  // rows no longer sum to 1
  CHECK_THROWS_AS(exec::constant_markov_from_json(j), DataError);
}

// ---------------------------------------------------------------------------
// Multinomial logit
// ---------------------------------------------------------------------------

TEST_CASE("logit probabilities with zero coefficients are uniform") {
  exec::CovariateMarkovModel model;
  model.states = {"a", "b", "c"};
  model.reference_state = "a";
  model.coef = {{0.0}, {0.0}, {0.0}};
  const auto probs = exec::transition_probs(model, {});
  REQUIRE(probs.size() == 3);
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("logit binary probability is the sigmoid of the linear predictor") {
  exec::CovariateMarkovModel model;
  model.states = {"no", "yes"};
  model.reference_state = "no";
  model.covariates = {"x"};
  model.coef = {{0.0, 0.0}, {0.5, 0.8}};

  auto probs = exec::transition_probs(model, {{"x", 0.0}});
  CHECK(probs[1] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-14));

  probs = exec::transition_probs(model, {{"x", -0.625}});  // eta = 0
  CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-14));

  probs = exec::transition_probs(model, {{"x", 3.0}});  // eta = 2.9
  CHECK(probs[1] == doctest::Approx(0.9478464369215823).epsilon(1e-14));
}

TEST_CASE("logit three-state softmax matches the exponential oracle") {
  exec::CovariateMarkovModel model;
  model.states = {"a", "b", "c"};
  model.reference_state = "a";
  model.coef = {{0.0}, {1.2}, {-0.3}};
  const auto probs = exec::transition_probs(model, {});
  CHECK(probs[0] == doctest::Approx(0.19759194134319183).epsilon(1e-14));
  CHECK(probs[1] == doctest::Approx(0.6560283482498984).epsilon(1e-14));
  CHECK(probs[2] == doctest::Approx(0.14637971040690973).epsilon(1e-14));
  double sum = 0.0;
  for (double p : probs) sum += p;
  CHECK(std::fabs(sum - 1.0) < 1e-12);
}

TEST_CASE("logit probabilities sum to one for random models and inputs") {
  stat::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    exec::CovariateMarkovModel model;
    const int k = 2 + static_cast<int>(rng.uniform_index(4));
    for (int s = 0; s < k; ++s) model.states.push_back("s" + std::to_string(s));
    model.reference_state = model.states[0];
    model.covariates = {"u", "v"};
    model.coef.assign(k, std::vector<double>(3, 0.0));
    for (int s = 1; s < k; ++s) {
      for (int j = 0; j < 3; ++j) model.coef[s][j] = rng.uniform(-8.0, 8.0);
    }
    const auto probs = exec::transition_probs(
        model, {{"u", rng.uniform(-5.0, 5.0)}, {"v", rng.uniform(-5.0, 5.0)}});
    double sum = 0.0;
    for (double p : probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("logit fit recovers known coefficients") {
  const auto data = logistic_sample(4000, 0.3, 0.8, -0.5, 1234);
  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  exec::LogitFitReport report;
  const auto model =
      exec::fit_multinomial_logit(data, "y", {"x1", "x2"}, options, &report);

  REQUIRE(model.covariates == std::vector<std::string>{"x1", "x2"});
  CHECK_FALSE(model.capped);
  CHECK(std::fabs(model.coef[1][0] - 0.3) < 0.15);
  CHECK(std::fabs(model.coef[1][1] - 0.8) < 0.15);
  CHECK(std::fabs(model.coef[1][2] - (-0.5)) < 0.15);

  // Score equations hold at the reported optimum.
  std::vector<double> grad;
  exec::logit_loglik(model, data, "y", &grad);
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::fabs(g));
  CHECK(gmax < 1e-6);
}

TEST_CASE("logit log-likelihood gradient matches finite differences") {
  const auto data = logistic_sample(300, -0.2, 0.6, 0.9, 777);
  stat::Rng rng(31);
  for (int point = 0; point < 10; ++point) {
    exec::CovariateMarkovModel model;
    model.states = {"no", "yes"};
    model.reference_state = "no";
    model.covariates = {"x1", "x2"};
    model.coef = {{0.0, 0.0, 0.0},
                  {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                   rng.uniform(-1.5, 1.5)}};

    std::vector<double> grad;
    exec::logit_loglik(model, data, "y", &grad);
    REQUIRE(grad.size() == 3);

    for (int j = 0; j < 3; ++j) {
      const double h = 1e-5 * std::max(1.0, std::fabs(model.coef[1][j]));
      auto hi = model, lo = model;
      hi.coef[1][j] += h;
      lo.coef[1][j] -= h;
      const double fd = (exec::logit_loglik(hi, data, "y") -
                         exec::logit_loglik(lo, data, "y")) /
                        (2.0 * h);
      const double scale = std::max({1e-8, std::fabs(fd), std::fabs(grad[j])});
      CHECK(std::fabs(grad[j] - fd) / scale < 1e-4);
    }
  }
}

TEST_CASE("logit fit caps coefficients under separation") {
  // Perfectly separable: y = yes exactly when x > 0.
  auto data = data::MixedDataset::empty(
      {cont_col("x"), cat_col("y", {"no", "yes"})});
  for (int i = 1; i <= 40; ++i) {
    const double x = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + i * 0.1);
    data.append_row({x, x > 0.0 ? 1.0 : 0.0});
  }
  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  exec::LogitFitReport report;
  const auto model =
      exec::fit_multinomial_logit(data, "y", {"x"}, options, &report);
  CHECK(model.capped);
  CHECK(report.capped);
  const auto probs = exec::transition_probs(model, {{"x", 3.0}});
  CHECK(probs[1] > 0.95);
}

TEST_CASE("logit stepwise removes a pure-noise covariate") {
  // Balanced binary target independent of the covariate.  AIC removes the
  // noise column unless the chance likelihood-ratio gain exceeds 2 (which
  // for a 1-df chi-square happens ~16% of the time), so most seeds drop it.
  int removed = 0;
  const int n_seeds = 40;
  for (int s = 0; s < n_seeds; ++s) {
    stat::Rng rng(1000 + s);
    auto data = data::MixedDataset::empty(
        {cont_col("noise"), cat_col("y", {"no", "yes"})});
    for (int i = 0; i < 500; ++i) {
      data.append_row({rng.normal(), i % 2 == 0 ? 1.0 : 0.0});
    }
    exec::LogitFitReport report;
    const auto model = exec::fit_multinomial_logit(data, "y", {"noise"}, {},
                                                   &report);
    if (model.covariates.empty()) {
      ++removed;
      CHECK(report.dropped_stepwise == std::vector<std::string>{"noise"});
    }
  }
  // 40 x Bernoulli(~0.84); demand clearly-better-than-chance removal.
  CHECK(removed >= 30);
}

TEST_CASE("logit stepwise keeps a strongly informative covariate") {
  const auto data = logistic_sample(1500, 0.1, 1.2, 0.0, 4242);
  exec::LogitFitReport report;
  const auto model =
      exec::fit_multinomial_logit(data, "y", {"x1", "x2"}, {}, &report);
  // x1 drives the outcome and must survive; x2 is noise and usually leaves.
  CHECK(std::find(model.covariates.begin(), model.covariates.end(), "x1") !=
        model.covariates.end());
}

TEST_CASE("logit fit drops collinear columns with a diagnostic") {
  auto data = data::MixedDataset::empty(
      {cont_col("x"), cont_col("x_copy"), cat_col("y", {"no", "yes"})});
  stat::Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.normal();
    const double p = 1.0 / (1.0 + std::exp(-x));
    data.append_row({x, x, rng.uniform01() <= p ? 1.0 : 0.0});
  }
  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  exec::LogitFitReport report;
  const auto model = exec::fit_multinomial_logit(data, "y", {"x", "x_copy"},
                                                 options, &report);
  CHECK(report.dropped_collinear == std::vector<std::string>{"x_copy"});
  CHECK(model.covariates == std::vector<std::string>{"x"});
}

TEST_CASE("logit three-state fit predicts calibrated probabilities") {
  // Ordered three-state outcome driven by one covariate.
  stat::Rng rng(2718);
  auto data = data::MixedDataset::empty(
      {cont_col("x"), cat_col("state", {"low", "mid", "high"})});
  for (int i = 0; i < 3000; ++i) {
    const double x = rng.normal();
    const double e1 = std::exp(1.0 * x);
    const double e2 = std::exp(2.0 * x - 1.0);
    const double z = 1.0 + e1 + e2;
    const double u = rng.uniform01();
    double state = 0.0;
    if (u <= e2 / z) {
      state = 2.0;
    } else if (u <= (e1 + e2) / z) {
      state = 1.0;
    }
    data.append_row({x, state});
  }
  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  const auto model = exec::fit_multinomial_logit(data, "state", {"x"}, options);
  CHECK(std::fabs(model.coef[1][1] - 1.0) < 0.25);
  CHECK(std::fabs(model.coef[2][1] - 2.0) < 0.3);
  CHECK(std::fabs(model.coef[2][0] - (-1.0)) < 0.3);
  const auto probs = exec::transition_probs(model, {{"x", 0.0}});
  CHECK(std::fabs(probs[0] + probs[1] + probs[2] - 1.0) < 1e-12);
}

TEST_CASE("logit fit and prediction reject invalid input") {
  const auto data = logistic_sample(100, 0.0, 0.5, 0.0, 55);

  // Too few rows for the candidate count (need 10 per candidate).
  auto small = data::MixedDataset::empty(
      {cont_col("x1"), cont_col("x2"), cat_col("y", {"no", "yes"})});
  for (int i = 0; i < 15; ++i) small.append_row({0.1 * i, -0.2 * i, i % 2 ? 1.0 : 0.0});
  CHECK_THROWS_AS(exec::fit_multinomial_logit(small, "y", {"x1", "x2"}),
                  DataError);

  CHECK_THROWS_AS(exec::fit_multinomial_logit(data, "x1", {"x2"}), DataError);
  CHECK_THROWS_AS(exec::fit_multinomial_logit(data, "nope", {"x1"}), DataError);
  CHECK_THROWS_AS(exec::fit_multinomial_logit(data, "y", {"y"}), DataError);
  CHECK_THROWS_AS(exec::fit_multinomial_logit(data, "y", {"x1", "x1"}),
                  DataError);

  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  const auto model = exec::fit_multinomial_logit(data, "y", {"x1"}, options);
  CHECK_THROWS_WITH_AS(exec::transition_probs(model, {}),
                       doctest::Contains("x1"), DataError);
  CHECK_THROWS_AS(
      exec::transition_probs(
          model, {{"x1", std::numeric_limits<double>::quiet_NaN()}}),
      NumericError);
}

TEST_CASE("logit model serialization round-trips") {
  const auto data = logistic_sample(500, 0.2, 0.7, -0.4, 808);
  exec::LogitFitOptions options;
  options.backward_stepwise = false;
  const auto model = exec::fit_multinomial_logit(data, "y", {"x1", "x2"},
                                                 options);
  const auto loaded =
      exec::covariate_markov_from_json(exec::covariate_markov_to_json(model));
  CHECK(loaded.states == model.states);
  CHECK(loaded.covariates == model.covariates);
  CHECK(loaded.coef == model.coef);

  auto j = exec::covariate_markov_to_json(model);
  j["coef"][0][0] = 1.0;  // nonzero reference row
  CHECK_THROWS_AS(exec::covariate_markov_from_json(j), DataError);
}
