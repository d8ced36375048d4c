#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include <filesystem>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/stat/matrix.hpp"
#include "cohortsim/stat/mvn.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/vbg/continuous.hpp"
#include "cohortsim/vbg/discrete.hpp"
#include "cohortsim/vbg/model_io.hpp"
#include "cohortsim/vbg/vine.hpp"

using namespace cohortsim;

namespace {

data::ColumnSchema cont_col(std::string name) {
  return data::ColumnSchema{std::move(name), data::ColumnKind::kContinuous, {}};
}

data::ColumnSchema cat_col(std::string name, std::vector<std::string> labels) {
  return data::ColumnSchema{std::move(name), data::ColumnKind::kCategorical,
                            std::move(labels)};
}

data::MixedDataset make_data(std::vector<data::ColumnSchema> schema,
                             const std::vector<std::vector<double>>& rows) {
  auto out = data::MixedDataset::empty(std::move(schema));
  for (const auto& row : rows) out.append_row(row);
  return out;
}

// 8 "No" rows followed by 2 "Yes" rows on a single binary column.
data::MixedDataset binary_80_20() {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({0.0});
  for (int i = 0; i < 2; ++i) rows.push_back({1.0});
  return make_data({cat_col("flag", {"No", "Yes"})}, rows);
}

double column_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = column_mean(a);
  const double mb = column_mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

// ---------------------------------------------------------------------------
// Conditional (per-configuration) generator
// ---------------------------------------------------------------------------

TEST_CASE("conditional fit groups rows by configuration with exact moments") {
  // 6 "Yes" rows with x = 1..6 and 4 "No" rows with x in {10,20,30,40}.
  std::vector<std::vector<double>> rows = {
      {1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6},
      {0, 10}, {0, 20}, {0, 30}, {0, 40}};
  const auto data =
      make_data({cat_col("smoker", {"No", "Yes"}), cont_col("x")}, rows);

  vbg::DiscreteFitReport report;
  const auto model = vbg::fit_discrete(data, &report);

  REQUIRE(model.configs.size() == 2);
  CHECK(model.categorical_cols == std::vector<int>{0});
  CHECK(model.continuous_cols == std::vector<int>{1});
  CHECK(report.sparse_configs == 0);

  // Configurations are ordered by category tuple: "No" (code 0) first.
  const auto& no = model.configs[0];
  const auto& yes = model.configs[1];
  CHECK(no.categories == std::vector<int>{0});
  CHECK(yes.categories == std::vector<int>{1});
  CHECK(no.prob == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(yes.prob == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(no.mean[0] == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(yes.mean[0] == doctest::Approx(3.5).epsilon(1e-14));
  // Sample variances with n-1 denominators: 500/3 and 17.5/5.
  CHECK(no.cov.at(0, 0) == doctest::Approx(500.0 / 3.0).epsilon(1e-12));
  CHECK(yes.cov.at(0, 0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK_FALSE(no.pooled_cov);
  CHECK_FALSE(yes.pooled_cov);
}

TEST_CASE("conditional fit with no categorical columns keeps one full config") {
  std::vector<std::vector<double>> rows = {
      {1, 2}, {2, 4}, {3, 7}, {4, 8}, {5, 10}};
  const auto data = make_data({cont_col("x"), cont_col("y")}, rows);

  const auto model = vbg::fit_discrete(data);
  REQUIRE(model.configs.size() == 1);
  const auto& cfg = model.configs[0];
  CHECK(cfg.categories.empty());
  CHECK(cfg.prob == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cfg.mean[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(cfg.mean[1] == doctest::Approx(6.2).epsilon(1e-14));
  CHECK(cfg.cov.at(0, 0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(cfg.cov.at(1, 1) == doctest::Approx(10.2).epsilon(1e-13));
  CHECK(cfg.cov.at(0, 1) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(cfg.cov.at(1, 0) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("conditional fit pools covariance for sparse configurations") {
  // A: 5 rows, B: 1 row (sparse), C: 2 rows; one continuous column.
  std::vector<std::vector<double>> rows = {
      {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5},  // A, SS = 10
      {1, 7},                                  // B, SS = 0
      {2, 10}, {2, 14}};                       // C, SS = 8
  const auto data =
      make_data({cat_col("g", {"A", "B", "C"}), cont_col("x")}, rows);

  vbg::DiscreteFitReport report;
  const auto model = vbg::fit_discrete(data, &report);

  REQUIRE(model.configs.size() == 3);
  CHECK(report.sparse_configs == 1);
  REQUIRE_FALSE(report.notes.empty());
  CHECK(report.notes[0].find("pooled covariance applied") != std::string::npos);
  CHECK(report.notes[0].find("(B)") != std::string::npos);

  const auto& a = model.configs[0];
  const auto& b = model.configs[1];
  const auto& c = model.configs[2];
  CHECK(a.prob == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(b.prob == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(c.prob == doctest::Approx(0.25).epsilon(1e-14));
  // Own covariances where the group is large enough...
  CHECK_FALSE(a.pooled_cov);
  CHECK(a.cov.at(0, 0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK_FALSE(c.pooled_cov);
  CHECK(c.cov.at(0, 0) == doctest::Approx(8.0).epsilon(1e-13));
  // ...and the pooled within-group scatter (10+0+8)/(8-3) for the sparse one.
  CHECK(b.pooled_cov);
  CHECK(b.mean[0] == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(b.cov.at(0, 0) == doctest::Approx(3.6).epsilon(1e-13));
}

TEST_CASE("conditional sampling with zero covariance reproduces means exactly") {
  vbg::DiscreteVBGModel model;
  model.schema = {cont_col("x"), cont_col("y")};
  model.continuous_cols = {0, 1};
  vbg::DiscreteConfig cfg;
  cfg.prob = 1.0;
  cfg.mean = {2.5, -1.25};
  cfg.cov = stat::Matrix(2, 2);  // all zeros
  model.configs.push_back(cfg);

  const auto out = vbg::sample_discrete(model, 7, 99);
  REQUIRE(out.n_rows() == 7);
  for (int r = 0; r < out.n_rows(); ++r) {
    CHECK(out.column(0)[r] == 2.5);
    CHECK(out.column(1)[r] == -1.25);
  }
}

TEST_CASE("conditional sampling reproduces configuration frequencies") {
  std::vector<std::vector<double>> rows = {
      {1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6},
      {0, 10}, {0, 20}, {0, 30}, {0, 40}};
  const auto data =
      make_data({cat_col("smoker", {"No", "Yes"}), cont_col("x")}, rows);
  const auto model = vbg::fit_discrete(data);

  const int n = 100000;
  const auto out = vbg::sample_discrete(model, n, 2024);
  REQUIRE(out.n_rows() == n);
  int yes = 0;
  double yes_sum = 0.0, no_sum = 0.0;
  for (int r = 0; r < n; ++r) {
    if (out.category_at(r, 0) == 1) {
      ++yes;
      yes_sum += out.column(1)[r];
    } else {
      no_sum += out.column(1)[r];
    }
  }
  const double yes_freq = static_cast<double>(yes) / n;
  CHECK(std::fabs(yes_freq - 0.6) <= 0.01);
  // Group means of the sampled continuous column follow the config Gaussians.
  CHECK(std::fabs(yes_sum / yes - 3.5) < 0.05);
  CHECK(std::fabs(no_sum / (n - yes) - 25.0) < 0.5);
}

TEST_CASE("conditional sampling is seed-deterministic") {
  const auto data = make_data(
      {cat_col("g", {"A", "B"}), cont_col("x")},
      {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}, {1, 6}, {0, 7}, {1, 8}});
  const auto model = vbg::fit_discrete(data);

  const auto a = vbg::sample_discrete(model, 50, 7);
  const auto b = vbg::sample_discrete(model, 50, 7);
  const auto c = vbg::sample_discrete(model, 50, 8);
  CHECK(a.column(0) == b.column(0));
  CHECK(a.column(1) == b.column(1));
  CHECK((a.column(0) != c.column(0) || a.column(1) != c.column(1)));
}

TEST_CASE("conditional fit and sampling reject invalid input") {
  CHECK_THROWS_AS(
      vbg::fit_discrete(data::MixedDataset::empty({cont_col("x")})), DataError);

  // A dataset with only categorical columns has no Gaussian part to fit.
  const auto cats_only =
      make_data({cat_col("g", {"A", "B"})}, {{0}, {1}, {0}});
  CHECK_THROWS_AS(vbg::fit_discrete(cats_only), DataError);

  const auto data = make_data({cont_col("x")}, {{1}, {2}, {3}});
  auto model = vbg::fit_discrete(data);
  CHECK_THROWS_AS(vbg::sample_discrete(model, 0, 1), DataError);

  auto bad_prob = model;
  bad_prob.configs[0].prob += 0.5;
  CHECK_THROWS_AS(vbg::sample_discrete(bad_prob, 5, 1), DataError);

  auto bad_mean = model;
  bad_mean.configs[0].mean.push_back(0.0);
  CHECK_THROWS_AS(vbg::sample_discrete(bad_mean, 5, 1), DataError);

  auto bad_arity = model;
  bad_arity.configs[0].categories.push_back(0);
  CHECK_THROWS_AS(vbg::sample_discrete(bad_arity, 5, 1), DataError);
}

// ---------------------------------------------------------------------------
// Joint-normal (critical-value) generator
// ---------------------------------------------------------------------------

TEST_CASE("joint fit places the balanced binary cutoff at the column mean") {
  const auto data = make_data({cat_col("b", {"No", "Yes"})},
                              {{0}, {0}, {1}, {1}});
  const auto model = vbg::fit_continuous(data);

  CHECK(model.mean[0] == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(model.categorical_cols == std::vector<int>{0});
  REQUIRE(model.critical_values.size() == 1);
  REQUIRE(model.critical_values[0].size() == 1);
  // Cumulative probability 0.5 maps to the mean itself.
  CHECK(model.critical_values[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  const double sd = std::sqrt(model.cov.at(0, 0));
  CHECK((model.critical_values[0][0] - model.mean[0]) / sd ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  REQUIRE(model.category_probs.size() == 1);
  CHECK(model.category_probs[0][0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(model.category_probs[0][1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("joint fit cutoff matches the standard-normal quantile oracle") {
  const auto model = vbg::fit_continuous(binary_80_20());

  const double mu = model.mean[0];
  const double sd = std::sqrt(model.cov.at(0, 0));
  CHECK(mu == doctest::Approx(0.2).epsilon(1e-14));
  REQUIRE(model.critical_values.size() == 1);
  const double z = (model.critical_values[0][0] - mu) / sd;
  // Standard-normal quantile at 0.8.
  CHECK(z == doctest::Approx(0.8416212335729142).epsilon(1e-9));
}

TEST_CASE("joint fit on all-continuous data stores exact sample moments") {
  std::vector<std::vector<double>> rows = {
      {1, 2}, {2, 4}, {3, 7}, {4, 8}, {5, 10}};
  const auto data = make_data({cont_col("x"), cont_col("y")}, rows);

  vbg::ContinuousFitReport report;
  const auto model = vbg::fit_continuous(data, &report);
  CHECK_FALSE(report.ridged);
  CHECK_FALSE(model.ridged);
  CHECK(model.categorical_cols.empty());
  CHECK(model.critical_values.empty());
  CHECK(model.mean[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(model.mean[1] == doctest::Approx(6.2).epsilon(1e-14));
  CHECK(model.cov.at(0, 0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(model.cov.at(1, 1) == doctest::Approx(10.2).epsilon(1e-13));
  CHECK(model.cov.at(0, 1) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("joint fit requires more rows than columns") {
  const auto square =
      make_data({cont_col("x"), cont_col("y")}, {{1, 2}, {3, 4}});
  CHECK_THROWS_AS(vbg::fit_continuous(square), DataError);

  const auto tall =
      make_data({cont_col("x"), cont_col("y")}, {{1, 2}, {3, 4}, {5, 7}});
  CHECK_NOTHROW(vbg::fit_continuous(tall));
}

TEST_CASE("joint fit ridges a singular covariance and still samples") {
  // y is exactly 2x, so the sample covariance is rank deficient.
  std::vector<std::vector<double>> rows;
  for (int i = 1; i <= 12; ++i) {
    rows.push_back({static_cast<double>(i), 2.0 * i});
  }
  const auto data = make_data({cont_col("x"), cont_col("y")}, rows);

  vbg::ContinuousFitReport report;
  const auto model = vbg::fit_continuous(data, &report);
  CHECK(report.ridged);
  CHECK(model.ridged);
  REQUIRE_FALSE(report.notes.empty());
  CHECK(report.notes[0].find("ridge") != std::string::npos);

  const auto out = vbg::sample_continuous(model, 400, 11);
  REQUIRE(out.n_rows() == 400);
  for (double v : out.column(0)) CHECK(std::isfinite(v));
  CHECK(pearson(out.column(0), out.column(1)) > 0.999);
  CHECK(std::fabs(column_mean(out.column(0)) - 6.5) < 0.5);
}

TEST_CASE("joint sampling brackets latent values against the cutoffs") {
  vbg::ContinuousVBGModel model;
  model.schema = {cat_col("b", {"lo", "hi"})};
  model.cov = stat::Matrix(1, 1);  // zero variance: latent draw == mean
  model.categorical_cols = {0};
  model.critical_values = {{0.0}};
  model.category_probs = {{0.5, 0.5}};

  model.mean = {-0.1};  // below the cutoff -> first modality
  auto out = vbg::sample_continuous(model, 5, 3);
  for (int r = 0; r < out.n_rows(); ++r) CHECK(out.category_at(r, 0) == 0);

  model.mean = {0.1};  // above the cutoff -> second modality
  out = vbg::sample_continuous(model, 5, 3);
  for (int r = 0; r < out.n_rows(); ++r) CHECK(out.category_at(r, 0) == 1);

  model.mean = {0.0};  // exactly on the cutoff -> lower modality
  out = vbg::sample_continuous(model, 5, 3);
  for (int r = 0; r < out.n_rows(); ++r) CHECK(out.category_at(r, 0) == 0);
}

TEST_CASE("joint sampling reproduces modality frequencies") {
  const auto model = vbg::fit_continuous(binary_80_20());

  const int n = 10000;
  const auto out = vbg::sample_continuous(model, n, 5150);
  int zeros = 0;
  for (int r = 0; r < n; ++r) {
    if (out.category_at(r, 0) == 0) ++zeros;
  }
  CHECK(std::fabs(static_cast<double>(zeros) / n - 0.8) <= 0.02);
}

TEST_CASE("joint sampling with zero covariance yields constant columns") {
  vbg::ContinuousVBGModel model;
  model.schema = {cont_col("x"), cont_col("y")};
  model.mean = {3.0, -2.0};
  model.cov = stat::Matrix(2, 2);

  const auto out = vbg::sample_continuous(model, 6, 77);
  for (int r = 0; r < out.n_rows(); ++r) {
    CHECK(out.column(0)[r] == 3.0);
    CHECK(out.column(1)[r] == -2.0);
  }
}

TEST_CASE("joint sampling is seed-deterministic") {
  const auto model = vbg::fit_continuous(binary_80_20());
  const auto a = vbg::sample_continuous(model, 64, 21);
  const auto b = vbg::sample_continuous(model, 64, 21);
  const auto c = vbg::sample_continuous(model, 64, 22);
  CHECK(a.column(0) == b.column(0));
  CHECK(a.column(0) != c.column(0));
}

TEST_CASE("joint model validation detects tampering") {
  const auto data = make_data(
      {cat_col("g", {"a", "b", "c"}), cont_col("x")},
      {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}, {0, 7}, {1, 8}});
  const auto model = vbg::fit_continuous(data);
  REQUIRE(model.critical_values[0].size() == 2);
  CHECK_NOTHROW(vbg::validate_continuous(model));

  auto unsorted = model;
  unsorted.critical_values[0] = {1.0, 0.5};
  CHECK_THROWS_AS(vbg::validate_continuous(unsorted), DataError);

  auto bad_probs = model;
  bad_probs.category_probs[0][0] += 0.5;
  CHECK_THROWS_AS(vbg::sample_continuous(bad_probs, 5, 1), DataError);

  auto missing_cutoff = model;
  missing_cutoff.critical_values[0].pop_back();
  CHECK_THROWS_AS(vbg::validate_continuous(missing_cutoff), DataError);

  auto bad_col = model;
  bad_col.categorical_cols[0] = 5;
  CHECK_THROWS_AS(vbg::validate_continuous(bad_col), DataError);

  CHECK_THROWS_AS(vbg::sample_continuous(model, 0, 1), DataError);
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

namespace {

// Columns must match exactly after a serialize/deserialize/sample cycle.
void check_identical_samples(const vbg::GeneratorModel& a,
                             const vbg::GeneratorModel& b) {
  const auto sa = vbg::sample_generator(a, 40, 123);
  const auto sb = vbg::sample_generator(b, 40, 123);
  REQUIRE(sa.n_cols() == sb.n_cols());
  for (int c = 0; c < sa.n_cols(); ++c) CHECK(sa.column(c) == sb.column(c));
}

std::filesystem::path temp_model_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("generator models survive a JSON round trip") {
  SUBCASE("conditional generator") {
    const auto data = make_data(
        {cat_col("g", {"A", "B"}), cont_col("x"), cont_col("y")},
        {{0, 1, 2}, {0, 2, 3}, {0, 3, 5}, {0, 4, 4},
         {1, 10, 1}, {1, 11, 2}, {1, 12, 2}, {1, 13, 4}});
    vbg::GeneratorModel model = vbg::fit_discrete(data);
    CHECK(vbg::model_type_name(model) == "discrete");

    const auto path = temp_model_path("roundtrip-discrete.json");
    vbg::save_model(model, path);
    const auto loaded = vbg::load_model(path);
    CHECK(vbg::model_type_name(loaded) == "discrete");
    check_identical_samples(model, loaded);
    std::filesystem::remove(path);
  }

  SUBCASE("joint-normal generator") {
    vbg::GeneratorModel model = vbg::fit_continuous(binary_80_20());
    CHECK(vbg::model_type_name(model) == "continuous");
    const auto loaded = vbg::model_from_json(vbg::model_to_json(model));
    check_identical_samples(model, loaded);
  }

  SUBCASE("vine generator") {
    stat::Matrix cov(3, 3);
    cov.at(0, 0) = cov.at(1, 1) = cov.at(2, 2) = 1.0;
    cov.at(0, 1) = cov.at(1, 0) = 0.5;
    cov.at(0, 2) = cov.at(2, 0) = 0.3;
    cov.at(1, 2) = cov.at(2, 1) = 0.2;
    const auto latent = stat::mvn_sample({0.0, 0.0, 0.0}, cov, 120, 404);
    auto data = data::MixedDataset::empty(
        {cont_col("x0"), cont_col("x1"), cat_col("flag", {"neg", "pos"})});
    for (int r = 0; r < 120; ++r) {
      data.append_row({latent.at(r, 0), latent.at(r, 1),
                       latent.at(r, 2) > 0.0 ? 1.0 : 0.0});
    }
    vbg::GeneratorModel model = vbg::fit_vine(data, 7);
    CHECK(vbg::model_type_name(model) == "vine");

    const auto path = temp_model_path("roundtrip-vine.json");
    vbg::save_model(model, path);
    const auto loaded = vbg::load_model(path);

    // Structural equality of the fitted trees, bit-exact parameters.
    const auto& orig = std::get<vbg::VineCopulaModel>(model);
    const auto& back = std::get<vbg::VineCopulaModel>(loaded);
    REQUIRE(back.trees.size() == orig.trees.size());
    for (std::size_t t = 0; t < orig.trees.size(); ++t) {
      REQUIRE(back.trees[t].size() == orig.trees[t].size());
      for (std::size_t e = 0; e < orig.trees[t].size(); ++e) {
        CHECK(back.trees[t][e].var_a == orig.trees[t][e].var_a);
        CHECK(back.trees[t][e].var_b == orig.trees[t][e].var_b);
        CHECK(back.trees[t][e].conditioning == orig.trees[t][e].conditioning);
        CHECK(back.trees[t][e].copula.family == orig.trees[t][e].copula.family);
        CHECK(back.trees[t][e].copula.theta == orig.trees[t][e].copula.theta);
        CHECK(back.trees[t][e].copula.rotation ==
              orig.trees[t][e].copula.rotation);
      }
    }
    check_identical_samples(model, loaded);
    std::filesystem::remove(path);
  }
}

TEST_CASE("model loading rejects malformed documents") {
  const auto path = temp_model_path("malformed-model.json");

  io::atomic_write_file(path, "this is not json");
  CHECK_THROWS_AS(vbg::load_model(path), DataError);

  io::atomic_write_file(path, R"({"schema": []})");
  CHECK_THROWS_AS(vbg::load_model(path), DataError);

  io::atomic_write_file(path, R"({"model_type": "marble"})");
  CHECK_THROWS_AS(vbg::load_model(path), DataError);

  // Structurally valid JSON whose content fails model validation.
  const auto data = make_data({cont_col("x")}, {{1}, {2}, {3}, {4}});
  auto j = vbg::model_to_json(vbg::fit_discrete(data));
  j["configs"][0]["prob"] = 0.25;
  io::atomic_write_file(path, j.dump());
  CHECK_THROWS_AS(vbg::load_model(path), DataError);

  CHECK_THROWS_AS(vbg::load_model(temp_model_path("missing-model.json")),
                  DataError);
  std::filesystem::remove(path);
}

TEST_CASE("joint fit keeps mixed-column structure through resampling") {
  // Latent trivariate normal; the third coordinate is discretized at 0.
  stat::Matrix cov(3, 3);
  cov.at(0, 0) = cov.at(1, 1) = cov.at(2, 2) = 1.0;
  cov.at(0, 1) = cov.at(1, 0) = 0.6;
  cov.at(0, 2) = cov.at(2, 0) = 0.4;
  cov.at(1, 2) = cov.at(2, 1) = 0.2;
  const auto latent = stat::mvn_sample({0.0, 0.0, 0.3}, cov, 400, 9001);

  auto data = data::MixedDataset::empty(
      {cont_col("x0"), cont_col("x1"), cat_col("flag", {"neg", "pos"})});
  for (int r = 0; r < 400; ++r) {
    data.append_row(
        {latent.at(r, 0), latent.at(r, 1), latent.at(r, 2) > 0.0 ? 1.0 : 0.0});
  }
  const auto probs = data.category_probs(2);

  const auto model = vbg::fit_continuous(data);
  const auto out = vbg::sample_continuous(model, 10000, 31337);

  int pos = 0;
  for (int r = 0; r < out.n_rows(); ++r) {
    if (out.category_at(r, 2) == 1) ++pos;
  }
  // Categorical marginal proportions survive the round trip within 0.03.
  CHECK(std::fabs(static_cast<double>(pos) / out.n_rows() - probs[1]) <= 0.03);
  CHECK(std::fabs(column_mean(out.column(0)) - column_mean(data.column(0))) <
        0.15);
  const double rho_data = pearson(data.column(0), data.column(1));
  const double rho_out = pearson(out.column(0), out.column(1));
  CHECK(std::fabs(rho_out - rho_data) < 0.1);
}
