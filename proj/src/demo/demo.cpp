#include "cohortsim/demo/demo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cohortsim/stat/rng.hpp"

namespace cohortsim::demo {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int draw_weighted(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i] / total;
    if (u <= cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

data::MixedDataset metabolic_dataset(std::uint64_t seed) {
  std::vector<data::ColumnSchema> schema = {
      {"PREG", data::ColumnKind::kCategorical, {"0", "1"}},
      {"GLU", data::ColumnKind::kContinuous, {}},
      {"BP", data::ColumnKind::kContinuous, {}},
      {"SKIN", data::ColumnKind::kContinuous, {}},
      {"INS", data::ColumnKind::kContinuous, {}},
      {"BMI", data::ColumnKind::kCategorical, {"0", "1", "2"}},
      {"PED", data::ColumnKind::kContinuous, {}},
      {"AGE", data::ColumnKind::kContinuous, {}},
      {"DIAB", data::ColumnKind::kCategorical, {"0", "1"}}};
  auto ds = data::MixedDataset::empty(std::move(schema));

  stat::Rng rng(stat::derive_seed(seed, "metabolic"));
  for (int i = 0; i < 392; ++i) {
    const double f_met = rng.normal();  // shared metabolic factor
    const double f_age = rng.normal();  // shared age/parity factor
    const double e1 = rng.normal(), e2 = rng.normal(), e3 = rng.normal();
    const double e4 = rng.normal(), e5 = rng.normal(), e6 = rng.normal();
    const double e7 = rng.normal(), e8 = rng.normal();

    const double z_glu = 0.70 * f_met + 0.714 * e1;
    const double z_ins = 0.75 * f_met + 0.661 * e2;
    const double z_bmi = 0.55 * f_met + 0.835 * e3;  // latent body mass
    const double z_skin = 0.50 * f_met + 0.25 * e3 + 0.829 * e4;
    const double z_age = 0.80 * f_age + 0.60 * e5;
    const double z_preg = 0.40 * f_age + 0.917 * e6;  // latent parity
    const double z_bp = 0.45 * f_age + 0.25 * f_met + 0.857 * e7;
    const double z_ped = e8;

    // Monotone margins keep the latent rank structure intact.
    const double glu = 121.0 + 30.5 * z_glu;
    const double bp = 72.0 + 12.3 * z_bp;
    const double skin = 29.0 + 10.5 * z_skin;
    const double ins = 156.0 * std::exp(0.62 * z_ins);
    const double ped = 0.47 * std::exp(0.72 * z_ped);
    const double age = 22.0 + 9.5 * std::exp(0.55 * z_age);
    // Ever-pregnant (62%) and a three-band body-mass category.
    const double preg = z_preg < 0.305 ? 1.0 : 0.0;
    const double bmi3 = z_bmi < -0.613 ? 0.0 : (z_bmi < 0.706 ? 1.0 : 2.0);

    const double eta = -11.0 + 0.065 * glu + 0.05 * age + 1.1 * ped +
                       0.9 * z_bmi;
    const double diab = rng.uniform01() < sigmoid(eta) ? 1.0 : 0.0;
    ds.append_row({preg, glu, bp, skin, ins, bmi3, ped, age, diab});
  }
  return ds;
}

const std::string& metabolic_strong_covariate() {
  static const std::string name = "GLU";
  return name;
}

const std::string& metabolic_outcome() {
  static const std::string name = "DIAB";
  return name;
}

hiv::TreatmentCatalog demo_catalog(int n_treatments) {
  hiv::TreatmentCatalog catalog;
  // Semiannual tariffs in currency units; deterministic but uneven.
  const std::vector<double> tariffs = {800.0, 1250.0, 950.0,  1480.0, 620.0,
                                       1100.0, 890.0, 1350.0, 730.0,  1020.0};
  for (int i = 0; i < n_treatments; ++i) {
    hiv::Treatment t;
    t.name = "T" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    t.cost_branded = tariffs[static_cast<std::size_t>(i % 10)] +
                     40.0 * (i / 10);
    t.amm = -24.0 + 2.0 * i;  // staggered authorizations before the study
    if (i < n_treatments - 4) {
      // Generic entry inside the simulated decade for the big regimens.
      t.ammgm = 1.0 + static_cast<double>(i);
      t.has_generic = true;
    } else if (i < n_treatments - 2) {
      t.ammgm.reset();  // entry via the authorization offset (far future)
      t.has_generic = true;
    } else {
      t.ammgm.reset();
      t.has_generic = false;  // patented for good
    }
    catalog.treatments.push_back(std::move(t));
  }

  // Constant switch model: keep with probability 0.86, otherwise drift
  // toward the market shares of the other regimens.
  std::vector<double> share(static_cast<std::size_t>(n_treatments));
  for (int i = 0; i < n_treatments; ++i) {
    share[static_cast<std::size_t>(i)] = std::exp(-0.25 * i);
  }
  exec::ConstantMarkovModel sw;
  sw.states = catalog.names();
  sw.matrix = stat::Matrix(n_treatments, n_treatments);
  for (int i = 0; i < n_treatments; ++i) {
    double others = 0.0;
    for (int j = 0; j < n_treatments; ++j) {
      if (j != i) others += share[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < n_treatments; ++j) {
      sw.matrix.at(i, j) =
          j == i ? 0.86
                 : 0.14 * share[static_cast<std::size_t>(j)] / others;
    }
  }
  catalog.switch_model = std::move(sw);
  hiv::validate_catalog(catalog);
  return catalog;
}

data::MixedDataset demo_baseline(int n, int n_treatments,
                                 std::uint64_t seed) {
  const auto catalog = demo_catalog(n_treatments);
  auto ds = data::MixedDataset::empty(hiv::baseline_schema(catalog.names()));

  std::vector<double> share(static_cast<std::size_t>(n_treatments));
  for (int i = 0; i < n_treatments; ++i) {
    share[static_cast<std::size_t>(i)] = std::exp(-0.25 * i);
  }

  stat::Rng rng(stat::derive_seed(seed, "baseline"));
  for (int i = 0; i < n; ++i) {
    const double years =
        std::clamp(42.0 + 11.0 * rng.normal(), 21.0, 78.0);
    const double age = years * 12.0;
    const double vihd = std::clamp(
        (years - 20.0) * 12.0 * (0.15 + 0.5 * rng.uniform01()), 6.0, 400.0);
    const double treatd = vihd * (0.1 + 0.6 * rng.uniform01());
    const double sex = rng.uniform01() < 0.70 ? 1.0 : 0.0;
    const double bc = rng.uniform01() < 0.25 ? 1.0 : 0.0;
    const double conta = rng.uniform01() < 0.30 ? 1.0 : 0.0;
    const double vihs =
        rng.uniform01() < (vihd < 60.0 ? 0.45 : 0.25) ? 1.0 : 0.0;
    const double arn = static_cast<double>(draw_weighted(
        treatd < 12.0 ? std::vector<double>{0.40, 0.30, 0.30}
                      : std::vector<double>{0.65, 0.20, 0.15},
        rng.uniform01()));
    const double heart =
        rng.uniform01() < 0.04 + 0.002 * (years - 21.0) ? 1.0 : 0.0;
    const double diab =
        rng.uniform01() < 0.03 + 0.0015 * (years - 21.0) ? 1.0 : 0.0;
    const double crea_idx = static_cast<double>(draw_weighted(
        years > 55.0 ? std::vector<double>{0.60, 0.25, 0.15}
                     : std::vector<double>{0.75, 0.18, 0.07},
        rng.uniform01()));
    const double ir =
        hiv::ir_from_crea(static_cast<int>(crea_idx) + 1, false);
    const double treat =
        static_cast<double>(draw_weighted(share, rng.uniform01()));
    ds.append_row({sex, age, bc, conta, vihs, vihd, treatd, arn, heart, diab,
                   ir, crea_idx, /*DEATH=alive*/ 1.0, treat});
  }
  return ds;
}

hiv::ExecutionModels demo_execution_models() {
  hiv::ExecutionModels models;
  const auto constant = [](std::vector<std::string> states,
                           std::vector<std::vector<double>> rows) {
    exec::ConstantMarkovModel m;
    const int k = static_cast<int>(states.size());
    m.states = std::move(states);
    m.matrix = stat::Matrix(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        m.matrix.at(i, j) = rows[static_cast<std::size_t>(i)]
                                [static_cast<std::size_t>(j)];
    return m;
  };
  models.heart = constant({"0", "1"}, {{0.985, 0.015}, {0.02, 0.98}});
  models.diab = constant({"0", "1"}, {{0.99, 0.01}, {0.01, 0.99}});
  models.vihs = constant({"0", "1"}, {{0.93, 0.07}, {0.25, 0.75}});
  models.death = constant({"0", "1"}, {{1.0, 0.0}, {0.015, 0.985}});

  exec::CovariateMarkovModel arn;
  arn.states = {"0", "1", "2"};
  arn.reference_state = "0";
  arn.covariates = {"ARN", "VIHS", "TREATD"};
  arn.coef = {{0.0, 0.0, 0.0, 0.0},
              {-2.2, 1.1, 0.35, -0.004},
              {-3.6, 1.5, 0.60, -0.006}};
  models.arn = arn;

  exec::CovariateMarkovModel crea;
  crea.states = {"1", "2", "3"};
  crea.reference_state = "1";
  crea.covariates = {"CREA", "ARN", "AGE"};
  crea.coef = {{0.0, 0.0, 0.0, 0.0},
               {-5.2, 1.6, 0.18, 0.003},
               {-9.5, 2.6, 0.25, 0.004}};
  models.crea = crea;

  hiv::validate_models(models);
  return models;
}

}  // namespace cohortsim::demo
