#include "cohortsim/vbg/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "cohortsim/stat/mvn.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::vbg {

namespace {

std::string config_label(const data::MixedDataset& data,
                         const std::vector<int>& cat_cols,
                         const std::vector<int>& categories) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < cat_cols.size(); ++i) {
    if (i > 0) out << ", ";
    out << data.schema(cat_cols[i]).categories.at(categories[i]);
  }
  out << ")";
  return out.str();
}

}  // namespace

DiscreteVBGModel fit_discrete(const data::MixedDataset& data,
                              DiscreteFitReport* report) {
  const int n = data.n_rows();
  if (n == 0) throw DataError("fit_discrete: empty dataset");

  DiscreteVBGModel model;
  model.schema = data.schema();
  for (int c = 0; c < data.n_cols(); ++c) {
    if (data.schema(c).kind == data::ColumnKind::kCategorical) {
      model.categorical_cols.push_back(c);
    } else {
      model.continuous_cols.push_back(c);
    }
  }
  const int dc = static_cast<int>(model.continuous_cols.size());
  if (dc == 0) {
    throw DataError("fit_discrete: needs at least one continuous column");
  }

  // Group rows by categorical configuration (map order = sorted tuples).
  std::map<std::vector<int>, std::vector<int>> rows_by_config;
  for (int r = 0; r < n; ++r) {
    std::vector<int> key;
    key.reserve(model.categorical_cols.size());
    for (int c : model.categorical_cols) key.push_back(data.category_at(r, c));
    rows_by_config[key].push_back(r);
  }

  // Per-group means plus the pooled within-group covariance used as the
  // fallback for sparse configurations.
  const int n_groups = static_cast<int>(rows_by_config.size());
  std::map<std::vector<int>, std::vector<double>> group_means;
  stat::Matrix pooled(dc, dc);
  for (const auto& [key, rows] : rows_by_config) {
    std::vector<double> mean(dc, 0.0);
    for (int r : rows) {
      for (int j = 0; j < dc; ++j) {
        mean[j] += data.column(model.continuous_cols[j])[r];
      }
    }
    for (double& m : mean) m /= static_cast<double>(rows.size());
    for (int r : rows) {
      for (int j = 0; j < dc; ++j) {
        const double dj = data.column(model.continuous_cols[j])[r] - mean[j];
        for (int k = 0; k < dc; ++k) {
          const double dk = data.column(model.continuous_cols[k])[r] - mean[k];
          pooled.at(j, k) += dj * dk;
        }
      }
    }
    group_means[key] = std::move(mean);
  }
  const double pooled_dof = std::max(n - n_groups, 1);
  for (int j = 0; j < dc; ++j) {
    for (int k = 0; k < dc; ++k) pooled.at(j, k) /= pooled_dof;
  }

  DiscreteFitReport rep;
  for (const auto& [key, rows] : rows_by_config) {
    DiscreteConfig cfg;
    cfg.categories = key;
    cfg.prob = static_cast<double>(rows.size()) / n;
    cfg.mean = group_means[key];
    const int count = static_cast<int>(rows.size());
    if (count >= dc + 1) {
      stat::Matrix cov(dc, dc);
      for (int r : rows) {
        for (int j = 0; j < dc; ++j) {
          const double dj =
              data.column(model.continuous_cols[j])[r] - cfg.mean[j];
          for (int k = 0; k < dc; ++k) {
            const double dk =
                data.column(model.continuous_cols[k])[r] - cfg.mean[k];
            cov.at(j, k) += dj * dk;
          }
        }
      }
      for (int j = 0; j < dc; ++j) {
        for (int k = 0; k < dc; ++k) cov.at(j, k) /= (count - 1);
      }
      cfg.cov = std::move(cov);
    } else {
      cfg.cov = pooled;
      cfg.pooled_cov = true;
      ++rep.sparse_configs;
      rep.notes.push_back(
          "configuration " + config_label(data, model.categorical_cols, key) +
          ": " + std::to_string(count) + " row(s) < " + std::to_string(dc + 1) +
          " required; pooled covariance applied");
    }
    model.configs.push_back(std::move(cfg));
  }
  if (n == n_groups) {
    rep.notes.push_back(
        "every configuration is sparse; pooled covariance is degenerate (zero)");
  }
  for (const auto& note : rep.notes) log::warn("fit_discrete: ", note);
  if (report != nullptr) *report = rep;
  validate_discrete(model);
  return model;
}

void validate_discrete(const DiscreteVBGModel& model) {
  if (model.schema.empty()) throw DataError("discrete model: empty schema");
  const int dc = static_cast<int>(model.continuous_cols.size());
  if (dc == 0) {
    throw DataError("discrete model: needs at least one continuous column");
  }
  if (model.configs.empty()) {
    throw DataError("discrete model: no configurations");
  }
  double total = 0.0;
  for (const auto& cfg : model.configs) {
    if (cfg.categories.size() != model.categorical_cols.size()) {
      throw DataError("discrete model: configuration arity mismatch");
    }
    for (std::size_t i = 0; i < cfg.categories.size(); ++i) {
      const auto& schema = model.schema.at(model.categorical_cols[i]);
      if (cfg.categories[i] < 0 ||
          cfg.categories[i] >= static_cast<int>(schema.categories.size())) {
        throw DataError("discrete model: category index out of range");
      }
    }
    if (cfg.prob < 0.0) {
      throw DataError("discrete model: negative configuration probability");
    }
    if (static_cast<int>(cfg.mean.size()) != dc || cfg.cov.rows() != dc ||
        cfg.cov.cols() != dc) {
      throw DataError("discrete model: moment shape mismatch");
    }
    stat::validate_covariance(cfg.cov);
    total += cfg.prob;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw DataError("discrete model: configuration probabilities sum to " +
                    std::to_string(total) + ", expected 1");
  }
}

data::MixedDataset sample_discrete(const DiscreteVBGModel& model,
                                   std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DataError("sample_discrete: n must be at least 1");
  validate_discrete(model);
  const int dc = static_cast<int>(model.continuous_cols.size());

  std::vector<double> cum;
  std::vector<stat::Matrix> factors;
  double running = 0.0;
  for (const auto& cfg : model.configs) {
    running += cfg.prob;
    cum.push_back(running);
    factors.push_back(stat::cholesky_factor(cfg.cov, nullptr));
  }

  stat::Rng rng(seed);
  data::MixedDataset out = data::MixedDataset::empty(model.schema);
  std::vector<double> row(model.schema.size(), 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double x = rng.uniform01();
    std::size_t pick = model.configs.size() - 1;
    for (std::size_t i = 0; i < cum.size(); ++i) {
      if (x <= cum[i]) {
        pick = i;
        break;
      }
    }
    const DiscreteConfig& cfg = model.configs[pick];
    const std::vector<double> draw = stat::mvn_draw(cfg.mean, factors[pick], rng);
    for (std::size_t i = 0; i < model.categorical_cols.size(); ++i) {
      row[model.categorical_cols[i]] = static_cast<double>(cfg.categories[i]);
    }
    for (int j = 0; j < dc; ++j) row[model.continuous_cols[j]] = draw[j];
    out.append_row(row);
  }
  return out;
}

}  // namespace cohortsim::vbg
