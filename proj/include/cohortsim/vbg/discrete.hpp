#pragma once

// Configuration-conditioned baseline generator: the joint distribution is
// factored into a categorical configuration table and one Gaussian over the
// continuous columns per observed configuration.

#include <cstdint>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/stat/matrix.hpp"

namespace cohortsim::vbg {

struct DiscreteConfig {
  std::vector<int> categories;  // category index per categorical column
  double prob = 0.0;            // empirical configuration probability
  std::vector<double> mean;     // over continuous columns
  stat::Matrix cov;             // continuous x continuous
  bool pooled_cov = false;      // true when the config was too sparse and
                                // inherited the pooled within-group covariance
};

struct DiscreteVBGModel {
  std::vector<data::ColumnSchema> schema;
  std::vector<int> categorical_cols;  // column indices, schema order
  std::vector<int> continuous_cols;
  std::vector<DiscreteConfig> configs;  // sorted by category tuple
};

struct DiscreteFitReport {
  int sparse_configs = 0;  // configs that inherited the pooled covariance
  std::vector<std::string> notes;
};

// Fits the configuration table and per-configuration Gaussians.  Configs
// with fewer rows than (number of continuous columns + 1) keep their own
// mean but inherit the pooled within-configuration covariance; this is
// reported in the fit diagnostics.  Requires at least one continuous column.
DiscreteVBGModel fit_discrete(const data::MixedDataset& data,
                              DiscreteFitReport* report = nullptr);

// Probabilities sum to 1, covariances PSD, shapes consistent.
void validate_discrete(const DiscreteVBGModel& model);

// Draw a configuration by its probability, then the continuous columns from
// that configuration's Gaussian.  Deterministic in (model, seed).
data::MixedDataset sample_discrete(const DiscreteVBGModel& model,
                                   std::size_t n, std::uint64_t seed);

}  // namespace cohortsim::vbg
