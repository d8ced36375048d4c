#pragma once

// Fidelity report: how closely a generated cohort matches its source data,
// column by column (KS statistic for continuous, total-variation distance
// for categorical) and pair by pair (Kendall-tau deltas).

#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "nlohmann/json.hpp"

namespace cohortsim::analyze {

struct ColumnFidelity {
  std::string column;
  bool categorical = false;
  double distance = 0.0;  // KS (continuous) or TV (categorical), in [0, 1]
};

struct PairFidelity {
  std::string first;
  std::string second;
  double tau_original = 0.0;
  double tau_simulated = 0.0;
  double abs_delta = 0.0;
};

struct FidelityReport {
  std::vector<ColumnFidelity> columns;
  std::vector<PairFidelity> pairs;
  double max_column_distance = 0.0;
  double median_column_distance = 0.0;
  double max_tau_delta = 0.0;
};

// Compares `simulated` against `original`.  Schemas must match exactly
// (names, kinds, category labels); both datasets must be non-empty.
FidelityReport fidelity(const data::MixedDataset& original,
                        const data::MixedDataset& simulated);

nlohmann::json fidelity_to_json(const FidelityReport& report);

// Median of a non-empty sample (midpoint average for even sizes).
double median(std::vector<double> values);

}  // namespace cohortsim::analyze
