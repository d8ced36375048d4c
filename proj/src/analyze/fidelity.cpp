#include "cohortsim/analyze/fidelity.hpp"

#include <algorithm>
#include <cmath>

#include <string>

#include "cohortsim/stat/ranks.hpp"
#include "cohortsim/util/errors.hpp"

namespace cohortsim::analyze {

namespace {

void require_matching_schemas(const data::MixedDataset& a,
                              const data::MixedDataset& b) {
  if (a.n_cols() != b.n_cols()) {
    throw DataError("fidelity: column counts differ (" +
                    std::to_string(a.n_cols()) + " vs " +
                    std::to_string(b.n_cols()) + ")");
  }
  for (int c = 0; c < a.n_cols(); ++c) {
    if (!(a.schema(c) == b.schema(c))) {
      throw DataError("fidelity: schema mismatch at column '" +
                      a.schema(c).name + "'");
    }
  }
  if (a.n_rows() == 0 || b.n_rows() == 0) {
    throw DataError("fidelity: both datasets must be non-empty");
  }
}

double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tv += std::fabs(p[i] - q[i]);
  }
  return 0.5 * tv;
}

std::vector<double> regression_column(const data::MixedDataset& d, int c) {
  std::vector<double> out(static_cast<std::size_t>(d.n_rows()));
  for (int r = 0; r < d.n_rows(); ++r) {
    out[static_cast<std::size_t>(r)] = d.regression_value(r, c);
  }
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FidelityReport fidelity(const data::MixedDataset& original,
                        const data::MixedDataset& simulated) {
  require_matching_schemas(original, simulated);
  FidelityReport report;

  std::vector<double> distances;
  for (int c = 0; c < original.n_cols(); ++c) {
    ColumnFidelity col;
    col.column = original.schema(c).name;
    col.categorical =
        original.schema(c).kind == data::ColumnKind::kCategorical;
    if (col.categorical) {
      col.distance = total_variation(original.category_probs(c),
                                     simulated.category_probs(c));
    } else {
      col.distance =
          stat::ks_two_sample(original.column(c), simulated.column(c));
    }
    distances.push_back(col.distance);
    report.columns.push_back(std::move(col));
  }
  report.max_column_distance =
      *std::max_element(distances.begin(), distances.end());
  report.median_column_distance = median(distances);

  for (int i = 0; i < original.n_cols(); ++i) {
    const auto oi = regression_column(original, i);
    const auto si = regression_column(simulated, i);
    for (int j = i + 1; j < original.n_cols(); ++j) {
      PairFidelity pair;
      pair.first = original.schema(i).name;
      pair.second = original.schema(j).name;
      pair.tau_original = stat::kendall_tau(oi, regression_column(original, j));
      pair.tau_simulated =
          stat::kendall_tau(si, regression_column(simulated, j));
      pair.abs_delta = std::fabs(pair.tau_original - pair.tau_simulated);
      report.max_tau_delta = std::max(report.max_tau_delta, pair.abs_delta);
      report.pairs.push_back(std::move(pair));
    }
  }
  return report;
}

nlohmann::json fidelity_to_json(const FidelityReport& report) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& col : report.columns) {
    columns.push_back({{"column", col.column},
                       {"kind", col.categorical ? "categorical" : "continuous"},
                       {"distance", col.distance}});
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pair : report.pairs) {
    pairs.push_back({{"first", pair.first},
                     {"second", pair.second},
                     {"tau_original", pair.tau_original},
                     {"tau_simulated", pair.tau_simulated},
                     {"abs_delta", pair.abs_delta}});
  }
  return nlohmann::json{{"columns", columns},
                        {"pairs", pairs},
                        {"max_column_distance", report.max_column_distance},
                        {"median_column_distance",
                         report.median_column_distance},
                        {"max_tau_delta", report.max_tau_delta}};
}

}  // namespace cohortsim::analyze
