#pragma once

// Latent-Gaussian baseline generator: one multivariate normal over all
// columns (categorical columns recoded to integer codes 0..M-1), with
// categorical values recovered from the latent draw by critical-value
// bracketing at the category-probability quantiles.

#include <cstdint>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/stat/matrix.hpp"

namespace cohortsim::vbg {

struct ContinuousVBGModel {
  std::vector<data::ColumnSchema> schema;
  std::vector<double> mean;  // per column, categorical columns on code scale
  stat::Matrix cov;          // K x K (ridged when the sample moment was singular)
  std::vector<int> categorical_cols;  // column indices, schema order
  // Parallel to categorical_cols: interior critical values (M-1 per column,
  // nondecreasing; the outer -inf/+inf bounds are implicit) and the
  // empirical category probabilities they were derived from.
  std::vector<std::vector<double>> critical_values;
  std::vector<std::vector<double>> category_probs;
  bool ridged = false;
};

struct ContinuousFitReport {
  bool ridged = false;
  std::vector<std::string> notes;
};

// Sample mean and covariance over the recoded columns; critical values per
// categorical column at the cumulative-probability normal quantiles, scaled
// by that column's mean and standard deviation.  Requires n > K; a singular
// covariance gets a small diagonal ridge (reported).
ContinuousVBGModel fit_continuous(const data::MixedDataset& data,
                                  ContinuousFitReport* report = nullptr);

void validate_continuous(const ContinuousVBGModel& model);

// Latent multivariate-normal draw; continuous columns pass through, each
// categorical column takes category m when the latent value falls between
// its critical values m-1 and m.  Deterministic in (model, seed).
data::MixedDataset sample_continuous(const ContinuousVBGModel& model,
                                     std::size_t n, std::uint64_t seed);

}  // namespace cohortsim::vbg
