#include "cohortsim/vbg/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cohortsim/stat/mvn.hpp"
#include "cohortsim/stat/normal.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::vbg {

namespace {

// Cumulative probabilities are clamped away from {0,1} so the normal
// quantile stays finite; zero-probability categories then produce equal
// consecutive critical values and are simply never sampled.
constexpr double kCumFloor = 1e-10;

}  // namespace

ContinuousVBGModel fit_continuous(const data::MixedDataset& data,
                                  ContinuousFitReport* report) {
  const int n = data.n_rows();
  const int k = data.n_cols();
  if (k == 0) throw DataError("fit_continuous: empty schema");
  if (n <= k) {
    throw DataError("fit_continuous: need more rows (" + std::to_string(n) +
                    ") than columns (" + std::to_string(k) + ")");
  }

  ContinuousVBGModel model;
  model.schema = data.schema();
  model.mean.assign(k, 0.0);
  // Categorical columns already hold integer codes 0..M-1 in the dataset,
  // so the recoded matrix is the raw column data.
  for (int c = 0; c < k; ++c) {
    for (double v : data.column(c)) model.mean[c] += v;
    model.mean[c] /= n;
  }
  stat::Matrix cov(k, k);
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < k; ++i) {
      const double di = data.column(i)[r] - model.mean[i];
      for (int j = 0; j < k; ++j) {
        cov.at(i, j) += di * (data.column(j)[r] - model.mean[j]);
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) cov.at(i, j) /= (n - 1);
  }

  ContinuousFitReport rep;
  int clamped = 0;
  stat::cholesky_factor(cov, &clamped);
  if (clamped > 0) {
    double trace = 0.0;
    for (int i = 0; i < k; ++i) trace += cov.at(i, i);
    const double ridge = 1e-8 * trace / k;
    for (int i = 0; i < k; ++i) cov.at(i, i) += ridge;
    rep.ridged = true;
    rep.notes.push_back("sample covariance is singular; ridge " +
                        io::format_double(ridge) + " added to the diagonal");
  }
  model.cov = std::move(cov);
  model.ridged = rep.ridged;

  for (int c = 0; c < k; ++c) {
    if (data.schema(c).kind != data::ColumnKind::kCategorical) continue;
    model.categorical_cols.push_back(c);
    std::vector<double> probs = data.category_probs(c);
    const double sd = std::sqrt(std::max(model.cov.at(c, c), 0.0));
    std::vector<double> crv;
    double cum = 0.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m + 1 < probs.size(); ++m) {
      if (probs[m] == 0.0) {
        rep.notes.push_back("column " + data.schema(c).name + ": category '" +
                            data.schema(c).categories[m] +
                            "' has zero probability and is never sampled");
      }
      cum += probs[m];
      const double clamped_cum =
          std::min(std::max(cum, kCumFloor), 1.0 - kCumFloor);
      double v = model.mean[c] + sd * stat::normal_quantile(clamped_cum);
      v = std::max(v, prev);  // nondecreasing even with zero-width categories
      crv.push_back(v);
      prev = v;
    }
    if (probs.back() == 0.0) {
      rep.notes.push_back("column " + data.schema(c).name + ": category '" +
                          data.schema(c).categories.back() +
                          "' has zero probability and is never sampled");
    }
    model.critical_values.push_back(std::move(crv));
    model.category_probs.push_back(std::move(probs));
  }

  for (const auto& note : rep.notes) log::warn("fit_continuous: ", note);
  if (report != nullptr) *report = rep;
  validate_continuous(model);
  return model;
}

void validate_continuous(const ContinuousVBGModel& model) {
  const int k = static_cast<int>(model.schema.size());
  if (k == 0) throw DataError("continuous model: empty schema");
  if (static_cast<int>(model.mean.size()) != k || model.cov.rows() != k ||
      model.cov.cols() != k) {
    throw DataError("continuous model: moment shape mismatch");
  }
  stat::validate_covariance(model.cov);
  if (model.categorical_cols.size() != model.critical_values.size() ||
      model.categorical_cols.size() != model.category_probs.size()) {
    throw DataError("continuous model: categorical bookkeeping mismatch");
  }
  for (std::size_t i = 0; i < model.categorical_cols.size(); ++i) {
    const int c = model.categorical_cols[i];
    if (c < 0 || c >= k ||
        model.schema[c].kind != data::ColumnKind::kCategorical) {
      throw DataError("continuous model: categorical column index invalid");
    }
    const std::size_t m = model.schema[c].categories.size();
    if (model.category_probs[i].size() != m ||
        model.critical_values[i].size() != m - 1) {
      throw DataError("continuous model: critical-value arity mismatch for " +
                      model.schema[c].name);
    }
    double sum = 0.0;
    for (double p : model.category_probs[i]) {
      if (p < 0.0) throw DataError("continuous model: negative probability");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw DataError("continuous model: category probabilities sum to " +
                      std::to_string(sum));
    }
    if (!std::is_sorted(model.critical_values[i].begin(),
                        model.critical_values[i].end())) {
      throw DataError("continuous model: critical values decrease for " +
                      model.schema[c].name);
    }
  }
}

data::MixedDataset sample_continuous(const ContinuousVBGModel& model,
                                     std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DataError("sample_continuous: n must be at least 1");
  validate_continuous(model);
  const int k = static_cast<int>(model.schema.size());
  const stat::Matrix lower = stat::cholesky_factor(model.cov, nullptr);

  stat::Rng rng(seed);
  data::MixedDataset out = data::MixedDataset::empty(model.schema);
  std::vector<double> row(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::vector<double> draw = stat::mvn_draw(model.mean, lower, rng);
    for (int c = 0; c < k; ++c) row[c] = draw[c];
    for (std::size_t i = 0; i < model.categorical_cols.size(); ++i) {
      const int c = model.categorical_cols[i];
      const auto& crv = model.critical_values[i];
      // category m iff crv[m-1] < value <= crv[m] (implicit +/- infinity ends)
      int idx = 0;
      for (double t : crv) {
        if (t < draw[c]) ++idx;
      }
      row[c] = static_cast<double>(idx);
    }
    out.append_row(row);
  }
  return out;
}

}  // namespace cohortsim::vbg
