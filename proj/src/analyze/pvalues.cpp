#include "cohortsim/analyze/pvalues.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "cohortsim/analyze/fidelity.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/stat/special.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::analyze {

namespace {

int binary_outcome_column(const data::MixedDataset& data,
                          const std::string& outcome) {
  const int c = data.col_index(outcome);
  const auto& schema = data.schema(c);
  if (schema.kind != data::ColumnKind::kCategorical ||
      schema.categories.size() != 2) {
    throw DataError("association test requires a binary categorical outcome; '" +
                    outcome + "' is not one");
  }
  return c;
}

AssociationTest chi_square_association(const data::MixedDataset& data,
                                       int cov_col, int outcome_col) {
  const int n_cats =
      static_cast<int>(data.schema(cov_col).categories.size());
  std::vector<std::array<long long, 2>> counts(
      static_cast<std::size_t>(n_cats), {0, 0});
  for (int r = 0; r < data.n_rows(); ++r) {
    counts[static_cast<std::size_t>(data.category_at(r, cov_col))]
          [static_cast<std::size_t>(data.category_at(r, outcome_col))]++;
  }

  // Unobserved covariate categories and an unobserved outcome side carry no
  // information; they are dropped before the statistic.
  std::vector<std::array<long long, 2>> rows;
  for (const auto& row : counts) {
    if (row[0] + row[1] > 0) rows.push_back(row);
  }
  long long col_total[2] = {0, 0};
  long long n = 0;
  for (const auto& row : rows) {
    col_total[0] += row[0];
    col_total[1] += row[1];
    n += row[0] + row[1];
  }
  const int n_cols = (col_total[0] > 0 ? 1 : 0) + (col_total[1] > 0 ? 1 : 0);
  if (rows.size() < 2 || n_cols < 2) {
    throw DataError(
        "chi-square association is degenerate: fewer than two observed "
        "categories on one side of the table");
  }

  AssociationTest result;
  result.kind = TestKind::kChiSquare;
  result.df = static_cast<double>(rows.size() - 1);
  for (const auto& row : rows) {
    const double row_total = static_cast<double>(row[0] + row[1]);
    for (int c = 0; c < 2; ++c) {
      const double expected =
          row_total * static_cast<double>(col_total[c]) /
          static_cast<double>(n);
      if (expected < 5.0) result.low_expected_count = true;
      const double diff = static_cast<double>(row[c]) - expected;
      result.statistic += diff * diff / expected;
    }
  }
  result.p_value = stat::chi_square_survival(result.statistic, result.df);
  return result;
}

AssociationTest t_association(const data::MixedDataset& data, int cov_col,
                              int outcome_col, bool welch) {
  double sum[2] = {0.0, 0.0};
  long long count[2] = {0, 0};
  for (int r = 0; r < data.n_rows(); ++r) {
    const int g = data.category_at(r, outcome_col);
    sum[g] += data.column(cov_col)[static_cast<std::size_t>(r)];
    count[g]++;
  }
  if (count[0] < 2 || count[1] < 2) {
    throw DataError(
        "t-test association requires at least two observations per outcome "
        "group");
  }
  const double mean[2] = {sum[0] / count[0], sum[1] / count[1]};
  double ss[2] = {0.0, 0.0};
  for (int r = 0; r < data.n_rows(); ++r) {
    const int g = data.category_at(r, outcome_col);
    const double d =
        data.column(cov_col)[static_cast<std::size_t>(r)] - mean[g];
    ss[g] += d * d;
  }

  AssociationTest result;
  result.kind = TestKind::kStudentT;
  const double n0 = static_cast<double>(count[0]);
  const double n1 = static_cast<double>(count[1]);
  double se = 0.0;
  if (welch) {
    const double v0 = ss[0] / (n0 - 1.0) / n0;
    const double v1 = ss[1] / (n1 - 1.0) / n1;
    se = std::sqrt(v0 + v1);
    if (se > 0.0) {
      result.df = (v0 + v1) * (v0 + v1) /
                  (v0 * v0 / (n0 - 1.0) + v1 * v1 / (n1 - 1.0));
    }
  } else {
    const double pooled = (ss[0] + ss[1]) / (n0 + n1 - 2.0);
    se = std::sqrt(pooled * (1.0 / n0 + 1.0 / n1));
    result.df = n0 + n1 - 2.0;
  }
  if (!(se > 0.0)) {
    throw DataError(
        "t-test association is undefined: covariate has zero variance "
        "within the outcome groups");
  }
  result.statistic = (mean[0] - mean[1]) / se;
  result.p_value = stat::student_t_two_sided_p(result.statistic, result.df);
  return result;
}

}  // namespace

std::string test_kind_name(TestKind kind) {
  return kind == TestKind::kChiSquare ? "chi_square" : "student_t";
}

AssociationTest association_test(const data::MixedDataset& data,
                                 const std::string& covariate,
                                 const std::string& outcome, bool welch) {
  if (covariate == outcome) {
    throw DataError("association test of '" + covariate +
                    "' against itself");
  }
  const int outcome_col = binary_outcome_column(data, outcome);
  const int cov_col = data.col_index(covariate);
  AssociationTest result;
  if (data.schema(cov_col).kind == data::ColumnKind::kCategorical) {
    result = chi_square_association(data, cov_col, outcome_col);
    if (result.low_expected_count) {
      log::warn("chi-square for '" + covariate +
                "': an expected cell count is below 5; the large-sample "
                "p-value is approximate");
    }
  } else {
    result = t_association(data, cov_col, outcome_col, welch);
  }
  return result;
}

double association_pvalue(const data::MixedDataset& data,
                          const std::string& covariate,
                          const std::string& outcome, bool welch) {
  return association_test(data, covariate, outcome, welch).p_value;
}

PValueExperiment pvalue_experiment(const vbg::GeneratorModel& generator,
                                   const exec::OutcomeGenerator& outcomes,
                                   const std::string& outcome_name,
                                   const PValueExperimentOptions& options,
                                   std::uint64_t seed,
                                   const data::MixedDataset* original) {
  if (options.n_datasets < 1 || options.n_rows < 1) {
    throw ConfigError("p-value experiment needs n_datasets >= 1 and n_rows >= 1");
  }
  if (options.threads < 1) {
    throw ConfigError("p-value experiment needs threads >= 1");
  }
  if (!outcomes.classifier) {
    throw DataError("p-value experiment needs a fitted outcome generator");
  }
  const auto& labels = outcomes.classifier->labels();
  if (labels.size() != 2) {
    throw DataError("p-value experiment requires a binary outcome; the "
                    "classifier has " + std::to_string(labels.size()) +
                    " labels");
  }

  const auto baseline_schema = vbg::generator_schema(generator);
  std::vector<std::string> covariate_names;
  for (const auto& col : baseline_schema) {
    if (col.name == outcome_name) {
      throw DataError("outcome name '" + outcome_name +
                      "' collides with a baseline column");
    }
    covariate_names.push_back(col.name);
  }
  for (const auto& needed : outcomes.classifier->covariates()) {
    if (std::find(covariate_names.begin(), covariate_names.end(), needed) ==
        covariate_names.end()) {
      throw DataError("outcome classifier needs covariate '" + needed +
                      "' which the generator does not produce");
    }
  }

  const data::ColumnSchema outcome_schema{
      outcome_name, data::ColumnKind::kCategorical, labels};
  const std::size_t n_cov = covariate_names.size();
  std::vector<std::vector<double>> table(
      n_cov, std::vector<double>(static_cast<std::size_t>(options.n_datasets),
                                 0.0));

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto run_replicate = [&](int k) {
    const std::uint64_t replicate_seed =
        stat::derive_seed(seed, "replicate-" + std::to_string(k));
    auto cohort = vbg::sample_generator(
        generator, options.n_rows, stat::derive_seed(replicate_seed, "baseline"));
    stat::Rng outcome_rng(stat::derive_seed(replicate_seed, "outcome"));

    std::vector<double> codes;
    codes.reserve(static_cast<std::size_t>(cohort.n_rows()));
    for (int r = 0; r < cohort.n_rows(); ++r) {
      exec::NamedValues patient;
      for (const auto& name : outcomes.classifier->covariates()) {
        patient[name] = cohort.regression_value(r, cohort.col_index(name));
      }
      const std::string label =
          exec::simulate_outcome(outcomes, patient, outcome_rng);
      const auto it = std::find(labels.begin(), labels.end(), label);
      codes.push_back(static_cast<double>(it - labels.begin()));
    }
    cohort.add_column(outcome_schema, codes);

    for (std::size_t c = 0; c < n_cov; ++c) {
      table[c][static_cast<std::size_t>(k)] =
          association_pvalue(cohort, covariate_names[c], outcome_name,
                             options.welch);
    }
  };

  const auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= options.n_datasets) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        run_replicate(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::min(options.threads, options.n_datasets);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  PValueExperiment experiment;
  experiment.n_datasets = options.n_datasets;
  experiment.n_rows = options.n_rows;
  experiment.outcome = outcome_name;
  for (std::size_t c = 0; c < n_cov; ++c) {
    CovariateReplicates rep;
    rep.covariate = covariate_names[c];
    rep.kind = baseline_schema[c].kind == data::ColumnKind::kCategorical
                   ? TestKind::kChiSquare
                   : TestKind::kStudentT;
    rep.p_values = std::move(table[c]);
    rep.median_p = median(rep.p_values);
    if (original != nullptr) {
      rep.original_p = association_pvalue(*original, rep.covariate,
                                          outcome_name, options.welch);
    }
    experiment.covariates.push_back(std::move(rep));
  }
  return experiment;
}

nlohmann::json pvalue_experiment_to_json(const PValueExperiment& experiment) {
  nlohmann::json covariates = nlohmann::json::array();
  for (const auto& rep : experiment.covariates) {
    nlohmann::json entry{{"covariate", rep.covariate},
                         {"test", test_kind_name(rep.kind)},
                         {"median_p", rep.median_p},
                         {"p_values", rep.p_values}};
    if (rep.original_p >= 0.0) entry["original_p"] = rep.original_p;
    covariates.push_back(std::move(entry));
  }
  return nlohmann::json{{"n_datasets", experiment.n_datasets},
                        {"n_rows", experiment.n_rows},
                        {"outcome", experiment.outcome},
                        {"covariates", covariates}};
}

std::string pvalue_experiment_csv(const PValueExperiment& experiment) {
  std::string out = "covariate,test,replicate,p_value\n";
  for (const auto& rep : experiment.covariates) {
    for (std::size_t k = 0; k < rep.p_values.size(); ++k) {
      out += rep.covariate;
      out += ',';
      out += test_kind_name(rep.kind);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += io::format_double(rep.p_values[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace cohortsim::analyze
