#pragma once

// Association testing between baseline covariates and a binary outcome
// (Pearson chi-square for categorical covariates, two-sample t with pooled
// variance for continuous ones), and the replication experiment that fits
// the tests on many generated cohorts to compare p-value distributions
// against the source data.

#include <cstdint>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/exec/outcome.hpp"
#include "cohortsim/vbg/model_io.hpp"
#include "nlohmann/json.hpp"

namespace cohortsim::analyze {

enum class TestKind { kChiSquare, kStudentT };

std::string test_kind_name(TestKind kind);

struct AssociationTest {
  TestKind kind = TestKind::kChiSquare;
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  // Chi-square only: some expected cell count fell below 5, so the
  // large-sample approximation is shaky (reported, not fatal).
  bool low_expected_count = false;
};

// Tests the association between `covariate` and the binary categorical
// `outcome` column.  Categorical covariates get a Pearson chi-square test
// (no continuity correction); continuous covariates a two-sample t-test
// with pooled variance (Welch when `welch` is set).  A continuous covariate
// with zero variance in both groups makes the test undefined.
AssociationTest association_test(const data::MixedDataset& data,
                                 const std::string& covariate,
                                 const std::string& outcome,
                                 bool welch = false);

double association_pvalue(const data::MixedDataset& data,
                          const std::string& covariate,
                          const std::string& outcome, bool welch = false);

struct PValueExperimentOptions {
  int n_datasets = 100;
  int n_rows = 500;
  bool welch = false;
  int threads = 1;  // replicates are independent; > 1 splits them
};

struct CovariateReplicates {
  std::string covariate;
  TestKind kind = TestKind::kChiSquare;
  std::vector<double> p_values;  // one per replicate, replicate order
  double median_p = 1.0;
  double original_p = -1.0;  // p on the source data; -1 when not supplied
};

struct PValueExperiment {
  int n_datasets = 0;
  int n_rows = 0;
  std::string outcome;
  std::vector<CovariateReplicates> covariates;
};

// For each replicate: generate `n_rows` baselines from `generator`, attach
// an outcome simulated by `outcomes`, and test every baseline covariate
// against the outcome.  Replicates use split seeds, so results do not
// depend on `options.threads`.  When `original` is given (a dataset that
// already contains `outcome_name`), its per-covariate p-values are recorded
// alongside.
PValueExperiment pvalue_experiment(const vbg::GeneratorModel& generator,
                                   const exec::OutcomeGenerator& outcomes,
                                   const std::string& outcome_name,
                                   const PValueExperimentOptions& options = {},
                                   std::uint64_t seed = 1,
                                   const data::MixedDataset* original = nullptr);

nlohmann::json pvalue_experiment_to_json(const PValueExperiment& experiment);

// Flat replicate table: covariate,test,replicate,p_value — one row per
// (covariate, replicate), ready for boxplots.
std::string pvalue_experiment_csv(const PValueExperiment& experiment);

}  // namespace cohortsim::analyze
