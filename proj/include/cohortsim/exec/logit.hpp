#pragma once

// Covariate-driven transition models: multinomial logistic regression fitted
// by Newton's method with step halving, optional L2 regularization, greedy
// collinear-column dropping, and backward stepwise covariate selection by
// AIC.  The reference state carries a zero linear predictor.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortsim/data/dataset.hpp"

namespace cohortsim::exec {

// Covariate vectors passed by name; ordered map keeps diagnostics stable.
using NamedValues = std::map<std::string, double>;

struct CovariateMarkovModel {
  std::vector<std::string> states;  // destination states, category order
  std::string reference_state;      // states[0]; its coefficient row is zero
  std::vector<std::string> covariates;  // retained covariates, design order
  // coef[k] is the row for states[k]: [intercept, one slope per covariate].
  // The reference row is stored explicitly as zeros.
  std::vector<std::vector<double>> coef;
  bool capped = false;  // separation cap was applied to some coefficient
};

struct LogitFitOptions {
  bool backward_stepwise = true;
  double l2 = 0.0;        // ridge strength on slopes (intercepts unpenalized)
  double coef_cap = 30.0; // |coefficient| bound under separation
  int max_iter = 200;
  double tol = 1e-9;      // gradient max-norm convergence target
};

struct LogitFitReport {
  std::vector<std::string> dropped_collinear;
  std::vector<std::string> dropped_stepwise;
  bool capped = false;
  double loglik = 0.0;
  double aic = 0.0;
  int iterations = 0;
  std::vector<std::string> notes;
};

// Fits P(target | covariates).  `target` must name a categorical column
// with at least two categories; candidate covariates enter on their
// regression scale (continuous value, or numeric label / category index).
// Requires n >= 10 x (number of candidates).  Collinear columns are dropped
// greedily with a diagnostic; backward stepwise then removes covariates
// while doing so lowers the AIC.
CovariateMarkovModel fit_multinomial_logit(
    const data::MixedDataset& data, const std::string& target,
    const std::vector<std::string>& candidates,
    const LogitFitOptions& options = {}, LogitFitReport* report = nullptr);

void validate_covariate_markov(const CovariateMarkovModel& model);

// Softmax probabilities over model.states given named covariate values.
// Missing covariate -> DataError naming it; non-finite value -> NumericError.
std::vector<double> transition_probs(const CovariateMarkovModel& model,
                                     const NamedValues& covariates);

// Log-likelihood of `data` under the model's current coefficients (no
// penalty term).  When `gradient` is non-null it receives d loglik / d coef
// for the non-reference states in order, each laid out as
// [intercept, slopes...].  Exposed for score checks and stepwise logic.
double logit_loglik(const CovariateMarkovModel& model,
                    const data::MixedDataset& data, const std::string& target,
                    std::vector<double>* gradient = nullptr);

nlohmann::json covariate_markov_to_json(const CovariateMarkovModel& model);
CovariateMarkovModel covariate_markov_from_json(const nlohmann::json& j);

}  // namespace cohortsim::exec
