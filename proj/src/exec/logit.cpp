#include "cohortsim/exec/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cohortsim/stat/matrix.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::exec {

namespace {

struct Design {
  stat::Matrix x;       // n x (1 + q), column 0 is the intercept
  std::vector<int> y;   // target category codes
  int n_states = 0;
};

Design build_design(const data::MixedDataset& data, const std::string& target,
                    const std::vector<std::string>& covariates) {
  const int target_col = data.col_index(target);
  if (data.schema(target_col).kind != data::ColumnKind::kCategorical) {
    throw DataError("fit_multinomial_logit: target '" + target +
                    "' must be categorical");
  }
  const int k = static_cast<int>(data.schema(target_col).categories.size());
  if (k < 2) {
    throw DataError("fit_multinomial_logit: target '" + target +
                    "' needs at least two categories");
  }
  Design d;
  d.n_states = k;
  const int n = data.n_rows();
  const int p = 1 + static_cast<int>(covariates.size());
  d.x = stat::Matrix(n, p);
  d.y.resize(n);
  std::vector<int> cols;
  for (const auto& name : covariates) cols.push_back(data.col_index(name));
  for (int i = 0; i < n; ++i) {
    d.x.at(i, 0) = 1.0;
    for (int j = 0; j < p - 1; ++j) {
      const double v = data.regression_value(i, cols[j]);
      if (!std::isfinite(v)) {
        throw NumericError("fit_multinomial_logit: non-finite value in '" +
                           covariates[j] + "'");
      }
      d.x.at(i, 1 + j) = v;
    }
    d.y[i] = data.category_at(i, target_col);
  }
  return d;
}

// Log-likelihood (optionally L2-penalized on the slopes) with gradient and
// negative Hessian of the packed coefficient vector: non-reference states in
// order, each [intercept, slopes...].
double eval_loglik(const Design& d, const std::vector<double>& beta, double l2,
                   std::vector<double>* grad, stat::Matrix* neg_hess) {
  const int n = d.x.rows();
  const int p = d.x.cols();
  const int km1 = d.n_states - 1;
  const int dim = km1 * p;
  if (grad != nullptr) grad->assign(dim, 0.0);
  if (neg_hess != nullptr) *neg_hess = stat::Matrix(dim, dim);

  double ll = 0.0;
  std::vector<double> eta(km1), prob(km1);
  for (int i = 0; i < n; ++i) {
    double mx = 0.0;  // the reference predictor is 0
    for (int s = 0; s < km1; ++s) {
      double e = 0.0;
      for (int j = 0; j < p; ++j) e += beta[s * p + j] * d.x.at(i, j);
      eta[s] = e;
      mx = std::max(mx, e);
    }
    double denom = std::exp(-mx);
    for (int s = 0; s < km1; ++s) denom += std::exp(eta[s] - mx);
    const double lse = mx + std::log(denom);
    ll += (d.y[i] == 0 ? 0.0 : eta[d.y[i] - 1]) - lse;

    if (grad == nullptr && neg_hess == nullptr) continue;
    for (int s = 0; s < km1; ++s) prob[s] = std::exp(eta[s] - lse);
    if (grad != nullptr) {
      for (int s = 0; s < km1; ++s) {
        const double w = (d.y[i] == s + 1 ? 1.0 : 0.0) - prob[s];
        for (int j = 0; j < p; ++j) (*grad)[s * p + j] += w * d.x.at(i, j);
      }
    }
    if (neg_hess != nullptr) {
      for (int s = 0; s < km1; ++s) {
        for (int t = s; t < km1; ++t) {
          const double w = prob[s] * ((s == t ? 1.0 : 0.0) - prob[t]);
          if (w == 0.0) continue;
          for (int j = 0; j < p; ++j) {
            const double wx = w * d.x.at(i, j);
            for (int m = 0; m < p; ++m) {
              const double v = wx * d.x.at(i, m);
              neg_hess->at(s * p + j, t * p + m) += v;
              if (t != s) neg_hess->at(t * p + m, s * p + j) += v;
            }
          }
        }
      }
    }
  }

  if (l2 > 0.0) {
    for (int s = 0; s < km1; ++s) {
      for (int j = 1; j < p; ++j) {
        const double b = beta[s * p + j];
        ll -= 0.5 * l2 * b * b;
        if (grad != nullptr) (*grad)[s * p + j] -= l2 * b;
        if (neg_hess != nullptr) neg_hess->at(s * p + j, s * p + j) += l2;
      }
    }
  }
  return ll;
}

struct NewtonResult {
  std::vector<double> beta;
  double loglik = 0.0;   // unpenalized, at the final coefficients
  int iterations = 0;
  bool capped = false;
  double grad_max = 0.0;  // penalized-objective gradient max-norm at the end
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Newton ascent with step halving; coefficients projected onto
// [-cap, cap] each step so separated fits stay bounded.
NewtonResult newton_fit(const Design& d, const LogitFitOptions& options) {
  const int p = d.x.cols();
  const int dim = (d.n_states - 1) * p;
  NewtonResult res;
  res.beta.assign(dim, 0.0);

  std::vector<double> grad;
  stat::Matrix neg_hess;
  double ll = eval_loglik(d, res.beta, options.l2, &grad, &neg_hess);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    res.grad_max = max_abs(grad);
    if (res.grad_max < options.tol) break;
    res.iterations = iter + 1;

    // Newton direction; escalate a diagonal ridge if the curvature matrix
    // is numerically singular.
    std::vector<double> delta;
    double trace = 0.0;
    for (int i = 0; i < dim; ++i) trace += neg_hess.at(i, i);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
      stat::Matrix h = neg_hess;
      if (ridge > 0.0) {
        for (int i = 0; i < dim; ++i) h.at(i, i) += ridge;
      }
      try {
        delta = stat::solve_spd(h, grad);
        break;
      } catch (const NumericError&) {
        ridge = (ridge == 0.0) ? std::max(1e-10 * trace, 1e-12) : ridge * 100.0;
      }
    }
    if (delta.empty()) break;

    bool accepted = false;
    std::vector<double> cand(dim);
    double cand_ll = 0.0;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      for (int i = 0; i < dim; ++i) {
        cand[i] = std::clamp(res.beta[i] + t * delta[i], -options.coef_cap,
                             options.coef_cap);
      }
      cand_ll = eval_loglik(d, cand, options.l2, nullptr, nullptr);
      if (std::isfinite(cand_ll) && cand_ll > ll + 1e-13) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent left at this precision

    const double gain = cand_ll - ll;
    res.beta = std::move(cand);
    ll = eval_loglik(d, res.beta, options.l2, &grad, &neg_hess);
    // A stalled objective with coefficients pinned at the cap means
    // separation: stop rather than oscillate.
    bool at_cap = false;
    for (double b : res.beta) {
      if (std::fabs(b) >= options.coef_cap - 1e-9) at_cap = true;
    }
    if (at_cap && gain < 1e-10) break;
  }

  res.grad_max = max_abs(grad);
  for (double b : res.beta) {
    if (std::fabs(b) >= options.coef_cap - 1e-9) res.capped = true;
  }
  res.loglik = eval_loglik(d, res.beta, 0.0, nullptr, nullptr);
  return res;
}

// True when the Gram matrix of the selected design columns is numerically
// rank deficient.
bool gram_singular(const stat::Matrix& x, const std::vector<int>& cols) {
  const int m = static_cast<int>(cols.size());
  stat::Matrix gram(m, m);
  double scale = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < x.rows(); ++i) {
        s += x.at(i, cols[a]) * x.at(i, cols[b]);
      }
      gram.at(a, b) = s;
      gram.at(b, a) = s;
    }
    scale = std::max(scale, gram.at(a, a));
  }
  if (scale == 0.0) return true;  // all-zero column
  int clamped = 0;
  const stat::Matrix lower = stat::cholesky_factor(gram, &clamped);
  if (clamped > 0) return true;
  for (int a = 0; a < m; ++a) {
    if (lower.at(a, a) * lower.at(a, a) <= 1e-12 * scale) return true;
  }
  return false;
}

Design subset_design(const Design& full, const std::vector<int>& keep_cols) {
  Design d;
  d.n_states = full.n_states;
  d.y = full.y;
  d.x = stat::Matrix(full.x.rows(), static_cast<int>(keep_cols.size()));
  for (int i = 0; i < full.x.rows(); ++i) {
    for (std::size_t j = 0; j < keep_cols.size(); ++j) {
      d.x.at(i, static_cast<int>(j)) = full.x.at(i, keep_cols[j]);
    }
  }
  return d;
}

double aic_of(const NewtonResult& fit, int n_states, int n_design_cols) {
  return 2.0 * (n_states - 1) * n_design_cols - 2.0 * fit.loglik;
}

CovariateMarkovModel build_model(const data::MixedDataset& data,
                                 const std::string& target,
                                 const std::vector<std::string>& covariates,
                                 const NewtonResult& fit) {
  CovariateMarkovModel model;
  const int target_col = data.col_index(target);
  model.states = data.schema(target_col).categories;
  model.reference_state = model.states[0];
  model.covariates = covariates;
  const int p = 1 + static_cast<int>(covariates.size());
  model.coef.assign(model.states.size(), std::vector<double>(p, 0.0));
  for (std::size_t s = 1; s < model.states.size(); ++s) {
    for (int j = 0; j < p; ++j) {
      model.coef[s][j] = fit.beta[(s - 1) * p + j];
    }
  }
  model.capped = fit.capped;
  return model;
}

}  // namespace

CovariateMarkovModel fit_multinomial_logit(
    const data::MixedDataset& data, const std::string& target,
    const std::vector<std::string>& candidates, const LogitFitOptions& options,
    LogitFitReport* report) {
  if (data.n_rows() < 1) {
    throw DataError("fit_multinomial_logit: empty dataset");
  }
  if (data.n_rows() < 10 * static_cast<int>(candidates.size())) {
    throw DataError("fit_multinomial_logit: " + std::to_string(data.n_rows()) +
                    " rows are too few for " +
                    std::to_string(candidates.size()) +
                    " candidate covariates (need 10 per candidate)");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == target) {
      throw DataError("fit_multinomial_logit: target '" + target +
                      "' cannot be its own covariate");
    }
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (candidates[i] == candidates[j]) {
        throw DataError("fit_multinomial_logit: duplicate candidate '" +
                        candidates[i] + "'");
      }
    }
  }

  LogitFitReport rep;
  const Design full = build_design(data, target, candidates);

  // Greedy collinearity screen: keep a candidate only if it extends the
  // column space of what was kept so far.
  std::vector<int> kept_cols = {0};
  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    std::vector<int> trial = kept_cols;
    trial.push_back(1 + static_cast<int>(j));
    if (gram_singular(full.x, trial)) {
      rep.dropped_collinear.push_back(candidates[j]);
      rep.notes.push_back("covariate '" + candidates[j] +
                          "' is collinear with the retained design; dropped");
    } else {
      kept_cols = std::move(trial);
      kept_names.push_back(candidates[j]);
    }
  }

  Design design = subset_design(full, kept_cols);
  NewtonResult fit = newton_fit(design, options);
  double aic = aic_of(fit, full.n_states, design.x.cols());

  if (options.backward_stepwise) {
    while (!kept_names.empty()) {
      int best = -1;
      double best_aic = aic;
      NewtonResult best_fit;
      for (std::size_t drop = 0; drop < kept_names.size(); ++drop) {
        std::vector<int> cols;
        for (std::size_t j = 0; j < kept_cols.size(); ++j) {
          if (j != drop + 1) cols.push_back(kept_cols[j]);
        }
        const Design trial = subset_design(full, cols);
        NewtonResult trial_fit = newton_fit(trial, options);
        const double trial_aic = aic_of(trial_fit, full.n_states,
                                        trial.x.cols());
        if (trial_aic < best_aic - 1e-9) {
          best = static_cast<int>(drop);
          best_aic = trial_aic;
          best_fit = std::move(trial_fit);
        }
      }
      if (best < 0) break;
      rep.dropped_stepwise.push_back(kept_names[best]);
      rep.notes.push_back("covariate '" + kept_names[best] +
                          "' removed by backward stepwise (AIC " +
                          io::format_double(aic) + " -> " +
                          io::format_double(best_aic) + ")");
      kept_names.erase(kept_names.begin() + best);
      kept_cols.erase(kept_cols.begin() + best + 1);
      fit = std::move(best_fit);
      aic = best_aic;
    }
  }

  if (fit.capped) {
    rep.capped = true;
    rep.notes.push_back("separation detected: coefficients capped at ±" +
                        io::format_double(options.coef_cap));
  }
  rep.loglik = fit.loglik;
  rep.aic = aic;
  rep.iterations = fit.iterations;
  for (const auto& note : rep.notes) log::warn("fit_multinomial_logit: ", note);
  if (report != nullptr) *report = rep;

  CovariateMarkovModel model = build_model(data, target, kept_names, fit);
  validate_covariate_markov(model);
  return model;
}

void validate_covariate_markov(const CovariateMarkovModel& model) {
  const std::size_t k = model.states.size();
  if (k < 2) {
    throw DataError("covariate markov model: needs at least two states");
  }
  if (model.reference_state != model.states[0]) {
    throw DataError("covariate markov model: reference state must be the "
                    "first state");
  }
  if (model.coef.size() != k) {
    throw DataError("covariate markov model: one coefficient row per state "
                    "required");
  }
  const std::size_t p = 1 + model.covariates.size();
  for (const auto& row : model.coef) {
    if (row.size() != p) {
      throw DataError("covariate markov model: coefficient row length "
                      "mismatch");
    }
    for (double b : row) {
      if (!std::isfinite(b)) {
        throw DataError("covariate markov model: non-finite coefficient");
      }
    }
  }
  for (double b : model.coef[0]) {
    if (b != 0.0) {
      throw DataError("covariate markov model: reference row must be zero");
    }
  }
}

std::vector<double> transition_probs(const CovariateMarkovModel& model,
                                     const NamedValues& covariates) {
  const std::size_t k = model.states.size();
  const std::size_t p = 1 + model.covariates.size();
  std::vector<double> eta(k, 0.0);
  for (std::size_t s = 0; s < k; ++s) {
    double e = model.coef[s][0];
    for (std::size_t j = 1; j < p; ++j) {
      const auto it = covariates.find(model.covariates[j - 1]);
      if (it == covariates.end()) {
        throw DataError("transition_probs: missing covariate '" +
                        model.covariates[j - 1] + "'");
      }
      if (!std::isfinite(it->second)) {
        throw NumericError("transition_probs: covariate '" +
                           model.covariates[j - 1] + "' is not finite");
      }
      e += model.coef[s][j] * it->second;
    }
    eta[s] = e;
  }
  const double mx = *std::max_element(eta.begin(), eta.end());
  double denom = 0.0;
  for (double e : eta) denom += std::exp(e - mx);
  std::vector<double> probs(k);
  for (std::size_t s = 0; s < k; ++s) probs[s] = std::exp(eta[s] - mx) / denom;
  return probs;
}

double logit_loglik(const CovariateMarkovModel& model,
                    const data::MixedDataset& data, const std::string& target,
                    std::vector<double>* gradient) {
  validate_covariate_markov(model);
  const Design d = build_design(data, target, model.covariates);
  if (d.n_states != static_cast<int>(model.states.size())) {
    throw DataError("logit_loglik: target categories do not match the model "
                    "states");
  }
  const int p = d.x.cols();
  std::vector<double> beta(static_cast<std::size_t>(d.n_states - 1) * p);
  for (int s = 1; s < d.n_states; ++s) {
    for (int j = 0; j < p; ++j) {
      beta[(s - 1) * p + j] = model.coef[s][j];
    }
  }
  return eval_loglik(d, beta, 0.0, gradient, nullptr);
}

nlohmann::json covariate_markov_to_json(const CovariateMarkovModel& model) {
  nlohmann::json j;
  j["kind"] = "covariate_markov";
  j["states"] = model.states;
  j["reference_state"] = model.reference_state;
  j["covariates"] = model.covariates;
  j["coef"] = model.coef;
  j["capped"] = model.capped;
  return j;
}

CovariateMarkovModel covariate_markov_from_json(const nlohmann::json& j) {
  CovariateMarkovModel model;
  try {
    if (j.value("kind", std::string("covariate_markov")) !=
        "covariate_markov") {
      throw DataError("covariate markov json: kind mismatch");
    }
    model.states = j.at("states").get<std::vector<std::string>>();
    model.reference_state = j.at("reference_state").get<std::string>();
    model.covariates = j.at("covariates").get<std::vector<std::string>>();
    model.coef = j.at("coef").get<std::vector<std::vector<double>>>();
    model.capped = j.value("capped", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("covariate markov json: malformed document: ") +
                    e.what());
  }
  validate_covariate_markov(model);
  return model;
}

}  // namespace cohortsim::exec
