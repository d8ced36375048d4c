#pragma once

// Outcome generation: a fitted classifier predicts a label, and an optional
// confusion-matrix noise stage re-draws the emitted label from the
// classifier's empirical error profile, so simulated outcomes carry the
// prediction error instead of being deterministic predictions.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/exec/logit.hpp"
#include "cohortsim/stat/rng.hpp"

namespace cohortsim::exec {

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual const std::vector<std::string>& labels() const = 0;
  virtual const std::vector<std::string>& covariates() const = 0;
  // Probability per label, summing to 1.
  virtual std::vector<double> predict_proba(const NamedValues& c) const = 0;
  // Arg-max label; ties resolve to the lower label index.
  std::string predict(const NamedValues& c) const;
};

struct ClassifierOptions {
  double l2 = 1e-3;  // logistic ridge strength
  int n_trees = 50;
  int max_depth = 4;
  int min_leaf = 5;
};

// L2-regularized multinomial logistic classifier over the named covariates
// (no stepwise pruning: a classifier should keep its inputs).
std::unique_ptr<Classifier> fit_logistic_classifier(
    const data::MixedDataset& data, const std::string& outcome,
    const std::vector<std::string>& covariates,
    const ClassifierOptions& options = {});

// Bagged CART ensemble (gini splits, depth/leaf limited, bootstrap per
// tree); probabilities are averaged leaf distributions.
std::unique_ptr<Classifier> fit_bagged_trees(
    const data::MixedDataset& data, const std::string& outcome,
    const std::vector<std::string>& covariates,
    const ClassifierOptions& options = {}, std::uint64_t seed = 1);

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long long>> counts;  // counts[true][predicted]
};

// Tallies counts[true][predicted] of `clf` over the evaluation rows.
// Throws DataError if the classifier emits a label that is not a category
// of the outcome column.
ConfusionMatrix confusion_matrix(const Classifier& clf,
                                 const data::MixedDataset& eval_data,
                                 const std::string& outcome);

struct OutcomeGenerator {
  std::shared_ptr<const Classifier> classifier;
  ConfusionMatrix noise;
  bool noise_enabled = true;
};

// Convenience: classifier + its confusion matrix on `eval_data`.
OutcomeGenerator make_outcome_generator(
    std::shared_ptr<const Classifier> classifier,
    const data::MixedDataset& eval_data, const std::string& outcome,
    bool noise_enabled = true);

// Predicts a label; with noise enabled the emitted label is drawn from the
// confusion-matrix column of the predicted label (normalized over true
// labels).  A zero-mass column falls back to the prediction with a logged
// diagnostic.  Deterministic given the rng state / seed.
std::string simulate_outcome(const OutcomeGenerator& gen,
                             const NamedValues& patient, stat::Rng& rng);
std::string simulate_outcome(const OutcomeGenerator& gen,
                             const NamedValues& patient, std::uint64_t seed);

// Per-patient paired outcomes (exposure arm y1, control arm y0).
struct PairedOutcomes {
  std::vector<double> y1;
  std::vector<double> y0;
};

// Mean of the per-patient differences y1 - y0.
double ate_paired(const PairedOutcomes& outcomes);

}  // namespace cohortsim::exec
