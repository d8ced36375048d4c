#include "cohortsim/exec/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cohortsim/stat/matrix.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::exec {

std::string Classifier::predict(const NamedValues& c) const {
  const std::vector<double> probs = predict_proba(c);
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return labels()[best];
}

namespace {

NamedValues row_values(const data::MixedDataset& data, int row,
                       const std::vector<std::string>& names,
                       const std::vector<int>& cols) {
  NamedValues values;
  for (std::size_t j = 0; j < names.size(); ++j) {
    values[names[j]] = data.regression_value(row, cols[j]);
  }
  return values;
}

std::vector<int> covariate_cols(const data::MixedDataset& data,
                                const std::vector<std::string>& names) {
  std::vector<int> cols;
  cols.reserve(names.size());
  for (const auto& name : names) cols.push_back(data.col_index(name));
  return cols;
}

class LogisticClassifier final : public Classifier {
 public:
  explicit LogisticClassifier(CovariateMarkovModel model)
      : model_(std::move(model)) {}

  std::string name() const override { return "logistic"; }
  const std::vector<std::string>& labels() const override {
    return model_.states;
  }
  const std::vector<std::string>& covariates() const override {
    return model_.covariates;
  }
  std::vector<double> predict_proba(const NamedValues& c) const override {
    return transition_probs(model_, c);
  }

 private:
  CovariateMarkovModel model_;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> probs;
};

double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double g = 1.0;
  for (double c : counts) {
    const double f = c / total;
    g -= f * f;
  }
  return g;
}

class TreeBuilder {
 public:
  TreeBuilder(const stat::Matrix& x, const std::vector<int>& y, int n_classes,
              int max_depth, int min_leaf)
      : x_(x), y_(y), n_classes_(n_classes), max_depth_(max_depth),
        min_leaf_(min_leaf) {}

  std::vector<TreeNode> build(std::vector<int> rows) {
    nodes_.clear();
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<int> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    std::vector<double> counts(n_classes_, 0.0);
    for (int r : rows) counts[y_[r]] += 1.0;
    const double total = static_cast<double>(rows.size());
    std::vector<double> probs(n_classes_);
    for (int c = 0; c < n_classes_; ++c) probs[c] = counts[c] / total;

    const bool pure = *std::max_element(counts.begin(), counts.end()) == total;
    if (depth >= max_depth_ || pure ||
        static_cast<int>(rows.size()) < 2 * min_leaf_) {
      nodes_[id].probs = std::move(probs);
      return id;
    }

    // Best gini split over all features and midpoints.
    const double parent = gini(counts, total);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = parent - 1e-12;
    std::vector<std::pair<double, int>> order(rows.size());
    for (int f = 0; f < x_.cols(); ++f) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        order[i] = {x_.at(rows[i], f), y_[rows[i]]};
      }
      std::sort(order.begin(), order.end());
      std::vector<double> left(n_classes_, 0.0);
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left[order[i].second] += 1.0;
        if (order[i].first == order[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = total - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        std::vector<double> right(n_classes_);
        for (int c = 0; c < n_classes_; ++c) right[c] = counts[c] - left[c];
        const double score =
            (nl / total) * gini(left, nl) + (nr / total) * gini(right, nr);
        if (score < best_score) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (order[i].first + order[i + 1].first);
        }
      }
    }
    if (best_feature < 0) {
      nodes_[id].probs = std::move(probs);
      return id;
    }

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (x_.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int left_id = grow(std::move(left_rows), depth + 1);
    const int right_id = grow(std::move(right_rows), depth + 1);
    nodes_[id].left = left_id;
    nodes_[id].right = right_id;
    return id;
  }

  const stat::Matrix& x_;
  const std::vector<int>& y_;
  int n_classes_;
  int max_depth_;
  int min_leaf_;
  std::vector<TreeNode> nodes_;
};

class BaggedTreesClassifier final : public Classifier {
 public:
  BaggedTreesClassifier(std::vector<std::string> labels,
                        std::vector<std::string> covariates,
                        std::vector<std::vector<TreeNode>> trees)
      : labels_(std::move(labels)), covariates_(std::move(covariates)),
        trees_(std::move(trees)) {}

  std::string name() const override { return "bagged_trees"; }
  const std::vector<std::string>& labels() const override { return labels_; }
  const std::vector<std::string>& covariates() const override {
    return covariates_;
  }

  std::vector<double> predict_proba(const NamedValues& c) const override {
    std::vector<double> features(covariates_.size());
    for (std::size_t j = 0; j < covariates_.size(); ++j) {
      const auto it = c.find(covariates_[j]);
      if (it == c.end()) {
        throw DataError("bagged_trees: missing covariate '" + covariates_[j] +
                        "'");
      }
      if (!std::isfinite(it->second)) {
        throw NumericError("bagged_trees: covariate '" + covariates_[j] +
                           "' is not finite");
      }
      features[j] = it->second;
    }
    std::vector<double> probs(labels_.size(), 0.0);
    for (const auto& tree : trees_) {
      int node = 0;
      while (tree[node].feature >= 0) {
        node = features[tree[node].feature] <= tree[node].threshold
                   ? tree[node].left
                   : tree[node].right;
      }
      for (std::size_t c2 = 0; c2 < probs.size(); ++c2) {
        probs[c2] += tree[node].probs[c2];
      }
    }
    for (double& p : probs) p /= static_cast<double>(trees_.size());
    return probs;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> covariates_;
  std::vector<std::vector<TreeNode>> trees_;
};

}  // namespace

std::unique_ptr<Classifier> fit_logistic_classifier(
    const data::MixedDataset& data, const std::string& outcome,
    const std::vector<std::string>& covariates,
    const ClassifierOptions& options) {
  LogitFitOptions fit_options;
  fit_options.backward_stepwise = false;  // a classifier keeps its inputs
  fit_options.l2 = options.l2;
  CovariateMarkovModel model =
      fit_multinomial_logit(data, outcome, covariates, fit_options);
  return std::make_unique<LogisticClassifier>(std::move(model));
}

std::unique_ptr<Classifier> fit_bagged_trees(
    const data::MixedDataset& data, const std::string& outcome,
    const std::vector<std::string>& covariates,
    const ClassifierOptions& options, std::uint64_t seed) {
  const int outcome_col = data.col_index(outcome);
  if (data.schema(outcome_col).kind != data::ColumnKind::kCategorical) {
    throw DataError("fit_bagged_trees: outcome '" + outcome +
                    "' must be categorical");
  }
  if (covariates.empty()) {
    throw DataError("fit_bagged_trees: needs at least one covariate");
  }
  const int n = data.n_rows();
  if (n < 2 * options.min_leaf) {
    throw DataError("fit_bagged_trees: too few rows to grow a split");
  }
  const auto cols = covariate_cols(data, covariates);
  stat::Matrix x(n, static_cast<int>(cols.size()));
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = data.regression_value(i, cols[j]);
      if (!std::isfinite(v)) {
        throw NumericError("fit_bagged_trees: non-finite value in '" +
                           covariates[j] + "'");
      }
      x.at(i, static_cast<int>(j)) = v;
    }
    y[i] = data.category_at(i, outcome_col);
  }
  const int n_classes =
      static_cast<int>(data.schema(outcome_col).categories.size());

  TreeBuilder builder(x, y, n_classes, options.max_depth, options.min_leaf);
  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(options.n_trees);
  for (int t = 0; t < options.n_trees; ++t) {
    stat::Rng rng(stat::derive_seed(seed, "tree-" + std::to_string(t)));
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) {
      rows[i] = static_cast<int>(rng.uniform_index(n));
    }
    trees.push_back(builder.build(std::move(rows)));
  }
  return std::make_unique<BaggedTreesClassifier>(
      data.schema(outcome_col).categories, covariates, std::move(trees));
}

ConfusionMatrix confusion_matrix(const Classifier& clf,
                                 const data::MixedDataset& eval_data,
                                 const std::string& outcome) {
  const int outcome_col = eval_data.col_index(outcome);
  if (eval_data.schema(outcome_col).kind != data::ColumnKind::kCategorical) {
    throw DataError("confusion_matrix: outcome '" + outcome +
                    "' must be categorical");
  }
  ConfusionMatrix cm;
  cm.labels = eval_data.schema(outcome_col).categories;
  cm.counts.assign(cm.labels.size(),
                   std::vector<long long>(cm.labels.size(), 0));
  const auto cols = covariate_cols(eval_data, clf.covariates());
  for (int r = 0; r < eval_data.n_rows(); ++r) {
    const std::string predicted =
        clf.predict(row_values(eval_data, r, clf.covariates(), cols));
    const auto it = std::find(cm.labels.begin(), cm.labels.end(), predicted);
    if (it == cm.labels.end()) {
      throw DataError("confusion_matrix: classifier emitted label '" +
                      predicted + "' which the outcome column does not have");
    }
    const int pred = static_cast<int>(it - cm.labels.begin());
    const int truth = eval_data.category_at(r, outcome_col);
    ++cm.counts[truth][pred];
  }
  return cm;
}

OutcomeGenerator make_outcome_generator(
    std::shared_ptr<const Classifier> classifier,
    const data::MixedDataset& eval_data, const std::string& outcome,
    bool noise_enabled) {
  if (classifier == nullptr) {
    throw DataError("make_outcome_generator: classifier is required");
  }
  OutcomeGenerator gen;
  gen.noise = confusion_matrix(*classifier, eval_data, outcome);
  gen.classifier = std::move(classifier);
  gen.noise_enabled = noise_enabled;
  return gen;
}

std::string simulate_outcome(const OutcomeGenerator& gen,
                             const NamedValues& patient, stat::Rng& rng) {
  if (gen.classifier == nullptr) {
    throw DataError("simulate_outcome: classifier is required");
  }
  const std::string predicted = gen.classifier->predict(patient);
  if (!gen.noise_enabled) return predicted;

  const auto it =
      std::find(gen.noise.labels.begin(), gen.noise.labels.end(), predicted);
  if (it == gen.noise.labels.end()) {
    throw DataError("simulate_outcome: predicted label '" + predicted +
                    "' is missing from the confusion matrix");
  }
  const std::size_t pred = it - gen.noise.labels.begin();
  long long mass = 0;
  for (std::size_t t = 0; t < gen.noise.labels.size(); ++t) {
    mass += gen.noise.counts[t][pred];
  }
  if (mass <= 0) {
    log::warn("simulate_outcome: confusion column for '", predicted,
              "' has zero mass; emitting the prediction unchanged");
    return predicted;
  }
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t t = 0; t < gen.noise.labels.size(); ++t) {
    cum += static_cast<double>(gen.noise.counts[t][pred]) /
           static_cast<double>(mass);
    if (u <= cum) return gen.noise.labels[t];
  }
  return gen.noise.labels.back();
}

std::string simulate_outcome(const OutcomeGenerator& gen,
                             const NamedValues& patient, std::uint64_t seed) {
  stat::Rng rng(seed);
  return simulate_outcome(gen, patient, rng);
}

double ate_paired(const PairedOutcomes& outcomes) {
  if (outcomes.y1.empty() || outcomes.y1.size() != outcomes.y0.size()) {
    throw DataError("ate_paired: both arms must be present for every patient");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < outcomes.y1.size(); ++i) {
    sum += outcomes.y1[i] - outcomes.y0[i];
  }
  return sum / static_cast<double>(outcomes.y1.size());
}

}  // namespace cohortsim::exec
