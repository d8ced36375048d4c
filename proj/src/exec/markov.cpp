#include "cohortsim/exec/markov.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "cohortsim/util/errors.hpp"

namespace cohortsim::exec {

ConstantMarkovModel fit_constant_markov(
    const std::vector<std::vector<std::string>>& sequences,
    const std::vector<std::string>& states) {
  ConstantMarkovModel model;
  std::unordered_map<std::string, int> index;
  const bool fixed_universe = !states.empty();
  if (fixed_universe) {
    model.states = states;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!index.emplace(states[i], static_cast<int>(i)).second) {
        throw DataError("fit_constant_markov: duplicate state label '" +
                        states[i] + "'");
      }
    }
  } else {
    for (const auto& seq : sequences) {
      for (const auto& label : seq) {
        if (index.emplace(label, static_cast<int>(model.states.size())).second) {
          model.states.push_back(label);
        }
      }
    }
  }
  if (model.states.empty()) {
    throw DataError("fit_constant_markov: no states observed");
  }

  const int k = static_cast<int>(model.states.size());
  stat::Matrix counts(k, k);
  long long total = 0;
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      const auto from = index.find(seq[i]);
      const auto to = index.find(seq[i + 1]);
      if (from == index.end() || to == index.end()) {
        throw DataError("fit_constant_markov: label '" +
                        (from == index.end() ? seq[i] : seq[i + 1]) +
                        "' is outside the declared state universe");
      }
      counts.at(from->second, to->second) += 1.0;
      ++total;
    }
  }
  if (total == 0) {
    throw DataError("fit_constant_markov: no transition observed");
  }

  model.matrix = stat::Matrix(k, k);
  for (int i = 0; i < k; ++i) {
    double row_total = 0.0;
    for (int j = 0; j < k; ++j) row_total += counts.at(i, j);
    if (row_total == 0.0) {
      model.matrix.at(i, i) = 1.0;  // never a source: stay put
      continue;
    }
    for (int j = 0; j < k; ++j) {
      model.matrix.at(i, j) = counts.at(i, j) / row_total;
    }
  }
  validate_constant_markov(model);
  return model;
}

void validate_constant_markov(const ConstantMarkovModel& model) {
  const int k = static_cast<int>(model.states.size());
  if (k == 0) throw DataError("markov model: no states");
  if (model.matrix.rows() != k || model.matrix.cols() != k) {
    throw DataError("markov model: matrix shape does not match state count");
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (model.states[i] == model.states[j]) {
        throw DataError("markov model: duplicate state label '" +
                        model.states[i] + "'");
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      const double p = model.matrix.at(i, j);
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw DataError("markov model: negative or non-finite probability in "
                        "row '" + model.states[i] + "'");
      }
      row += p;
    }
    if (std::fabs(row - 1.0) > 1e-12) {
      throw DataError("markov model: row '" + model.states[i] +
                      "' sums to " + std::to_string(row) + ", expected 1");
    }
  }
}

int markov_state_index(const ConstantMarkovModel& model,
                       const std::string& state) {
  const auto it = std::find(model.states.begin(), model.states.end(), state);
  if (it == model.states.end()) {
    throw DataError("markov model: unknown state '" + state + "'");
  }
  return static_cast<int>(it - model.states.begin());
}

int step_markov_index(const ConstantMarkovModel& model, int current,
                      stat::Rng& rng) {
  if (current < 0 || current >= model.matrix.rows()) {
    throw DataError("markov model: state index out of range");
  }
  const double u = rng.uniform01();
  double cum = 0.0;
  const int k = model.matrix.cols();
  for (int j = 0; j < k; ++j) {
    cum += model.matrix.at(current, j);
    if (u <= cum) return j;
  }
  // Rounding can leave cum a hair below 1: fall back to the last state with
  // nonzero probability.
  for (int j = k - 1; j >= 0; --j) {
    if (model.matrix.at(current, j) > 0.0) return j;
  }
  return current;
}

std::string step_markov(const ConstantMarkovModel& model,
                        const std::string& current, stat::Rng& rng) {
  const int idx = markov_state_index(model, current);
  return model.states[step_markov_index(model, idx, rng)];
}

std::string step_markov(const ConstantMarkovModel& model,
                        const std::string& current, std::uint64_t seed) {
  stat::Rng rng(seed);
  return step_markov(model, current, rng);
}

nlohmann::json constant_markov_to_json(const ConstantMarkovModel& model) {
  nlohmann::json j;
  j["kind"] = "constant_markov";
  j["states"] = model.states;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < model.matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < model.matrix.cols(); ++c) {
      row.push_back(model.matrix.at(i, c));
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

ConstantMarkovModel constant_markov_from_json(const nlohmann::json& j) {
  ConstantMarkovModel model;
  try {
    if (j.value("kind", std::string("constant_markov")) != "constant_markov") {
      throw DataError("markov json: kind is not constant_markov");
    }
    model.states = j.at("states").get<std::vector<std::string>>();
    const auto& rows = j.at("matrix");
    const int k = static_cast<int>(model.states.size());
    model.matrix = stat::Matrix(k, k);
    if (static_cast<int>(rows.size()) != k) {
      throw DataError("markov json: matrix row count mismatch");
    }
    for (int i = 0; i < k; ++i) {
      if (static_cast<int>(rows[i].size()) != k) {
        throw DataError("markov json: matrix column count mismatch");
      }
      for (int c = 0; c < k; ++c) {
        model.matrix.at(i, c) = rows[i][c].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("markov json: malformed document: ") +
                    e.what());
  }
  validate_constant_markov(model);
  return model;
}

}  // namespace cohortsim::exec
