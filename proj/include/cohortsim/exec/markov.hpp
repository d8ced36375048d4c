#pragma once

// Constant (covariate-free) Markov transition models: calibrated by
// transition counting over observed state sequences, stepped by inverse-CDF
// draws from the current state's row.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortsim/stat/matrix.hpp"
#include "cohortsim/stat/rng.hpp"

namespace cohortsim::exec {

struct ConstantMarkovModel {
  std::vector<std::string> states;
  stat::Matrix matrix;  // matrix.at(i, j) = P(next = states[j] | current = states[i])
};

// Estimates matrix[s][t] = count(s -> t) / count(s -> anything) over all
// consecutive pairs in `sequences`.  States never observed as a source get
// a self-loop row (probability 1 of staying) — a conservative
// no-information default.  When `states` is non-empty it fixes the state
// universe and its order; sequences containing other labels are rejected.
// With an empty `states`, the universe is discovered in first-appearance
// order.  Throws DataError when no transition is observed at all.
ConstantMarkovModel fit_constant_markov(
    const std::vector<std::vector<std::string>>& sequences,
    const std::vector<std::string>& states = {});

// Rows sum to 1 within 1e-12, entries nonnegative, labels unique.
void validate_constant_markov(const ConstantMarkovModel& model);

// Index of a state label; throws DataError for unknown labels.
int markov_state_index(const ConstantMarkovModel& model,
                       const std::string& state);

// Next-state index drawn from the row of `current`; one uniform consumed.
int step_markov_index(const ConstantMarkovModel& model, int current,
                      stat::Rng& rng);

std::string step_markov(const ConstantMarkovModel& model,
                        const std::string& current, stat::Rng& rng);
std::string step_markov(const ConstantMarkovModel& model,
                        const std::string& current, std::uint64_t seed);

nlohmann::json constant_markov_to_json(const ConstantMarkovModel& model);
ConstantMarkovModel constant_markov_from_json(const nlohmann::json& j);

}  // namespace cohortsim::exec
