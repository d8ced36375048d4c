#pragma once

// Treatment catalog: per-treatment tariffs and generic-release dates, plus
// the treatment-switch model (a Markov chain over treatment names, either
// constant or covariate-driven).  Dates are semester indices on the same
// axis as the engine clock.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cohortsim/exec/logit.hpp"
#include "cohortsim/exec/markov.hpp"
#include "nlohmann/json.hpp"

namespace cohortsim::hiv {

struct Treatment {
  std::string name;
  double cost_branded = 0.0;  // euros per semester, tariff before release
  double amm = 0.0;           // marketing-authorization date (semesters)
  // Generic-release date; when absent it is derived from the scenario's
  // release offset.  Must be >= amm when given.
  std::optional<double> ammgm;
  bool has_generic = true;
};

using SwitchModel =
    std::variant<exec::ConstantMarkovModel, exec::CovariateMarkovModel>;

struct TreatmentCatalog {
  std::vector<Treatment> treatments;
  SwitchModel switch_model;

  int index_of(const std::string& name) const;  // DataError when unknown
  std::vector<std::string> names() const;
};

// Structural checks: at least one treatment, unique names, positive costs,
// ammgm >= amm where given, and a switch model whose states are exactly
// the treatment names.  Throws DataError.
void validate_catalog(const TreatmentCatalog& catalog);

const std::vector<std::string>& switch_model_states(const SwitchModel& model);

nlohmann::json catalog_to_json(const TreatmentCatalog& catalog);
TreatmentCatalog catalog_from_json(const nlohmann::json& j);
void save_catalog(const TreatmentCatalog& catalog,
                  const std::filesystem::path& path);
TreatmentCatalog load_catalog(const std::filesystem::path& path);

}  // namespace cohortsim::hiv
