#include "cohortsim/hiv/catalog.hpp"

#include <algorithm>
#include <set>

#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"

namespace cohortsim::hiv {

int TreatmentCatalog::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < treatments.size(); ++i) {
    if (treatments[i].name == name) return static_cast<int>(i);
  }
  throw DataError("treatment '" + name + "' is not in the catalog");
}

std::vector<std::string> TreatmentCatalog::names() const {
  std::vector<std::string> out;
  out.reserve(treatments.size());
  for (const auto& t : treatments) out.push_back(t.name);
  return out;
}

const std::vector<std::string>& switch_model_states(const SwitchModel& model) {
  if (const auto* constant = std::get_if<exec::ConstantMarkovModel>(&model)) {
    return constant->states;
  }
  return std::get<exec::CovariateMarkovModel>(model).states;
}

void validate_catalog(const TreatmentCatalog& catalog) {
  if (catalog.treatments.empty()) {
    throw DataError("treatment catalog is empty");
  }
  std::set<std::string> seen;
  for (const auto& t : catalog.treatments) {
    if (t.name.empty()) throw DataError("treatment with an empty name");
    if (!seen.insert(t.name).second) {
      throw DataError("duplicate treatment name '" + t.name + "'");
    }
    if (!(t.cost_branded > 0.0)) {
      throw DataError("treatment '" + t.name + "' needs a positive tariff");
    }
    if (t.ammgm && *t.ammgm < t.amm) {
      throw DataError("treatment '" + t.name +
                      "': generic release precedes marketing authorization");
    }
  }

  if (const auto* constant =
          std::get_if<exec::ConstantMarkovModel>(&catalog.switch_model)) {
    exec::validate_constant_markov(*constant);
  } else {
    exec::validate_covariate_markov(
        std::get<exec::CovariateMarkovModel>(catalog.switch_model));
  }
  const auto& states = switch_model_states(catalog.switch_model);
  const std::set<std::string> state_set(states.begin(), states.end());
  if (state_set != seen) {
    throw DataError(
        "switch-model states must be exactly the catalog treatment names");
  }
}

nlohmann::json catalog_to_json(const TreatmentCatalog& catalog) {
  nlohmann::json treatments = nlohmann::json::array();
  for (const auto& t : catalog.treatments) {
    nlohmann::json entry{{"name", t.name},
                         {"cost_branded", t.cost_branded},
                         {"amm", t.amm},
                         {"has_generic", t.has_generic}};
    if (t.ammgm) entry["ammgm"] = *t.ammgm;
    treatments.push_back(std::move(entry));
  }
  nlohmann::json switch_json;
  if (const auto* constant =
          std::get_if<exec::ConstantMarkovModel>(&catalog.switch_model)) {
    switch_json = exec::constant_markov_to_json(*constant);
  } else {
    switch_json = exec::covariate_markov_to_json(
        std::get<exec::CovariateMarkovModel>(catalog.switch_model));
  }
  return nlohmann::json{{"treatments", treatments},
                        {"switch_model", switch_json}};
}

TreatmentCatalog catalog_from_json(const nlohmann::json& j) {
  TreatmentCatalog catalog;
  try {
    for (const auto& entry : j.at("treatments")) {
      Treatment t;
      t.name = entry.at("name").get<std::string>();
      t.cost_branded = entry.at("cost_branded").get<double>();
      t.amm = entry.at("amm").get<double>();
      t.has_generic = entry.value("has_generic", true);
      if (entry.contains("ammgm")) t.ammgm = entry["ammgm"].get<double>();
      catalog.treatments.push_back(std::move(t));
    }
    const auto& switch_json = j.at("switch_model");
    const std::string kind = switch_json.value("kind", "constant_markov");
    if (kind == "constant_markov") {
      catalog.switch_model = exec::constant_markov_from_json(switch_json);
    } else if (kind == "covariate_markov") {
      catalog.switch_model = exec::covariate_markov_from_json(switch_json);
    } else {
      throw DataError("unknown switch-model kind '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed treatment catalog: ") + e.what());
  }
  validate_catalog(catalog);
  return catalog;
}

void save_catalog(const TreatmentCatalog& catalog,
                  const std::filesystem::path& path) {
  validate_catalog(catalog);
  io::atomic_write_file(path, catalog_to_json(catalog).dump(2) + "\n");
}

TreatmentCatalog load_catalog(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot parse treatment catalog " + path.string() +
                    ": " + e.what());
  }
  return catalog_from_json(j);
}

}  // namespace cohortsim::hiv
