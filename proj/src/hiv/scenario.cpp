#include "cohortsim/hiv/scenario.hpp"

#include <cmath>
#include <set>
#include <string>

#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"

namespace cohortsim::hiv {

namespace {

constexpr double kSemestersPerYear = 2.0;

void require_range(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("scenario: " + what);
}

}  // namespace

void validate_scenario(const ScenarioConfig& cfg) {
  require_range(std::isfinite(cfg.penrate) && cfg.penrate >= 0.0 &&
                    cfg.penrate <= 1.0,
                "penrate must be in [0, 1]");
  require_range(std::isfinite(cfg.ammgm_offset_years) &&
                    cfg.ammgm_offset_years >= 0.0,
                "ammgm_offset_years must be nonnegative");
  require_range(std::isfinite(cfg.pentime_offset_years) &&
                    cfg.pentime_offset_years >= 0.0,
                "pentime_offset_years must be nonnegative (the ramp cannot "
                "end before the release)");
  require_range(std::isfinite(cfg.generic_price_fraction) &&
                    cfg.generic_price_fraction > 0.0 &&
                    cfg.generic_price_fraction <= 1.0,
                "generic_price_fraction must be in (0, 1]");
  require_range(std::isfinite(cfg.branded_drop_at_generic) &&
                    cfg.branded_drop_at_generic >= 0.0 &&
                    cfg.branded_drop_at_generic < 1.0,
                "branded_drop_at_generic must be in [0, 1)");
  require_range(std::isfinite(cfg.annual_tariff_decay) &&
                    cfg.annual_tariff_decay >= 0.0 &&
                    cfg.annual_tariff_decay < 1.0,
                "annual_tariff_decay must be in [0, 1)");
  require_range(cfg.horizon >= 1 && cfg.horizon <= 200,
                "horizon must be between 1 and 200 periods");
  require_range(cfg.incident_cases_per_step >= 0,
                "incident_cases_per_step must be nonnegative");
  require_range(std::isfinite(cfg.population_fraction) &&
                    cfg.population_fraction > 0.0 &&
                    cfg.population_fraction <= 1.0,
                "population_fraction must be in (0, 1]");
  require_range(cfg.n_runs >= 1, "n_runs must be at least 1");
  require_range(std::isfinite(cfg.start_time), "start_time must be finite");
}

double ammgm_of(const Treatment& treatment, const ScenarioConfig& cfg) {
  if (treatment.ammgm) return *treatment.ammgm;
  return treatment.amm + kSemestersPerYear * cfg.ammgm_offset_years;
}

double pentime_of(const Treatment& treatment, const ScenarioConfig& cfg) {
  return ammgm_of(treatment, cfg) +
         kSemestersPerYear * cfg.pentime_offset_years;
}

double prob_conv(double t, const Treatment& treatment,
                 const ScenarioConfig& cfg) {
  if (!treatment.has_generic) return 0.0;
  const double release = ammgm_of(treatment, cfg);
  const double ramp_end = pentime_of(treatment, cfg);
  if (t < release) return 0.0;
  if (t >= ramp_end) return cfg.penrate;  // covers the zero-width ramp
  return cfg.penrate * (t - release) / (ramp_end - release);
}

double price_at(double t, const Treatment& treatment, PriceArm arm,
                const ScenarioConfig& cfg) {
  const double base = treatment.cost_branded;
  if (!treatment.has_generic) {
    if (arm == PriceArm::kGeneric) {
      throw DataError("treatment '" + treatment.name +
                      "' has no generic version to price");
    }
    return base;
  }
  const double release = ammgm_of(treatment, cfg);
  if (arm == PriceArm::kGeneric && t < release) {
    throw DataError("generic price of '" + treatment.name +
                    "' requested before its release");
  }
  if (t < release) return base;  // branded, pre-release tariff
  const double years_since = (t - release) / kSemestersPerYear;
  const double decay = std::pow(1.0 - cfg.annual_tariff_decay, years_since);
  if (arm == PriceArm::kGeneric) {
    return cfg.generic_price_fraction * base * decay;
  }
  return (1.0 - cfg.branded_drop_at_generic) * base * decay;
}

double counterfactual_price(double t, const Treatment& treatment,
                            const ScenarioConfig& cfg) {
  if (cfg.counterfactual_pre_generic_tariffs) return treatment.cost_branded;
  return price_at(t, treatment, PriceArm::kBranded, cfg);
}

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
  return nlohmann::json{
      {"penrate", cfg.penrate},
      {"ammgm_offset_years", cfg.ammgm_offset_years},
      {"pentime_offset_years", cfg.pentime_offset_years},
      {"generic_price_fraction", cfg.generic_price_fraction},
      {"branded_drop_at_generic", cfg.branded_drop_at_generic},
      {"annual_tariff_decay", cfg.annual_tariff_decay},
      {"horizon", cfg.horizon},
      {"incident_cases_per_step", cfg.incident_cases_per_step},
      {"population_fraction", cfg.population_fraction},
      {"n_runs", cfg.n_runs},
      {"start_time", cfg.start_time},
      {"invert_ir_rule", cfg.invert_ir_rule},
      {"counterfactual_pre_generic_tariffs",
       cfg.counterfactual_pre_generic_tariffs}};
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("scenario config must be a JSON object");
  }
  static const std::set<std::string> known = {
      "penrate",
      "ammgm_offset_years",
      "pentime_offset_years",
      "generic_price_fraction",
      "branded_drop_at_generic",
      "annual_tariff_decay",
      "horizon",
      "incident_cases_per_step",
      "population_fraction",
      "n_runs",
      "start_time",
      "invert_ir_rule",
      "counterfactual_pre_generic_tariffs"};
  for (const auto& [key, value] : j.items()) {
    if (known.find(key) == known.end()) {
      throw ConfigError("scenario config has an unknown key '" + key + "'");
    }
  }
  ScenarioConfig cfg;
  try {
    cfg.penrate = j.value("penrate", cfg.penrate);
    cfg.ammgm_offset_years =
        j.value("ammgm_offset_years", cfg.ammgm_offset_years);
    cfg.pentime_offset_years =
        j.value("pentime_offset_years", cfg.pentime_offset_years);
    cfg.generic_price_fraction =
        j.value("generic_price_fraction", cfg.generic_price_fraction);
    cfg.branded_drop_at_generic =
        j.value("branded_drop_at_generic", cfg.branded_drop_at_generic);
    cfg.annual_tariff_decay =
        j.value("annual_tariff_decay", cfg.annual_tariff_decay);
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.incident_cases_per_step =
        j.value("incident_cases_per_step", cfg.incident_cases_per_step);
    cfg.population_fraction =
        j.value("population_fraction", cfg.population_fraction);
    cfg.n_runs = j.value("n_runs", cfg.n_runs);
    cfg.start_time = j.value("start_time", cfg.start_time);
    cfg.invert_ir_rule = j.value("invert_ir_rule", cfg.invert_ir_rule);
    cfg.counterfactual_pre_generic_tariffs =
        j.value("counterfactual_pre_generic_tariffs",
                cfg.counterfactual_pre_generic_tariffs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scenario config: ") + e.what());
  }
  validate_scenario(cfg);
  return cfg;
}

void save_scenario(const ScenarioConfig& cfg,
                   const std::filesystem::path& path) {
  validate_scenario(cfg);
  io::atomic_write_file(path, scenario_to_json(cfg).dump(2) + "\n");
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse scenario config " + path.string() + ": " +
                      e.what());
  }
  return scenario_from_json(j);
}

}  // namespace cohortsim::hiv
