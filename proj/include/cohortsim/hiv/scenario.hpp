#pragma once

// Scenario parameters: generic penetration (rate and ramp), tariff
// dynamics around the generic release, horizon and cohort bookkeeping.
// Times are semester indices; offsets configured in years are converted
// with two semesters per year.

#include <filesystem>
#include <string>

#include "cohortsim/hiv/catalog.hpp"
#include "nlohmann/json.hpp"

namespace cohortsim::hiv {

struct ScenarioConfig {
  double penrate = 0.10;  // maximal generic penetration, in [0, 1]
  // Generic release defaults to this many years after marketing
  // authorization for treatments without an explicit release date.
  double ammgm_offset_years = 13.0;
  // The penetration ramp ends this many years after the release.
  double pentime_offset_years = 1.0;
  double generic_price_fraction = 0.40;   // of the branded tariff at release
  double branded_drop_at_generic = 0.20;  // branded tariff drop at release
  double annual_tariff_decay = 0.034;     // both arms, after release
  int horizon = 10;                       // periods (semesters), T1..T11 grid
  int incident_cases_per_step = 455;      // new patients at each of T2..T10
  double population_fraction = 0.228;     // national scaling divisor
  int n_runs = 100;
  double start_time = 0.0;  // semester index of T1
  // Flip the renal-failure derivation (see ir_from_crea).
  bool invert_ir_rule = false;
  // When set, the no-conversion arm is priced on the tariff path that
  // would hold if no generic were ever released (flat branded tariff)
  // instead of sharing the scenario's post-release tariff dynamics.
  // The default keeps both arms on the same tariff path so the reported
  // differential isolates the conversion effect (and is exactly zero at
  // penrate = 0).
  bool counterfactual_pre_generic_tariffs = false;
};

// Ranges and consistency; throws ConfigError.
void validate_scenario(const ScenarioConfig& cfg);

// Resolved generic-release and ramp-end dates for one treatment.
double ammgm_of(const Treatment& treatment, const ScenarioConfig& cfg);
double pentime_of(const Treatment& treatment, const ScenarioConfig& cfg);

// Probability that a branded patient converts to the generic at time t:
// zero before the release, a linear ramp up to the penetration time, the
// penetration rate after (a step function when the ramp has zero width).
// Treatments without a generic never convert.
double prob_conv(double t, const Treatment& treatment,
                 const ScenarioConfig& cfg);

enum class PriceArm { kBranded, kGeneric };

// Tariff of one semester of treatment at time t under the scenario
// dynamics.  Branded: flat until the release, then dropped by
// branded_drop_at_generic and decaying by annual_tariff_decay per year
// (compounded per semester).  Generic: generic_price_fraction of the
// pre-drop branded tariff at release, decaying the same way.  Requesting
// a generic price before the release (or for a treatment without a
// generic) throws DataError.
double price_at(double t, const Treatment& treatment, PriceArm arm,
                const ScenarioConfig& cfg);

// Tariff used by the no-conversion arm at time t (see
// counterfactual_pre_generic_tariffs).
double counterfactual_price(double t, const Treatment& treatment,
                            const ScenarioConfig& cfg);

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
// Strict parse: unknown keys are rejected so typos cannot silently fall
// back to defaults.  Missing keys keep their defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
void save_scenario(const ScenarioConfig& cfg,
                   const std::filesystem::path& path);
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace cohortsim::hiv
