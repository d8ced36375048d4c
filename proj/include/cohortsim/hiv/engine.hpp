#pragma once

// The cohort engine: evolves a baseline cohort period by period (semester
// grid T1..T11) through four steps — covariate update, treatment update,
// incident arrivals, period costs — and accumulates per-patient
// differential costs between the generic-penetration arm and the
// no-conversion arm.  Both arms share one trajectory (covariates, switches,
// deaths), so they differ only in generic conversion.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/exec/logit.hpp"
#include "cohortsim/exec/markov.hpp"
#include "cohortsim/hiv/catalog.hpp"
#include "cohortsim/hiv/patient.hpp"
#include "cohortsim/hiv/scenario.hpp"
#include "cohortsim/stat/rng.hpp"
#include "nlohmann/json.hpp"

namespace cohortsim::hiv {

// Transition models for the evolving covariates.  heart/diab/vihs/death
// are constant chains over {"0","1"} (death's "0" row must be absorbing);
// arn is a covariate-driven chain over {"0","1","2"} and crea over
// {"1","2","3"}.
struct ExecutionModels {
  exec::ConstantMarkovModel heart;
  exec::ConstantMarkovModel diab;
  exec::ConstantMarkovModel vihs;
  exec::ConstantMarkovModel death;
  exec::CovariateMarkovModel arn;
  exec::CovariateMarkovModel crea;
};

// Wiring checks (state spaces, absorbing death, covariate availability);
// throws ConfigError before any simulation work.
void validate_models(const ExecutionModels& models);

nlohmann::json execution_models_to_json(const ExecutionModels& models);
ExecutionModels execution_models_from_json(const nlohmann::json& j);
void save_execution_models(const ExecutionModels& models,
                           const std::filesystem::path& path);
ExecutionModels load_execution_models(const std::filesystem::path& path);

// One period of covariate evolution for an alive patient: durations
// advance six months; heart/diab/vihs step their constant chains; arn
// steps first and the new value feeds the crea transition; ir is
// re-derived from crea; death steps last.  Dead patients are frozen.
void step1_update_covariates(PatientState& state,
                             const ExecutionModels& models,
                             const ScenarioConfig& cfg, stat::Rng& rng);

// Treatment update at time t: a switch drawn from the catalog's switch
// model (a switch resets treatment duration and the generic flag), then —
// if the treatment is unchanged and still branded — generic conversion
// with prob_conv(t).  Once generic, a patient stays generic until the
// treatment itself changes.
void step2_update_treatment(PatientState& state,
                            const TreatmentCatalog& catalog,
                            const ScenarioConfig& cfg, double t,
                            stat::Rng& rng);

// Incident arrivals: `count` patients drawn with replacement from the
// baseline pool, each assigned a treatment drawn from the current alive
// cohort's treatment mix (the pool row's treatment when nobody is alive),
// entering branded with a fresh treatment duration.
std::vector<PatientState> draw_incident_cases(
    const std::vector<PatientState>& baseline_pool,
    const std::vector<PatientState>& cohort, int count,
    const TreatmentCatalog& catalog, stat::Rng& rng);

// Period costs at time t: (no-conversion arm, scenario arm); (0, 0) for
// dead patients.
std::pair<double, double> step4_period_costs(const PatientState& state,
                                             const TreatmentCatalog& catalog,
                                             const ScenarioConfig& cfg,
                                             double t);

struct RunResult {
  std::vector<double> dc;   // per patient: summed cost_B - cost_G
  std::vector<int> fd;      // per patient: semesters alive on study
  std::vector<double> ndc;  // per patient: dc / fd (0 when fd = 0)
  double total_dc = 0.0;
  double total_dc_scaled = 0.0;  // total_dc / population_fraction
  std::vector<double> generic_uptake_by_period;  // alive fraction on generic
};

// One row per patient per period, for audits of the engine's rules.
struct TrajectoryEvent {
  int run = 0;
  int period = 0;   // 1-based
  int patient = 0;  // index within the run's cohort
  int treatment_id = 0;
  bool on_generic = false;
  bool alive = true;
  double cost_b = 0.0;
  double cost_g = 0.0;
};

using TrajectoryLog = std::vector<TrajectoryEvent>;

// Reads the baseline dataset into patient states (strict schema check;
// the ir field is re-derived from crea).  Throws DataError.
std::vector<PatientState> patients_from_dataset(
    const data::MixedDataset& baseline, const TreatmentCatalog& catalog,
    const ScenarioConfig& cfg);

// Full simulation: n_runs independent runs of `horizon` periods.  All
// configuration, catalog, model, and baseline problems are reported
// before the first period executes.  Deterministic in master_seed for
// any thread count.  When `log` is given it receives every run's events
// (grouped by run, periods in order).
std::vector<RunResult> run_simulation(const data::MixedDataset& baseline,
                                      const TreatmentCatalog& catalog,
                                      const ExecutionModels& models,
                                      const ScenarioConfig& cfg,
                                      std::uint64_t master_seed,
                                      TrajectoryLog* log = nullptr,
                                      int threads = 1);

// Order-statistic prediction interval of `level` (e.g. 0.90 -> the
// ceil(0.05 n)-th and ceil(0.95 n)-th sorted values).  Needs at least 20
// values and level in (0, 1).
std::pair<double, double> prediction_interval(std::vector<double> values,
                                              double level);

// Per-run aggregates plus 80%/90% prediction intervals across runs.
nlohmann::json run_results_to_json(const std::vector<RunResult>& results,
                                   const ScenarioConfig& cfg);

// Flat per-patient table: run,patient,dc,fd,ndc.
std::string ndc_csv(const std::vector<RunResult>& results);

}  // namespace cohortsim::hiv
