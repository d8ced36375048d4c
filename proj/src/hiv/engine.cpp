#include "cohortsim/hiv/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::hiv {

namespace {

// Covariate values the engine can feed to covariate-driven transition
// models (previous-period values unless stated otherwise).
const std::set<std::string>& engine_covariate_keys() {
  static const std::set<std::string> keys = {
      "SEX", "AGE",   "BC",   "CONTA", "VIHS", "VIHD",
      "TREATD", "ARN", "HEART", "DIAB", "IR",  "CREA"};
  return keys;
}

exec::NamedValues covariate_map(const PatientState& s) {
  return {{"SEX", static_cast<double>(s.sex)},
          {"AGE", s.age},
          {"BC", static_cast<double>(s.bc)},
          {"CONTA", static_cast<double>(s.conta)},
          {"VIHS", static_cast<double>(s.vihs)},
          {"VIHD", s.vihd},
          {"TREATD", s.treatd},
          {"ARN", static_cast<double>(s.arn)},
          {"HEART", static_cast<double>(s.heart)},
          {"DIAB", static_cast<double>(s.diab)},
          {"IR", static_cast<double>(s.ir)},
          {"CREA", static_cast<double>(s.crea)}};
}

int step_binary(const exec::ConstantMarkovModel& model, int current,
                stat::Rng& rng) {
  return exec::step_markov(model, std::to_string(current), rng) == "1" ? 1
                                                                       : 0;
}

int draw_index_from_probs(const std::vector<double>& probs, stat::Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    cum += probs[i];
    if (u <= cum) return static_cast<int>(i);
  }
  // Rounding left u above the accumulated mass; emit the last state that
  // had any probability.
  return last_positive >= 0 ? last_positive
                            : static_cast<int>(probs.size()) - 1;
}

int draw_covariate_state(const exec::CovariateMarkovModel& model,
                         const exec::NamedValues& values, stat::Rng& rng) {
  const auto probs = exec::transition_probs(model, values);
  return std::stoi(model.states[static_cast<std::size_t>(
      draw_index_from_probs(probs, rng))]);
}

void require_states(const std::vector<std::string>& states,
                    const std::set<std::string>& expected,
                    const std::string& which) {
  if (std::set<std::string>(states.begin(), states.end()) != expected) {
    std::string joined;
    for (const auto& s : expected) {
      if (!joined.empty()) joined += ", ";
      joined += s;
    }
    throw ConfigError("execution model '" + which +
                      "' must have states {" + joined + "}");
  }
}

void require_known_covariates(const std::vector<std::string>& needed,
                              const std::string& which) {
  for (const auto& name : needed) {
    if (engine_covariate_keys().count(name) == 0) {
      throw ConfigError("execution model '" + which +
                        "' uses covariate '" + name +
                        "' which the engine does not track");
    }
  }
}

}  // namespace

void validate_models(const ExecutionModels& models) {
  const std::set<std::string> binary = {"0", "1"};
  try {
    exec::validate_constant_markov(models.heart);
    exec::validate_constant_markov(models.diab);
    exec::validate_constant_markov(models.vihs);
    exec::validate_constant_markov(models.death);
    exec::validate_covariate_markov(models.arn);
    exec::validate_covariate_markov(models.crea);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("execution models are inconsistent: ") +
                      e.what());
  }
  require_states(models.heart.states, binary, "heart");
  require_states(models.diab.states, binary, "diab");
  require_states(models.vihs.states, binary, "vihs");
  require_states(models.death.states, binary, "death");
  require_states(models.arn.states, {"0", "1", "2"}, "arn");
  require_states(models.crea.states, {"1", "2", "3"}, "crea");

  const int dead = exec::markov_state_index(models.death, "0");
  if (std::fabs(models.death.matrix.at(dead, dead) - 1.0) > 1e-12) {
    throw ConfigError("the death model's dead state must be absorbing");
  }
  require_known_covariates(models.arn.covariates, "arn");
  require_known_covariates(models.crea.covariates, "crea");
}

void step1_update_covariates(PatientState& state,
                             const ExecutionModels& models,
                             const ScenarioConfig& cfg, stat::Rng& rng) {
  if (!state.alive()) return;  // dead patients are frozen
  const PatientState prev = state;
  state.age += 6.0;
  state.vihd += 6.0;
  state.treatd += 6.0;
  state.heart = step_binary(models.heart, prev.heart, rng);
  state.diab = step_binary(models.diab, prev.diab, rng);
  state.vihs = step_binary(models.vihs, prev.vihs, rng);

  const auto prev_values = covariate_map(prev);
  state.arn = draw_covariate_state(models.arn, prev_values, rng);
  // The creatinine transition sees the freshly updated viral load; all
  // other covariates enter at their previous-period values.
  auto crea_values = prev_values;
  crea_values["ARN"] = static_cast<double>(state.arn);
  state.crea = draw_covariate_state(models.crea, crea_values, rng);
  state.ir = ir_from_crea(state.crea, cfg.invert_ir_rule);

  state.death = step_binary(models.death, prev.death, rng);
}

void step2_update_treatment(PatientState& state,
                            const TreatmentCatalog& catalog,
                            const ScenarioConfig& cfg, double t,
                            stat::Rng& rng) {
  if (!state.alive()) return;
  if (state.treatment_id < 0 ||
      state.treatment_id >= static_cast<int>(catalog.treatments.size())) {
    throw DataError("patient holds treatment id " +
                    std::to_string(state.treatment_id) +
                    " which is not in the catalog");
  }
  const auto& current =
      catalog.treatments[static_cast<std::size_t>(state.treatment_id)];

  std::string next_name;
  if (const auto* constant =
          std::get_if<exec::ConstantMarkovModel>(&catalog.switch_model)) {
    next_name = exec::step_markov(*constant, current.name, rng);
  } else {
    const auto& model =
        std::get<exec::CovariateMarkovModel>(catalog.switch_model);
    const auto probs = exec::transition_probs(model, covariate_map(state));
    next_name = model.states[static_cast<std::size_t>(
        draw_index_from_probs(probs, rng))];
  }

  if (next_name != current.name) {
    state.treatment_id = catalog.index_of(next_name);
    state.on_generic = false;  // a new treatment starts branded
    state.treatd = 0.0;
    return;  // conversion only applies when the treatment is kept
  }

  if (current.has_generic) {
    // The uniform is drawn whenever the patient is eligible-shaped so the
    // random stream is identical across penetration rates (and across the
    // already-converted states); it only takes effect for a branded
    // patient.  Once generic, the patient stays generic until a switch.
    const double u = rng.uniform01();
    if (!state.on_generic && u < prob_conv(t, current, cfg)) {
      state.on_generic = true;
    }
  }
}

std::vector<PatientState> draw_incident_cases(
    const std::vector<PatientState>& baseline_pool,
    const std::vector<PatientState>& cohort, int count,
    const TreatmentCatalog& catalog, stat::Rng& rng) {
  if (baseline_pool.empty()) {
    throw DataError("incident cases need a non-empty baseline pool");
  }
  std::vector<int> alive_treatments;
  alive_treatments.reserve(cohort.size());
  for (const auto& p : cohort) {
    if (p.alive()) alive_treatments.push_back(p.treatment_id);
  }

  std::vector<PatientState> incidents;
  incidents.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    PatientState p = baseline_pool[rng.uniform_index(baseline_pool.size())];
    if (!alive_treatments.empty()) {
      p.treatment_id =
          alive_treatments[rng.uniform_index(alive_treatments.size())];
    }
    p.on_generic = false;  // incident cases enter on the branded form
    p.treatd = 0.0;        // and with a fresh treatment duration
    incidents.push_back(p);
  }
  (void)catalog;
  return incidents;
}

std::pair<double, double> step4_period_costs(const PatientState& state,
                                             const TreatmentCatalog& catalog,
                                             const ScenarioConfig& cfg,
                                             double t) {
  if (!state.alive()) return {0.0, 0.0};
  const auto& treatment =
      catalog.treatments.at(static_cast<std::size_t>(state.treatment_id));
  const double cost_b = counterfactual_price(t, treatment, cfg);
  const double cost_g =
      state.on_generic ? price_at(t, treatment, PriceArm::kGeneric, cfg)
                       : price_at(t, treatment, PriceArm::kBranded, cfg);
  return {cost_b, cost_g};
}

std::vector<PatientState> patients_from_dataset(
    const data::MixedDataset& baseline, const TreatmentCatalog& catalog,
    const ScenarioConfig& cfg) {
  if (baseline.n_rows() == 0) {
    throw DataError("baseline cohort is empty");
  }
  const auto expected = baseline_schema(catalog.names());
  struct Layout {
    int sex, age, bc, conta, vihs, vihd, treatd, arn, heart, diab, ir, crea,
        death, treat;
  } col{};
  int* slots[] = {&col.sex,   &col.age,  &col.bc,   &col.conta, &col.vihs,
                  &col.vihd,  &col.treatd, &col.arn, &col.heart, &col.diab,
                  &col.ir,    &col.crea, &col.death, &col.treat};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const int c = baseline.col_index(expected[i].name);  // throws if missing
    const auto& actual = baseline.schema(c);
    if (actual.kind != expected[i].kind) {
      throw DataError("baseline column '" + expected[i].name +
                      "' has the wrong kind");
    }
    if (expected[i].kind == data::ColumnKind::kCategorical &&
        expected[i].name != "TREAT" &&
        actual.categories != expected[i].categories) {
      throw DataError("baseline column '" + expected[i].name +
                      "' has unexpected categories");
    }
    *slots[i] = c;
  }
  // Treatment labels must each resolve in the catalog (the catalog may
  // hold more treatments than the baseline uses).
  std::vector<int> treat_ids;
  for (const auto& label : baseline.schema(col.treat).categories) {
    treat_ids.push_back(catalog.index_of(label));
  }

  std::vector<PatientState> out;
  out.reserve(static_cast<std::size_t>(baseline.n_rows()));
  int ir_mismatches = 0;
  for (int r = 0; r < baseline.n_rows(); ++r) {
    PatientState p;
    p.sex = baseline.category_at(r, col.sex);
    p.age = baseline.column(col.age)[static_cast<std::size_t>(r)];
    p.bc = baseline.category_at(r, col.bc);
    p.conta = baseline.category_at(r, col.conta);
    p.vihs = baseline.category_at(r, col.vihs);
    p.vihd = baseline.column(col.vihd)[static_cast<std::size_t>(r)];
    p.treatd = baseline.column(col.treatd)[static_cast<std::size_t>(r)];
    p.arn = baseline.category_at(r, col.arn);
    p.heart = baseline.category_at(r, col.heart);
    p.diab = baseline.category_at(r, col.diab);
    p.crea = baseline.category_at(r, col.crea) + 1;  // labels "1".."3"
    p.death = baseline.category_at(r, col.death);
    p.treatment_id =
        treat_ids[static_cast<std::size_t>(baseline.category_at(r, col.treat))];
    p.on_generic = false;
    if (p.age < 0.0 || p.vihd < 0.0 || p.treatd < 0.0) {
      throw DataError("baseline row " + std::to_string(r) +
                      " has a negative age or duration");
    }
    p.ir = ir_from_crea(p.crea, cfg.invert_ir_rule);
    if (p.ir != baseline.category_at(r, col.ir)) ++ir_mismatches;
    out.push_back(p);
  }
  if (ir_mismatches > 0) {
    log::warn("baseline IR disagreed with the renal derivation rule on " +
              std::to_string(ir_mismatches) +
              " rows; the derived value is used");
  }
  return out;
}

namespace {

RunResult run_one(const std::vector<PatientState>& pool,
                  const TreatmentCatalog& catalog,
                  const ExecutionModels& models, const ScenarioConfig& cfg,
                  std::uint64_t run_seed, int run_index,
                  TrajectoryLog* log) {
  stat::Rng rng(run_seed);
  std::vector<PatientState> cohort = pool;
  std::vector<double> dc(cohort.size(), 0.0);
  std::vector<int> fd(cohort.size(), 0);

  RunResult result;
  result.generic_uptake_by_period.resize(
      static_cast<std::size_t>(cfg.horizon), 0.0);

  for (int u = 1; u <= cfg.horizon; ++u) {
    const double t = cfg.start_time + static_cast<double>(u - 1);
    if (u >= 2) {
      for (auto& patient : cohort) {
        step1_update_covariates(patient, models, cfg, rng);
        step2_update_treatment(patient, catalog, cfg, t, rng);
      }
      if (cfg.incident_cases_per_step > 0) {
        auto incidents = draw_incident_cases(
            pool, cohort, cfg.incident_cases_per_step, catalog, rng);
        for (auto& p : incidents) {
          cohort.push_back(p);
          dc.push_back(0.0);
          fd.push_back(0);
        }
      }
    }

    long long alive = 0;
    long long on_generic = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto [cost_b, cost_g] =
          step4_period_costs(cohort[i], catalog, cfg, t);
      dc[i] += cost_b - cost_g;
      if (cohort[i].alive()) {
        fd[i] += 1;
        ++alive;
        if (cohort[i].on_generic) ++on_generic;
      }
      if (log != nullptr) {
        log->push_back(TrajectoryEvent{run_index, u, static_cast<int>(i),
                                       cohort[i].treatment_id,
                                       cohort[i].on_generic,
                                       cohort[i].alive(), cost_b, cost_g});
      }
    }
    result.generic_uptake_by_period[static_cast<std::size_t>(u - 1)] =
        alive > 0 ? static_cast<double>(on_generic) /
                        static_cast<double>(alive)
                  : 0.0;
  }

  result.dc = std::move(dc);
  result.fd = std::move(fd);
  result.ndc.resize(result.dc.size(), 0.0);
  for (std::size_t i = 0; i < result.dc.size(); ++i) {
    result.total_dc += result.dc[i];
    if (result.fd[i] > 0) {
      result.ndc[i] = result.dc[i] / static_cast<double>(result.fd[i]);
    }
  }
  result.total_dc_scaled = result.total_dc / cfg.population_fraction;
  return result;
}

}  // namespace

std::vector<RunResult> run_simulation(const data::MixedDataset& baseline,
                                      const TreatmentCatalog& catalog,
                                      const ExecutionModels& models,
                                      const ScenarioConfig& cfg,
                                      std::uint64_t master_seed,
                                      TrajectoryLog* log, int threads) {
  // Everything is checked up front: nothing below this block throws for
  // configuration reasons once periods start.
  validate_scenario(cfg);
  validate_catalog(catalog);
  validate_models(models);
  if (const auto* switch_model =
          std::get_if<exec::CovariateMarkovModel>(&catalog.switch_model)) {
    for (const auto& name : switch_model->covariates) {
      if (engine_covariate_keys().count(name) == 0) {
        throw ConfigError("switch model uses covariate '" + name +
                          "' which the engine does not track");
      }
    }
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
  const auto pool = patients_from_dataset(baseline, catalog, cfg);

  std::vector<RunResult> results(static_cast<std::size_t>(cfg.n_runs));
  std::vector<TrajectoryLog> run_logs(
      log != nullptr ? static_cast<std::size_t>(cfg.n_runs) : 0);

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= cfg.n_runs) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        const std::uint64_t run_seed =
            stat::derive_seed(master_seed, "run-" + std::to_string(r));
        results[static_cast<std::size_t>(r)] =
            run_one(pool, catalog, models, cfg, run_seed, r,
                    log != nullptr ? &run_logs[static_cast<std::size_t>(r)]
                                   : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::min(threads, cfg.n_runs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool_threads;
    pool_threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool_threads.emplace_back(worker);
    for (auto& t : pool_threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (log != nullptr) {
    for (auto& run_log : run_logs) {
      log->insert(log->end(), run_log.begin(), run_log.end());
    }
  }
  return results;
}

std::pair<double, double> prediction_interval(std::vector<double> values,
                                              double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ConfigError("prediction-interval level must be in (0, 1)");
  }
  const std::size_t n = values.size();
  if (n < 20) {
    throw DataError("prediction intervals need at least 20 values, got " +
                    std::to_string(n));
  }
  std::sort(values.begin(), values.end());
  const double alpha = (1.0 - level) / 2.0;
  // The tiny fuzz keeps exact-integer products (e.g. 0.05 * 100) from
  // drifting a rank under floating-point rounding.
  const auto rank = [n](double q) {
    const double raw = std::ceil(q * static_cast<double>(n) - 1e-9);
    return std::min(std::max(raw, 1.0), static_cast<double>(n));
  };
  const auto lo = static_cast<std::size_t>(rank(alpha));
  const auto hi = static_cast<std::size_t>(rank(1.0 - alpha));
  return {values[lo - 1], values[hi - 1]};
}

nlohmann::json run_results_to_json(const std::vector<RunResult>& results,
                                   const ScenarioConfig& cfg) {
  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> totals;
  std::vector<double> mean_ndcs;
  for (const auto& r : results) {
    double mean_ndc = 0.0;
    for (double v : r.ndc) mean_ndc += v;
    if (!r.ndc.empty()) mean_ndc /= static_cast<double>(r.ndc.size());
    totals.push_back(r.total_dc_scaled);
    mean_ndcs.push_back(mean_ndc);
    runs.push_back({{"total_dc", r.total_dc},
                    {"total_dc_scaled", r.total_dc_scaled},
                    {"mean_ndc", mean_ndc},
                    {"patients", r.dc.size()},
                    {"generic_uptake_by_period", r.generic_uptake_by_period}});
  }
  const auto median_of = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  nlohmann::json summary{{"penrate", cfg.penrate},
                         {"n_runs", results.size()},
                         {"median_total_dc_scaled", median_of(totals)},
                         {"median_mean_ndc", median_of(mean_ndcs)}};
  if (results.size() >= 20) {
    const auto pi80 = prediction_interval(totals, 0.80);
    const auto pi90 = prediction_interval(totals, 0.90);
    summary["total_dc_scaled_pi80"] = {pi80.first, pi80.second};
    summary["total_dc_scaled_pi90"] = {pi90.first, pi90.second};
    const auto npi80 = prediction_interval(mean_ndcs, 0.80);
    const auto npi90 = prediction_interval(mean_ndcs, 0.90);
    summary["mean_ndc_pi80"] = {npi80.first, npi80.second};
    summary["mean_ndc_pi90"] = {npi90.first, npi90.second};
  }
  if (!results.empty()) {
    const std::size_t horizon = results.front().generic_uptake_by_period.size();
    nlohmann::json medians = nlohmann::json::array();
    nlohmann::json pi80s = nlohmann::json::array();
    nlohmann::json pi90s = nlohmann::json::array();
    for (std::size_t p = 0; p < horizon; ++p) {
      std::vector<double> at_period;
      at_period.reserve(results.size());
      for (const auto& r : results) {
        at_period.push_back(r.generic_uptake_by_period[p]);
      }
      medians.push_back(median_of(at_period));
      if (results.size() >= 20) {
        const auto u80 = prediction_interval(at_period, 0.80);
        const auto u90 = prediction_interval(at_period, 0.90);
        pi80s.push_back({u80.first, u80.second});
        pi90s.push_back({u90.first, u90.second});
      }
    }
    summary["median_uptake_by_period"] = std::move(medians);
    if (results.size() >= 20) {
      summary["uptake_by_period_pi80"] = std::move(pi80s);
      summary["uptake_by_period_pi90"] = std::move(pi90s);
    }
  }
  return nlohmann::json{{"summary", summary}, {"runs", runs}};
}

std::string ndc_csv(const std::vector<RunResult>& results) {
  std::string out = "run,patient,dc,fd,ndc\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& run = results[r];
    for (std::size_t i = 0; i < run.dc.size(); ++i) {
      out += std::to_string(r);
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += io::format_double(run.dc[i]);
      out += ',';
      out += std::to_string(run.fd[i]);
      out += ',';
      out += io::format_double(run.ndc[i]);
      out += '\n';
    }
  }
  return out;
}

nlohmann::json execution_models_to_json(const ExecutionModels& models) {
  return nlohmann::json{
      {"heart", exec::constant_markov_to_json(models.heart)},
      {"diab", exec::constant_markov_to_json(models.diab)},
      {"vihs", exec::constant_markov_to_json(models.vihs)},
      {"death", exec::constant_markov_to_json(models.death)},
      {"arn", exec::covariate_markov_to_json(models.arn)},
      {"crea", exec::covariate_markov_to_json(models.crea)}};
}

ExecutionModels execution_models_from_json(const nlohmann::json& j) {
  ExecutionModels models;
  try {
    models.heart = exec::constant_markov_from_json(j.at("heart"));
    models.diab = exec::constant_markov_from_json(j.at("diab"));
    models.vihs = exec::constant_markov_from_json(j.at("vihs"));
    models.death = exec::constant_markov_from_json(j.at("death"));
    models.arn = exec::covariate_markov_from_json(j.at("arn"));
    models.crea = exec::covariate_markov_from_json(j.at("crea"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed execution-model file: ") +
                      e.what());
  }
  validate_models(models);
  return models;
}

void save_execution_models(const ExecutionModels& models,
                           const std::filesystem::path& path) {
  validate_models(models);
  io::atomic_write_file(path, execution_models_to_json(models).dump(2) + "\n");
}

ExecutionModels load_execution_models(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse execution-model file " + path.string() +
                      ": " + e.what());
  }
  return execution_models_from_json(j);
}

}  // namespace cohortsim::hiv
