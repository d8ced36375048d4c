// Command-line front end for the cohort-simulation toolkit.
//
// Subcommands:
//   fit       fit a baseline generator (discrete | continuous | vine)
//   generate  sample a cohort CSV from a fitted generator model
//   simulate  run treatment-switch scenarios over a baseline cohort
//   analyze   fidelity report and/or p-value replication experiment
//
// Each subcommand is driven by a JSON config (--config).  --seed overrides
// the config seed, --out sets the directory that relative output paths
// resolve under, --threads overrides the config thread count.  stderr
// carries diagnostics (COHORTSIM_LOG selects verbosity); stdout carries
// exactly one JSON summary line.  Exit codes: 0 success, 2 configuration
// error, 3 data error, 4 numerical failure.
//
// Seed discipline: every command requires an explicit seed (config "seed"
// or --seed); there is no wall-clock fallback.  The master seed is split
// into named sub-streams ("fit", "generate", "experiment", and "run-<k>"
// inside the simulator) so each pipeline stage draws from its own stream.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cohortsim/analyze/fidelity.hpp"
#include "cohortsim/analyze/pvalues.hpp"
#include "cohortsim/data/dataset.hpp"
#include "cohortsim/exec/outcome.hpp"
#include "cohortsim/hiv/catalog.hpp"
#include "cohortsim/hiv/engine.hpp"
#include "cohortsim/hiv/patient.hpp"
#include "cohortsim/hiv/scenario.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"
#include "cohortsim/util/log.hpp"
#include "cohortsim/vbg/continuous.hpp"
#include "cohortsim/vbg/discrete.hpp"
#include "cohortsim/vbg/model_io.hpp"
#include "cohortsim/vbg/pair_copula.hpp"
#include "cohortsim/vbg/vine.hpp"

namespace {

namespace fs = std::filesystem;
using cohortsim::ConfigError;
using cohortsim::DataError;
using cohortsim::NumericError;
using nlohmann::json;

constexpr const char* kRngName = "xoshiro256++";

// ---------------------------------------------------------------------------
// Config plumbing

struct CommonArgs {
  std::string config_path;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // --seed override
  std::optional<int> threads;         // --threads override
};

json load_config(const std::string& path) {
  const std::string text = cohortsim::io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": invalid JSON: " + e.what());
  }
  // read_file throws DataError when the file is missing/unreadable, which is
  // the documented exit-3 case; a file that exists but does not parse is a
  // configuration problem (exit 2).
}

const json& require_field(const json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("config field '" + key + "' is required");
  }
  return *it;
}

std::string require_string(const json& j, const std::string& key) {
  const json& v = require_field(j, key);
  if (!v.is_string()) {
    throw ConfigError("config field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::string optional_string(const json& j, const std::string& key,
                            const std::string& fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) {
    throw ConfigError("config field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

long long require_int(const json& j, const std::string& key) {
  const json& v = require_field(j, key);
  if (!v.is_number_integer()) {
    throw ConfigError("config field '" + key + "' must be an integer");
  }
  return v.get<long long>();
}

long long optional_int(const json& j, const std::string& key,
                       long long fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) {
    throw ConfigError("config field '" + key + "' must be an integer");
  }
  return it->get<long long>();
}

bool optional_bool(const json& j, const std::string& key, bool fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) {
    throw ConfigError("config field '" + key + "' must be a boolean");
  }
  return it->get<bool>();
}

std::vector<std::string> optional_string_list(const json& j,
                                              const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) return {};
  if (!it->is_array()) {
    throw ConfigError("config field '" + key + "' must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ConfigError("config field '" + key +
                        "' must be an array of strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

// The effective master seed: --seed wins, else config "seed".  Wall-clock
// seeding is deliberately unsupported so every artifact is reproducible.
std::uint64_t effective_seed(const json& config, const CommonArgs& args) {
  if (args.seed) return *args.seed;
  const auto it = config.find("seed");
  if (it == config.end()) {
    throw ConfigError(
        "config field 'seed' is required (pass --seed or set it in the "
        "config; wall-clock seeding is not supported)");
  }
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigError("config field 'seed' must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

int effective_threads(const json& config, const CommonArgs& args) {
  const long long threads =
      args.threads ? *args.threads : optional_int(config, "threads", 1);
  if (threads < 1) {
    throw ConfigError("thread count must be >= 1, got " +
                      std::to_string(threads));
  }
  return static_cast<int>(threads);
}

// Relative output names resolve under --out; absolute paths are kept.
fs::path resolve_output(const std::string& name, const CommonArgs& args) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  return args.out_dir / p;
}

// A schema is either a path to a schema JSON file or an inline array.
std::vector<cohortsim::data::ColumnSchema> load_schema_field(
    const json& config, const std::string& key) {
  const json& v = require_field(config, key);
  json schema_json;
  if (v.is_string()) {
    const std::string text = cohortsim::io::read_file(v.get<std::string>());
    try {
      schema_json = json::parse(text);
    } catch (const json::exception& e) {
      throw DataError("schema file " + v.get<std::string>() +
                      ": invalid JSON: " + e.what());
    }
  } else if (v.is_array()) {
    schema_json = v;
  } else {
    throw ConfigError("config field '" + key +
                      "' must be a schema file path or an inline array");
  }
  return cohortsim::data::schema_from_json(schema_json);
}

cohortsim::data::MixedDataset load_dataset(const json& config,
                                           const std::string& data_key,
                                           const std::string& schema_key,
                                           int* dropped_rows = nullptr) {
  const std::string path = require_string(config, data_key);
  const auto schema = load_schema_field(config, schema_key);
  cohortsim::data::CsvOptions options;
  options.drop_incomplete_rows =
      optional_bool(config, "drop_incomplete_rows", false);
  options.dropped_rows = dropped_rows;
  return cohortsim::data::load_csv(path, schema, options);
}

void emit_summary(const json& summary) { std::cout << summary.dump() << "\n"; }

// ---------------------------------------------------------------------------
// fit

int cmd_fit(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const std::uint64_t seed = effective_seed(config, args);
  const std::string generator = require_string(config, "generator");

  int dropped = 0;
  cohortsim::data::MixedDataset data =
      load_dataset(config, "data", "schema", &dropped);
  if (dropped > 0) {
    cohortsim::log::warn("fit: dropped ", dropped,
                         " incomplete rows from input data");
  }
  const auto columns = optional_string_list(config, "columns");
  if (!columns.empty()) data = data.select(columns);

  cohortsim::vbg::GeneratorModel model;
  if (generator == "discrete") {
    cohortsim::vbg::DiscreteFitReport report;
    model = cohortsim::vbg::fit_discrete(data, &report);
    cohortsim::log::info("fit discrete: ", report.sparse_configs,
                         " sparse configurations pooled into the shared "
                         "covariance");
    for (const auto& note : report.notes) cohortsim::log::info("fit: ", note);
  } else if (generator == "continuous") {
    cohortsim::vbg::ContinuousFitReport report;
    model = cohortsim::vbg::fit_continuous(data, &report);
    if (report.ridged) {
      cohortsim::log::warn(
          "fit continuous: covariance ridged to restore positive "
          "definiteness");
    }
    for (const auto& note : report.notes) cohortsim::log::info("fit: ", note);
  } else if (generator == "vine") {
    cohortsim::vbg::VineFitOptions options;
    options.pair_options.independence_test =
        optional_bool(config, "vine_independence_test", true);
    cohortsim::vbg::VineFitReport report;
    const auto vine = cohortsim::vbg::fit_vine(
        data, cohortsim::stat::derive_seed(seed, "fit"), options, &report);
    cohortsim::log::info("fit vine: independence retained on ",
                         report.independence_pairs, " of ", report.total_pairs,
                         " pair copulas");
    std::map<std::string, int> family_counts;
    for (const auto& tree : vine.trees) {
      for (const auto& edge : tree) {
        ++family_counts[cohortsim::vbg::family_name(edge.copula.family)];
        cohortsim::log::debug(
            "fit vine: edge ", edge.var_a, "-", edge.var_b, " family ",
            cohortsim::vbg::family_name(edge.copula.family), " theta ",
            edge.copula.theta, " rotation ", edge.copula.rotation, " tau ",
            edge.tau);
      }
    }
    for (const auto& [family, count] : family_counts) {
      cohortsim::log::info("fit vine: family ", family, " chosen on ", count,
                           " edges");
    }
    for (const auto& note : report.notes) cohortsim::log::info("fit: ", note);
    model = vine;
  } else {
    throw ConfigError(
        "config field 'generator' must be one of discrete, continuous, vine; "
        "got '" +
        generator + "'");
  }

  const fs::path model_path =
      resolve_output(optional_string(config, "model_out", "model.json"), args);
  json model_json = cohortsim::vbg::model_to_json(model);
  model_json["rng"] = kRngName;
  model_json["seed"] = seed;
  cohortsim::io::atomic_write_file(model_path, model_json.dump(2) + "\n");

  emit_summary(json{{"command", "fit"},
                    {"generator", cohortsim::vbg::model_type_name(model)},
                    {"rows", data.n_rows()},
                    {"columns", data.n_cols()},
                    {"dropped_rows", dropped},
                    {"model_out", model_path.string()},
                    {"rng", kRngName},
                    {"seed", seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const std::uint64_t seed = effective_seed(config, args);
  const std::string model_path = require_string(config, "model");
  const long long n = require_int(config, "n");
  if (n < 0) throw ConfigError("config field 'n' must be >= 0");

  const auto model = cohortsim::vbg::load_model(model_path);
  cohortsim::data::MixedDataset cohort =
      n == 0 ? cohortsim::data::MixedDataset::empty(
                   cohortsim::vbg::generator_schema(model))
             : cohortsim::vbg::sample_generator(
                   model, static_cast<std::size_t>(n),
                   cohortsim::stat::derive_seed(seed, "generate"));

  const fs::path data_path =
      resolve_output(optional_string(config, "data_out", "cohort.csv"), args);
  cohortsim::io::atomic_write_file(data_path,
                                   cohortsim::data::to_csv(cohort));
  json outputs = json::array({data_path.string()});

  const std::string schema_out = optional_string(config, "schema_out", "");
  if (!schema_out.empty()) {
    const fs::path schema_path = resolve_output(schema_out, args);
    cohortsim::io::atomic_write_file(
        schema_path,
        cohortsim::data::schema_to_json(cohort.schema()).dump(2) + "\n");
    outputs.push_back(schema_path.string());
  }

  emit_summary(json{{"command", "generate"},
                    {"generator", cohortsim::vbg::model_type_name(model)},
                    {"rows", cohort.n_rows()},
                    {"columns", cohort.n_cols()},
                    {"outputs", outputs},
                    {"rng", kRngName},
                    {"seed", seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

// "0.25" -> "025"; fractional percents keep two decimals: "0.125" -> "012_50".
std::string penrate_suffix(double rate) {
  const long long basis_points = std::llround(rate * 10000.0);
  const long long whole = basis_points / 100;
  const long long frac = basis_points % 100;
  std::string out = std::to_string(whole);
  while (out.size() < 3) out.insert(out.begin(), '0');
  if (frac != 0) {
    out += '_';
    out += static_cast<char>('0' + frac / 10);
    out += static_cast<char>('0' + frac % 10);
  }
  return out;
}

std::string trajectory_csv(const cohortsim::hiv::TrajectoryLog& log) {
  std::string out = "run,period,patient,treatment_id,on_generic,alive,cost_b,cost_g\n";
  for (const auto& e : log) {
    out += std::to_string(e.run);
    out += ',';
    out += std::to_string(e.period);
    out += ',';
    out += std::to_string(e.patient);
    out += ',';
    out += std::to_string(e.treatment_id);
    out += ',';
    out += e.on_generic ? '1' : '0';
    out += ',';
    out += e.alive ? '1' : '0';
    out += ',';
    out += cohortsim::io::format_double(e.cost_b);
    out += ',';
    out += cohortsim::io::format_double(e.cost_g);
    out += '\n';
  }
  return out;
}

int cmd_simulate(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const std::uint64_t seed = effective_seed(config, args);
  const int threads = effective_threads(config, args);

  const auto catalog =
      cohortsim::hiv::load_catalog(require_string(config, "catalog"));
  const auto models = cohortsim::hiv::load_execution_models(
      require_string(config, "models"));

  cohortsim::hiv::ScenarioConfig scenario;
  const json& scenario_field = require_field(config, "scenario");
  if (scenario_field.is_string()) {
    scenario = cohortsim::hiv::load_scenario(scenario_field.get<std::string>());
  } else if (scenario_field.is_object()) {
    scenario = cohortsim::hiv::scenario_from_json(scenario_field);
  } else {
    throw ConfigError(
        "config field 'scenario' must be a file path or an inline object");
  }

  const auto baseline = cohortsim::data::load_csv(
      require_string(config, "baseline"),
      cohortsim::hiv::baseline_schema(catalog.names()));

  std::vector<double> penrates;
  if (const auto it = config.find("penrates"); it != config.end()) {
    if (!it->is_array() || it->empty()) {
      throw ConfigError("config field 'penrates' must be a non-empty array");
    }
    for (const auto& v : *it) {
      if (!v.is_number()) {
        throw ConfigError("config field 'penrates' must contain numbers");
      }
      penrates.push_back(v.get<double>());
    }
  } else {
    penrates.push_back(scenario.penrate);
  }
  for (double r : penrates) {
    if (!(r >= 0.0) || !(r <= 1.0)) {
      throw ConfigError("penetration rates must lie in [0, 1], got " +
                        cohortsim::io::format_double(r));
    }
  }

  const std::string prefix = optional_string(config, "out_prefix", "sim");
  const bool want_trajectory = optional_bool(config, "trajectory_log", false);

  json outputs = json::array();
  json medians = json::array();
  for (double rate : penrates) {
    cohortsim::hiv::ScenarioConfig run_cfg = scenario;
    run_cfg.penrate = rate;
    cohortsim::hiv::TrajectoryLog trajectory;
    // The same master seed is reused across rates on purpose: common random
    // numbers make sweep results pathwise comparable.
    const auto results = cohortsim::hiv::run_simulation(
        baseline, catalog, models, run_cfg, seed,
        want_trajectory ? &trajectory : nullptr, threads);

    json result_json = cohortsim::hiv::run_results_to_json(results, run_cfg);
    result_json["rng"] = kRngName;
    result_json["seed"] = seed;
    medians.push_back(result_json["summary"]["median_total_dc_scaled"]);

    const std::string stem = prefix + "_penrate_" + penrate_suffix(rate);
    const fs::path json_path = resolve_output(stem + ".json", args);
    cohortsim::io::atomic_write_file(json_path, result_json.dump(2) + "\n");
    outputs.push_back(json_path.string());

    const fs::path ndc_path = resolve_output(stem + "_ndc.csv", args);
    cohortsim::io::atomic_write_file(ndc_path,
                                     cohortsim::hiv::ndc_csv(results));
    outputs.push_back(ndc_path.string());

    if (want_trajectory) {
      const fs::path events_path = resolve_output(stem + "_events.csv", args);
      cohortsim::io::atomic_write_file(events_path,
                                       trajectory_csv(trajectory));
      outputs.push_back(events_path.string());
    }
    cohortsim::log::info("simulate: penrate ",
                         cohortsim::io::format_double(rate), " -> ",
                         json_path.string());
  }

  emit_summary(json{{"command", "simulate"},
                    {"penrates", penrates},
                    {"n_runs", scenario.n_runs},
                    {"threads", threads},
                    {"median_total_dc_scaled", medians},
                    {"outputs", outputs},
                    {"rng", kRngName},
                    {"seed", seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const std::uint64_t seed = effective_seed(config, args);
  const int threads = effective_threads(config, args);

  const auto original_it = config.find("original");
  if (original_it == config.end() || !original_it->is_object()) {
    throw ConfigError("config field 'original' must be an object with "
                      "'data' and 'schema'");
  }
  const auto original = load_dataset(*original_it, "data", "schema");

  const bool has_simulated = config.contains("simulated");
  const bool has_experiment = config.contains("experiment");
  if (!has_simulated && !has_experiment) {
    throw ConfigError(
        "config must request at least one of 'simulated' (fidelity report) "
        "or 'experiment' (p-value replication)");
  }

  json outputs = json::array();
  json digest;

  if (has_simulated) {
    const json& sim_field = config.at("simulated");
    if (!sim_field.is_object()) {
      throw ConfigError("config field 'simulated' must be an object with "
                        "'data' and 'schema'");
    }
    const auto simulated = load_dataset(sim_field, "data", "schema");
    // The generator may cover a subset of the source columns (e.g. baseline
    // covariates without the outcome), so narrow the original to the
    // simulated columns before comparing; unknown columns raise DataError.
    std::vector<std::string> simulated_names;
    for (const auto& column : simulated.schema()) {
      simulated_names.push_back(column.name);
    }
    const auto report =
        cohortsim::analyze::fidelity(original.select(simulated_names),
                                     simulated);
    const fs::path out_path = resolve_output(
        optional_string(config, "fidelity_out", "fidelity.json"), args);
    cohortsim::io::atomic_write_file(
        out_path, cohortsim::analyze::fidelity_to_json(report).dump(2) + "\n");
    outputs.push_back(out_path.string());
    digest["max_column_distance"] = report.max_column_distance;
    digest["max_tau_delta"] = report.max_tau_delta;
    cohortsim::log::info("analyze: fidelity max column distance ",
                         report.max_column_distance, ", max tau delta ",
                         report.max_tau_delta);
  }

  if (has_experiment) {
    const json& exp = config.at("experiment");
    if (!exp.is_object()) {
      throw ConfigError("config field 'experiment' must be an object");
    }
    const std::string outcome = require_string(config, "outcome");
    const auto model = cohortsim::vbg::load_model(require_string(exp, "model"));

    std::vector<std::string> covariates =
        optional_string_list(exp, "covariates");
    if (covariates.empty()) {
      for (const auto& column : original.schema()) {
        if (column.name != outcome) covariates.push_back(column.name);
      }
    }

    cohortsim::exec::ClassifierOptions classifier_options;
    classifier_options.l2 = exp.value("l2", classifier_options.l2);
    classifier_options.n_trees =
        static_cast<int>(optional_int(exp, "n_trees", classifier_options.n_trees));
    classifier_options.max_depth = static_cast<int>(
        optional_int(exp, "max_depth", classifier_options.max_depth));
    classifier_options.min_leaf = static_cast<int>(
        optional_int(exp, "min_leaf", classifier_options.min_leaf));
    const auto classifier_seed = static_cast<std::uint64_t>(
        optional_int(exp, "classifier_seed", 1));

    const std::string classifier_kind =
        optional_string(exp, "classifier", "trees");
    std::shared_ptr<const cohortsim::exec::Classifier> classifier;
    if (classifier_kind == "logistic") {
      classifier = cohortsim::exec::fit_logistic_classifier(
          original, outcome, covariates, classifier_options);
    } else if (classifier_kind == "trees") {
      classifier = cohortsim::exec::fit_bagged_trees(
          original, outcome, covariates, classifier_options, classifier_seed);
    } else {
      throw ConfigError(
          "config field 'classifier' must be 'logistic' or 'trees', got '" +
          classifier_kind + "'");
    }
    const auto outcomes = cohortsim::exec::make_outcome_generator(
        classifier, original, outcome, optional_bool(exp, "noise", true));

    cohortsim::analyze::PValueExperimentOptions options;
    options.n_datasets =
        static_cast<int>(optional_int(exp, "n_datasets", options.n_datasets));
    options.n_rows =
        static_cast<int>(optional_int(exp, "n_rows", options.n_rows));
    options.welch = optional_bool(exp, "welch", false);
    options.threads = threads;

    const auto experiment = cohortsim::analyze::pvalue_experiment(
        model, outcomes, outcome, options,
        cohortsim::stat::derive_seed(seed, "experiment"), &original);

    json experiment_json =
        cohortsim::analyze::pvalue_experiment_to_json(experiment);
    experiment_json["rng"] = kRngName;
    experiment_json["seed"] = seed;
    const fs::path json_path = resolve_output(
        optional_string(exp, "json_out", "pvalues.json"), args);
    cohortsim::io::atomic_write_file(json_path, experiment_json.dump(2) + "\n");
    outputs.push_back(json_path.string());

    const fs::path csv_path =
        resolve_output(optional_string(exp, "csv_out", "pvalues.csv"), args);
    cohortsim::io::atomic_write_file(
        csv_path, cohortsim::analyze::pvalue_experiment_csv(experiment));
    outputs.push_back(csv_path.string());

    digest["n_datasets"] = experiment.n_datasets;
    json median_p;
    for (const auto& cov : experiment.covariates) {
      median_p[cov.covariate] = cov.median_p;
    }
    digest["median_p"] = median_p;
  }

  json summary{{"command", "analyze"},
               {"outputs", outputs},
               {"rng", kRngName},
               {"seed", seed}};
  summary.update(digest);
  emit_summary(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohort-simulation toolkit: fit generators, sample cohorts, "
               "run treatment-switch scenarios, analyze outputs"};
  app.require_subcommand(1);

  CommonArgs args;
  std::uint64_t seed_value = 0;
  int threads_value = 0;
  std::string out_value;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON config file")
        ->required();
    sub->add_option("--seed", seed_value,
                    "master seed (overrides the config seed)");
    sub->add_option("--out", out_value,
                    "directory relative output paths resolve under");
    sub->add_option("--threads", threads_value,
                    "worker threads (overrides the config)");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a baseline generator model");
  CLI::App* generate =
      app.add_subcommand("generate", "sample a cohort CSV from a model");
  CLI::App* simulate =
      app.add_subcommand("simulate", "run treatment-switch scenarios");
  CLI::App* analyze = app.add_subcommand(
      "analyze", "fidelity report / p-value replication experiment");
  add_common(fit);
  add_common(generate);
  add_common(simulate);
  add_common(analyze);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are configuration errors
  }

  for (CLI::App* sub : {fit, generate, simulate, analyze}) {
    if (sub->parsed()) {
      if (sub->count("--seed") > 0) args.seed = seed_value;
      if (sub->count("--threads") > 0) args.threads = threads_value;
      if (sub->count("--out") > 0) args.out_dir = out_value;
    }
  }

  try {
    if (fit->parsed()) return cmd_fit(args);
    if (generate->parsed()) return cmd_generate(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (analyze->parsed()) return cmd_analyze(args);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    cohortsim::log::error("configuration error: ", e.what());
    return 2;
  } catch (const DataError& e) {
    cohortsim::log::error("data error: ", e.what());
    return 3;
  } catch (const NumericError& e) {
    cohortsim::log::error("numerical failure: ", e.what());
    return 4;
  } catch (const std::exception& e) {
    cohortsim::log::error("unexpected error: ", e.what());
    return 1;
  }
}
