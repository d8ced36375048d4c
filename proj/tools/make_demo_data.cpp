// Writes the demonstration datasets, catalog, execution models, and
// scenario template the README and example configs refer to.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/demo/demo.hpp"
#include "cohortsim/hiv/engine.hpp"
#include "cohortsim/util/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the demonstration data files"};
  std::string out_dir = "data";
  std::uint64_t seed = 20240901;
  int baseline_rows = 1000;
  int treatments = 10;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--baseline-rows", baseline_rows, "HIV baseline cohort size");
  app.add_option("--treatments", treatments, "Number of regimens");
  CLI11_PARSE(app, argc, argv);

  try {
    namespace fs = std::filesystem;
    using namespace cohortsim;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const auto metabolic = demo::metabolic_dataset(seed);
    data::write_csv(dir / "metabolic.csv", metabolic);
    io::atomic_write_file(
        dir / "metabolic_schema.json",
        data::schema_to_json(metabolic.schema()).dump(2) + "\n");

    const auto baseline =
        demo::demo_baseline(baseline_rows, treatments, seed);
    data::write_csv(dir / "hiv_baseline.csv", baseline);
    io::atomic_write_file(
        dir / "hiv_baseline_schema.json",
        data::schema_to_json(baseline.schema()).dump(2) + "\n");

    hiv::save_catalog(demo::demo_catalog(treatments),
                      dir / "hiv_catalog.json");
    hiv::save_execution_models(demo::demo_execution_models(),
                               dir / "hiv_models.json");
    hiv::save_scenario(hiv::ScenarioConfig{}, dir / "scenario.json");

    std::printf("wrote %s: metabolic.csv (392 rows), hiv_baseline.csv "
                "(%d rows), hiv_catalog.json, hiv_models.json, "
                "scenario.json\n",
                out_dir.c_str(), baseline_rows);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
