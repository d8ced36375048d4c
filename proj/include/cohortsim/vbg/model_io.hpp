#pragma once

// Serialization for the three baseline-generator families.  A fitted model
// round-trips through a single JSON document tagged with `model_type`
// ("discrete" | "continuous" | "vine"), so a model fitted in one process can
// be sampled in another with identical results.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/vbg/continuous.hpp"
#include "cohortsim/vbg/discrete.hpp"
#include "cohortsim/vbg/vine.hpp"

namespace cohortsim::vbg {

using GeneratorModel =
    std::variant<DiscreteVBGModel, ContinuousVBGModel, VineCopulaModel>;

// "discrete", "continuous" or "vine".
std::string model_type_name(const GeneratorModel& model);

const std::vector<data::ColumnSchema>& generator_schema(
    const GeneratorModel& model);

nlohmann::json model_to_json(const GeneratorModel& model);

// Throws DataError on a malformed document, an unknown model_type, or a
// model that fails its structural validation.
GeneratorModel model_from_json(const nlohmann::json& j);

// Atomic write / read of the JSON document above.
void save_model(const GeneratorModel& model,
                const std::filesystem::path& path);
GeneratorModel load_model(const std::filesystem::path& path);

// Dispatches to sample_discrete / sample_continuous / sample_vine.
data::MixedDataset sample_generator(const GeneratorModel& model,
                                    std::size_t n, std::uint64_t seed);

}  // namespace cohortsim::vbg
