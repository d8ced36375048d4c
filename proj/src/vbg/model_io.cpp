#include "cohortsim/vbg/model_io.hpp"

#include <utility>

#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/io.hpp"

namespace cohortsim::vbg {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw DataError(std::string("model json: missing field '") + key + "'");
  }
  return *it;
}

json matrix_to_json(const stat::Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

stat::Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw DataError("model json: matrix must be a non-empty array of rows");
  }
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  stat::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) {
      throw DataError("model json: ragged matrix rows");
    }
    for (int k = 0; k < cols; ++k) m.at(i, k) = j[i][k].get<double>();
  }
  return m;
}

json discrete_to_json(const DiscreteVBGModel& m) {
  json j;
  j["model_type"] = "discrete";
  j["schema"] = data::schema_to_json(m.schema);
  j["categorical_cols"] = m.categorical_cols;
  j["continuous_cols"] = m.continuous_cols;
  json configs = json::array();
  for (const auto& cfg : m.configs) {
    json c;
    c["categories"] = cfg.categories;
    c["prob"] = cfg.prob;
    c["mean"] = cfg.mean;
    c["cov"] = matrix_to_json(cfg.cov);
    c["pooled_cov"] = cfg.pooled_cov;
    configs.push_back(std::move(c));
  }
  j["configs"] = std::move(configs);
  return j;
}

DiscreteVBGModel discrete_from_json(const json& j) {
  DiscreteVBGModel m;
  m.schema = data::schema_from_json(require(j, "schema"));
  m.categorical_cols = require(j, "categorical_cols").get<std::vector<int>>();
  m.continuous_cols = require(j, "continuous_cols").get<std::vector<int>>();
  for (const auto& c : require(j, "configs")) {
    DiscreteConfig cfg;
    cfg.categories = require(c, "categories").get<std::vector<int>>();
    cfg.prob = require(c, "prob").get<double>();
    cfg.mean = require(c, "mean").get<std::vector<double>>();
    cfg.cov = matrix_from_json(require(c, "cov"));
    cfg.pooled_cov = require(c, "pooled_cov").get<bool>();
    m.configs.push_back(std::move(cfg));
  }
  validate_discrete(m);
  return m;
}

json continuous_to_json(const ContinuousVBGModel& m) {
  json j;
  j["model_type"] = "continuous";
  j["schema"] = data::schema_to_json(m.schema);
  j["mean"] = m.mean;
  j["cov"] = matrix_to_json(m.cov);
  j["categorical_cols"] = m.categorical_cols;
  j["critical_values"] = m.critical_values;
  j["category_probs"] = m.category_probs;
  j["ridged"] = m.ridged;
  return j;
}

ContinuousVBGModel continuous_from_json(const json& j) {
  ContinuousVBGModel m;
  m.schema = data::schema_from_json(require(j, "schema"));
  m.mean = require(j, "mean").get<std::vector<double>>();
  m.cov = matrix_from_json(require(j, "cov"));
  m.categorical_cols = require(j, "categorical_cols").get<std::vector<int>>();
  m.critical_values =
      require(j, "critical_values").get<std::vector<std::vector<double>>>();
  m.category_probs =
      require(j, "category_probs").get<std::vector<std::vector<double>>>();
  m.ridged = require(j, "ridged").get<bool>();
  validate_continuous(m);
  return m;
}

json vine_to_json(const VineCopulaModel& m) {
  json j;
  j["model_type"] = "vine";
  j["schema"] = data::schema_to_json(m.schema);
  json margins = json::array();
  for (const auto& margin : m.margins) {
    json mj;
    if (margin.kind == data::ColumnKind::kContinuous) {
      mj["kind"] = "continuous";
      mj["sorted_values"] = margin.sorted_values;
    } else {
      mj["kind"] = "categorical";
      mj["category_probs"] = margin.category_probs;
    }
    margins.push_back(std::move(mj));
  }
  j["margins"] = std::move(margins);
  json trees = json::array();
  for (const auto& tree : m.trees) {
    json edges = json::array();
    for (const auto& e : tree) {
      json ej;
      ej["node_left"] = e.node_left;
      ej["node_right"] = e.node_right;
      ej["var_a"] = e.var_a;
      ej["var_b"] = e.var_b;
      ej["conditioning"] = e.conditioning;
      ej["family"] = family_name(e.copula.family);
      ej["theta"] = e.copula.theta;
      ej["rotation"] = e.copula.rotation;
      ej["tau"] = e.tau;
      edges.push_back(std::move(ej));
    }
    trees.push_back(std::move(edges));
  }
  j["trees"] = std::move(trees);
  return j;
}

VineCopulaModel vine_from_json(const json& j) {
  VineCopulaModel m;
  m.schema = data::schema_from_json(require(j, "schema"));
  for (const auto& mj : require(j, "margins")) {
    VineMargin margin;
    const std::string kind = require(mj, "kind").get<std::string>();
    if (kind == "continuous") {
      margin.kind = data::ColumnKind::kContinuous;
      margin.sorted_values =
          require(mj, "sorted_values").get<std::vector<double>>();
    } else if (kind == "categorical") {
      margin.kind = data::ColumnKind::kCategorical;
      margin.category_probs =
          require(mj, "category_probs").get<std::vector<double>>();
    } else {
      throw DataError("model json: unknown margin kind '" + kind + "'");
    }
    m.margins.push_back(std::move(margin));
  }
  for (const auto& tj : require(j, "trees")) {
    std::vector<VineEdge> tree;
    for (const auto& ej : tj) {
      VineEdge e;
      e.node_left = require(ej, "node_left").get<int>();
      e.node_right = require(ej, "node_right").get<int>();
      e.var_a = require(ej, "var_a").get<int>();
      e.var_b = require(ej, "var_b").get<int>();
      e.conditioning = require(ej, "conditioning").get<std::vector<int>>();
      e.copula.family =
          family_from_name(require(ej, "family").get<std::string>());
      e.copula.theta = require(ej, "theta").get<double>();
      e.copula.rotation = require(ej, "rotation").get<int>();
      e.tau = require(ej, "tau").get<double>();
      tree.push_back(std::move(e));
    }
    m.trees.push_back(std::move(tree));
  }
  validate_vine(m);
  return m;
}

}  // namespace

std::string model_type_name(const GeneratorModel& model) {
  if (std::holds_alternative<DiscreteVBGModel>(model)) return "discrete";
  if (std::holds_alternative<ContinuousVBGModel>(model)) return "continuous";
  return "vine";
}

const std::vector<data::ColumnSchema>& generator_schema(
    const GeneratorModel& model) {
  return std::visit([](const auto& m) -> const std::vector<data::ColumnSchema>& {
    return m.schema;
  }, model);
}

nlohmann::json model_to_json(const GeneratorModel& model) {
  if (const auto* d = std::get_if<DiscreteVBGModel>(&model)) {
    return discrete_to_json(*d);
  }
  if (const auto* c = std::get_if<ContinuousVBGModel>(&model)) {
    return continuous_to_json(*c);
  }
  return vine_to_json(std::get<VineCopulaModel>(model));
}

GeneratorModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("model json: document must be an object");
  const std::string type = require(j, "model_type").get<std::string>();
  try {
    if (type == "discrete") return discrete_from_json(j);
    if (type == "continuous") return continuous_from_json(j);
    if (type == "vine") return vine_from_json(j);
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: malformed field: ") + e.what());
  }
  throw DataError("model json: unknown model_type '" + type +
                  "' (expected discrete, continuous or vine)");
}

void save_model(const GeneratorModel& model,
                const std::filesystem::path& path) {
  io::atomic_write_file(path, model_to_json(model).dump(2) + "\n");
}

GeneratorModel load_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw DataError("model file " + path.string() +
                    " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

data::MixedDataset sample_generator(const GeneratorModel& model,
                                    std::size_t n, std::uint64_t seed) {
  if (const auto* d = std::get_if<DiscreteVBGModel>(&model)) {
    return sample_discrete(*d, n, seed);
  }
  if (const auto* c = std::get_if<ContinuousVBGModel>(&model)) {
    return sample_continuous(*c, n, seed);
  }
  return sample_vine(std::get<VineCopulaModel>(model), n, seed);
}

}  // namespace cohortsim::vbg
