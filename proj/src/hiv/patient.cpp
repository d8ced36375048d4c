#include "cohortsim/hiv/patient.hpp"

namespace cohortsim::hiv {

int ir_from_crea(int crea, bool invert) {
  const bool printed_rule = (crea == 1 || crea == 2);
  return (invert ? !printed_rule : printed_rule) ? 1 : 0;
}

const std::vector<std::string>& baseline_column_names() {
  static const std::vector<std::string> names = {
      "SEX",  "AGE",   "BC",  "CONTA", "VIHS",  "VIHD",  "TREATD",
      "ARN",  "HEART", "DIAB", "IR",   "CREA",  "DEATH", "TREAT"};
  return names;
}

std::vector<data::ColumnSchema> baseline_schema(
    const std::vector<std::string>& treatment_names) {
  const std::vector<std::string> binary = {"0", "1"};
  return {
      {"SEX", data::ColumnKind::kCategorical, binary},
      {"AGE", data::ColumnKind::kContinuous, {}},
      {"BC", data::ColumnKind::kCategorical, binary},
      {"CONTA", data::ColumnKind::kCategorical, binary},
      {"VIHS", data::ColumnKind::kCategorical, binary},
      {"VIHD", data::ColumnKind::kContinuous, {}},
      {"TREATD", data::ColumnKind::kContinuous, {}},
      {"ARN", data::ColumnKind::kCategorical, {"0", "1", "2"}},
      {"HEART", data::ColumnKind::kCategorical, binary},
      {"DIAB", data::ColumnKind::kCategorical, binary},
      {"IR", data::ColumnKind::kCategorical, binary},
      {"CREA", data::ColumnKind::kCategorical, {"1", "2", "3"}},
      {"DEATH", data::ColumnKind::kCategorical, binary},
      {"TREAT", data::ColumnKind::kCategorical, treatment_names},
  };
}

}  // namespace cohortsim::hiv
