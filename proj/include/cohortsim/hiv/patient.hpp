#pragma once

// Patient-level state for the cohort engine: demographic and clinical
// covariates evolved semester by semester, plus the treatment assignment
// and the branded-versus-generic flag.

#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"

namespace cohortsim::hiv {

// Binary covariates use the source coding 0/1; note the survival flag:
// death == 1 means ALIVE, death == 0 means dead (the source convention,
// "died" is the 1 -> 0 transition).  Durations are in months; one period
// of the engine is a semester (six months).
struct PatientState {
  int sex = 0;          // {0,1}
  double age = 0.0;     // months
  int bc = 0;           // {0,1}
  int conta = 0;        // {0,1}
  int vihs = 0;         // {0,1}
  double vihd = 0.0;    // infection duration, months
  double treatd = 0.0;  // current-treatment duration, months
  int arn = 0;          // viral load class {0,1,2}
  int heart = 0;        // {0,1}
  int diab = 0;         // {0,1}
  int ir = 0;           // renal failure {0,1}, derived from crea
  int crea = 3;         // creatinine clearance class {1,2,3}
  int death = 1;        // 1 = alive, 0 = dead (absorbing)
  int treatment_id = 0; // index into the treatment catalog
  bool on_generic = false;

  bool alive() const { return death == 1; }
};

// Renal-failure derivation: the source rule reads "1 if CREA is 1 or 2,
// 0 if CREA is 3"; `invert` flips it (1 only for CREA = 3) for users who
// consider the printed rule a typo.
int ir_from_crea(int crea, bool invert);

// Ordered list of required baseline column names.
const std::vector<std::string>& baseline_column_names();

// Schema the baseline dataset must carry.  `treatment_names` become the
// categories of the TREAT column.
std::vector<data::ColumnSchema> baseline_schema(
    const std::vector<std::string>& treatment_names);

}  // namespace cohortsim::hiv
