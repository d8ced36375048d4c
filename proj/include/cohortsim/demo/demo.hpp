#pragma once

// Synthetic demonstration data.  The shipped examples and the acceptance
// suite run on generated datasets with realistic shapes: a metabolic-risk
// cohort for the generator/fidelity pipeline and an HIV-treatment cohort
// with a matching catalog and execution models for the scenario engine.

#include <cstdint>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/hiv/engine.hpp"

namespace cohortsim::demo {

// 392 rows, eight continuous risk covariates (PREG, GLU, BP, SKIN, INS,
// BMI, PED, AGE) and a binary DIAB outcome.  The covariates carry a factor
// structure (metabolic and age factors) so several pairs have Kendall tau
// well above 0.2, and the outcome depends strongly on GLU/BMI/AGE/PED.
data::MixedDataset metabolic_dataset(std::uint64_t seed);

// Names the strongly outcome-associated covariate of metabolic_dataset.
const std::string& metabolic_strong_covariate();
// The outcome column name ("DIAB").
const std::string& metabolic_outcome();

// Treatment catalog with `n_treatments` regimens (named T01, T02, ...),
// staggered authorization dates, explicit generic-entry dates inside a
// ten-semester horizon for the high-market-share regimens, two regimens
// without any generic form, and a constant Markov switch model that keeps
// each regimen with probability 0.86.
hiv::TreatmentCatalog demo_catalog(int n_treatments = 10);

// Baseline cohort of n patients matching demo_catalog(n_treatments):
// plausible ages, infection/treatment durations, viral-load and renal
// stages, everyone alive, market shares decaying across regimens.
data::MixedDataset demo_baseline(int n, int n_treatments,
                                 std::uint64_t seed);

// Hand-calibrated semiannual transition models (validated): mild
// comorbidity onset, 1.5% semiannual mortality, viral-load persistence,
// renal-stage escalation driven by viral load and age.
hiv::ExecutionModels demo_execution_models();

}  // namespace cohortsim::demo
