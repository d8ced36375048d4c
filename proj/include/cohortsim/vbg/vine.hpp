#pragma once

// Regular-vine copula model over a mixed dataset: empirical margins plus a
// hierarchy of bivariate copulas arranged in d-1 trees.  Fitting follows the
// sequential tree-by-tree approach: a maximum spanning tree on |kendall tau|
// picks the first tree, each edge gets a pair copula, and deeper trees work
// on h-transformed pseudo-observations under the proximity condition.
// Sampling inverts the construction (inverse Rosenblatt through the fitted
// h-functions) and maps uniforms back through the margins.

#include <cstdint>
#include <string>
#include <vector>

#include "cohortsim/data/dataset.hpp"
#include "cohortsim/vbg/pair_copula.hpp"

namespace cohortsim::vbg {

// One pair copula inside the vine.  Tree 0 edges join two variables
// directly; an edge in tree t >= 1 joins two edges of tree t-1 that share a
// node (the proximity condition).  var_a always comes from the left child's
// side, var_b from the right; `conditioning` is the sorted set of variables
// conditioned on.
struct VineEdge {
  int node_left = -1;   // tree 0: variable index; tree t>0: edge index in tree t-1
  int node_right = -1;
  int var_a = -1;
  int var_b = -1;
  std::vector<int> conditioning;
  PairCopula copula;
  double tau = 0.0;  // kendall tau of the (possibly conditioned) fit inputs
};

// Back-transform description for one column.
struct VineMargin {
  data::ColumnKind kind = data::ColumnKind::kContinuous;
  std::vector<double> sorted_values;   // continuous: empirical support
  std::vector<double> category_probs;  // categorical: P(category = m)
};

struct VineCopulaModel {
  std::vector<data::ColumnSchema> schema;
  std::vector<VineMargin> margins;        // one per column
  std::vector<std::vector<VineEdge>> trees;  // trees[t] has d-1-t edges
};

struct VineFitOptions {
  PairCopulaFitOptions pair_options;
};

struct VineFitReport {
  int independence_pairs = 0;  // edges where independence was retained
  int total_pairs = 0;
  std::vector<std::string> notes;
};

// Fits the vine on `data` (all columns).  `seed` controls the tie-jitter
// stream used to build pseudo-observations for categorical/tied values.
// Throws DataError for fewer than two columns or fewer than 30 rows.
VineCopulaModel fit_vine(const data::MixedDataset& data, std::uint64_t seed,
                         const VineFitOptions& options = {},
                         VineFitReport* report = nullptr);

// Structural validity: tree sizes d-1-t, proximity condition, conditioned
// pairs consistent with the child constraint sets, copula parameters in
// domain, margins matching the schema.  Throws DataError on violation.
void validate_vine(const VineCopulaModel& model);

// Draws n rows via inverse Rosenblatt.  Deterministic in (model, seed); one
// uniform is consumed per variable per row, in column order.
data::MixedDataset sample_vine(const VineCopulaModel& model, std::size_t n,
                               std::uint64_t seed);

}  // namespace cohortsim::vbg
