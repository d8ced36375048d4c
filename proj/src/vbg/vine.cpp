#include "cohortsim/vbg/vine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "cohortsim/stat/ranks.hpp"
#include "cohortsim/stat/rng.hpp"
#include "cohortsim/util/errors.hpp"
#include "cohortsim/util/log.hpp"

namespace cohortsim::vbg {

namespace {

// --- fitting scaffolding --------------------------------------------------

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Candidate edge for a spanning tree: nodes are indices into the previous
// level (variables for tree 0, previous-tree edges otherwise).
struct Candidate {
  int left;
  int right;
  double abs_tau;
};

// Deterministic maximum-spanning-tree selection: strongest |tau| first,
// ties broken lexicographically on the node indices.
std::vector<Candidate> kruskal_max(std::vector<Candidate> candidates,
                                   int n_nodes) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.abs_tau != b.abs_tau) return a.abs_tau > b.abs_tau;
                     if (a.left != b.left) return a.left < b.left;
                     return a.right < b.right;
                   });
  DisjointSet dsu(n_nodes);
  std::vector<Candidate> chosen;
  for (const auto& c : candidates) {
    if (dsu.unite(c.left, c.right)) chosen.push_back(c);
    if (static_cast<int>(chosen.size()) == n_nodes - 1) break;
  }
  if (static_cast<int>(chosen.size()) != n_nodes - 1) {
    throw NumericError("vine tree construction: spanning tree incomplete");
  }
  return chosen;
}

// Working state per fitted edge during tree-by-tree estimation.
struct FitNode {
  std::vector<int> constraint;   // sorted union of all involved variables
  std::vector<double> cond_a;    // F(var_a | constraint \ {var_a})
  std::vector<double> cond_b;    // F(var_b | constraint \ {var_b})
};

std::vector<int> sorted_union(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<int> sorted_intersection(const std::vector<int>& a,
                                     const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// The single variable in `a` but not in `b`; the proximity condition
// guarantees exactly one exists for adjacent edges.
int exclusive_var(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> diff;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(diff));
  if (diff.size() != 1) {
    throw NumericError("vine tree construction: proximity condition violated");
  }
  return diff[0];
}

// --- sampling scaffolding --------------------------------------------------

// Child edge index on the side of `var` for an edge in tree t >= 1, plus
// whether `var` is that child's var_a.  The conditioned member of an edge is
// always a conditioned member of the child on its side.
std::pair<int, bool> child_on_side(const VineCopulaModel& model, int tree,
                                   const VineEdge& e, int var) {
  const int child_idx = (var == e.var_a) ? e.node_left : e.node_right;
  const VineEdge& child = model.trees.at(tree - 1).at(child_idx);
  if (child.var_a == var) return {child_idx, true};
  if (child.var_b == var) return {child_idx, false};
  throw NumericError("vine model: conditioned pair inconsistent with children");
}

// Per-row memo of edge conditionals F(var | constraint \ {var}).
struct RowMemo {
  std::vector<std::vector<double>> val_a, val_b;
  std::vector<std::vector<char>> has_a, has_b;

  explicit RowMemo(const VineCopulaModel& model) {
    for (const auto& tree : model.trees) {
      val_a.emplace_back(tree.size(), 0.0);
      val_b.emplace_back(tree.size(), 0.0);
      has_a.emplace_back(tree.size(), '\0');
      has_b.emplace_back(tree.size(), '\0');
    }
  }
  void reset() {
    for (auto& t : has_a) std::fill(t.begin(), t.end(), '\0');
    for (auto& t : has_b) std::fill(t.begin(), t.end(), '\0');
  }
};

// F(conditioned var on `side_a` | other variables of edge (tree, idx)),
// computed recursively from already-sampled uniforms `u`.
double cond_value(const VineCopulaModel& model, const std::vector<double>& u,
                  RowMemo* memo, int tree, int idx, bool side_a) {
  char& has = side_a ? memo->has_a[tree][idx] : memo->has_b[tree][idx];
  double& val = side_a ? memo->val_a[tree][idx] : memo->val_b[tree][idx];
  if (has != '\0') return val;
  const VineEdge& e = model.trees[tree][idx];
  double fa, fb;  // F(var_a | conditioning), F(var_b | conditioning)
  if (tree == 0) {
    fa = u[e.var_a];
    fb = u[e.var_b];
  } else {
    const auto [ia, sa] = child_on_side(model, tree, e, e.var_a);
    const auto [ib, sb] = child_on_side(model, tree, e, e.var_b);
    fa = cond_value(model, u, memo, tree - 1, ia, sa);
    fb = cond_value(model, u, memo, tree - 1, ib, sb);
  }
  val = side_a ? h_function(e.copula, fa, fb)
               : h_function_given_first(e.copula, fb, fa);
  has = '\1';
  return val;
}

// Elimination order and per-variable h-inversion chains ("arms") derived
// from the tree structure: repeatedly peel a conditioned variable of the
// top remaining edge; its arm is the chain of side-children down to tree 0.
struct SamplePlan {
  std::vector<int> order;             // variables in sampling order
  std::vector<std::vector<int>> arm;  // arm[v][t] = edge index in tree t
};

SamplePlan build_plan(const VineCopulaModel& model) {
  const int d = static_cast<int>(model.schema.size());
  SamplePlan plan;
  plan.arm.assign(d, {});
  std::vector<std::vector<bool>> alive;
  for (const auto& tree : model.trees) {
    alive.emplace_back(tree.size(), true);
  }
  std::vector<int> elimination;
  for (int step = 0; step < d - 2; ++step) {
    const int top = d - 2 - step;
    int top_edge = -1;
    for (std::size_t i = 0; i < alive[top].size(); ++i) {
      if (alive[top][i]) {
        if (top_edge != -1) {
          throw NumericError("vine model: ambiguous elimination order");
        }
        top_edge = static_cast<int>(i);
      }
    }
    if (top_edge == -1) {
      throw NumericError("vine model: no remaining edge in top tree");
    }
    const VineEdge& e = model.trees[top][top_edge];
    const int x = std::max(e.var_a, e.var_b);
    auto& arm = plan.arm[x];
    arm.assign(top + 1, -1);
    int tree = top, idx = top_edge;
    for (;;) {
      arm[tree] = idx;
      alive[tree][idx] = false;
      if (tree == 0) break;
      const auto [child, child_side_a] =
          child_on_side(model, tree, model.trees[tree][idx], x);
      (void)child_side_a;
      idx = child;
      --tree;
    }
    elimination.push_back(x);
  }
  int last_edge = -1;
  for (std::size_t i = 0; i < alive[0].size(); ++i) {
    if (alive[0][i]) last_edge = static_cast<int>(i);
  }
  if (last_edge == -1) {
    throw NumericError("vine model: tree 0 exhausted prematurely");
  }
  const VineEdge& e0 = model.trees[0][last_edge];
  const int x1 = std::max(e0.var_a, e0.var_b);
  const int x0 = std::min(e0.var_a, e0.var_b);
  plan.arm[x1] = {last_edge};
  plan.order.push_back(x0);
  plan.order.push_back(x1);
  for (auto it = elimination.rbegin(); it != elimination.rend(); ++it) {
    plan.order.push_back(*it);
  }
  return plan;
}

}  // namespace

VineCopulaModel fit_vine(const data::MixedDataset& data, std::uint64_t seed,
                         const VineFitOptions& options, VineFitReport* report) {
  const int d = data.n_cols();
  const int n = data.n_rows();
  if (d < 2) throw DataError("fit_vine: need at least two columns");
  if (n < 30) throw DataError("fit_vine: need at least 30 rows");

  VineFitReport rep;
  rep.total_pairs = d * (d - 1) / 2;

  VineCopulaModel model;
  model.schema = data.schema();
  model.trees.reserve(static_cast<std::size_t>(d - 1));

  // Margins and pseudo-observations.  Tied ranks (all categorical values,
  // plus any repeated continuous values) are jittered by a dedicated stream
  // so the copula inputs are strictly continuous.
  stat::Rng jitter(stat::derive_seed(seed, "fit-jitter"));
  std::vector<std::vector<double>> pseudo(d);
  for (int c = 0; c < d; ++c) {
    VineMargin margin;
    margin.kind = data.schema(c).kind;
    if (margin.kind == data::ColumnKind::kContinuous) {
      margin.sorted_values = data.column(c);
      std::sort(margin.sorted_values.begin(), margin.sorted_values.end());
    } else {
      margin.category_probs = data.category_probs(c);
    }
    model.margins.push_back(std::move(margin));
    pseudo[c] = stat::pseudo_observations(data.column(c), &jitter);
  }

  // Tree 0: maximum spanning tree on |kendall tau| over all variable pairs.
  std::vector<Candidate> candidates;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      candidates.push_back(
          {i, j, std::fabs(stat::kendall_tau(pseudo[i], pseudo[j]))});
    }
  }
  std::vector<FitNode> prev_nodes;
  model.trees.emplace_back();
  for (const auto& c : kruskal_max(candidates, d)) {
    VineEdge edge;
    edge.node_left = c.left;
    edge.node_right = c.right;
    edge.var_a = c.left;
    edge.var_b = c.right;
    edge.tau = stat::kendall_tau(pseudo[c.left], pseudo[c.right]);
    PairCopulaFitReport pair_rep;
    edge.copula = fit_pair_copula(pseudo[c.left], pseudo[c.right],
                                  options.pair_options, &pair_rep);
    if (pair_rep.independence_retained) ++rep.independence_pairs;

    FitNode node;
    node.constraint = {c.left, c.right};
    node.cond_a.resize(n);
    node.cond_b.resize(n);
    for (int r = 0; r < n; ++r) {
      node.cond_a[r] =
          h_function(edge.copula, pseudo[c.left][r], pseudo[c.right][r]);
      node.cond_b[r] = h_function_given_first(edge.copula,
                                              pseudo[c.right][r],
                                              pseudo[c.left][r]);
    }
    prev_nodes.push_back(std::move(node));
    model.trees.back().push_back(std::move(edge));
  }

  // Deeper trees: nodes are the previous tree's edges; two are adjacent iff
  // they share a node there (proximity condition); the fit inputs are the
  // stored conditional pseudo-observations on the exclusive-variable sides.
  for (int t = 1; t <= d - 2; ++t) {
    const auto& prev_edges = model.trees[t - 1];
    const int n_nodes = static_cast<int>(prev_edges.size());
    auto adjacent = [&](int m, int k) {
      const VineEdge& em = prev_edges[m];
      const VineEdge& ek = prev_edges[k];
      return em.node_left == ek.node_left || em.node_left == ek.node_right ||
             em.node_right == ek.node_left || em.node_right == ek.node_right;
    };
    auto side_values = [&](int m, int k) {
      // conditional pseudo-observations of node m's exclusive variable
      const int w = exclusive_var(prev_nodes[m].constraint,
                                  prev_nodes[k].constraint);
      return (w == prev_edges[m].var_a) ? &prev_nodes[m].cond_a
                                        : &prev_nodes[m].cond_b;
    };
    candidates.clear();
    for (int m = 0; m < n_nodes; ++m) {
      for (int k = m + 1; k < n_nodes; ++k) {
        if (!adjacent(m, k)) continue;
        candidates.push_back(
            {m, k,
             std::fabs(stat::kendall_tau(*side_values(m, k),
                                         *side_values(k, m)))});
      }
    }
    std::vector<FitNode> next_nodes;
    model.trees.emplace_back();
    for (const auto& c : kruskal_max(candidates, n_nodes)) {
      const auto& left_arr = *side_values(c.left, c.right);
      const auto& right_arr = *side_values(c.right, c.left);
      VineEdge edge;
      edge.node_left = c.left;
      edge.node_right = c.right;
      edge.var_a = exclusive_var(prev_nodes[c.left].constraint,
                                 prev_nodes[c.right].constraint);
      edge.var_b = exclusive_var(prev_nodes[c.right].constraint,
                                 prev_nodes[c.left].constraint);
      edge.conditioning = sorted_intersection(prev_nodes[c.left].constraint,
                                              prev_nodes[c.right].constraint);
      edge.tau = stat::kendall_tau(left_arr, right_arr);
      PairCopulaFitReport pair_rep;
      edge.copula =
          fit_pair_copula(left_arr, right_arr, options.pair_options, &pair_rep);
      if (pair_rep.independence_retained) ++rep.independence_pairs;

      FitNode node;
      node.constraint = sorted_union(prev_nodes[c.left].constraint,
                                     prev_nodes[c.right].constraint);
      node.cond_a.resize(n);
      node.cond_b.resize(n);
      for (int r = 0; r < n; ++r) {
        node.cond_a[r] = h_function(edge.copula, left_arr[r], right_arr[r]);
        node.cond_b[r] =
            h_function_given_first(edge.copula, right_arr[r], left_arr[r]);
      }
      next_nodes.push_back(std::move(node));
      model.trees.back().push_back(std::move(edge));
    }
    prev_nodes = std::move(next_nodes);
  }

  log::info("fit_vine: d=", d, " pairs=", rep.total_pairs,
            " independence=", rep.independence_pairs);
  if (report != nullptr) *report = rep;
  validate_vine(model);
  return model;
}

void validate_vine(const VineCopulaModel& model) {
  const int d = static_cast<int>(model.schema.size());
  if (d < 2) throw DataError("vine model: needs at least two columns");
  if (static_cast<int>(model.margins.size()) != d) {
    throw DataError("vine model: margin count does not match schema");
  }
  for (int c = 0; c < d; ++c) {
    const auto& m = model.margins[c];
    if (m.kind != model.schema[c].kind) {
      throw DataError("vine model: margin kind mismatch for column " +
                      model.schema[c].name);
    }
    if (m.kind == data::ColumnKind::kContinuous) {
      if (m.sorted_values.empty()) {
        throw DataError("vine model: empty continuous margin for column " +
                        model.schema[c].name);
      }
      if (!std::is_sorted(m.sorted_values.begin(), m.sorted_values.end())) {
        throw DataError("vine model: continuous margin not sorted for column " +
                        model.schema[c].name);
      }
    } else {
      if (m.category_probs.size() != model.schema[c].categories.size()) {
        throw DataError("vine model: category probability count mismatch for " +
                        model.schema[c].name);
      }
      double sum = 0.0;
      for (double p : m.category_probs) {
        if (p < 0.0) throw DataError("vine model: negative category probability");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9) {
        throw DataError("vine model: category probabilities do not sum to 1");
      }
    }
  }
  if (static_cast<int>(model.trees.size()) != d - 1) {
    throw DataError("vine model: expected d-1 trees");
  }
  // Reconstruct constraint sets tree by tree and check the proximity
  // condition plus conditioned-pair consistency.
  std::vector<std::vector<int>> prev_constraint;
  for (int t = 0; t < d - 1; ++t) {
    const auto& tree = model.trees[t];
    if (static_cast<int>(tree.size()) != d - 1 - t) {
      throw DataError("vine model: tree " + std::to_string(t) +
                      " has wrong edge count");
    }
    std::vector<std::vector<int>> constraint;
    for (const auto& e : tree) {
      if (e.var_a == e.var_b) throw DataError("vine model: degenerate edge");
      validate(e.copula);
      if (t == 0) {
        if (e.var_a < 0 || e.var_a >= d || e.var_b < 0 || e.var_b >= d) {
          throw DataError("vine model: variable index out of range");
        }
        if (e.node_left != e.var_a || e.node_right != e.var_b ||
            !e.conditioning.empty()) {
          throw DataError("vine model: malformed tree-0 edge");
        }
        constraint.push_back({std::min(e.var_a, e.var_b),
                              std::max(e.var_a, e.var_b)});
        continue;
      }
      const int prev_n = static_cast<int>(prev_constraint.size());
      if (e.node_left < 0 || e.node_left >= prev_n || e.node_right < 0 ||
          e.node_right >= prev_n || e.node_left == e.node_right) {
        throw DataError("vine model: edge child indices out of range");
      }
      const auto& cl = prev_constraint[e.node_left];
      const auto& cr = prev_constraint[e.node_right];
      const auto& pl = model.trees[t - 1][e.node_left];
      const auto& pr = model.trees[t - 1][e.node_right];
      const bool share = pl.node_left == pr.node_left ||
                         pl.node_left == pr.node_right ||
                         pl.node_right == pr.node_left ||
                         pl.node_right == pr.node_right;
      if (!share) {
        throw DataError("vine model: proximity condition violated in tree " +
                        std::to_string(t));
      }
      try {
        if (exclusive_var(cl, cr) != e.var_a ||
            exclusive_var(cr, cl) != e.var_b ||
            sorted_intersection(cl, cr) != e.conditioning) {
          throw DataError("vine model: conditioned pair inconsistent in tree " +
                          std::to_string(t));
        }
      } catch (const NumericError&) {
        throw DataError("vine model: constraint sets inconsistent in tree " +
                        std::to_string(t));
      }
      constraint.push_back(sorted_union(cl, cr));
    }
    prev_constraint = std::move(constraint);
  }
}

data::MixedDataset sample_vine(const VineCopulaModel& model, std::size_t n,
                               std::uint64_t seed) {
  if (n < 1) throw DataError("sample_vine: n must be at least 1");
  validate_vine(model);
  const int d = static_cast<int>(model.schema.size());
  const SamplePlan plan = build_plan(model);

  std::vector<stat::EmpiricalMargin> margins(d);
  for (int c = 0; c < d; ++c) {
    if (model.margins[c].kind == data::ColumnKind::kContinuous) {
      margins[c] = stat::EmpiricalMargin(model.margins[c].sorted_values);
    }
  }

  stat::Rng rng(seed);
  RowMemo memo(model);
  data::MixedDataset out = data::MixedDataset::empty(model.schema);
  std::vector<double> w(d), u(d), row(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (int v = 0; v < d; ++v) w[v] = rng.uniform01();
    memo.reset();
    // Poison unsampled slots: any ordering defect trips the (0,1) domain
    // check inside the h-functions instead of silently using stale values.
    std::fill(u.begin(), u.end(), std::numeric_limits<double>::quiet_NaN());

    u[plan.order[0]] = w[plan.order[0]];
    for (int k = 1; k < d; ++k) {
      const int x = plan.order[k];
      double p = w[x];
      const auto& arm = plan.arm[x];
      for (int t = static_cast<int>(arm.size()) - 1; t >= 0; --t) {
        const VineEdge& e = model.trees[t][arm[t]];
        if (x == e.var_a) {
          double fb;
          if (t == 0) {
            fb = u[e.var_b];
          } else {
            const auto [ib, sb] = child_on_side(model, t, e, e.var_b);
            fb = cond_value(model, u, &memo, t - 1, ib, sb);
          }
          p = inverse_h(e.copula, p, fb);
        } else {
          double fa;
          if (t == 0) {
            fa = u[e.var_a];
          } else {
            const auto [ia, sa] = child_on_side(model, t, e, e.var_a);
            fa = cond_value(model, u, &memo, t - 1, ia, sa);
          }
          p = inverse_h_given_first(e.copula, p, fa);
        }
      }
      u[x] = p;
    }

    for (int c = 0; c < d; ++c) {
      if (model.margins[c].kind == data::ColumnKind::kContinuous) {
        row[c] = margins[c].pseudo_inverse(u[c]);
      } else {
        const auto& probs = model.margins[c].category_probs;
        double cum = 0.0;
        int pick = static_cast<int>(probs.size()) - 1;
        for (std::size_t m = 0; m < probs.size(); ++m) {
          cum += probs[m];
          if (u[c] <= cum) {
            pick = static_cast<int>(m);
            break;
          }
        }
        row[c] = static_cast<double>(pick);
      }
    }
    out.append_row(row);
  }
  return out;
}

}  // namespace cohortsim::vbg
