#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cohortsim::vbg {

enum class CopulaFamily {
  kIndependence,
  kGaussian,
  kClayton,
  kGumbel,
  kFrank,
};

const char* family_name(CopulaFamily family);
CopulaFamily family_from_name(const std::string& name);

// One bivariate copula.  The base families are exchangeable; Clayton and
// Gumbel capture only positive upper-left/lower-right dependence, so they
// carry a rotation (90/180/270 degrees) to cover the other quadrants.
// Parameter domains: gaussian |rho| <= 0.9999, clayton 0 < theta <= 50,
// gumbel 1 <= theta <= 50, frank 0 < |theta| <= 50 (bounds keep the
// likelihood finite near comonotone data).
struct PairCopula {
  CopulaFamily family = CopulaFamily::kIndependence;
  double theta = 0.0;
  int rotation = 0;  // 0, 90, 180, 270; only clayton/gumbel may rotate
};

// Validates family/theta/rotation; throws NumericError when out of domain.
void validate(const PairCopula& c);

// C(u,v).  Domain (0,1)x(0,1); arguments outside raise NumericError.
double pair_copula_cdf(const PairCopula& c, double u, double v);

// Copula density c(u,v) and its logarithm (the log form never overflows and
// is what likelihood code should use).
double pair_copula_pdf(const PairCopula& c, double u, double v);
double pair_copula_log_pdf(const PairCopula& c, double u, double v);

// h-function: conditional CDF of the first argument given the second,
// h(u|v) = dC(u,v)/dv, and its inverse in u.  The *_given_first variants
// condition on the first argument instead (needed because rotation breaks
// exchangeability).  Arguments within (0,1) but outside
// [1e-12, 1-1e-12] are clamped to that interval, as are outputs; each clamp
// increments a thread-local diagnostic counter.
double h_function(const PairCopula& c, double u, double given_v);
double inverse_h(const PairCopula& c, double p, double given_v);
double h_function_given_first(const PairCopula& c, double v, double given_u);
double inverse_h_given_first(const PairCopula& c, double p, double given_u);

// Thread-local count of boundary clamps performed by the functions above.
std::uint64_t boundary_clamp_count();
void reset_boundary_clamp_count();

// --- fitting -----------------------------------------------------------------

struct FamilyFit {
  PairCopula copula;
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = false;
};

struct PairCopulaFitReport {
  double tau = 0.0;                  // empirical Kendall tau of the inputs
  bool independence_retained = false;  // tau-test did not reject independence
  std::vector<FamilyFit> table;      // per-candidate results (AIC ascending)
  PairCopula chosen;
};

struct PairCopulaFitOptions {
  // When true (default), a rank-correlation independence test at the 5%
  // level short-circuits family selection: if independence is not rejected
  // the independence copula is kept without fitting parametric families.
  // This mirrors the behaviour of standard vine-fitting software and keeps
  // near-independent pairs from picking up spurious 1-parameter families.
  bool independence_test = true;
};

// Fits each candidate family by 1-D maximum likelihood (Brent search on the
// bounded parameter domain) and picks the minimum-AIC family; the
// independence copula competes with AIC = 0.  Clayton/Gumbel rotations are
// chosen from the sign of tau (0/180 for positive, 90/270 for negative).
// Inputs must be pseudo-observations in (0,1), length >= 20.
PairCopula fit_pair_copula(const std::vector<double>& u,
                           const std::vector<double>& v,
                           const PairCopulaFitOptions& options = {},
                           PairCopulaFitReport* report = nullptr);

}  // namespace cohortsim::vbg
