#include "cohortsim/stat/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cohortsim/util/errors.hpp"

namespace cohortsim::stat {

namespace {

constexpr double kEps = 3e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 600;

void require_gamma_args(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    throw NumericError("incomplete gamma requires s > 0 and finite x >= 0");
  }
}

// Series expansion of P(s, x); converges fastest for x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double a = s;
  for (int i = 0; i < kMaxIter; ++i) {
    a += 1.0;
    term *= x / a;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw NumericError("incomplete gamma series did not converge");
}

// Continued fraction for Q(s, x) (modified Lentz); best for x >= s + 1.
double gamma_q_fraction(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw NumericError("incomplete gamma continued fraction did not converge");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double s, double x) {
  require_gamma_args(s, x);
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_fraction(s, x);
}

double regularized_gamma_q(double s, double x) {
  require_gamma_args(s, x);
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_fraction(s, x);
}

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      std::isnan(x)) {
    throw NumericError("incomplete beta requires a > 0, b > 0, x in [0, 1]");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b) + a * std::log(x) +
                                b * std::log1p(-x));
  // Use the continued fraction on whichever side converges quickly.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double chi_square_survival(double x, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw NumericError("chi-square survival requires df > 0, got " +
                       std::to_string(df));
  }
  if (std::isnan(x)) throw NumericError("chi-square survival of NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw NumericError("t-test p-value requires df > 0, got " +
                       std::to_string(df));
  }
  if (std::isnan(t)) throw NumericError("t-test p-value of NaN");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return regularized_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace cohortsim::stat
