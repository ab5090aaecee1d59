#include "fhtc/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "fhtc/error.hpp"

namespace fhtc::specfun {

namespace {

// Lanczos coefficients for g = 7, n = 9 (Godfrey). About 15 significant
// digits over the positive real axis.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kSeriesCap = 5'000'000;

// Near-integer tolerance for the connection formulas' degenerate cases.
constexpr double kDegenerate = 1e-5;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

double lanczos_positive(double x) {
  // x >= 0.5
  const double xm = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (xm + static_cast<double>(i));
  const double t = xm + kLanczosG + 0.5;
  // t^(xm+0.5) e^-t, split to avoid overflow for large x.
  const double half = std::pow(t, 0.5 * (xm + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * sum;
}

// Plain power series. Caller guarantees |z| < 1 or a terminating series.
double series(double a, double b, double c, double z) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    const double dk = static_cast<double>(k);
    const double ratio = (a + dk) * (b + dk) / ((c + dk) * (dk + 1.0)) * z;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    const double r = std::fabs(ratio);
    // Remaining tail is bounded by |term| r/(1-r) once the ratio is below one
    // and (for large k) no longer growing.
    if (r < 1.0 && std::fabs(term) * r / (1.0 - r) <= kEps * 0.5 * std::fabs(sum) &&
        dk > std::fabs(a) + std::fabs(b) + std::fabs(c)) {
      return sum;
    }
  }
  throw NoConvergence("gauss_2f1: power series did not converge (a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ", c=" + std::to_string(c) +
                      ", z=" + std::to_string(z) + ")");
}

double pfaff(double a, double b, double c, double z) {
  // 2F1(a,b;c;z) = (1-z)^(-b) 2F1(b, c-a; c; z/(z-1))
  return std::pow(1.0 - z, -b) * series(b, c - a, c, z / (z - 1.0));
}

// Two-term connection formulas lose digits when their terms nearly cancel
// (parameters close to the degenerate integer cases). Callers fall back to a
// slower convergent route when the loss would exceed this factor.
constexpr double kMaxCancellation = 64.0;

struct TwoTerms {
  double t1, t2;
  double sum() const { return t1 + t2; }
  bool accurate() const { return std::fabs(t1) + std::fabs(t2) <= kMaxCancellation * std::fabs(t1 + t2); }
};

// A&S 15.3.7, valid for z < 0 when b - a is not an integer.
TwoTerms inverse_z_terms(double a, double b, double c, double z) {
  const double mz = -z;
  const double w = 1.0 / z;
  const double gc = gamma_signed(c);
  const double t1 = gc * gamma_signed(b - a) * rgamma(b) * rgamma(c - a) * std::pow(mz, -a) *
                    series(a, 1.0 - c + a, 1.0 - b + a, w);
  const double t2 = gc * gamma_signed(a - b) * rgamma(a) * rgamma(c - b) * std::pow(mz, -b) *
                    series(b, 1.0 - c + b, 1.0 - a + b, w);
  return {t1, t2};
}

double inverse_z(double a, double b, double c, double z) { return inverse_z_terms(a, b, c, z).sum(); }

// A&S 15.3.6, valid for 0 < z < 1 when c - a - b is not an integer.
TwoTerms one_minus_z_terms(double a, double b, double c, double z) {
  const double s = 1.0 - z;
  const double d = c - a - b;
  const double gc = gamma_signed(c);
  const double t1 = gc * gamma_signed(d) * rgamma(c - a) * rgamma(c - b) * series(a, b, 1.0 - d, s);
  const double t2 = gc * gamma_signed(-d) * rgamma(a) * rgamma(b) * std::pow(s, d) *
                    series(c - a, c - b, d + 1.0, s);
  return {t1, t2};
}

double one_minus_z(double a, double b, double c, double z) { return one_minus_z_terms(a, b, c, z).sum(); }

// b - a = m, a nonnegative integer, z < -1 (A&S 15.3.14, DLMF 15.8.8):
//   F = Gamma(c) (-z)^-a [ 1/Gamma(a+m) sum_{k<m} (a)_k (m-k-1)! / (k! Gamma(c-a-k)) z^-k
//       + 1/Gamma(a) sum_k (a+m)_k / (k! (k+m)!) (-1)^k z^-(k+m)
//         * (ln(-z) + psi(1+m+k) + psi(1+k) - psi(a+m+k) - psi(c-a-m-k)) / Gamma(c-a-m-k) ]
// At a pole x = -n of the last Gamma, psi(x)/Gamma(x) -> (-1)^(n+1) n!.
double inverse_z_log(double a, int m, double c, double z) {
  using boost::math::digamma;
  const double w = 1.0 / z;
  double finite = 0.0;
  double poch = 1.0;  // (a)_k / k!
  double wk = 1.0;
  for (int k = 0; k < m; ++k) {
    finite += poch * std::tgamma(static_cast<double>(m - k)) * rgamma(c - a - k) * wk;
    poch *= (a + k) / (k + 1.0);
    wk *= w;
  }
  finite *= rgamma(a + m);

  const double lnmz = std::log(-z);
  double coef = std::pow(w, m) / std::tgamma(m + 1.0);  // (a+m)_k (-1)^k z^-(k+m) / (k! (k+m)!)
  double sum = 0.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    const double x = c - a - m - k;
    double g;
    if (is_nonpositive_integer(x)) {
      const double n = -x;
      g = -((static_cast<long long>(n) % 2 == 0) ? -1.0 : 1.0) * std::tgamma(n + 1.0);
    } else {
      g = rgamma(x) * (lnmz + digamma(1.0 + m + k) + digamma(1.0 + k) - digamma(a + m + k) - digamma(x));
    }
    const double term = coef * g;
    sum += term;
    if (k > 2 && std::fabs(term) <= kEps * 0.25 * std::fabs(sum)) break;
    coef *= -(a + m + k) * w / ((k + 1.0) * (k + m + 1.0));
  }
  return gamma_signed(c) * std::pow(-z, -a) * (finite + rgamma(a) * sum);
}

// Linear interpolation between two evaluations placed kDegenerate either
// side of the nearest integer of a degenerate parameter combination.
template <typename F>
double bridge(double offset, F&& eval_at_offset) {
  const double n = std::nearbyint(offset);
  const double lo = eval_at_offset(n - kDegenerate);
  const double hi = eval_at_offset(n + kDegenerate);
  const double t = (offset - (n - kDegenerate)) / (2.0 * kDegenerate);
  return lo + t * (hi - lo);
}

}  // namespace

double gamma_signed(double x) {
  if (is_nonpositive_integer(x)) throw InvalidArgument("gamma: pole at non-positive integer");
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_positive(1.0 - x));
  }
  return lanczos_positive(x);
}

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x < 0.5) return std::sin(std::numbers::pi * x) * lanczos_positive(1.0 - x) / std::numbers::pi;
  return 1.0 / lanczos_positive(x);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw InvalidArgument("gamma_fn: argument must be positive");
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_positive(1.0 - x));
  return lanczos_positive(x);
}

double gauss_2f1(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw InvalidArgument("gauss_2f1: c is a non-positive integer");
  if (!(z < 1.0)) throw InvalidArgument("gauss_2f1: requires z < 1 (use gauss_2f1_at_one at z = 1)");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  // Terminating series: a polynomial, finite everywhere.
  if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return series(a, b, c, z);
  if (a == c) return std::pow(1.0 - z, -b);
  if (b == c) return std::pow(1.0 - z, -a);

  if (z >= -0.5 && z <= 0.9) return series(a, b, c, z);
  if (z > 0.9) {
    const double d = c - a - b;
    if (std::fabs(d - std::nearbyint(d)) > kDegenerate) {
      const auto terms = one_minus_z_terms(a, b, c, z);
      if (terms.accurate()) return terms.sum();
    }
    // The direct series needs about 37 / (1 - z) terms.
    if (z <= 0.9999) return series(a, b, c, z);
    // c - a - b = offset; perturb c.
    return bridge(d, [&](double off) { return one_minus_z(a, b, a + b + off, z); });
  }
  if (z >= -3.0) return pfaff(a, b, c, z);
  const double d = b - a;
  if (std::fabs(d - std::nearbyint(d)) > kDegenerate) {
    const auto terms = inverse_z_terms(a, b, c, z);
    if (terms.accurate()) return terms.sum();
  }
  // Pfaff's series argument z/(z-1) approaches 1 as z -> -inf; it needs
  // about 37 |z| terms.
  if (z >= -2.0e4) return pfaff(a, b, c, z);
  // Integral up to rounding of the inputs themselves.
  if (std::fabs(d - std::nearbyint(d)) <= 8.0 * kEps * std::max({std::fabs(a), std::fabs(b), 1.0})) {
    const int m = static_cast<int>(std::fabs(std::nearbyint(d)));
    return d >= 0 ? inverse_z_log(a, m, c, z) : inverse_z_log(b, m, c, z);
  }
  return bridge(d, [&](double off) { return inverse_z(a, a + off, c, z); });
}

double gauss_2f1_at_one(double a, double b, double c) {
  if (is_nonpositive_integer(c)) throw InvalidArgument("gauss_2f1_at_one: c is a non-positive integer");
  const double d = c - a - b;
  if (!(d > 0.0)) throw InvalidArgument("gauss_2f1_at_one: diverges unless c - a - b > 0");
  return gamma_signed(c) * gamma_signed(d) * rgamma(c - a) * rgamma(c - b);
}

double collision_kernel(double x, double alpha, double beta0) {
  if (!(x >= 0.0)) throw InvalidArgument("collision_kernel: x must be nonnegative");
  if (!(alpha > 0.0) || !(beta0 > 0.0)) throw InvalidArgument("collision_kernel: alpha and beta0 must be positive");
  if (x == 0.0) return 0.0;
  const double delta = 2.0 / alpha;
  return std::pow(x, delta) * gauss_2f1(1.0, delta, delta + 1.0, -x / beta0);
}

double psi_fn(double x, double p, double alpha, double beta0) {
  if (!(x >= 0.0)) throw InvalidArgument("psi_fn: x must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("psi_fn: p must lie in [0, 1]");
  if (!(alpha > 0.0) || !(beta0 > 0.0)) throw InvalidArgument("psi_fn: alpha and beta0 must be positive");
  if (x == 0.0) return 0.0;
  const double delta = 2.0 / alpha;
  const double b = (alpha + 2.0) / alpha;
  const double c = (2.0 * alpha + 2.0) / alpha;
  const double collision = 2.0 / (alpha + 2.0) * std::pow(x, b) / beta0 * gauss_2f1(1.0, b, c, -x / beta0);
  return std::pow(x, delta) * (1.0 - p) + p * collision;
}

}  // namespace fhtc::specfun
