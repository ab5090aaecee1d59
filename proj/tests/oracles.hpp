#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's special functions or closed forms.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// 2F1(a, b; c; z) from the Euler integral, valid for c > b > 0 and z < 1:
//   Gamma(c) / (Gamma(b) Gamma(c-b)) int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt.
// The prefactor uses log-gamma so tiny c-b does not underflow.
inline double euler_2f1(double a, double b, double c, double z) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  // Split at 1/2 and write the right half in s = 1 - t. Each half is
  // int_0^(1/2) u^(e-1) g(u) du with smooth g. On [0, knee] the singular part
  // g(0) knee^e / e is integrated exactly, leaving u^(e-1) (g(u) - g(0)),
  // which stays well behaved even for e near 0; beyond the knee the
  // integrand is used as is. The left half varies on the scale 1/|z| and the
  // right half on the scale 1 - z; the knees sit there so an O(1) singular
  // part is never cancelled against a much smaller integral.
  auto half = [&](double e, const std::function<double(double)>& g, double knee) {
    const double g0 = g(0.0);
    auto near = [&](double u) { return u > 0 ? std::pow(u, e - 1) * (g(u) - g0) : 0.0; };
    auto far = [&](double u) { return std::pow(u, e - 1) * g(u); };
    double sum = g0 * std::pow(knee, e) / e + ts.integrate(near, 0.0, knee, 1e-15);
    if (knee < 0.5) sum += ts.integrate(far, knee, 0.5, 1e-15);
    return sum;
  };
  const double knee = std::fabs(z) > 4.0 ? 2.0 / std::fabs(z) : 0.5;
  const double left =
      half(b, [&](double t) { return std::pow(1.0 - t, c - b - 1) * std::pow(1.0 - z * t, -a); }, knee);
  const double right =
      half(c - b, [&](double s) { return std::pow(1.0 - s, b - 1) * std::pow(1.0 - z * (1.0 - s), -a); },
           std::min(0.5, 2.0 * (1.0 - z)));
  const double pre = std::exp(boost::math::lgamma(c) - boost::math::lgamma(b) - boost::math::lgamma(c - b));
  return pre * (left + right);
}

// (2/alpha) int_0^x w^(2/alpha-1) ((1-p) beta0 + w)/(beta0 + w) dw by
// substitution w = u^(alpha/2), which removes the endpoint singularity:
//   = int_0^(x^(2/alpha)) ((1-p) beta0 + u^(alpha/2)) / (beta0 + u^(alpha/2)) du.
inline double psi_quadrature(double x, double p, double alpha, double beta0) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  const double top = std::pow(x, 2.0 / alpha);
  auto f = [&](double u) {
    const double w = std::pow(u, alpha / 2.0);
    return ((1.0 - p) * beta0 + w) / (beta0 + w);
  };
  if (top <= 50.0) return ts.integrate(f, 0.0, top);
  // Split the long range; the integrand tends to 1.
  return ts.integrate(f, 0.0, 50.0) + ts.integrate(f, 50.0, top);
}

inline double poisson_pmf(unsigned m, double mean) {
  return std::exp(m * std::log(mean) - mean - std::lgamma(m + 1.0));
}

// sum_m Poisson(m; mean) g(m), truncated once the remaining tail mass is
// below 1e-12 (and past the mode).
inline double poisson_mixture(double mean, const std::function<double(unsigned)>& g) {
  if (mean == 0.0) return g(0);
  double acc = 0.0, mass = 0.0;
  for (unsigned m = 0;; ++m) {
    const double w = poisson_pmf(m, mean);
    acc += w * g(m);
    mass += w;
    if (m > mean && 1.0 - mass < 1e-12) break;
    if (m > 100000) break;
  }
  return acc;
}

// Root of an increasing function on [lo, hi] by plain bisection to 1e-15 relative.
inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::abs(hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Binary CPFSK with equiprobable symbols, unit symbol period: the baseband
// autocorrelation follows from the phase increments alone. Over a lag
// tau = m + s the interval [t, t + tau] covers parts of consecutive symbols;
// a symbol covered for a length l contributes E[exp(j pi h a l)] = cos(pi h l).
// Averaging over the start t in [0, 1) gives R(tau).
inline double cpfsk_autocorrelation(double h, double tau) {
  using G = boost::math::quadrature::gauss<double, 20>;
  const double c = std::cos(std::numbers::pi * h);
  const int m = static_cast<int>(std::floor(tau));
  const double s = tau - m;
  auto cosl = [&](double l) { return std::cos(std::numbers::pi * h * l); };
  // t + s < 1: the lag ends inside symbol m.
  auto early = [&](double t) {
    if (m == 0) return cosl(s);
    return cosl(1 - t) * std::pow(c, m - 1) * cosl(t + s);
  };
  // t + s >= 1: the lag ends inside symbol m + 1.
  auto late = [&](double t) { return cosl(1 - t) * std::pow(c, m) * cosl(t + s - 1); };
  return G::integrate(early, 0.0, 1.0 - s) + (s > 0 ? G::integrate(late, 1.0 - s, 1.0) : 0.0);
}

// Two-sided bandwidth holding `fraction` of the power, from
//   P(B) = 2 int_0^inf R(tau) sin(pi B tau) / (pi tau) dtau
// and bisection on B. Requires 0 < h < 1 (no spectral lines).
inline double cpfsk_occupied_bandwidth(double h, double fraction) {
  using G = boost::math::quadrature::gauss<double, 30>;
  const double c = std::fabs(std::cos(std::numbers::pi * h));
  const int periods = c == 0 ? 2 : 2 + static_cast<int>(std::log(1e-15) / std::log(c));
  // Nodes and weights of R over each unit lag interval, reused for every B.
  std::vector<double> taus, weights;
  for (int m = 0; m < periods; ++m) {
    for (std::size_t k = 0; k < G::abscissa().size(); ++k) {
      for (int sign : {-1, 1}) {
        if (k == 0 && sign == 1 && G::abscissa()[0] == 0) continue;
        const double tau = m + 0.5 + 0.5 * sign * G::abscissa()[k];
        taus.push_back(tau);
        weights.push_back(0.5 * G::weights()[k] * cpfsk_autocorrelation(h, tau));
      }
    }
  }
  auto power = [&](double b) {
    double acc = 0;
    for (std::size_t i = 0; i < taus.size(); ++i)
      acc += weights[i] * std::sin(std::numbers::pi * b * taus[i]) / (std::numbers::pi * taus[i]);
    return 2 * acc;
  };
  double lo = 0.0, hi = 1.0;
  while (power(hi) < fraction) hi *= 2;
  for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (power(mid) < fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
