#pragma once

// Special functions needed by the closed-form outage expressions:
// Gamma, the Gauss hypergeometric function 2F1 on the real line, and the
// spatial-average kernel Psi.

namespace fhtc::specfun {

/// Gamma function for x > 0 (Lanczos, g = 7, nine terms).
/// Relative error below 1e-13 for 0 < x < 171.
double gamma_fn(double x);

/// Gamma on the whole real line except the poles (reflection for x < 1/2).
double gamma_signed(double x);

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.
///
/// Evaluation route by region:
///   -0.5 <= z <= 0.9        power series
///   -3 <= z < -0.5          Pfaff transform z -> z/(z-1), then series
///   z < -3                  1/z connection formula (A&S 15.3.7)
///   0.9 < z < 1             1-z connection formula (A&S 15.3.6)
/// When a connection formula is degenerate or nearly so (b-a or c-a-b close
/// to an integer, detected by cancellation between its two terms), the
/// Pfaff/direct series is used while it converges in reasonable time
/// (z >= -2e4, z <= 0.9999). Beyond that, an exactly integral b-a uses the
/// logarithmic form (A&S 15.3.14); other near-integral cases interpolate
/// across the integer, which holds about 1e-9 relative.
///
/// Throws InvalidArgument if c is a non-positive integer or z >= 1, and
/// NoConvergence if a series exceeds its iteration cap.
double gauss_2f1(double a, double b, double c, double z);

/// 2F1(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)).
/// Requires c - a - b > 0.
double gauss_2f1_at_one(double a, double b, double c);

/// Spatial-average kernel
///   Psi(x) = x^(2/alpha) (1-p) + 2p/(alpha+2) * x^((alpha+2)/alpha) / beta0
///            * 2F1(1, (alpha+2)/alpha; (2alpha+2)/alpha; -x/beta0)
/// which equals (2/alpha) * int_0^x w^(2/alpha-1) ((1-p) beta0 + w)/(beta0 + w) dw.
double psi_fn(double x, double p, double alpha, double beta0);

/// Collision part of Psi:
///   H(x) = (2/alpha) int_0^x w^(2/alpha-1) beta0/(beta0 + w) dw
///        = x^(2/alpha) 2F1(1, 2/alpha; 2/alpha+1; -x/beta0)
/// so that Psi(x) = x^(2/alpha) - p H(x). Working with H keeps
/// 1 - kappa [Psi(b) - Psi(a)] = p kappa [H(b) - H(a)] free of cancellation.
double collision_kernel(double x, double alpha, double beta0);

}  // namespace fhtc::specfun
