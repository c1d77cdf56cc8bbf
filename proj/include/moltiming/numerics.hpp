#pragma once

#include <functional>

namespace moltiming::numerics {

using ScalarFunction = std::function<double(double)>;

struct Bracket {
  double lo;
  double hi;

  double width() const { return hi - lo; }
};

// Convergence controls shared by the iterative kernels. Root finding and
// minimization use abs_x, quadrature uses rel_f, and all of them honour max_iter.
struct Tolerance {
  double abs_x = 1e-12;
  double rel_f = 1e-10;
  int max_iter = 200;
};

// abs_x = 1e-12 * max(1, |hi|), rel_f = 1e-10, max_iter = 200.
Tolerance default_tolerance(const Bracket& b);

// Quadrature default: rel_f = 1e-10 and up to 2000 subintervals.
Tolerance default_quadrature_tolerance();

/// Complementary error function. Results below 1e-300 are returned as 0
/// (see erfc_clamps); use log_erfc when the logarithm is needed.
double erfc(double x);

/// True when erfc(x) is clamped to zero.
bool erfc_clamps(double x);

/// log(erfc(x)), finite for all finite x.
double log_erfc(double x);

/// log(1 - erfc(x)) = log(erf(x)) for x > 0, accurate when erf(x) is near 1.
double log_erf(double x);

/// Inverse of erfc on (0, 2). Throws Error(domain) outside that range.
double erfc_inv(double p);

/// log of the standard normal CDF, finite far into the lower tail.
double log_normal_cdf(double x);

/// Brent's method on a sign-changing bracket. Throws Error(no_sign_change) if
/// f(lo) and f(hi) have the same strict sign, Error(max_iterations) if the
/// bracket does not shrink to abs_x within max_iter steps.
double find_root(const ScalarFunction& f, Bracket b, const Tolerance& tol);
double find_root(const ScalarFunction& f, Bracket b);

struct Minimum {
  double x;
  double fx;
};

/// Golden-section search. f is assumed unimodal on the bracket; for other
/// functions a local minimum is returned.
Minimum minimize_scalar(const ScalarFunction& f, Bracket b, const Tolerance& tol);
Minimum minimize_scalar(const ScalarFunction& f, Bracket b);

/// Adaptive Gauss-Kronrod (7/15) over a finite interval.
double integrate(const ScalarFunction& f, Bracket b, const Tolerance& tol);

/// Integral of f over (a, inf) after the change of variables
/// y = a + scale * (t / (1 - t))^2, t in [0, 1). The squared map keeps
/// integrands with y^(-3/2) tails bounded at t -> 1. scale should be the
/// natural length of the integrand (e.g. the Levy scale c).
/// Throws Error(non_finite) if f yields NaN or infinity inside the domain.
double integrate_semi_infinite(const ScalarFunction& f, double a, const Tolerance& tol,
                               double scale = 1.0);
double integrate_semi_infinite(const ScalarFunction& f, double a);

}  // namespace moltiming::numerics
