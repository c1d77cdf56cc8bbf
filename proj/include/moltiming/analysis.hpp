#pragma once

#include <cstdint>
#include <optional>

#include "moltiming/montecarlo.hpp"

// Closed-form error probabilities, the ML/FA mismatch bound and error
// exponents for the Levy timing channel with location 0.
namespace moltiming::analysis {

/// Error probability of the single-particle ML threshold rule.
double pe_ml_single(double c, double delta);

/// 0.5 (erf(sqrt(c / 2 theta_M))^M + Psi(c, M, theta_M - delta)) at theta_M = fa_threshold.
double pe_fa(double c, double delta, int m);
/// log(pe_fa), finite where pe_fa underflows.
double log_pe_fa(double c, double delta, int m);

/// Closed-form error of equal-weight linear combining: pe_ml_single(M c, delta).
double pe_linear(double c, double delta, int m);

struct GrayPe {
  double value;    // min(raw, 1 - 2^-L)
  double raw;      // (2^L - 1) / 2^(L-1) * pe_fa(c, delta / (2^L - 1), M)
  bool clamped;    // raw exceeded the random-guess ceiling
};

/// Symbol error probability of the Gray-coded first-arrival detector.
GrayPe pe_gray(double c, double delta_total, int bits, int m);

/// g(x) = log((x - delta) / x) + c delta / (3 x (x - delta)), x > delta.
double g_function(double c, double delta, double x);

struct StationaryPoints {
  double x1;  // minimum of g, > delta
  double x2;  // < delta, outside the domain
};

StationaryPoints g_stationary_points(double c, double delta);

/// Unique zero of g on (delta, x1).
double g_root(double c, double delta);

struct MismatchBound {
  double x_star;
  double x1;
  double bound;
};

/// Upper bound on P(ML and FA decisions differ):
/// 0.5 [(Psi(x*) - Psi(delta)) + Psi(x* - delta)], Psi(c, M, .) the first-arrival CDF.
MismatchBound mismatch_bound(double c, double delta, int m);

enum class ExponentMethod { closed_form, chernoff_numeric };

struct ExponentResult {
  double value;                       // nats per particle
  std::optional<double> optimizer_s;  // set for chernoff_numeric
  ExponentMethod method;
};

struct ChernoffTolerance {
  double s_abs = 1e-6;     // golden-section width on s
  double quad_rel = 1e-9;  // quadrature relative tolerance
};

/// -log erf(sqrt(c / 2 delta)).
ExponentResult err_exp_fa(double c, double delta);

/// Chernoff information between L(0, c) and L(delta, c):
/// -min over s in [0, 1] of log integral_{y > delta} g_0^s g_delta^(1-s) dy.
ExponentResult err_exp_ml(double c, double delta, const ChernoffTolerance& tol = {});

/// Large-M slope d1 in theta_M - delta ~ d1 / M: -c / (2 log beta), beta = erf(sqrt(c / 2 delta)).
/// Equivalent to -c / (2 (1 + log(beta / e))).
double fa_threshold_asymptote(double c, double delta);

/// Largest L in [1, 24] for which doubling the particle count still pays off:
/// pe_gray(L, M) <= (1 - epsilon) pe_gray(L, floor(M / 2)), using unclamped
/// values. Returns 0 when no L qualifies.
int max_bits_for_m(double c, double delta, int m, double epsilon);

/// Monte Carlo error rate of the multi-particle ML detector.
montecarlo::TrialStats pe_ml_mc(double c, double delta, int m, std::uint64_t trials,
                                std::uint64_t seed, int threads = 0);

}  // namespace moltiming::analysis
