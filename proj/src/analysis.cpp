#include "moltiming/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "moltiming/channels.hpp"
#include "moltiming/detectors.hpp"
#include "moltiming/error.hpp"
#include "moltiming/numerics.hpp"

namespace moltiming::analysis {

namespace {

void require_positive(double c, double delta) {
  if (!(c > 0.0)) throw Error(ErrorCode::domain, "c must be positive");
  if (!(delta > 0.0)) throw Error(ErrorCode::domain, "delta must be positive");
}

double log_add(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -INFINITY) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double gray_factor(int bits) {
  const double n = std::ldexp(1.0, bits);
  return (n - 1.0) / (0.5 * n);
}

double log_pe_gray_raw(double c, double delta_total, int bits, int m) {
  const double sub = delta_total / (std::ldexp(1.0, bits) - 1.0);
  return std::log(gray_factor(bits)) + log_pe_fa(c, sub, m);
}

}  // namespace

double pe_ml_single(double c, double delta) { return pe_fa(c, delta, 1); }

double log_pe_fa(double c, double delta, int m) {
  require_positive(c, delta);
  const double theta = detectors::fa_threshold(c, delta, m);
  // Symbol 0 is missed when no particle arrives before theta; symbol 1 when
  // some particle arrives within theta - delta of its release.
  const double miss0 = channels::fa_log_survival(c, m, theta);
  const double miss1 = channels::fa_log_cdf(c, m, theta - delta);
  return -std::numbers::ln2 + log_add(miss0, miss1);
}

double pe_fa(double c, double delta, int m) { return std::exp(log_pe_fa(c, delta, m)); }

double pe_linear(double c, double delta, int m) {
  if (m < 1) throw Error(ErrorCode::domain, "M must be >= 1");
  return pe_ml_single(m * c, delta);
}

GrayPe pe_gray(double c, double delta_total, int bits, int m) {
  if (bits < 1 || bits > 30) throw Error(ErrorCode::domain, "bits L must lie in [1, 30]");
  const double raw = std::exp(log_pe_gray_raw(c, delta_total, bits, m));
  const double ceiling = 1.0 - std::ldexp(1.0, -bits);
  return {std::min(raw, ceiling), raw, raw > ceiling};
}

double g_function(double c, double delta, double x) {
  require_positive(c, delta);
  if (!(x > delta)) throw Error(ErrorCode::domain, "g is defined for x > delta");
  return std::log1p(-delta / x) + c * delta / (3.0 * x * (x - delta));
}

StationaryPoints g_stationary_points(double c, double delta) {
  require_positive(c, delta);
  const double root = std::sqrt(1.0 + 4.0 * c * c / (9.0 * delta * delta));
  return {c / 3.0 + 0.5 * delta * (1.0 + root), c / 3.0 + 0.5 * delta * (1.0 - root)};
}

double g_root(double c, double delta) {
  const double x1 = g_stationary_points(c, delta).x1;
  return numerics::find_root([&](double x) { return g_function(c, delta, x); },
                             {delta * (1.0 + 1e-12), x1});
}

MismatchBound mismatch_bound(double c, double delta, int m) {
  const double x_star = g_root(c, delta);
  const double x1 = g_stationary_points(c, delta).x1;
  const double upper = channels::fa_cdf(c, m, x_star) - channels::fa_cdf(c, m, delta);
  const double bound = 0.5 * (upper + channels::fa_cdf(c, m, x_star - delta));
  return {x_star, x1, std::clamp(bound, 0.0, 1.0)};
}

ExponentResult err_exp_fa(double c, double delta) {
  require_positive(c, delta);
  return {-numerics::log_erf(std::sqrt(c / (2.0 * delta))), std::nullopt,
          ExponentMethod::closed_form};
}

ExponentResult err_exp_ml(double c, double delta, const ChernoffTolerance& tol) {
  require_positive(c, delta);
  const channels::LevyParams g0{0.0, c};
  const channels::LevyParams g1{delta, c};
  const numerics::Tolerance quad{1e-12, tol.quad_rel, 2000};
  const auto log_overlap = [&](double s) {
    const auto integrand = [&](double y) {
      const double v = s * channels::levy_log_pdf(g0, y) + (1.0 - s) * channels::levy_log_pdf(g1, y);
      return v == -INFINITY ? 0.0 : std::exp(v);
    };
    return std::log(numerics::integrate_semi_infinite(integrand, delta, quad, c));
  };
  const numerics::Tolerance search{tol.s_abs, tol.quad_rel, 200};
  const auto best = numerics::minimize_scalar(log_overlap, {0.0, 1.0}, search);
  return {std::max(0.0, -best.fx), best.x, ExponentMethod::chernoff_numeric};
}

double fa_threshold_asymptote(double c, double delta) {
  return c / (2.0 * err_exp_fa(c, delta).value);
}

int max_bits_for_m(double c, double delta, int m, double epsilon) {
  if (m < 2) throw Error(ErrorCode::domain, "M must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::domain, "epsilon must lie in (0, 1)");
  const double margin = std::log1p(-epsilon);
  int best = 0;
  for (int bits = 1; bits <= 24; ++bits) {
    const double full = log_pe_gray_raw(c, delta, bits, m);
    const double half = log_pe_gray_raw(c, delta, bits, m / 2);
    if (full <= margin + half) best = bits;
  }
  return best;
}

montecarlo::TrialStats pe_ml_mc(double c, double delta, int m, std::uint64_t trials,
                                std::uint64_t seed, int threads) {
  montecarlo::Point point;
  point.detector = montecarlo::DetectorKind::ml;
  point.levy = {0.0, c};
  point.delta = delta;
  point.m = m;
  return montecarlo::simulate_pe(point, trials, seed, threads);
}

}  // namespace moltiming::analysis
