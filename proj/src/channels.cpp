#include "moltiming/channels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "moltiming/error.hpp"
#include "moltiming/numerics.hpp"

namespace moltiming::channels {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::domain, what);
}

void require_particles(int m) { require(m >= 1, "M must be >= 1"); }

}  // namespace

void LevyParams::validate() const {
  require(std::isfinite(mu), "Levy location must be finite");
  require(c > 0.0 && std::isfinite(c), "Levy scale c must be positive");
}

void IGParams::validate() const {
  require(kappa > 0.0 && std::isfinite(kappa), "IG kappa must be positive");
  require(lambda > 0.0 && std::isfinite(lambda), "IG lambda must be positive");
}

void StableParams::validate() const {
  require(c >= 0.0, "stable dispersion must be non-negative");
  require(alpha > 0.0 && alpha <= 2.0, "stable alpha must lie in (0, 2]");
  require(std::abs(beta) <= 1.0, "stable beta must lie in [-1, 1]");
}

void ChannelSpec::validate() const {
  require(distance_d > 0.0, "distance d must be positive");
  require(diffusion_D > 0.0, "diffusion coefficient D must be positive");
  require(drift_v >= 0.0, "drift velocity v must be non-negative");
  require(dim_scale > 0.0, "dim_scale must be positive");
}

LevyParams ChannelSpec::levy() const {
  validate();
  return {0.0, dim_scale * distance_d * distance_d / (2.0 * diffusion_D)};
}

IGParams ChannelSpec::inverse_gaussian() const {
  validate();
  require(has_drift(), "inverse Gaussian channel requires drift v > 0");
  return {distance_d / drift_v, distance_d * distance_d / (2.0 * diffusion_D)};
}

double levy_pdf(const LevyParams& p, double z) {
  if (z <= p.mu) return 0.0;
  return std::exp(levy_log_pdf(p, z));
}

double levy_log_pdf(const LevyParams& p, double z) {
  if (z <= p.mu) return -INFINITY;
  const double t = z - p.mu;
  return 0.5 * std::log(p.c / (2.0 * std::numbers::pi)) - 1.5 * std::log(t) - p.c / (2.0 * t);
}

double levy_cdf(const LevyParams& p, double z) {
  if (z <= p.mu) return 0.0;
  return numerics::erfc(std::sqrt(p.c / (2.0 * (z - p.mu))));
}

double levy_survival(const LevyParams& p, double z) {
  if (z <= p.mu) return 1.0;
  return std::erf(std::sqrt(p.c / (2.0 * (z - p.mu))));
}

double levy_from_normal(const LevyParams& p, double n) { return p.mu + p.c / (n * n); }

double ig_log_pdf(const IGParams& p, double z) {
  if (z <= 0.0) return -INFINITY;
  const double dev = z - p.kappa;
  return 0.5 * std::log(p.lambda / (2.0 * std::numbers::pi * z * z * z)) -
         p.lambda * dev * dev / (2.0 * p.kappa * p.kappa * z);
}

double ig_pdf(const IGParams& p, double z) {
  if (z <= 0.0) return 0.0;
  return std::exp(ig_log_pdf(p, z));
}

double ig_cdf(const IGParams& p, double z) {
  if (z <= 0.0) return 0.0;
  const double root = std::sqrt(p.lambda / z);
  const double lower = root * (z / p.kappa - 1.0);
  const double upper = root * (z / p.kappa + 1.0);
  // e^{2 lambda / kappa} Phi(-upper) in log space: the factor alone overflows
  // for strong drift while Phi(-upper) underflows.
  const double reflected = std::exp(2.0 * p.lambda / p.kappa + numerics::log_normal_cdf(-upper));
  return std::exp(numerics::log_normal_cdf(lower)) + reflected;
}

double ig_log_survival(const IGParams& p, double z) {
  if (z <= 0.0) return 0.0;
  const double root = std::sqrt(p.lambda / z);
  const double lower = root * (z / p.kappa - 1.0);
  const double upper = root * (z / p.kappa + 1.0);
  const double head = numerics::log_normal_cdf(-lower);
  const double reflected = 2.0 * p.lambda / p.kappa + numerics::log_normal_cdf(-upper);
  return head + std::log1p(-std::exp(reflected - head));
}

double ig_from_draws(const IGParams& p, double n, double u) {
  // Smaller root of the MSH quadratic, written as kappa / (1 + w + sqrt(w^2 + 2w))
  // with w = kappa n^2 / (2 lambda) to avoid cancellation for large n.
  const double w = p.kappa * n * n / (2.0 * p.lambda);
  const double x = p.kappa / (1.0 + w + std::sqrt(w * w + 2.0 * w));
  return u <= p.kappa / (p.kappa + x) ? x : p.kappa * p.kappa / x;
}

std::complex<double> stable_characteristic_function(const StableParams& p, double t) {
  p.validate();
  using namespace std::complex_literals;
  if (t == 0.0) return 1.0;
  const double skew = p.alpha == 1.0 ? -2.0 / std::numbers::pi * std::log(std::abs(t))
                                     : std::tan(std::numbers::pi * p.alpha / 2.0);
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  const double mag = std::pow(std::abs(p.c * t), p.alpha);
  return std::exp(1i * p.mu * t - mag * (1.0 - 1i * p.beta * sgn * skew));
}

double stable_linear_dispersion(double c, double alpha, std::span<const double> weights) {
  require(c > 0.0, "dispersion c must be positive");
  require(alpha > 0.0 && alpha < 1.0, "linear dispersion requires 0 < alpha < 1");
  if (weights.empty()) throw Error(ErrorCode::bad_weights, "no weights given");
  // Kahan summation keeps the sum check meaningful for long weight vectors.
  double sum = 0.0;
  double carry = 0.0;
  double powered = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::bad_weights, "weights must be positive");
    const double y = w - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
    powered += std::pow(w, alpha);
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::bad_weights, "weights sum to " + std::to_string(sum) + ", not 1");
  }
  return c * std::pow(powered, 1.0 / alpha);
}

double fa_log_survival(double c, int m, double t) {
  require_particles(m);
  if (t <= 0.0) return 0.0;
  return m * numerics::log_erf(std::sqrt(c / (2.0 * t)));
}

double fa_cdf(double c, int m, double t) {
  if (t <= 0.0) {
    require_particles(m);
    return 0.0;
  }
  return -std::expm1(fa_log_survival(c, m, t));
}

double fa_log_cdf(double c, int m, double t) {
  require_particles(m);
  if (t <= 0.0) return -INFINITY;
  const double x = std::sqrt(c / (2.0 * t));
  // Beyond x = 26 erfc underflows; 1 - (1 - e)^M = M e to double precision there.
  if (x >= 26.0) return std::log(static_cast<double>(m)) + numerics::log_erfc(x);
  return std::log(-std::expm1(m * std::log1p(-std::erfc(x))));
}

double fa_log_pdf(double c, int m, double t) {
  require_particles(m);
  if (t <= 0.0) return -INFINITY;
  const double tail = m > 1 ? (m - 1) * numerics::log_erf(std::sqrt(c / (2.0 * t))) : 0.0;
  return std::log(static_cast<double>(m)) + levy_log_pdf({0.0, c}, t) + tail;
}

double fa_pdf(double c, int m, double t) {
  if (t <= 0.0) {
    require_particles(m);
    return 0.0;
  }
  return std::exp(fa_log_pdf(c, m, t));
}

double fa_mode(double c, int m) {
  require(c > 0.0, "scale c must be positive");
  require_particles(m);
  const numerics::Bracket range{1e-12 * c, c / 3.0};
  const numerics::Tolerance tol{1e-12 * c, 1e-10, 200};
  const auto result =
      numerics::minimize_scalar([&](double t) { return -fa_log_pdf(c, m, t); }, range, tol);
  return result.x;
}

}  // namespace moltiming::channels
