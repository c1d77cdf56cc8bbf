#pragma once

#include <complex>
#include <concepts>
#include <random>
#include <span>

#include "moltiming/rng.hpp"

// Propagation-delay laws for diffusion-based timing channels: the Levy law
// (pure diffusion), the inverse Gaussian law (diffusion with drift), the
// stable-law dispersion algebra behind linear combining, and the law of the
// first arrival among M i.i.d. Levy delays.
namespace moltiming::channels {

// Levy law L(mu, c): f(z) = sqrt(c / (2 pi (z-mu)^3)) exp(-c / (2 (z-mu))) for z > mu.
struct LevyParams {
  double mu = 0.0;  // seconds
  double c = 1.0;   // seconds

  void validate() const;
};

// Inverse Gaussian law IG(kappa, lambda) with mean kappa and shape lambda.
struct IGParams {
  double kappa = 1.0;   // seconds, kappa = d / v
  double lambda = 1.0;  // seconds, lambda = d^2 / (2 D)

  void validate() const;
  double mean() const { return kappa; }
  double variance() const { return kappa * kappa * kappa / lambda; }
};

// Stable law S(mu, c, alpha, beta) in the characteristic-function
// parameterization exp{i mu t - |c t|^alpha (1 - i beta sgn(t) Phi(t, alpha))}.
struct StableParams {
  double mu = 0.0;
  double c = 1.0;
  double alpha = 0.5;
  double beta = 1.0;

  void validate() const;

  /// The Levy law is S(mu, c, 1/2, 1).
  static StableParams levy(const LevyParams& p) { return {p.mu, p.c, 0.5, 1.0}; }
};

// Physical description of the link between transmitter and receiver.
struct ChannelSpec {
  double distance_d = 1.0;   // micrometers
  double diffusion_D = 1.0;  // micrometers^2 / second
  double drift_v = 0.0;      // micrometers / second, 0 = no flow
  double dim_scale = 1.0;    // opaque 3-D correction factor on c

  void validate() const;
  bool has_drift() const { return drift_v > 0.0; }

  /// c = dim_scale * d^2 / (2 D), mu = 0.
  LevyParams levy() const;
  /// kappa = d / v, lambda = d^2 / (2 D). Requires drift_v > 0.
  IGParams inverse_gaussian() const;
};

// Something that yields uniform (0,1) and standard normal draws.
template <class S>
concept RandomStream = requires(S& s) {
  { s.uniform() } -> std::convertible_to<double>;
  { s.normal() } -> std::convertible_to<double>;
};

// Per-trial stream used by the samplers: Philox bits plus a normal generator.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t stream_id) : engine_(seed, stream_id) {}

  double uniform() { return engine_.uniform(); }
  double normal() { return normal_(engine_); }

 private:
  PhiloxStream engine_;
  std::normal_distribution<double> normal_;
};

double levy_pdf(const LevyParams& p, double z);
double levy_log_pdf(const LevyParams& p, double z);
double levy_cdf(const LevyParams& p, double z);
/// 1 - levy_cdf, computed without cancellation.
double levy_survival(const LevyParams& p, double z);

/// mu + c / n^2; the transform that makes mu + c / N^2 Levy-distributed for N ~ N(0,1).
double levy_from_normal(const LevyParams& p, double n);

template <RandomStream S>
double levy_sample(const LevyParams& p, S& rng) {
  double n = rng.normal();
  while (n == 0.0) n = rng.normal();
  return levy_from_normal(p, n);
}

double ig_pdf(const IGParams& p, double z);
double ig_log_pdf(const IGParams& p, double z);
double ig_cdf(const IGParams& p, double z);
double ig_log_survival(const IGParams& p, double z);

/// Michael-Schucany-Haas transform: one normal and one uniform draw to an IG variate.
double ig_from_draws(const IGParams& p, double n, double u);

template <RandomStream S>
double ig_sample(const IGParams& p, S& rng) {
  const double n = rng.normal();
  return ig_from_draws(p, n, rng.uniform());
}

std::complex<double> stable_characteristic_function(const StableParams& p, double t);

/// Dispersion of sum_m w_m X_m for i.i.d. X_m ~ S(0, c, alpha, beta), alpha < 1:
/// c * (sum_m w_m^alpha)^(1/alpha). Weights must be positive and sum to 1.
double stable_linear_dispersion(double c, double alpha, std::span<const double> weights);

// First arrival among M i.i.d. L(0, c) delays, offset t from the release time.
double fa_cdf(double c, int m, double t);
double fa_log_cdf(double c, int m, double t);
/// log(1 - fa_cdf) = M log erf(sqrt(c / 2t)).
double fa_log_survival(double c, int m, double t);
double fa_pdf(double c, int m, double t);
double fa_log_pdf(double c, int m, double t);

/// Mode of fa_pdf(c, M, .), found on (1e-12 c, c/3].
double fa_mode(double c, int m);

}  // namespace moltiming::channels
