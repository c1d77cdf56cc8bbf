#include "moltiming/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "moltiming/error.hpp"
#include "moltiming/numerics.hpp"

namespace moltiming::detectors {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::domain, what);
}

void require_length(std::span<const double> y, int m) {
  if (y.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::length_mismatch, "expected " + std::to_string(m) + " arrivals, got " +
                                                std::to_string(y.size()));
  }
}

double earliest(std::span<const double> y) { return *std::min_element(y.begin(), y.end()); }

double mean(std::span<const double> y) {
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

Decision threshold_decision(double statistic, double threshold) {
  return {statistic >= threshold ? 1u : 0u, statistic, threshold};
}

// log f_FA(t) - log f_FA(t - delta) for the first of M inverse Gaussian arrivals.
double ig_fa_llr(const channels::IGParams& p, int m, double delta, double t) {
  const auto log_density = [&](double u) {
    const double tail = m > 1 ? (m - 1) * channels::ig_log_survival(p, u) : 0.0;
    return channels::ig_log_pdf(p, u) + tail;
  };
  return log_density(t) - log_density(t - delta);
}

// Root of ig_fa_llr on (delta, inf). The ratio is +inf just above delta and
// negative for large t; the upper end is found by doubling from delta + kappa.
double ig_fa_root(const channels::IGParams& p, int m, double delta) {
  const auto llr = [&](double t) { return ig_fa_llr(p, m, delta, t); };
  double span = p.kappa;
  int doublings = 0;
  while (!(llr(delta + span) < 0.0)) {
    if (++doublings > 60) {
      throw Error(ErrorCode::no_sign_change, "no inverse Gaussian threshold above delta");
    }
    span *= 2.0;
  }
  const numerics::Bracket b{delta * (1.0 + 1e-12), delta + span};
  return numerics::find_root(llr, b);
}

void validate_binary(double delta, int m) {
  require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
  require(m >= 1, "M must be >= 1");
}

}  // namespace

double ml_threshold_single(double c, double delta) {
  require(c > 0.0, "c must be positive");
  require(delta > 0.0, "delta must be positive");
  const double target = c * delta / 3.0;
  // y (y - delta) log(y / (y - delta)) = -y^2 u log u with u = (y - delta) / y.
  const auto f = [&](double y) {
    const double u = (y - delta) / y;
    if (u <= 0.0) return -target;
    return -y * y * u * std::log(u) - target;
  };
  return numerics::find_root(f, {delta, delta + c / 3.0});
}

double fa_threshold(double c, double delta, int m) {
  require(m >= 1, "M must be >= 1");
  const double theta1 = ml_threshold_single(c, delta);
  if (m == 1) return theta1;
  const auto h = [&](double y) {
    const double gap = y - delta;
    const double single = std::log1p(-delta / y) + c * delta / (3.0 * y * gap);
    const double rest = numerics::log_erf(std::sqrt(c / (2.0 * y))) -
                        numerics::log_erf(std::sqrt(c / (2.0 * gap)));
    return 1.5 * single + (m - 1) * rest;
  };
  return numerics::find_root(h, {delta * (1.0 + 1e-12), theta1});
}

LevyBinaryScheme::LevyBinaryScheme(channels::LevyParams channel, double delta, int m)
    : channel_(channel), delta_(delta), m_(m) {
  channel_.validate();
  validate_binary(delta, m);
  theta_single_ = ml_threshold_single(channel_.c, delta_);
  theta_fa_ = detectors::fa_threshold(channel_.c, delta_, m_);
  // Equal weights 1/M give the dispersion c (M * M^-1/2)^2 = M c.
  theta_linear_ = ml_threshold_single(m_ * channel_.c, delta_);
}

Decision ml_detect(const LevyBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  const double c = s.channel().c;
  const double delta = s.delta();
  double sum = 0.0;
  for (double arrival : y) {
    const double z = arrival - s.channel().mu;
    if (z <= delta) return {0, -INFINITY, 0.0};
    const double gap = z - delta;
    // The c delta / (3 z gap) term dominates as gap -> 0 and the sum tends to +inf.
    if (gap < 1e-12 * delta) return {0, INFINITY, 0.0};
    sum += std::log1p(-delta / z) + c * delta / (3.0 * z * gap);
  }
  return {sum <= 0.0 ? 1u : 0u, sum, 0.0};
}

Decision fa_detect(const LevyBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  return threshold_decision(earliest(y) - s.channel().mu, s.fa_threshold());
}

Decision linear_detect(const LevyBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  return threshold_decision(mean(y) - s.channel().mu, s.linear_threshold());
}

Decision linear_detect(const LevyBinaryScheme& s, std::span<const double> weights,
                       std::span<const double> y) {
  require_length(y, s.particles());
  const double equal = 1.0 / s.particles();
  const bool uniform = weights.size() == y.size() &&
                       std::all_of(weights.begin(), weights.end(),
                                   [&](double w) { return std::abs(w - equal) <= 1e-15; });
  if (uniform) return linear_detect(s, y);
  return LevyLinearRule(s, {weights.begin(), weights.end()}).detect(y);
}

LevyLinearRule::LevyLinearRule(const LevyBinaryScheme& scheme, std::vector<double> weights)
    : mu_(scheme.channel().mu), weights_(std::move(weights)) {
  require_length(weights_, scheme.particles());
  dispersion_ = channels::stable_linear_dispersion(scheme.channel().c, 0.5, weights_);
  threshold_ = ml_threshold_single(dispersion_, scheme.delta());
}

Decision LevyLinearRule::detect(std::span<const double> y) const {
  if (y.size() != weights_.size()) {
    throw Error(ErrorCode::length_mismatch, "weights and arrivals differ in length");
  }
  const double combined = std::inner_product(y.begin(), y.end(), weights_.begin(), 0.0);
  return threshold_decision(combined - mu_, threshold_);
}

GrayScheme::GrayScheme(channels::LevyParams channel, double delta_total, int bits, int m)
    : channel_(channel), delta_total_(delta_total), bits_(bits), m_(m) {
  channel_.validate();
  validate_binary(delta_total, m);
  require(bits >= 1 && bits <= 30, "bits L must lie in [1, 30]");
  sub_spacing_ = delta_total_ / static_cast<double>((1u << bits_) - 1u);
  mode_ = channels::fa_mode(channel_.c, m_);
  sub_threshold_ = fa_threshold(channel_.c, sub_spacing_, m_);
}

Decision gray_fa_detect(const GrayScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  const double first = earliest(y) - s.channel().mu;
  const double top = static_cast<double>(s.constellation_size() - 1);
  const double cell = std::floor((first - s.mode()) / s.sub_spacing());
  if (!(cell >= 0.0)) return {0, first, std::nullopt};
  if (cell >= top) return {s.constellation_size() - 1, first, std::nullopt};
  const double threshold = cell * s.sub_spacing() + s.sub_threshold();
  const unsigned upper = first >= threshold ? 1u : 0u;
  return {static_cast<unsigned>(cell) + upper, first, threshold};
}

unsigned gray_encode(unsigned index) { return index ^ (index >> 1); }

unsigned gray_decode(unsigned code) {
  unsigned index = code;
  for (unsigned shift = code >> 1; shift != 0; shift >>= 1) index ^= shift;
  return index;
}

IgBinaryScheme::IgBinaryScheme(channels::IGParams channel, double delta, int m)
    : channel_(channel), delta_(delta), m_(m) {
  channel_.validate();
  validate_binary(delta, m);
  theta_fa_ = ig_fa_root(channel_, m_, delta_);
  theta_linear_ = ig_fa_root({channel_.kappa, m_ * channel_.lambda}, 1, delta_);
}

Decision ig_ml_detect(const IgBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  const double delta = s.delta();
  double sum = 0.0;
  for (double arrival : y) {
    if (arrival <= delta) return {0, -INFINITY, 0.0};
    sum += channels::ig_log_pdf(s.channel(), arrival) -
           channels::ig_log_pdf(s.channel(), arrival - delta);
  }
  return {sum <= 0.0 ? 1u : 0u, sum, 0.0};
}

Decision ig_fa_detect(const IgBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  return threshold_decision(earliest(y), s.fa_threshold());
}

Decision ig_linear_detect(const IgBinaryScheme& s, std::span<const double> y) {
  require_length(y, s.particles());
  return threshold_decision(mean(y), s.linear_threshold());
}

}  // namespace moltiming::detectors
