#pragma once

#include <optional>
#include <span>
#include <vector>

#include "moltiming/channels.hpp"

// Decision rules for binary and Gray-coded timing modulation. Symbol x is
// released at time x * spacing; arrivals are the release time plus an i.i.d.
// channel delay per particle. Schemes solve their thresholds once at
// construction and are immutable afterwards, so detection is a pure function
// that may run concurrently.
namespace moltiming::detectors {

struct Decision {
  unsigned symbol = 0;
  double statistic = 0.0;
  std::optional<double> threshold;
};

/// Single-particle ML threshold: the root of y (y - delta) log(y / (y - delta)) = c delta / 3
/// on [delta, delta + c/3].
double ml_threshold_single(double c, double delta);

/// First-arrival threshold theta_M on (delta, theta_1]; theta_1 = ml_threshold_single.
double fa_threshold(double c, double delta, int m);

class LevyBinaryScheme {
 public:
  LevyBinaryScheme(channels::LevyParams channel, double delta, int m);

  const channels::LevyParams& channel() const { return channel_; }
  double delta() const { return delta_; }
  int particles() const { return m_; }

  double ml_threshold() const { return theta_single_; }
  double fa_threshold() const { return theta_fa_; }
  /// Threshold on the equal-weight average, whose dispersion is M c.
  double linear_threshold() const { return theta_linear_; }

 private:
  channels::LevyParams channel_;
  double delta_;
  int m_;
  double theta_single_;
  double theta_fa_;
  double theta_linear_;
};

/// Decides 1 iff every arrival exceeds delta and
/// sum_m log((y_m - delta) / y_m) + c delta / (3 y_m (y_m - delta)) <= 0.
/// The statistic is -inf when some arrival is at or before delta and +inf when
/// an arrival lies within 1e-12 delta above it.
Decision ml_detect(const LevyBinaryScheme& s, std::span<const double> y);

/// Compares the earliest arrival with theta_M; ties decide 1.
Decision fa_detect(const LevyBinaryScheme& s, std::span<const double> y);

/// Equal-weight linear combining with the cached threshold.
Decision linear_detect(const LevyBinaryScheme& s, std::span<const double> y);

/// Linear combining with arbitrary weights. Equal weights reuse the scheme's
/// cached threshold; otherwise a threshold is solved on every call, so build a
/// LevyLinearRule for repeated use.
Decision linear_detect(const LevyBinaryScheme& s, std::span<const double> weights,
                       std::span<const double> y);

// Weighted linear detector with its threshold cached.
class LevyLinearRule {
 public:
  LevyLinearRule(const LevyBinaryScheme& scheme, std::vector<double> weights);

  double dispersion() const { return dispersion_; }
  double threshold() const { return threshold_; }
  Decision detect(std::span<const double> y) const;

 private:
  double mu_;
  std::vector<double> weights_;
  double dispersion_;
  double threshold_;
};

// 2^L-ary timing modulation over [0, delta_total] with Gray-coded labels.
class GrayScheme {
 public:
  GrayScheme(channels::LevyParams channel, double delta_total, int bits, int m);

  const channels::LevyParams& channel() const { return channel_; }
  double delta_total() const { return delta_total_; }
  int bits() const { return bits_; }
  int particles() const { return m_; }
  unsigned constellation_size() const { return 1u << bits_; }
  /// delta_total / (2^L - 1).
  double sub_spacing() const { return sub_spacing_; }
  /// Mode of the first-arrival delay, omega_M.
  double mode() const { return mode_; }
  /// Binary first-arrival threshold for spacing sub_spacing().
  double sub_threshold() const { return sub_threshold_; }

 private:
  channels::LevyParams channel_;
  double delta_total_;
  int bits_;
  int m_;
  double sub_spacing_;
  double mode_;
  double sub_threshold_;
};

/// Cell index n_floor = floor((y_FA - omega_M) / sub_spacing), clamped to the
/// constellation, refined by a binary first-arrival decision within the cell.
/// Returns the constellation index; ties inside a cell decide the upper point.
Decision gray_fa_detect(const GrayScheme& s, std::span<const double> y);

unsigned gray_encode(unsigned index);
unsigned gray_decode(unsigned code);

class IgBinaryScheme {
 public:
  IgBinaryScheme(channels::IGParams channel, double delta, int m);

  const channels::IGParams& channel() const { return channel_; }
  double delta() const { return delta_; }
  int particles() const { return m_; }

  double fa_threshold() const { return theta_fa_; }
  /// Threshold on the average of M arrivals, distributed as IG(kappa, M lambda).
  double linear_threshold() const { return theta_linear_; }

 private:
  channels::IGParams channel_;
  double delta_;
  int m_;
  double theta_fa_;
  double theta_linear_;
};

/// Product likelihood ratio; the statistic is sum_m log f(y_m) - log f(y_m - delta),
/// or -inf when some arrival is at or before delta.
Decision ig_ml_detect(const IgBinaryScheme& s, std::span<const double> y);
Decision ig_fa_detect(const IgBinaryScheme& s, std::span<const double> y);
/// Averaging detector. Only equal weights keep the average inverse Gaussian.
Decision ig_linear_detect(const IgBinaryScheme& s, std::span<const double> y);

}  // namespace moltiming::detectors
