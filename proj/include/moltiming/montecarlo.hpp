#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moltiming/channels.hpp"

// Monte Carlo error-rate estimation. Trial i draws from its own Philox stream
// keyed by (seed, i), so a result depends only on the seed and never on the
// number of worker threads.
namespace moltiming::montecarlo {

enum class DetectorKind { ml, fa, linear, gray_fa, ig_ml, ig_fa, ig_linear };

std::string_view to_string(DetectorKind kind);
std::optional<DetectorKind> parse_detector(std::string_view name);
bool uses_inverse_gaussian(DetectorKind kind);

// Fully resolved parameters of one simulation point.
struct Point {
  DetectorKind detector = DetectorKind::fa;
  channels::LevyParams levy{};
  channels::IGParams ig{};
  double delta = 1.0;  // binary spacing, or total span for gray_fa
  int m = 1;
  int bits = 1;  // gray_fa only
};

struct TrialStats {
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double elapsed = 0.0;  // seconds, not part of any serialized output
};

/// Wilson score interval at 95% confidence.
TrialStats make_stats(std::uint64_t errors, std::uint64_t trials, double elapsed = 0.0);

/// threads = 0 uses std::thread::hardware_concurrency().
TrialStats simulate_pe(const Point& point, std::uint64_t trials, std::uint64_t seed,
                       int threads = 0);

enum class SweepAxis { delta, m, c, velocity, bits };

std::string_view to_string(SweepAxis axis);

// Parameters held fixed while one axis varies. The Levy scale is taken from
// the channel unless c is given here.
struct SweepFixed {
  std::optional<double> c;
  double delta = 1.0;
  int m = 1;
  int bits = 1;
};

struct SweepSpec {
  channels::ChannelSpec channel{};
  DetectorKind detector = DetectorKind::fa;
  SweepAxis vary = SweepAxis::delta;
  std::vector<double> grid;
  SweepFixed fixed{};
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  int threads = 0;

  void validate() const;
};

struct SweepResult {
  double value;
  std::optional<TrialStats> stats;
  std::string error;  // set when the point failed
};

/// The point simulated for grid value `value`.
Point resolve(const SweepSpec& spec, double value);

/// Every grid point uses the same seed, so neighbouring points share random
/// numbers. A failing point records its error and the sweep continues.
std::vector<SweepResult> sweep(const SweepSpec& spec);

struct RequiredMOptions {
  bool use_closed_form = true;
  int cap = 10000000;
  std::uint64_t trials = 100000;  // Monte Carlo only
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Smallest M whose first-arrival error probability is at most target_pe,
/// found by doubling then bisection. Throws Error(target_unreachable) past the cap.
int required_m(double c, double delta, double target_pe, const RequiredMOptions& options = {});

}  // namespace moltiming::montecarlo
