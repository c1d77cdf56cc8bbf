#include "moltiming/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "moltiming/analysis.hpp"
#include "moltiming/detectors.hpp"
#include "moltiming/error.hpp"

namespace moltiming::montecarlo {

namespace {

constexpr double kZ95 = 1.959964;

struct NamedDetector {
  DetectorKind kind;
  std::string_view name;
};

constexpr std::array<NamedDetector, 7> kDetectorNames{{
    {DetectorKind::ml, "ml"},
    {DetectorKind::fa, "fa"},
    {DetectorKind::linear, "linear"},
    {DetectorKind::gray_fa, "gray-fa"},
    {DetectorKind::ig_ml, "ig-ml"},
    {DetectorKind::ig_fa, "ig-fa"},
    {DetectorKind::ig_linear, "ig-linear"},
}};

int worker_count(int threads, std::uint64_t trials) {
  std::uint64_t n = threads > 0 ? static_cast<std::uint64_t>(threads)
                                : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(std::clamp<std::uint64_t>(n, 1, std::max<std::uint64_t>(trials, 1)));
}

// Runs trials [0, trials) split into contiguous chunks, one per worker.
// count_errors(first, last) returns the errors among trials first..last-1.
std::uint64_t run_parallel(std::uint64_t trials, int workers,
                           const std::function<std::uint64_t(std::uint64_t, std::uint64_t)>& count_errors) {
  if (workers == 1) return count_errors(0, trials);
  std::vector<std::uint64_t> errors(workers, 0);
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t first = trials * w / workers;
      const std::uint64_t last = trials * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] {
        try {
          errors[w] = count_errors(first, last);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::uint64_t total = 0;
  for (auto e : errors) total += e;
  return total;
}

// Binary trials: symbol from one uniform draw, then M delays from `delay`.
template <class Delay, class Detect>
std::uint64_t binary_errors(std::uint64_t seed, std::uint64_t first, std::uint64_t last, int m,
                            double delta, Delay delay, Detect detect) {
  std::vector<double> y(m);
  std::uint64_t errors = 0;
  for (std::uint64_t i = first; i < last; ++i) {
    channels::TrialStream rng(seed, i);
    const unsigned symbol = rng.uniform() < 0.5 ? 0u : 1u;
    const double release = symbol * delta;
    for (auto& v : y) v = release + delay(rng);
    errors += detect(y) != symbol;
  }
  return errors;
}

}  // namespace

std::string_view to_string(DetectorKind kind) {
  for (const auto& d : kDetectorNames) {
    if (d.kind == kind) return d.name;
  }
  return "unknown";
}

std::optional<DetectorKind> parse_detector(std::string_view name) {
  for (const auto& d : kDetectorNames) {
    if (d.name == name) return d.kind;
  }
  return std::nullopt;
}

bool uses_inverse_gaussian(DetectorKind kind) {
  return kind == DetectorKind::ig_ml || kind == DetectorKind::ig_fa ||
         kind == DetectorKind::ig_linear;
}

TrialStats make_stats(std::uint64_t errors, std::uint64_t trials, double elapsed) {
  TrialStats s;
  s.errors = errors;
  s.trials = trials;
  s.elapsed = elapsed;
  if (trials == 0) return s;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  s.p_hat = p;
  s.ci_lo = std::max(0.0, std::min(p, center - half));
  s.ci_hi = std::min(1.0, std::max(p, center + half));
  return s;
}

TrialStats simulate_pe(const Point& point, std::uint64_t trials, std::uint64_t seed, int threads) {
  if (trials == 0) throw Error(ErrorCode::domain, "trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const int workers = worker_count(threads, trials);
  std::function<std::uint64_t(std::uint64_t, std::uint64_t)> count;

  const auto levy_delay = [p = point.levy](channels::TrialStream& rng) {
    return channels::levy_sample(p, rng);
  };
  const auto ig_delay = [p = point.ig](channels::TrialStream& rng) {
    return channels::ig_sample(p, rng);
  };

  switch (point.detector) {
    case DetectorKind::ml:
    case DetectorKind::fa:
    case DetectorKind::linear: {
      const detectors::LevyBinaryScheme scheme(point.levy, point.delta, point.m);
      const auto rule = point.detector == DetectorKind::ml   ? &detectors::ml_detect
                        : point.detector == DetectorKind::fa ? &detectors::fa_detect
                                                             : nullptr;
      count = [&, rule, scheme](std::uint64_t first, std::uint64_t last) {
        return binary_errors(seed, first, last, point.m, point.delta, levy_delay,
                             [&](std::span<const double> y) {
                               return rule ? rule(scheme, y).symbol
                                           : detectors::linear_detect(scheme, y).symbol;
                             });
      };
      break;
    }
    case DetectorKind::ig_ml:
    case DetectorKind::ig_fa:
    case DetectorKind::ig_linear: {
      const detectors::IgBinaryScheme scheme(point.ig, point.delta, point.m);
      const auto rule = point.detector == DetectorKind::ig_ml   ? &detectors::ig_ml_detect
                        : point.detector == DetectorKind::ig_fa ? &detectors::ig_fa_detect
                                                                : &detectors::ig_linear_detect;
      count = [&, rule, scheme](std::uint64_t first, std::uint64_t last) {
        return binary_errors(seed, first, last, point.m, point.delta, ig_delay,
                             [&](std::span<const double> y) { return rule(scheme, y).symbol; });
      };
      break;
    }
    case DetectorKind::gray_fa: {
      const detectors::GrayScheme scheme(point.levy, point.delta, point.bits, point.m);
      count = [&, scheme](std::uint64_t first, std::uint64_t last) {
        std::vector<double> y(point.m);
        const unsigned size = scheme.constellation_size();
        std::uint64_t errors = 0;
        for (std::uint64_t i = first; i < last; ++i) {
          channels::TrialStream rng(seed, i);
          const unsigned symbol =
              std::min(size - 1, static_cast<unsigned>(rng.uniform() * size));
          const double release = symbol * scheme.sub_spacing();
          for (auto& v : y) v = release + channels::levy_sample(point.levy, rng);
          errors += detectors::gray_fa_detect(scheme, y).symbol != symbol;
        }
        return errors;
      };
      break;
    }
  }

  const std::uint64_t errors = run_parallel(trials, workers, count);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return make_stats(errors, trials, elapsed.count());
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::delta: return "delta";
    case SweepAxis::m: return "m";
    case SweepAxis::c: return "c";
    case SweepAxis::velocity: return "velocity";
    case SweepAxis::bits: return "bits";
  }
  return "unknown";
}

void SweepSpec::validate() const {
  if (grid.empty()) throw Error(ErrorCode::domain, "sweep grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw Error(ErrorCode::domain, "sweep grid must be strictly increasing");
  }
  if (trials < 1) throw Error(ErrorCode::domain, "trials must be >= 1");
  if (vary == SweepAxis::velocity && !uses_inverse_gaussian(detector)) {
    throw Error(ErrorCode::domain, "velocity sweeps need an inverse Gaussian detector");
  }
}

Point resolve(const SweepSpec& spec, double value) {
  channels::ChannelSpec channel = spec.channel;
  Point p;
  p.detector = spec.detector;
  p.delta = spec.fixed.delta;
  p.m = spec.fixed.m;
  p.bits = spec.fixed.bits;
  std::optional<double> c = spec.fixed.c;
  const auto as_count = [&](const char* what) {
    if (value != std::floor(value) || value < 1.0 || value > 2147483647.0) {
      throw Error(ErrorCode::domain, std::string(what) + " must be a positive integer");
    }
    return static_cast<int>(value);
  };
  switch (spec.vary) {
    case SweepAxis::delta: p.delta = value; break;
    case SweepAxis::m: p.m = as_count("M"); break;
    case SweepAxis::c: c = value; break;
    case SweepAxis::velocity: channel.drift_v = value; break;
    case SweepAxis::bits: p.bits = as_count("L"); break;
  }
  if (uses_inverse_gaussian(p.detector)) {
    p.ig = channel.inverse_gaussian();
  } else {
    p.levy = c ? channels::LevyParams{0.0, *c} : channel.levy();
  }
  return p;
}

std::vector<SweepResult> sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepResult> out;
  out.reserve(spec.grid.size());
  for (double value : spec.grid) {
    SweepResult r{value, std::nullopt, {}};
    try {
      r.stats = simulate_pe(resolve(spec, value), spec.trials, spec.seed, spec.threads);
    } catch (const Error& e) {
      r.error = std::string(moltiming::to_string(e.code())) + ": " + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

int required_m(double c, double delta, double target_pe, const RequiredMOptions& options) {
  if (!(target_pe > 0.0 && target_pe < 0.5)) {
    throw Error(ErrorCode::domain, "target error probability must lie in (0, 0.5)");
  }
  const auto pe = [&](int m) {
    if (options.use_closed_form) return analysis::pe_fa(c, delta, m);
    Point p;
    p.detector = DetectorKind::fa;
    p.levy = {0.0, c};
    p.delta = delta;
    p.m = m;
    return simulate_pe(p, options.trials, options.seed, options.threads).p_hat;
  };
  const auto meets = [&](int m) { return pe(m) <= target_pe; };

  int hi = 1;
  while (!meets(hi)) {
    if (hi >= options.cap) {
      throw Error(ErrorCode::target_unreachable,
                  "error target not met with M up to " + std::to_string(options.cap));
    }
    hi = static_cast<int>(std::min<long long>(2LL * hi, options.cap));
  }
  int lo = hi / 2;  // fails, or 0 when hi = 1
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (meets(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace moltiming::montecarlo
