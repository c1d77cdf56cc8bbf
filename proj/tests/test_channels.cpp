#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "moltiming/channels.hpp"
#include "moltiming/error.hpp"

using namespace moltiming;
using namespace moltiming::channels;

namespace {

template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("Levy density integrates to its CDF") {
  const LevyParams p{0.5, 2.0};
  const double mass = simpson([&](double z) { return levy_pdf(p, z); }, 0.5, 4.5, 400000);
  CHECK(mass == doctest::Approx(levy_cdf(p, 4.5)).epsilon(1e-8));
  CHECK(levy_cdf(p, 4.5) + levy_survival(p, 4.5) == doctest::Approx(1.0));
  CHECK(levy_pdf(p, 0.5) == 0.0);
  CHECK(levy_cdf(p, 0.1) == 0.0);
  CHECK(levy_survival(p, 0.1) == 1.0);
}

TEST_CASE("Levy mode is c/3") {
  const LevyParams p{0.0, 1.5};
  const double mode = p.c / 3.0;
  CHECK(levy_pdf(p, mode) > levy_pdf(p, mode * 0.999));
  CHECK(levy_pdf(p, mode) > levy_pdf(p, mode * 1.001));
}

TEST_CASE("Levy sampler passes a KS test") {
  const LevyParams p{0.2, 1.0};
  const int n = 1000000;
  TrialStream rng(11, 0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = levy_sample(p, rng);
  const double d = ks_distance(xs, [&](double z) { return levy_cdf(p, z); });
  CHECK(d < 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("Levy law as a stable law") {
  const LevyParams p{0.3, 1.7};
  for (double t : {-3.0, -0.5, 0.1, 2.0}) {
    using namespace std::complex_literals;
    const auto ref = std::exp(1i * p.mu * t - std::sqrt(-2.0 * 1i * p.c * t));
    const auto got = stable_characteristic_function(StableParams::levy(p), t);
    CHECK(std::abs(got - ref) < 1e-12);
  }
}

TEST_CASE("stable linear dispersion") {
  const std::vector<double> equal(8, 1.0 / 8);
  CHECK(stable_linear_dispersion(1.3, 0.5, equal) == doctest::Approx(8 * 1.3));
  const std::vector<double> uneven{0.2, 0.3, 0.5};
  const double ref = 2.0 * std::pow(std::sqrt(0.2) + std::sqrt(0.3) + std::sqrt(0.5), 2.0);
  CHECK(stable_linear_dispersion(2.0, 0.5, uneven) == doctest::Approx(ref));

  const std::vector<double> short_sum{0.2, 0.3};
  const std::vector<double> negative{1.5, -0.5};
  for (const auto* w : {&short_sum, &negative}) {
    try {
      stable_linear_dispersion(1.0, 0.5, *w);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::bad_weights);
    }
  }
  CHECK_THROWS_AS(stable_linear_dispersion(1.0, 1.0, equal), Error);
}

TEST_CASE("Averaging Levy delays follows the linear dispersion") {
  // The mean of M i.i.d. L(0, c) delays is L(0, M c).
  const int m = 4;
  const double c = 1.0;
  const int n = 200000;
  TrialStream rng(5, 1);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += levy_sample({0.0, c}, rng);
    x = s / m;
  }
  const LevyParams avg{0.0, m * c};
  CHECK(ks_distance(xs, [&](double z) { return levy_cdf(avg, z); }) < 1.95 / std::sqrt(double(n)));
}

TEST_CASE("inverse Gaussian density, CDF and survival") {
  const IGParams p{0.8, 1.3};
  const double mass = simpson([&](double z) { return ig_pdf(p, z); }, 1e-9, 3.0, 400000);
  CHECK(mass == doctest::Approx(ig_cdf(p, 3.0)).epsilon(1e-8));
  for (double z : {0.1, 0.8, 2.0, 6.0}) {
    CHECK(ig_log_survival(p, z) == doctest::Approx(std::log1p(-ig_cdf(p, z))).epsilon(1e-9));
  }
  CHECK(ig_cdf(p, 0.0) == 0.0);
  CHECK(ig_log_survival(p, -1.0) == 0.0);
  CHECK(p.variance() == doctest::Approx(0.8 * 0.8 * 0.8 / 1.3));
}

TEST_CASE("inverse Gaussian CDF stays finite under strong drift") {
  const IGParams p{0.01, 1.0};  // 2 lambda / kappa = 200
  const double f = ig_cdf(p, 0.012);
  CHECK(std::isfinite(f));
  CHECK(f > 0.0);
  CHECK(f < 1.0);
  CHECK(std::isfinite(ig_log_survival(p, 0.05)));
  CHECK(ig_log_survival(p, 0.05) < -10.0);
}

TEST_CASE("inverse Gaussian sampler and the mean of M draws") {
  const IGParams p{1.0 / 1.5, 1.0};
  const int n = 1000000;
  TrialStream rng(3, 0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = ig_sample(p, rng);
  CHECK(ks_distance(xs, [&](double z) { return ig_cdf(p, z); }) < 1.95 / std::sqrt(double(n)));

  const int m = 4;
  const int n2 = 200000;
  std::vector<double> means(n2);
  for (auto& x : means) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += ig_sample(p, rng);
    x = s / m;
  }
  const IGParams avg{p.kappa, m * p.lambda};
  CHECK(ks_distance(means, [&](double z) { return ig_cdf(avg, z); }) <
        1.95 / std::sqrt(double(n2)));
}

TEST_CASE("MSH transform is stable for extreme normals") {
  const IGParams p{1.0, 1.0};
  const double x = ig_from_draws(p, 1e8, 0.0);
  CHECK(x > 0.0);
  CHECK(std::isfinite(x));
}

TEST_CASE("channel spec derivations") {
  const ChannelSpec spec{2.0, 0.5, 4.0, 1.0};
  CHECK(spec.levy().c == doctest::Approx(4.0));
  CHECK(spec.inverse_gaussian().kappa == doctest::Approx(0.5));
  CHECK(spec.inverse_gaussian().lambda == doctest::Approx(4.0));
  const ChannelSpec still{2.0, 0.5, 0.0, 0.5};
  CHECK(still.levy().c == doctest::Approx(2.0));
  CHECK_THROWS_AS(still.inverse_gaussian(), Error);
  CHECK_THROWS_AS((ChannelSpec{-1.0, 1.0, 0.0, 1.0}.levy()), Error);
}

TEST_CASE("first-arrival CDF matches the order-statistic formula") {
  const double c = 1.0;
  for (int m : {1, 3, 15}) {
    for (double t : {0.05, 0.3, 1.0, 10.0}) {
      const double ref = 1.0 - std::pow(1.0 - levy_cdf({0.0, c}, t), m);
      CHECK(fa_cdf(c, m, t) == doctest::Approx(ref).epsilon(1e-12));
      CHECK(fa_log_cdf(c, m, t) == doctest::Approx(std::log(ref)).epsilon(1e-10));
    }
  }
  CHECK(fa_cdf(c, 3, 0.0) == 0.0);
  CHECK(fa_log_cdf(c, 3, -1.0) == -INFINITY);
  CHECK_THROWS_AS(fa_cdf(c, 0, 1.0), Error);
}

TEST_CASE("first-arrival log CDF deep in the left tail") {
  // At x = sqrt(c / 2t) = 30, erfc underflows; log Psi = log M + log erfc(x).
  const double c = 1.0;
  const double t = c / (2.0 * 900.0);
  const double expected = std::log(5.0) - 900.0 - std::log(30.0 * std::sqrt(std::numbers::pi));
  CHECK(fa_log_cdf(c, 5, t) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("first-arrival density is the derivative of the CDF") {
  const double c = 2.0;
  for (int m : {1, 4, 50}) {
    for (double t : {0.05, 0.2, 0.7, 3.0}) {
      const double h = 1e-6 * t;
      const double fd = (fa_cdf(c, m, t + h) - fa_cdf(c, m, t - h)) / (2.0 * h);
      CHECK(fa_pdf(c, m, t) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("first-arrival mode against a grid search") {
  const double c = 1.0;
  double previous = INFINITY;
  for (int m : {1, 2, 5, 20, 300}) {
    double best_t = 0.0;
    double best = -INFINITY;
    for (int i = 1; i <= 400000; ++i) {
      const double t = c / 3.0 * i / 400000.0;
      const double v = fa_log_pdf(c, m, t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    const double mode = fa_mode(c, m);
    CHECK(mode == doctest::Approx(best_t).epsilon(1e-5));
    CHECK(mode < previous);
    previous = mode;
  }
  CHECK(fa_mode(3.0, 1) == doctest::Approx(1.0).epsilon(1e-6));
}
