#include <cmath>

#include "doctest.h"
#include "moltiming/analysis.hpp"
#include "moltiming/error.hpp"
#include "moltiming/montecarlo.hpp"

using namespace moltiming;
using namespace moltiming::montecarlo;

namespace {

Point levy_point(DetectorKind kind, double c, double delta, int m) {
  Point p;
  p.detector = kind;
  p.levy = {0.0, c};
  p.delta = delta;
  p.m = m;
  return p;
}

double sigma(double p, std::uint64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("Wilson interval") {
  const auto s = make_stats(30, 1000);
  CHECK(s.p_hat == doctest::Approx(0.03));
  CHECK(s.ci_lo < 0.03);
  CHECK(s.ci_hi > 0.03);
  // Reference values from statsmodels proportion_confint(method="wilson").
  CHECK(std::abs(s.ci_lo - 0.021093738828834696) < 1e-9);
  CHECK(std::abs(s.ci_hi - 0.042503414147587126) < 1e-9);
  const auto zero = make_stats(0, 100);
  CHECK(zero.ci_lo == 0.0);
  CHECK(zero.ci_hi > 0.0);
}

TEST_CASE("separable hypotheses give almost no errors") {
  const auto s = simulate_pe(levy_point(DetectorKind::fa, 1.0, 1e6, 1), 10000, 1);
  CHECK(s.p_hat < 1e-2);
}

TEST_CASE("results do not depend on the thread count") {
  const auto p = levy_point(DetectorKind::ml, 1.0, 1.0, 3);
  const auto one = simulate_pe(p, 20001, 9, 1);
  const auto three = simulate_pe(p, 20001, 9, 3);
  const auto eight = simulate_pe(p, 20001, 9, 8);
  CHECK(one.errors == three.errors);
  CHECK(one.errors == eight.errors);
  CHECK(simulate_pe(p, 20001, 10, 1).errors != one.errors);
}

TEST_CASE("symbols are equiprobable") {
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    channels::TrialStream rng(1, i);
    ones += rng.uniform() >= 0.5;
  }
  CHECK(std::abs(ones / double(n) - 0.5) < 3.0 * sigma(0.5, n));
}

TEST_CASE("first-arrival simulation matches the closed form") {
  const std::uint64_t n = 200000;
  const double exact = analysis::pe_fa(1.0, 1.0, 2);
  const auto s = simulate_pe(levy_point(DetectorKind::fa, 1.0, 1.0, 2), n, 3);
  CHECK(std::abs(s.p_hat - exact) < 3.0 * sigma(exact, n));
}

TEST_CASE("Gray simulation matches the closed form") {
  const std::uint64_t n = 200000;
  Point p = levy_point(DetectorKind::gray_fa, 1.0, 3.0, 10);
  p.bits = 2;
  const double exact = analysis::pe_gray(1.0, 3.0, 2, 10).value;
  const auto s = simulate_pe(p, n, 5);
  CHECK(std::abs(s.p_hat - exact) < 3.0 * sigma(exact, n));
}

TEST_CASE("linear combining degrades with more particles") {
  const auto m1 = simulate_pe(levy_point(DetectorKind::linear, 1.0, 2.0, 1), 100000, 2);
  const auto m3 = simulate_pe(levy_point(DetectorKind::linear, 1.0, 2.0, 3), 100000, 2);
  CHECK(m3.p_hat > m1.p_hat);
  CHECK(std::abs(m3.p_hat - analysis::pe_linear(1.0, 2.0, 3)) < 3.0 * sigma(0.37, 100000));
}

TEST_CASE("inverse Gaussian first arrival beats averaging") {
  Point p;
  p.ig = {1.0, 1.0};
  p.delta = 1.0;
  p.m = 4;
  p.detector = DetectorKind::ig_fa;
  const auto fa = simulate_pe(p, 100000, 4);
  p.detector = DetectorKind::ig_linear;
  const auto lin = simulate_pe(p, 100000, 4);
  CHECK(fa.p_hat < lin.p_hat);
}

TEST_CASE("sweeps") {
  SweepSpec spec;
  spec.detector = DetectorKind::fa;
  spec.vary = SweepAxis::delta;
  spec.grid = {0.5, 1.0, 2.0, 4.0};
  spec.fixed.c = 1.0;
  spec.fixed.m = 3;
  spec.trials = 50000;
  const auto rows = sweep(spec);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].stats);
    CHECK(rows[i].stats->p_hat < rows[i - 1].stats->p_hat);
  }

  spec.vary = SweepAxis::m;
  spec.grid = {0.5, 2.0};
  const auto bad = sweep(spec);
  CHECK_FALSE(bad[0].stats.has_value());
  CHECK(bad[0].error.find("Domain") == 0);
  CHECK(bad[1].stats.has_value());

  spec.grid = {2.0, 1.0};
  CHECK_THROWS_AS(sweep(spec), Error);
  spec.grid = {};
  CHECK_THROWS_AS(sweep(spec), Error);
}

TEST_CASE("velocity sweeps resolve the inverse Gaussian channel") {
  SweepSpec spec;
  spec.channel = {1.0, 0.5, 0.0, 1.0};
  spec.detector = DetectorKind::ig_fa;
  spec.vary = SweepAxis::velocity;
  spec.grid = {0.5, 2.0};
  const auto p = resolve(spec, 2.0);
  CHECK(p.ig.kappa == doctest::Approx(0.5));
  CHECK(p.ig.lambda == doctest::Approx(1.0));
  spec.detector = DetectorKind::fa;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("required particle count") {
  CHECK(required_m(1.0, 1.0, 0.4) == 1);
  const int easy = required_m(1.0, 0.5, 0.01);
  const int hard = required_m(2.0, 0.5, 0.01);
  CHECK(hard >= easy);
  CHECK(analysis::pe_fa(1.0, 0.5, easy) <= 0.01);
  CHECK(analysis::pe_fa(1.0, 0.5, easy - 1) > 0.01);
  CHECK(required_m(2.0, 0.5, 0.01) == hard);
  RequiredMOptions capped;
  capped.cap = 4;
  try {
    required_m(2.0, 0.5, 0.01, capped);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::target_unreachable);
  }
  CHECK_THROWS_AS(required_m(1.0, 1.0, 0.6), Error);
}

TEST_CASE("detector names round-trip") {
  for (auto k : {DetectorKind::ml, DetectorKind::fa, DetectorKind::linear, DetectorKind::gray_fa,
                 DetectorKind::ig_ml, DetectorKind::ig_fa, DetectorKind::ig_linear}) {
    CHECK(parse_detector(to_string(k)) == k);
  }
  CHECK_FALSE(parse_detector("bogus").has_value());
}
