#include "moltiming/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "moltiming/error.hpp"

namespace moltiming {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::no_sign_change: return "NoSignChange";
    case ErrorCode::max_iterations: return "MaxIterations";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::domain: return "Domain";
    case ErrorCode::bad_weights: return "BadWeights";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::target_unreachable: return "TargetUnreachable";
  }
  return "Unknown";
}

}  // namespace moltiming

namespace moltiming::numerics {

namespace {

constexpr double kErfcFloor = 1e-300;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
};

double checked(const ScalarFunction& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::non_finite, "integrand is not finite at x = " + std::to_string(x));
  }
  return v;
}

Segment gauss_kronrod15(const ScalarFunction& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double f_center = checked(f, center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);

  std::array<double, 7> f_left{};
  std::array<double, 7> f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f_left[j] = checked(f, center - dx);
    f_right[j] = checked(f, center + dx);
    const double pair = f_left[j] + f_right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
  }

  const double result = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * abs_sum, err);
  }
  return {lo, hi, result, err};
}

}  // namespace

Tolerance default_tolerance(const Bracket& b) {
  return {1e-12 * std::max(1.0, std::abs(b.hi)), 1e-10, 200};
}

Tolerance default_quadrature_tolerance() { return {1e-12, 1e-10, 2000}; }

double erfc(double x) {
  const double v = std::erfc(x);
  return v < kErfcFloor ? 0.0 : v;
}

bool erfc_clamps(double x) { return std::erfc(x) < kErfcFloor; }

double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  // Asymptotic series; at x >= 25 the truncation error is below 1e-16.
  const double inv = 1.0 / (2.0 * x * x);
  const double series =
      1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv * (1.0 - 9.0 * inv))));
  return -x * x - std::log(x * std::sqrt(std::numbers::pi)) + std::log(series);
}

double log_erf(double x) {
  if (x < 1.0) return std::log(std::erf(x));
  return std::log1p(-std::erfc(x));
}

double erfc_inv(double p) {
  if (!(p > 0.0 && p < 2.0)) {
    throw Error(ErrorCode::domain, "erfc_inv requires 0 < p < 2, got " + std::to_string(p));
  }
  return boost::math::erfc_inv(p);
}

double log_normal_cdf(double x) {
  const double z = x / std::numbers::sqrt2;
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(z));
  return -std::numbers::ln2 + log_erfc(-z);
}

double find_root(const ScalarFunction& f, Bracket b, const Tolerance& tol) {
  double a = b.lo;
  double c = b.hi;
  double fa = f(a);
  double fc = f(c);
  if (std::isnan(fa) || std::isnan(fc)) {
    throw Error(ErrorCode::non_finite, "root function is NaN at a bracket end");
  }
  if (fa == 0.0) return a;
  if (fc == 0.0) return c;
  if ((fa > 0.0) == (fc > 0.0)) {
    throw Error(ErrorCode::no_sign_change, "f has the same sign at " + std::to_string(b.lo) +
                                               " and " + std::to_string(b.hi));
  }

  // Brent's zero finder: b_ is the best estimate, c the contrapoint.
  double b_ = c;
  double fb = fc;
  c = a;
  fc = fa;
  double d = b_ - a;
  double e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b_ - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b_;
      b_ = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b_) + 0.5 * tol.abs_x;
    const double xm = 0.5 * (c - b_);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b_;

    const bool finite = std::isfinite(fa) && std::isfinite(fc);
    if (finite && std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b_ - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b_;
    fa = fb;
    b_ += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b_);
    if (std::isnan(fb)) throw Error(ErrorCode::non_finite, "root function returned NaN");
  }
  throw Error(ErrorCode::max_iterations, "find_root did not converge");
}

double find_root(const ScalarFunction& f, Bracket b) {
  return find_root(f, b, default_tolerance(b));
}

Minimum minimize_scalar(const ScalarFunction& f, Bracket b, const Tolerance& tol) {
  constexpr double ratio = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double lo = b.lo;
  double hi = b.hi;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  int iter = 0;
  while (hi - lo > tol.abs_x) {
    if (++iter > tol.max_iter) {
      throw Error(ErrorCode::max_iterations, "minimize_scalar did not converge");
    }
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

Minimum minimize_scalar(const ScalarFunction& f, Bracket b) {
  return minimize_scalar(f, b, default_tolerance(b));
}

double integrate(const ScalarFunction& f, Bracket b, const Tolerance& tol) {
  std::vector<Segment> heap;
  heap.push_back(gauss_kronrod15(f, b.lo, b.hi));
  const auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };

  double total = heap.front().value;
  double total_err = heap.front().error;
  for (int iter = 0;; ++iter) {
    if (total_err <= std::max(tol.rel_f * std::abs(total), std::numeric_limits<double>::min())) {
      break;
    }
    if (iter >= tol.max_iter) {
      throw Error(ErrorCode::max_iterations, "integrate: error estimate " +
                                                 std::to_string(total_err) + " above tolerance");
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw Error(ErrorCode::max_iterations, "integrate: interval cannot be subdivided further");
    }
    const Segment left = gauss_kronrod15(f, worst.lo, mid);
    const Segment right = gauss_kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  // Re-sum to drop the drift accumulated by the running updates.
  double sum = 0.0;
  for (const auto& s : heap) sum += s.value;
  return sum;
}

double integrate_semi_infinite(const ScalarFunction& f, double a, const Tolerance& tol,
                               double scale) {
  const auto mapped = [&](double t) {
    const double u = t / (1.0 - t);
    const double fy = f(a + scale * u * u);
    if (fy == 0.0) return 0.0;
    const double jacobian = scale * 2.0 * t / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    return fy * jacobian;
  };
  return integrate(mapped, {0.0, 1.0}, tol);
}

double integrate_semi_infinite(const ScalarFunction& f, double a) {
  return integrate_semi_infinite(f, a, default_quadrature_tolerance());
}

}  // namespace moltiming::numerics
