#pragma once

// Special functions, quadrature rules and a radix-2 FFT shared by the
// analytic evaluators and the PHY simulator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "lorawban/error.hpp"

namespace lorawban::numerics {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kSqrt2 = std::numbers::sqrt2;

// Gaussian tail probability (1/sqrt(2 pi)) * int_x^inf exp(-t^2/2) dt.
inline double q_function(double x) {
  if (!std::isfinite(x)) throw DomainError("q_function: non-finite argument");
  return 0.5 * std::erfc(x / kSqrt2);
}

namespace detail {

inline constexpr double kGammaEps = 1e-16;
inline constexpr double kTiny = 1e-300;
inline constexpr int kGammaMaxIter = 100000;

// log of the series  sum_{k>=0} x^k / (s (s+1) ... (s+k))
inline double log_gamma_series_sum(double s, double x) {
  double ap = s;
  double term = 1.0 / s;
  double sum = term;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return std::log(sum);
}

// log of Gamma(s, x) by the modified Lentz continued fraction; x >= s + 1.
inline double log_upper_gamma_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kGammaEps) break;
  }
  return -x + s * std::log(x) + std::log(h);
}

inline void check_shape(double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw DomainError("incomplete gamma: shape must be positive, got " + std::to_string(s));
}

}  // namespace detail

// log of the lower incomplete gamma function, argument given as log(x).
// Accepts log_x = -inf (x = 0) and arguments far below the double range,
// which the composite-fading integrals need for shape parameters near 0.
inline double log_lower_incomplete_gamma(double s, double log_x) {
  detail::check_shape(s);
  if (std::isnan(log_x)) throw DomainError("incomplete gamma: NaN argument");
  if (log_x == -std::numeric_limits<double>::infinity())
    return -std::numeric_limits<double>::infinity();
  const double x = std::exp(log_x);
  if (x < s + 1.0) return s * log_x - x + detail::log_gamma_series_sum(s, x);
  if (std::isinf(x)) return std::lgamma(s);
  const double upper_reg = std::exp(detail::log_upper_gamma_cf(s, x) - std::lgamma(s));
  return std::lgamma(s) + std::log1p(-upper_reg);
}

// Regularized lower incomplete gamma P(s, x) with x supplied as log(x).
inline double regularized_lower_gamma_log(double s, double log_x) {
  detail::check_shape(s);
  if (std::isnan(log_x)) throw DomainError("incomplete gamma: NaN argument");
  if (log_x == -std::numeric_limits<double>::infinity()) return 0.0;
  const double x = std::exp(log_x);
  if (x < s + 1.0)
    return std::min(1.0, std::exp(s * log_x - x + detail::log_gamma_series_sum(s, x) -
                                  std::lgamma(s)));
  if (std::isinf(x)) return 1.0;
  return 1.0 - std::exp(detail::log_upper_gamma_cf(s, x) - std::lgamma(s));
}

// Lower incomplete gamma int_0^x t^{s-1} e^{-t} dt.
inline double lower_incomplete_gamma(double s, double x) {
  detail::check_shape(s);
  if (std::isnan(x) || x < 0.0) throw DomainError("lower_incomplete_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  return std::exp(log_lower_incomplete_gamma(s, std::log(x)));
}

inline double regularized_lower_gamma(double s, double x) {
  detail::check_shape(s);
  if (std::isnan(x) || x < 0.0) throw DomainError("regularized_lower_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  return regularized_lower_gamma_log(s, std::log(x));
}

// Nodes and weights for  int e^{-y^2} f(y) dy ~ sum_i w_i f(y_i).
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive, summing to sqrt(pi)
};

// Gauss-Hermite rule by Newton iteration on the orthonormal Hermite recurrence.
inline QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be >= 1");
  using Real = long double;
  const int n = order;
  const Real pim4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
  std::vector<Real> x(n), w(n);
  const int half = (n + 1) / 2;
  Real z = 0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(Real(2 * n + 1)) - 1.85575L * std::pow(Real(2 * n + 1), Real(-1) / 6);
    else if (i == 1)
      z -= 1.14L * std::pow(Real(n), 0.426L) / z;
    else if (i == 2)
      z = 1.86L * z - 0.86L * x[0];
    else if (i == 3)
      z = 1.91L * z - 0.91L * x[1];
    else
      z = 2.0L * z - x[i - 2];
    Real pp = 0;
    for (int it = 0; it < 200; ++it) {
      Real p1 = pim4, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const Real p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(Real(2) / j) * p2 - std::sqrt(Real(j - 1) / j) * p3;
      }
      pp = std::sqrt(Real(2 * n)) * p2;
      const Real z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-18L * std::max(Real(1), std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0L / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[half - 1] = 0;  // exact centre node
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // NR fills from the largest root downwards; store ascending.
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = static_cast<double>(x[n - 1 - i]);
    rule.weights[i] = static_cast<double>(w[n - 1 - i]);
  }
  return rule;
}

struct IntegrationResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
// Subdivision order is deterministic, so repeated calls are bit-identical.
template <typename F>
IntegrationResult integrate(F&& f, double a, double b, double rel_tol = 1e-8,
                            double abs_tol = 0.0, int max_intervals = 2000) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
  };

  auto rule = [&](double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(centre);
    double kronrod = fc * wgk[7];
    double gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = half * xgk[j];
      const double f1 = f(centre - dx);
      const double f2 = f(centre + dx);
      kronrod += wgk[j] * (f1 + f2);
      if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
    }
    return Segment{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
  };

  IntegrationResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = rule(a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int count = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = rule(worst.a, mid);
    const Segment right = rule(mid, worst.b);
    heap.push(left);
    heap.push(right);
    ++count;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Final sum in interval order; the running totals above only steer refinement.
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
  total = 0.0;
  error = 0.0;
  for (const auto& s : segs) {
    total += s.value;
    error += s.error;
  }
  out.value = total;
  out.abs_error = error;
  out.intervals = count;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

// Bisection root of a function with a sign change on [lo, hi].
template <typename F>
std::optional<double> bisect(F&& f, double lo, double hi, double x_tol = 1e-9, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
  for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// In-place radix-2 forward DFT: X[k] = sum_m x[m] exp(-j 2 pi k m / N).
class FftPlan {
 public:
  explicit FftPlan(std::size_t size) : size_(size) {
    if (size == 0 || (size & (size - 1)) != 0)
      throw DomainError("FftPlan: size must be a power of two");
    twiddle_.resize(size / 2);
    for (std::size_t k = 0; k < size / 2; ++k) {
      const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(size);
      twiddle_[k] = {std::cos(angle), std::sin(angle)};
    }
    reversed_.resize(size);
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < size) ++bits;
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      reversed_[i] = r;
    }
  }

  std::size_t size() const noexcept { return size_; }

  void forward(std::vector<std::complex<double>>& data) const {
    if (data.size() != size_) throw ShapeError("FftPlan: buffer length mismatch");
    for (std::size_t i = 0; i < size_; ++i)
      if (i < reversed_[i]) std::swap(data[i], data[reversed_[i]]);
    for (std::size_t len = 2; len <= size_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const auto t = twiddle_[k * stride] * data[start + k + half];
          const auto u = data[start + k];
          data[start + k] = u + t;
          data[start + k + half] = u - t;
        }
      }
    }
  }

 private:
  std::size_t size_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::size_t> reversed_;
};

}  // namespace lorawban::numerics
