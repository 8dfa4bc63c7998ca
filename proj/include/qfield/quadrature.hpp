#pragma once

#include "qfield/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace qfield {

// 15-point Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
// Nodes are listed from the outermost inwards; index 7 is the centre.
struct GaussKronrod15 {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights for xk[1], xk[3], xk[5], xk[7].
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  // The 15 abscissae mapped to [a, b], in ascending order.
  static std::array<double, 15> nodes(double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 15> x{};
    for (int i = 0; i < 7; ++i) {
      x[i] = c - h * xk[i];
      x[14 - i] = c + h * xk[i];
    }
    x[7] = c;
    return x;
  }
  // Kronrod and Gauss weights matching nodes(), scaled by the half-width.
  static std::array<double, 15> kronrod_weights(double a, double b) {
    const double h = 0.5 * (b - a);
    std::array<double, 15> w{};
    for (int i = 0; i < 7; ++i) w[i] = w[14 - i] = h * wk[i];
    w[7] = h * wk[7];
    return w;
  }
  static std::array<double, 15> gauss_weights(double a, double b) {
    const double h = 0.5 * (b - a);
    std::array<double, 15> w{};
    for (int i = 1; i < 7; i += 2) w[i] = w[14 - i] = h * wg[i / 2];
    w[7] = h * wg[3];
    return w;
  }
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = std::size_t{1} << 20;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  double l1 = 0.0; // estimate of the integral of |f|
  std::size_t intervals = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  double l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// QUADPACK-style error estimate for one panel.
template <class T, class F>
Panel<T> gk15_panel(F& f, double a, double b) {
  using GK = GaussKronrod15;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<T, 15> fv{};
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * GK::xk[i]);
    fv[14 - i] = f(c + h * GK::xk[i]);
  }
  fv[7] = f(c);

  T kron = fv[7] * GK::wk[7];
  T gauss = fv[7] * GK::wg[3];
  double abs_sum = magnitude(fv[7]) * GK::wk[7];
  for (int i = 0; i < 7; ++i) {
    kron += (fv[i] + fv[14 - i]) * GK::wk[i];
    abs_sum += (magnitude(fv[i]) + magnitude(fv[14 - i])) * GK::wk[i];
    if (i % 2 == 1) gauss += (fv[i] + fv[14 - i]) * GK::wg[i / 2];
  }
  const T mean = kron * 0.5;
  double asc = magnitude(fv[7] - mean) * GK::wk[7];
  for (int i = 0; i < 7; ++i) asc += (magnitude(fv[i] - mean) + magnitude(fv[14 - i] - mean)) * GK::wk[i];

  double err = magnitude((kron - gauss) * h);
  const double resasc = asc * std::abs(h);
  const double resabs = abs_sum * std::abs(h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel<T>{a, b, kron * h, err, resabs};
}

} // namespace detail

// Globally adaptive Gauss-Kronrod integration over the finite panels given by
// consecutive breakpoints. Stops when the summed error estimate is below
// max(abs_tol, rel_tol*|I|, 100*eps*integral of |f|). Each panel's estimate
// is floored at 50*eps times its own integral of |f|, so the roundoff floor
// is always reachable.
template <class T, class F>
QuadratureResult<T> integrate_panels(F&& f, const std::vector<double>& breakpoints, const QuadratureOptions& opt = {}) {
  if (breakpoints.size() < 2) throw BadParameter("integration needs at least two breakpoints");
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) {
      if (breakpoints[i + 1] == breakpoints[i]) continue;
      throw BadParameter("breakpoints must be increasing");
    }
    auto p = detail::gk15_panel<T>(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    err += p.error;
    l1 += p.l1;
    heap.push(p);
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] {
    return std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(total), 100.0 * eps * l1});
  };
  std::size_t count = heap.size();
  while (!heap.empty() && err > target()) {
    if (count >= opt.max_intervals) {
      std::ostringstream os;
      os << "quadrature hit the subdivision limit of " << opt.max_intervals << " intervals; achieved error "
         << err << " against target " << target();
      throw QuadratureFailure(os.str(), err);
    }
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      std::ostringstream os;
      os << "quadrature cannot subdivide further near x=" << mid << "; achieved error " << err;
      throw QuadratureFailure(os.str(), err);
    }
    heap.pop();
    auto left = detail::gk15_panel<T>(f, worst.a, mid);
    auto right = detail::gk15_panel<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the panels to shed accumulated update roundoff.
  T sum{};
  double esum = 0.0;
  std::vector<detail::Panel<T>> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    sum += p.value;
    esum += p.error;
  }
  return QuadratureResult<T>{sum, esum, l1, count};
}

// Integral over [a, b]; b may be +infinity, in which case the range is mapped
// onto [0, 1) with x = a + t/(1-t).
template <class T, class F>
QuadratureResult<T> integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (std::isinf(b) && b > 0) {
    auto g = [&f, a](double t) -> T {
      const double s = 1.0 - t;
      return f(a + t / s) * (1.0 / (s * s));
    };
    return integrate_panels<T>(g, {0.0, 1.0}, opt);
  }
  if (!std::isfinite(a) || !std::isfinite(b)) throw BadParameter("only [a, +inf) infinite ranges are supported");
  return integrate_panels<T>(f, {a, b}, opt);
}

// Real integral with relative tolerance; throws QuadratureFailure when the
// tolerance cannot be reached.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);

} // namespace qfield

namespace qfield {

// Integral of g(r)/sqrt(R^2 - r^2) over [0, R], evaluated through r = R sin(theta)
// so the endpoint singularity disappears.
double integrate_inverse_sqrt_endpoint(const std::function<double(double)>& g, double R, double rel_tol = 1e-10);

} // namespace qfield
