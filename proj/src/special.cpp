#include "qfield/special.hpp"

#include "qfield/errors.hpp"

#include <cmath>
#include <numbers>

namespace qfield {

namespace {

double j0_series(double x) {
  const long double q = static_cast<long double>(x) * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<long double>(m) * m);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && static_cast<long double>(m) * m > q) break;
  }
  return static_cast<double>(sum);
}

double j0_asymptotic(double x) {
  // a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k); P and Q collect even and odd terms.
  double p = 1.0, q = 0.0;
  double term = 1.0, last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (std::abs(next) > last) break; // series starts to diverge
    term = next;
    last = std::abs(term);
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q -= term; break;
      case 2: p -= term; break;
      case 3: q += term; break;
    }
    if (last < 1e-18) break;
  }
  // cos(x - pi/4) and sin(x - pi/4) without subtracting pi/4 from a large x.
  const double c = std::cos(x), s = std::sin(x);
  const double chi_c = (c + s) / std::numbers::sqrt2;
  const double chi_s = (s - c) / std::numbers::sqrt2;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * chi_c - q * chi_s);
}

} // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  return x < 16.0 ? j0_series(x) : j0_asymptotic(x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

CubicSpline::CubicSpline(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)) {
  if (!(h > 0.0)) throw BadParameter("spline spacing must be positive");
  if (y_.size() < 3) throw BadParameter("spline needs at least three samples");
  const std::size_t n = y_.size();
  m_.assign(n, 0.0);
  // Thomas algorithm for the interior second derivatives, natural ends.
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (h * h);
    const double denom = 4.0 - c[i - 1];
    c[i] = 1.0 / denom;
    d[i] = (rhs - d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

double CubicSpline::operator()(double x) const {
  const double t = (x - x0_) / h_;
  const std::size_t n = y_.size();
  if (t <= 0.0) return y_.front();
  if (t >= static_cast<double>(n - 1)) return y_.back();
  std::size_t i = static_cast<std::size_t>(t);
  if (i >= n - 1) i = n - 2;
  const double b = t - static_cast<double>(i), a = 1.0 - b;
  const double h2 = h_ * h_ / 6.0;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h2;
}

} // namespace qfield
