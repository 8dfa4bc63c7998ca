#pragma once

#include <vector>

namespace qfield {

// Bessel function of the first kind, order zero. Power series below x = 16,
// Hankel asymptotic expansion above. Absolute error <= 1e-12.
double bessel_j0(double x);

// sinc(x) = sin(x)/x with sinc(0) = 1.
double sinc(double x);

// Natural cubic spline on a uniform grid x_i = x0 + i*h.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(double x0, double h, std::vector<double> y);

  double operator()(double x) const;
  double x0() const { return x0_; }
  double h() const { return h_; }
  double x_max() const { return x0_ + h_ * static_cast<double>(y_.size() - 1); }
  const std::vector<double>& values() const { return y_; }

private:
  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, m_; // values and second derivatives
};

} // namespace qfield
