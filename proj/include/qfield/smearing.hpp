#pragma once

#include "qfield/special.hpp"

#include <cstddef>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace qfield {

// Cut-off policy for spectra, in units of 1/sigma.
inline constexpr double kGaussianKmaxFactor = 40.0;
inline constexpr double kWindowedKmaxFactor = 200.0;
// Default sampling step for tabulated radial profiles, in units of sigma.
inline constexpr double kDefaultGridFactor = 1.0 / 50.0;

// Smooth step of width eps. Inner keeps r < r0, Outer keeps r > r0; the two
// add up to one.
struct Window {
  enum class Side { Inner, Outer };
  Side side = Side::Inner;
  double r0 = 0.0;
  double eps = 0.1;

  double operator()(double r) const;
};

// Spherically symmetric real function of radius in d = 2 or 3 dimensions.
class RadialProfile {
public:
  struct Gaussian {
    double sigma;
  };
  // coefficient * (d/dDelta)^order S0(r; Delta), where S0 is a Gaussian
  // convolved with the unit sphere of radius Delta (3D only).
  struct GaussianShell {
    double sigma;
    double delta;
    int order;
    double coefficient;
  };
  struct Windowed {
    std::shared_ptr<const RadialProfile> base;
    Window window;
  };
  // Uniform grid r_i = i*h from r = 0, cubic interpolation, zero beyond.
  struct Sampled {
    CubicSpline spline;
  };
  struct Zero {};
  using Kind = std::variant<Gaussian, GaussianShell, Windowed, Sampled, Zero>;

  static RadialProfile gaussian(double sigma, int d);
  static RadialProfile gaussian_shell(double sigma, double delta, int order, double coefficient = 1.0);
  static RadialProfile windowed(const RadialProfile& base, const Window& w);
  // Checks the grid invariants: h <= length_scale/50 and a tail below 1e-12
  // of the peak at the last sample.
  static RadialProfile sampled(int d, double h, std::vector<double> values, double length_scale);
  static RadialProfile zero(int d, double length_scale);

  int dimension() const { return d_; }
  double length_scale() const { return scale_; }
  const Kind& kind() const { return kind_; }

  double operator()(double r) const;
  // Radial interval outside which the profile is negligible (below ~1e-25 of
  // its scale). Empty when lo >= hi.
  std::pair<double, double> support() const;

private:
  RadialProfile(int d, double scale, Kind kind) : d_(d), scale_(scale), kind_(std::move(kind)) {}

  int d_ = 3;
  double scale_ = 1.0;
  Kind kind_;
};

enum class Modulation {
  NegDeltaSinc, // -Delta sinc(Delta k) = -sin(Delta k)/k
  Cos,          // cos(Delta k)
  KSin,         // k sin(Delta k)
};

// Real radial spectrum of a RadialProfile, defined on [0, k_max].
class SpectralProfile {
public:
  struct GaussianSpectrum {
    double sigma;
  };
  struct Modulated {
    std::shared_ptr<const SpectralProfile> base;
    Modulation mod;
    double delta;
    double scale;
  };
  struct Sampled {
    CubicSpline spline;
  };
  // Numerical transform of a radial profile. In 3D: trapezoid rule on a
  // uniform r-grid, spectrally accurate because r F(r) sin(kr) is even and
  // vanishes smoothly at the ends of the support. In 2D: adaptive quadrature
  // per k (r and weight stay empty).
  // Trapezoid nodes r_j = r0 + j h with F~(k) = sum_j weight_j sin(k r_j) / k.
  struct TrapezoidGrid {
    double r0 = 0.0, h = 0.0;
    std::vector<double> weight;
  };
  struct Transformed {
    std::shared_ptr<const RadialProfile> source;
    TrapezoidGrid coarse; // exact for k <= k_max
    TrapezoidGrid fine;   // exact for k <= 2 k_max, used beyond k_max
  };
  struct Zero {};
  using Kind = std::variant<GaussianSpectrum, Modulated, Sampled, Transformed, Zero>;

  static SpectralProfile gaussian(double sigma, int d);
  static SpectralProfile modulated(const SpectralProfile& base, Modulation mod, double delta, double scale = 1.0);
  static SpectralProfile sampled(int d, double k_max, std::vector<double> values, double length_scale,
                                 double radius);
  // k_max <= 0 selects the default for the profile kind.
  static SpectralProfile transformed(const RadialProfile& source, double k_max = 0.0);
  static SpectralProfile zero(int d, double length_scale);

  // Address shared by copies of one transformed spectrum, null otherwise.
  // Lets callers evaluate a spectrum once when several terms reuse it.
  const void* identity() const;

  int dimension() const { return d_; }
  double k_max() const { return k_max_; }
  double length_scale() const { return scale_; }
  // Largest radius the profile reaches; spectra oscillate at most this fast.
  double radius() const { return radius_; }
  const Kind& kind() const { return kind_; }

  double operator()(double k) const;
  // Batch evaluation; same values as operator() up to roundoff.
  void evaluate(const double* k, double* out, std::size_t n) const;

private:
  SpectralProfile(int d, double k_max, double scale, double radius, Kind kind)
      : d_(d), k_max_(k_max), scale_(scale), radius_(radius), kind_(std::move(kind)) {}

  int d_ = 3;
  double k_max_ = 40.0;
  double scale_ = 1.0;
  double radius_ = 0.0;
  Kind kind_;
};

RadialProfile gaussian_profile(double sigma, int d);

// Forward radial Fourier transform with the (2 pi)^{-d/2} convention.
// Analytic descriptors map to analytic spectra; everything else is
// transformed numerically.
SpectralProfile fourier_radial(const RadialProfile& p, double k_max = 0.0);

// Pointwise numerical forward transform by adaptive quadrature.
double fourier_radial_at(const RadialProfile& p, double k, double rel_tol = 1e-10);

struct InverseOptions {
  double r_max = 0.0; // <= 0: chosen from the spectrum's radius
  double h = 0.0;     // <= 0: length_scale/50
  double rel_tol = 1e-10;
  bool force_numeric = false;
};

// Inverse radial transform. Analytic where a closed form is known, otherwise a
// sampled profile built by pointwise quadrature.
RadialProfile inverse_fourier_radial(const SpectralProfile& s, const InverseOptions& opt = {});

// Pointwise numerical inverse transform by adaptive quadrature over [0, k_max].
// The absolute tolerance is rel_tol times the integral of |integrand| at r = 0,
// so values far below the peak are resolved relative to the peak.
double inverse_fourier_radial_at(const SpectralProfile& s, double r, double rel_tol = 1e-10);

} // namespace qfield
