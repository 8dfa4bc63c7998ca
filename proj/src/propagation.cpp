#include "qfield/propagation.hpp"

#include "qfield/errors.hpp"
#include "qfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qfield {

namespace {

constexpr double kPi = std::numbers::pi;

void check_inputs(double sigma, double delta) {
  if (!(sigma > 0.0)) throw BadParameter("sigma must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw BadParameter("delta must be finite and non-negative");
}

// exp(-x) I0(x) for x >= 0.
double bessel_i0_scaled(double x) {
  if (x < 30.0) return std::exp(-x) * std::cyl_bessel_i(0.0, x);
  // Asymptotic series; all terms positive, truncated well before divergence.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

double resolve_r_max(const ProfileGridOptions& opt, double sigma, double delta) {
  return opt.r_max > 0.0 ? opt.r_max : delta + 10.0 * sigma;
}

double resolve_h(const ProfileGridOptions& opt, double sigma) {
  return opt.h > 0.0 ? opt.h : sigma * kDefaultGridFactor;
}

} // namespace

BobSpectra bob_spectra(const SpectralProfile& fa, double delta) {
  if (!std::isfinite(delta)) throw BadParameter("delta must be finite");
  return BobSpectra{SpectralProfile::modulated(fa, Modulation::NegDeltaSinc, delta),
                    SpectralProfile::modulated(fa, Modulation::Cos, delta),
                    SpectralProfile::modulated(fa, Modulation::KSin, delta)};
}

BobProfiles bob_profiles_3d(double sigma, double delta) {
  check_inputs(sigma, delta);
  return BobProfiles{RadialProfile::gaussian_shell(sigma, delta, 0, -1.0),
                     RadialProfile::gaussian_shell(sigma, delta, 1, 1.0),
                     RadialProfile::gaussian_shell(sigma, delta, 2, -1.0)};
}

double bob_fb1_2d_value(double sigma, double delta, double r, double rel_tol) {
  check_inputs(sigma, delta);
  if (delta == 0.0) return 0.0;
  const double s2 = sigma * sigma;
  r = std::abs(r);
  // Angular average of the Gaussian over the circle |y| = rho about x,
  // written with the scaled Bessel function so nothing overflows.
  auto g = [&](double rho) {
    return -rho * std::exp(-(r - rho) * (r - rho) / s2) * bessel_i0_scaled(2.0 * r * rho / s2) / (kPi * s2);
  };
  return integrate_inverse_sqrt_endpoint(g, delta, rel_tol);
}

RadialProfile bob_profile_2d_fb1(double sigma, double delta, const ProfileGridOptions& opt) {
  check_inputs(sigma, delta);
  const double h = resolve_h(opt, sigma);
  const auto n = static_cast<std::size_t>(std::ceil(resolve_r_max(opt, sigma, delta) / h));
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = bob_fb1_2d_value(sigma, delta, h * static_cast<double>(i), opt.rel_tol);
  return RadialProfile::sampled(2, h, std::move(v), sigma);
}

BobProfiles bob_profiles_2d_numeric(double sigma, double delta, const ProfileGridOptions& opt) {
  check_inputs(sigma, delta);
  const BobSpectra s = bob_spectra(SpectralProfile::gaussian(sigma, 2), delta);
  InverseOptions io;
  io.r_max = resolve_r_max(opt, sigma, delta);
  io.h = resolve_h(opt, sigma);
  io.rel_tol = opt.rel_tol;
  io.force_numeric = true;
  return BobProfiles{inverse_fourier_radial(s.fb1, io), inverse_fourier_radial(s.fb2, io),
                     inverse_fourier_radial(s.fb3, io)};
}

PropagationResult propagate_gaussian(int d, double sigma, double delta, const ProfileGridOptions& opt) {
  check_inputs(sigma, delta);
  if (d == 3) {
    return PropagationResult{bob_spectra(SpectralProfile::gaussian(sigma, 3), delta), bob_profiles_3d(sigma, delta),
                             delta};
  }
  if (d == 2) {
    return PropagationResult{bob_spectra(SpectralProfile::gaussian(sigma, 2), delta),
                             bob_profiles_2d_numeric(sigma, delta, opt), delta};
  }
  throw BadParameter("dimension must be 2 or 3");
}

double shell_mass_fraction(const RadialProfile& f, double center, double half_width, double rel_tol) {
  const int d = f.dimension();
  auto [lo, hi] = f.support();
  // Extend past the nominal support so the far tail is counted too.
  hi += 4.0 * f.length_scale();
  if (!(hi > lo)) return 0.0;
  auto mass = [&](double r) { return (d == 3 ? 4.0 * kPi * r * r : 2.0 * kPi * r) * std::abs(f(r)); };
  const double a = std::clamp(center - half_width, lo, hi);
  const double b = std::clamp(center + half_width, lo, hi);
  QuadratureOptions q;
  q.rel_tol = rel_tol;
  auto piece = [&](double x0, double x1) {
    if (!(x1 > x0)) return 0.0;
    std::vector<double> bp;
    const int panels = std::clamp(static_cast<int>((x1 - x0) / f.length_scale()), 1, 10000);
    for (int i = 0; i <= panels; ++i) bp.push_back(x0 + (x1 - x0) * i / panels);
    return integrate_panels<double>(mass, bp, q).value;
  };
  const double inside = piece(a, b);
  const double outside = piece(lo, a) + piece(b, hi);
  const double total = inside + outside;
  return total > 0.0 ? inside / total : 0.0;
}

} // namespace qfield
