#include "qfield/smearing.hpp"

#include "qfield/errors.hpp"
#include "qfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qfield {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2OverPi = std::sqrt(2.0 / kPi);

void check_dimension(int d) {
  if (d != 2 && d != 3) throw BadParameter("dimension must be 2 or 3, got " + std::to_string(d));
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw BadParameter("sigma must be positive");
}

// (Em - Ep)/r and Em + Ep for Em,p = exp(-(r -+ Delta)^2/sigma^2), stable at r -> 0.
struct ShellTerms {
  double diff_over_r;
  double sum;
};

ShellTerms shell_terms(double r, double delta, double sigma) {
  const double s2 = sigma * sigma;
  const double a = 2.0 * r * delta / s2;
  if (std::abs(a) <= 1.0) {
    const double e = std::exp(-(r * r + delta * delta) / s2);
    const double sinhc = a == 0.0 ? 1.0 : std::sinh(a) / a;
    return {2.0 * e * sinhc * 2.0 * delta / s2, 2.0 * e * std::cosh(a)};
  }
  const double em = std::exp(-(r - delta) * (r - delta) / s2);
  const double ep = std::exp(-(r + delta) * (r + delta) / s2);
  return {(em - ep) / r, em + ep};
}

double shell_value(const RadialProfile::GaussianShell& g, double r) {
  const double s = g.sigma, s2 = s * s, dl = g.delta;
  const double c = 4.0 * std::pow(kPi, 1.5) * s;
  const ShellTerms t = shell_terms(r, dl, s);
  double v = 0.0;
  switch (g.order) {
    case 0: v = t.diff_over_r / c; break;
    case 1: v = (2.0 * t.sum - 2.0 * dl * t.diff_over_r) / (s2 * c); break;
    case 2:
      v = (-2.0 / s2 * t.diff_over_r + 4.0 / (s2 * s2) * ((r * r + dl * dl) * t.diff_over_r - 2.0 * dl * t.sum)) / c;
      break;
    default: throw BadParameter("shell derivative order must be 0, 1 or 2");
  }
  return g.coefficient * v;
}

double smallest_window(const RadialProfile& p) {
  if (const auto* w = std::get_if<RadialProfile::Windowed>(&p.kind())) {
    return std::min(w->window.eps, smallest_window(*w->base));
  }
  return std::numeric_limits<double>::infinity();
}

// Spline through the even extension of samples on [0, x_max]. Radial
// profiles and their spectra are even, so the natural end conditions are
// imposed at +-x_max rather than at the origin.
CubicSpline even_spline(double h, const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> y(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    y[n - 1 + i] = values[i];
    y[n - 1 - i] = values[i];
  }
  return CubicSpline(-h * static_cast<double>(n - 1), h, std::move(y));
}

double modulation(Modulation m, double delta, double k) {
  switch (m) {
    case Modulation::NegDeltaSinc: return -delta * sinc(delta * k);
    case Modulation::Cos: return std::cos(delta * k);
    case Modulation::KSin: return k * std::sin(delta * k);
  }
  return 0.0;
}

} // namespace

double Window::operator()(double r) const {
  const double u = (r - r0) / eps;
  return side == Side::Inner ? 0.5 * std::erfc(u) : 0.5 * std::erfc(-u);
}

RadialProfile RadialProfile::gaussian(double sigma, int d) {
  check_dimension(d);
  check_sigma(sigma);
  return RadialProfile(d, sigma, Gaussian{sigma});
}

RadialProfile RadialProfile::gaussian_shell(double sigma, double delta, int order, double coefficient) {
  check_sigma(sigma);
  if (!(delta >= 0.0)) throw BadParameter("shell radius must be non-negative");
  if (order < 0 || order > 2) throw BadParameter("shell derivative order must be 0, 1 or 2");
  return RadialProfile(3, sigma, GaussianShell{sigma, delta, order, coefficient});
}

RadialProfile RadialProfile::windowed(const RadialProfile& base, const Window& w) {
  if (!(w.r0 > 0.0) || !(w.eps > 0.0)) throw BadParameter("window needs r0 > 0 and eps > 0");
  return RadialProfile(base.d_, base.scale_, Windowed{std::make_shared<const RadialProfile>(base), w});
}

RadialProfile RadialProfile::sampled(int d, double h, std::vector<double> values, double length_scale) {
  check_dimension(d);
  check_sigma(length_scale);
  if (h > length_scale * kDefaultGridFactor * (1.0 + 1e-12)) {
    throw BadParameter("sampled profile spacing exceeds sigma/50");
  }
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (!values.empty() && std::abs(values.back()) > 1e-12 * peak) {
    throw BadParameter("sampled profile domain does not reach the negligible tail");
  }
  return RadialProfile(d, length_scale, Sampled{even_spline(h, values)});
}

RadialProfile RadialProfile::zero(int d, double length_scale) {
  check_dimension(d);
  check_sigma(length_scale);
  return RadialProfile(d, length_scale, Zero{});
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0) r = -r;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return std::exp(-r * r / (k.sigma * k.sigma)) / std::pow(std::sqrt(kPi) * k.sigma, d_);
        } else if constexpr (std::is_same_v<T, GaussianShell>) {
          return shell_value(k, r);
        } else if constexpr (std::is_same_v<T, Windowed>) {
          const double w = k.window(r);
          return w == 0.0 ? 0.0 : w * (*k.base)(r);
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return r > k.spline.x_max() ? 0.0 : k.spline(r);
        } else {
          return 0.0;
        }
      },
      kind_);
}

std::pair<double, double> RadialProfile::support() const {
  return std::visit(
      [&](const auto& k) -> std::pair<double, double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return {0.0, 8.0 * k.sigma};
        } else if constexpr (std::is_same_v<T, GaussianShell>) {
          return {std::max(0.0, k.delta - 8.0 * k.sigma), k.delta + 8.0 * k.sigma};
        } else if constexpr (std::is_same_v<T, Windowed>) {
          auto [lo, hi] = k.base->support();
          if (k.window.side == Window::Side::Inner) {
            hi = std::min(hi, k.window.r0 + 8.0 * k.window.eps);
          } else {
            lo = std::max(lo, k.window.r0 - 8.0 * k.window.eps);
          }
          return {lo, std::max(lo, hi)};
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return {0.0, k.spline.x_max()};
        } else {
          return {0.0, 0.0};
        }
      },
      kind_);
}

SpectralProfile SpectralProfile::gaussian(double sigma, int d) {
  check_dimension(d);
  check_sigma(sigma);
  return SpectralProfile(d, kGaussianKmaxFactor / sigma, sigma, 8.0 * sigma, GaussianSpectrum{sigma});
}

SpectralProfile SpectralProfile::modulated(const SpectralProfile& base, Modulation mod, double delta, double scale) {
  return SpectralProfile(base.d_, base.k_max_, base.scale_, base.radius_ + std::abs(delta),
                         Modulated{std::make_shared<const SpectralProfile>(base), mod, delta, scale});
}

SpectralProfile SpectralProfile::sampled(int d, double k_max, std::vector<double> values, double length_scale,
                                         double radius) {
  check_dimension(d);
  check_sigma(length_scale);
  if (!(k_max > 0.0) || values.size() < 3) throw BadParameter("sampled spectrum needs k_max > 0 and >= 3 values");
  const double h = k_max / static_cast<double>(values.size() - 1);
  return SpectralProfile(d, k_max, length_scale, radius, Sampled{even_spline(h, values)});
}

SpectralProfile SpectralProfile::zero(int d, double length_scale) {
  check_dimension(d);
  check_sigma(length_scale);
  return SpectralProfile(d, kGaussianKmaxFactor / length_scale, length_scale, 0.0, Zero{});
}

SpectralProfile SpectralProfile::transformed(const RadialProfile& source, double k_max) {
  const double scale = source.length_scale();
  const double eps = smallest_window(source);
  if (k_max <= 0.0) k_max = (std::isinf(eps) ? kGaussianKmaxFactor : kWindowedKmaxFactor) / scale;
  const int d = source.dimension();
  auto [lo, hi] = source.support();
  if (!(hi > lo)) return SpectralProfile(d, k_max, scale, 0.0, Zero{});

  Transformed t;
  t.source = std::make_shared<const RadialProfile>(source);
  if (d == 2) {
    // r F(r) J0(kr) is odd in r, so the trapezoid rule from the origin is only
    // second order; 2D spectra go through adaptive quadrature instead.
    return SpectralProfile(d, k_max, scale, hi, std::move(t));
  }

  // Aliasing from the trapezoid rule enters at 2 pi/h - k, where the
  // integrand's spectrum has decayed below double precision once it is more
  // than ~13 widths out. The fine grid extends exactness to 2 k_max so the
  // tail probe of the overlap integrals sees the true spectrum.
  const double band = 13.0 / std::min(scale, eps);
  auto grid = [&](double k_top) {
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) * (k_top + band) / (2.0 * kPi)));
    TrapezoidGrid g;
    g.r0 = lo;
    g.h = (hi - lo) / static_cast<double>(n);
    g.weight.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double r = lo + g.h * static_cast<double>(j);
      const double w = (j == 0 || j == n) ? 0.5 * g.h : g.h;
      g.weight[j] = kSqrt2OverPi * w * r * source(r);
    }
    return g;
  };
  t.coarse = grid(k_max);
  t.fine = grid(2.0 * k_max);
  return SpectralProfile(d, k_max, scale, hi, std::move(t));
}

const void* SpectralProfile::identity() const {
  const auto* t = std::get_if<Transformed>(&kind_);
  return t != nullptr ? t->source.get() : nullptr;
}

namespace {

double trapezoid_direct(const SpectralProfile::TrapezoidGrid& g, double k) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.weight.size(); ++j) {
    const double r = g.r0 + g.h * static_cast<double>(j);
    acc += g.weight[j] * r * sinc(k * r);
  }
  return acc;
}

// sum_j weight_j sin(k r_j)/k with the phase advanced by rotation and
// re-anchored every 64 steps.
double trapezoid_rotated(const SpectralProfile::TrapezoidGrid& g, double k) {
  const double cs = std::cos(k * g.h), sn = std::sin(k * g.h);
  double c = 0.0, s = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < g.weight.size(); ++j) {
    if (j % 64 == 0) {
      const double ph = k * (g.r0 + g.h * static_cast<double>(j));
      c = std::cos(ph);
      s = std::sin(ph);
    }
    acc += g.weight[j] * s;
    const double c2 = c * cs - s * sn;
    s = s * cs + c * sn;
    c = c2;
  }
  return acc / k;
}

} // namespace

double SpectralProfile::operator()(double k) const {
  if (k < 0.0) k = -k;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianSpectrum>) {
          return std::pow(2.0 * kPi, -0.5 * d_) * std::exp(-k * k * s.sigma * s.sigma / 4.0);
        } else if constexpr (std::is_same_v<T, Modulated>) {
          return s.scale * (*s.base)(k)*modulation(s.mod, s.delta, k);
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return k > s.spline.x_max() ? 0.0 : s.spline(k);
        } else if constexpr (std::is_same_v<T, Transformed>) {
          if (d_ == 2) return fourier_radial_at(*s.source, k);
          return trapezoid_direct(k <= k_max_ ? s.coarse : s.fine, k);
        } else {
          return 0.0;
        }
      },
      kind_);
}

void SpectralProfile::evaluate(const double* k, double* out, std::size_t n) const {
  const auto* t = std::get_if<Transformed>(&kind_);
  if (t == nullptr || d_ != 3) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(k[i]);
    return;
  }
  const double r_top = t->coarse.r0 + t->coarse.h * static_cast<double>(t->coarse.weight.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double kk = std::abs(k[i]);
    out[i] = kk * r_top < 1e-2 ? (*this)(kk) : trapezoid_rotated(kk <= k_max_ ? t->coarse : t->fine, kk);
  }
}

RadialProfile gaussian_profile(double sigma, int d) { return RadialProfile::gaussian(sigma, d); }

SpectralProfile fourier_radial(const RadialProfile& p, double k_max) {
  return std::visit(
      [&](const auto& k) -> SpectralProfile {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RadialProfile::Gaussian>) {
          return SpectralProfile::gaussian(k.sigma, p.dimension());
        } else if constexpr (std::is_same_v<T, RadialProfile::GaussianShell>) {
          // d^n/dDelta^n of sin(Delta k)/k times the Gaussian spectrum.
          const SpectralProfile g = SpectralProfile::gaussian(k.sigma, 3);
          switch (k.order) {
            case 0: return SpectralProfile::modulated(g, Modulation::NegDeltaSinc, k.delta, -k.coefficient);
            case 1: return SpectralProfile::modulated(g, Modulation::Cos, k.delta, k.coefficient);
            default: return SpectralProfile::modulated(g, Modulation::KSin, k.delta, -k.coefficient);
          }
        } else if constexpr (std::is_same_v<T, RadialProfile::Zero>) {
          return SpectralProfile::zero(p.dimension(), p.length_scale());
        } else {
          return SpectralProfile::transformed(p, k_max);
        }
      },
      p.kind());
}

double fourier_radial_at(const RadialProfile& p, double k, double rel_tol) {
  auto [lo, hi] = p.support();
  if (!(hi > lo)) return 0.0;
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  std::vector<double> bp;
  const int panels = std::clamp(static_cast<int>((hi - lo) / p.length_scale()), 1, 4000);
  for (int i = 0; i <= panels; ++i) bp.push_back(lo + (hi - lo) * i / panels);
  if (p.dimension() == 3) {
    auto f = [&](double r) { return r * r * p(r) * sinc(k * r); };
    return kSqrt2OverPi * integrate_panels<double>(f, bp, opt).value;
  }
  auto f = [&](double r) { return r * p(r) * bessel_j0(k * r); };
  return integrate_panels<double>(f, bp, opt).value;
}

namespace {

std::vector<double> k_breakpoints(const SpectralProfile& s, double r) {
  const double kmax = s.k_max();
  // Roughly one panel per half oscillation of the integrand.
  const double freq = r + s.radius() + s.length_scale();
  const int panels = std::clamp(static_cast<int>(kmax * freq / kPi), 1, 20000);
  std::vector<double> bp;
  bp.reserve(panels + 1);
  for (int i = 0; i <= panels; ++i) bp.push_back(kmax * i / panels);
  return bp;
}

double inverse_at_abs(const SpectralProfile& s, double r, double rel_tol, double abs_tol) {
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = abs_tol;
  const auto bp = k_breakpoints(s, r);
  if (s.dimension() == 3) {
    auto f = [&](double k) { return k * k * s(k) * sinc(k * r); };
    return kSqrt2OverPi * integrate_panels<double>(f, bp, opt).value;
  }
  auto f = [&](double k) { return k * s(k) * bessel_j0(k * r); };
  return integrate_panels<double>(f, bp, opt).value;
}

double spectral_l1(const SpectralProfile& s, double rel_tol) {
  QuadratureOptions opt;
  opt.rel_tol = std::max(rel_tol, 1e-8);
  const int d = s.dimension();
  auto f = [&](double k) { return std::pow(k, d - 1) * std::abs(s(k)); };
  const double v = integrate_panels<double>(f, k_breakpoints(s, 0.0), opt).value;
  return (d == 3 ? kSqrt2OverPi : 1.0) * v;
}

} // namespace

double inverse_fourier_radial_at(const SpectralProfile& s, double r, double rel_tol) {
  if (std::holds_alternative<SpectralProfile::Zero>(s.kind())) return 0.0;
  return inverse_at_abs(s, r, rel_tol, rel_tol * spectral_l1(s, rel_tol));
}

RadialProfile inverse_fourier_radial(const SpectralProfile& s, const InverseOptions& opt) {
  const int d = s.dimension();
  const double sigma = s.length_scale();
  if (!opt.force_numeric) {
    if (std::holds_alternative<SpectralProfile::Zero>(s.kind())) return RadialProfile::zero(d, sigma);
    if (const auto* g = std::get_if<SpectralProfile::GaussianSpectrum>(&s.kind())) {
      return RadialProfile::gaussian(g->sigma, d);
    }
    if (const auto* m = std::get_if<SpectralProfile::Modulated>(&s.kind()); m != nullptr && d == 3 && m->delta >= 0.0) {
      if (const auto* g = std::get_if<SpectralProfile::GaussianSpectrum>(&m->base->kind())) {
        switch (m->mod) {
          case Modulation::NegDeltaSinc: return RadialProfile::gaussian_shell(g->sigma, m->delta, 0, -m->scale);
          case Modulation::Cos: return RadialProfile::gaussian_shell(g->sigma, m->delta, 1, m->scale);
          case Modulation::KSin: return RadialProfile::gaussian_shell(g->sigma, m->delta, 2, -m->scale);
        }
      }
    }
  }
  const double h = opt.h > 0.0 ? opt.h : sigma * kDefaultGridFactor;
  const double r_max = opt.r_max > 0.0 ? opt.r_max : s.radius() + 2.0 * sigma;
  const auto n = static_cast<std::size_t>(std::ceil(r_max / h));
  std::vector<double> values(n + 1, 0.0);
  if (!std::holds_alternative<SpectralProfile::Zero>(s.kind())) {
    // Tighter than rel_tol so the tabulated tail stays below 1e-12 of the peak.
    const double abs_tol = std::min(opt.rel_tol, 1e-13) * spectral_l1(s, opt.rel_tol);
    for (std::size_t i = 0; i <= n; ++i) values[i] = inverse_at_abs(s, h * static_cast<double>(i), opt.rel_tol, abs_tol);
  }
  return RadialProfile::sampled(d, h, std::move(values), sigma);
}

} // namespace qfield
