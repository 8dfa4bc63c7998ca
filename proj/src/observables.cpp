#include "qfield/observables.hpp"

#include "qfield/errors.hpp"
#include "qfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace qfield {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Solid-angle factor of the radial reduction times the 1/(2 omega) that was
// pulled out of the amplitudes: S_d k^{d-1} / (2k).
double radial_measure(int d, double k) { return d == 3 ? 2.0 * kPi * k : kPi; }

cplx reduced_term(const FieldObservableSpec& t, double fk, double k) {
  const cplx phase = std::exp(-kI * (k * t.time));
  if (t.kind == FieldQuadrature::Phi) return t.coupling * fk * phase;
  return -kI * (k * t.coupling * fk) * phase;
}

void check_same_dimension(const SpectralAmplitude& a, const SpectralAmplitude& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("amplitudes live in different dimensions");
}

} // namespace

FieldObservableSpec FieldObservableSpec::from_profile(FieldQuadrature kind, const RadialProfile& profile, double time,
                                                      double coupling, double k_max) {
  return FieldObservableSpec{kind, fourier_radial(profile, k_max), time, coupling};
}

SpectralAmplitude::SpectralAmplitude(const FieldObservableSpec& term)
    : d_(term.profile.dimension()), k_max_(term.profile.k_max()), scale_(term.profile.length_scale()) {
  if (term.coupling != 0.0 && !std::holds_alternative<SpectralProfile::Zero>(term.profile.kind())) {
    terms_.push_back(term);
  }
}

SpectralAmplitude SpectralAmplitude::zero(int d, double k_max, double length_scale) {
  SpectralAmplitude a;
  a.d_ = d;
  a.k_max_ = k_max;
  a.scale_ = length_scale;
  return a;
}

double SpectralAmplitude::radius() const {
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, t.profile.radius() + std::abs(t.time));
  return r;
}

cplx SpectralAmplitude::reduced(double k) const {
  cplx acc = 0.0;
  for (const auto& t : terms_) acc += reduced_term(t, t.profile(k), k);
  return acc;
}

cplx SpectralAmplitude::operator()(double k) const {
  const double w = std::abs(k);
  return reduced(w) / std::sqrt(2.0 * w);
}

void SpectralAmplitude::reduced_batch(const double* k, cplx* out, std::size_t n) const {
  std::fill(out, out + n, cplx(0.0));
  std::vector<double> fk(n);
  for (const auto& t : terms_) {
    t.profile.evaluate(k, fk.data(), n);
    for (std::size_t i = 0; i < n; ++i) out[i] += reduced_term(t, fk[i], k[i]);
  }
}

SpectralAmplitude& SpectralAmplitude::operator+=(const SpectralAmplitude& o) {
  check_same_dimension(*this, o);
  if (terms_.empty()) {
    k_max_ = o.k_max_;
    scale_ = o.scale_;
  } else if (!o.terms_.empty()) {
    k_max_ = std::max(k_max_, o.k_max_);
  }
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

SpectralAmplitude momentum_amplitude(const FieldObservableSpec& spec) { return SpectralAmplitude(spec); }

cplx overlap_W(const SpectralAmplitude& l, const SpectralAmplitude& m, const OverlapOptions& opt) {
  check_same_dimension(l, m);
  if (l.is_zero() || m.is_zero()) return 0.0;
  const int d = l.dimension();
  const double k_max = std::max(l.k_max(), m.k_max());
  const double scale = std::min(l.length_scale(), m.length_scale());
  auto f = [&](double k) { return radial_measure(d, k) * l.reduced(k) * std::conj(m.reduced(k)); };

  // Infrared panel, then panels of about one radian of the fastest phase.
  std::vector<double> bp{0.0, std::min(1e-3 / scale, k_max)};
  const double freq = l.radius() + m.radius() + scale;
  const int panels = std::clamp(static_cast<int>(k_max * freq), 1, 100000);
  for (int i = 1; i <= panels; ++i) bp.push_back(std::max(bp[1], k_max * i / panels));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  QuadratureOptions q;
  q.rel_tol = opt.rel_tol;
  return integrate_panels<cplx>(f, bp, q).value;
}

cplx gaussian_W_closed_form(int x_l, int z_l, int x_m, int z_m, double sigma, double lambda_phi, double lambda_pi) {
  for (int s : {x_l, z_l, x_m, z_m}) {
    if (s < -1 || s > 1) throw BadParameter("sign variables must be -1, 0 or +1");
  }
  if (!(sigma > 0.0)) throw BadParameter("sigma must be positive");
  const double s2 = sigma * sigma;
  const double re = 4.0 * x_l * x_m * lambda_pi * lambda_pi + 2.0 * z_l * z_m * s2 * lambda_phi * lambda_phi;
  const double im = std::sqrt(2.0 * kPi) * sigma * lambda_phi * lambda_pi * (x_m * z_l - x_l * z_m);
  return cplx(re, im) / (8.0 * kPi * kPi * s2 * s2);
}

cplx commutator_constant(const SpectralAmplitude& phi_amp, const SpectralAmplitude& pi_amp, const OverlapOptions& opt) {
  const cplx w = overlap_W(phi_amp, pi_amp, opt);
  return -0.5 * (w - std::conj(w));
}

cplx wick_exponent(const int* signs, const int* types, int n, const CMatrix& gram) {
  cplx e = 0.0;
  for (int l = 0; l < n; ++l) {
    e -= 0.5 * gram(types[l], types[l]);
    for (int m = l + 1; m < n; ++m) e -= static_cast<double>(signs[l] * signs[m]) * gram(types[l], types[m]);
  }
  return e;
}

cplx wick_expectation(const ExponentString& s, const OverlapOptions& opt) {
  if (s.size() > 8) throw BadParameter("exponent strings are limited to 8 factors");
  if (s.empty()) return 1.0;
  for (const auto& t : s) {
    if (t.amplitude.k_max() != s.front().amplitude.k_max()) {
      throw BadParameter("exponent string mixes amplitudes with different k_max");
    }
    if (t.sign != 1 && t.sign != -1) throw BadParameter("exponent signs must be +1 or -1");
  }
  const int n = static_cast<int>(s.size());
  // Pairwise overlaps, computed once per unordered pair.
  std::vector<cplx> w(n * n);
  for (int l = 0; l < n; ++l)
    for (int m = l; m < n; ++m) {
      w[l * n + m] = overlap_W(s[l].amplitude, s[m].amplitude, opt);
      w[m * n + l] = std::conj(w[l * n + m]);
    }
  cplx e = 0.0;
  for (int l = 0; l < n; ++l) {
    e -= 0.5 * w[l * n + l];
    for (int m = l + 1; m < n; ++m) e -= static_cast<double>(s[l].sign * s[m].sign) * w[l * n + m];
  }
  return std::exp(e);
}

namespace {

struct GramPass {
  CMatrix w;
  CMatrix gauss;
  std::size_t nodes = 0;
};

GramPass gram_pass(const std::vector<SpectralAmplitude>& ops, double a, double b, double h, bool with_ir_panel) {
  const int n = static_cast<int>(ops.size());
  const int d = ops.front().dimension();
  std::vector<double> edges;
  if (with_ir_panel) {
    edges.push_back(a);
    a = std::min(b, a + 1e-3 / ops.front().length_scale());
  }
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h)));
  for (std::size_t i = 0; i <= panels; ++i) edges.push_back(a + (b - a) * static_cast<double>(i) / panels);

  std::vector<double> k, wk, wg;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const auto x = GaussKronrod15::nodes(edges[p], edges[p + 1]);
    const auto kw = GaussKronrod15::kronrod_weights(edges[p], edges[p + 1]);
    const auto gw = GaussKronrod15::gauss_weights(edges[p], edges[p + 1]);
    for (int i = 0; i < 15; ++i) {
      k.push_back(x[i]);
      const double mu = radial_measure(d, x[i]);
      wk.push_back(kw[i] * mu);
      wg.push_back(gw[i] * mu);
    }
  }
  // Spectra shared between terms (Bob's pair reuses F_B2) are evaluated once.
  std::map<const void*, std::vector<double>> shared;
  std::vector<double> scratch(k.size());
  std::vector<std::vector<cplx>> vals(n, std::vector<cplx>(k.size()));
  for (int i = 0; i < n; ++i)
    for (const auto& t : ops[i].terms()) {
      const double* fk = scratch.data();
      if (const void* id = t.profile.identity()) {
        auto [it, fresh] = shared.try_emplace(id);
        if (fresh) {
          it->second.resize(k.size());
          t.profile.evaluate(k.data(), it->second.data(), k.size());
        }
        fk = it->second.data();
      } else {
        t.profile.evaluate(k.data(), scratch.data(), k.size());
      }
      for (std::size_t j = 0; j < k.size(); ++j) vals[i][j] += reduced_term(t, fk[j], k[j]);
    }

  GramPass out{CMatrix(n), CMatrix(n), k.size()};
  for (int l = 0; l < n; ++l)
    for (int m = l; m < n; ++m) {
      cplx sk = 0.0, sg = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) {
        const cplx v = vals[l][j] * std::conj(vals[m][j]);
        sk += wk[j] * v;
        sg += wg[j] * v;
      }
      out.w(l, m) = sk;
      out.w(m, l) = std::conj(sk);
      out.gauss(l, m) = sg;
      out.gauss(m, l) = std::conj(sg);
    }
  for (int l = 0; l < n; ++l) {
    out.w(l, l) = out.w(l, l).real();
    out.gauss(l, l) = out.gauss(l, l).real();
  }
  return out;
}

} // namespace

GramResult gram_matrix(const std::vector<SpectralAmplitude>& ops, const GramOptions& opt) {
  if (ops.empty() || ops.size() > 4) throw BadParameter("gram_matrix takes one to four amplitudes");
  double k_max = opt.k_max;
  double radius = 0.0, scale = ops.front().length_scale();
  for (const auto& o : ops) {
    check_same_dimension(ops.front(), o);
    if (opt.k_max <= 0.0) k_max = std::max(k_max, o.k_max());
    radius = std::max(radius, o.radius());
    scale = std::min(scale, o.length_scale());
  }
  // Products of two amplitudes oscillate at up to twice the largest radius;
  // one 15-point panel comfortably resolves ~8 radians of that phase.
  double h = opt.panel_width > 0.0 ? opt.panel_width : std::min(scale, 8.0 / (2.0 * radius + scale));

  const int n = static_cast<int>(ops.size());
  for (int attempt = 0; attempt < 6; ++attempt, h *= 0.5) {
    const GramPass pass = gram_pass(ops, 0.0, k_max, h, true);
    double diag = 0.0;
    for (int l = 0; l < n; ++l) diag = std::max(diag, pass.w(l, l).real());
    const double err = (pass.w - pass.gauss).max_abs();
    const double target = opt.rel_tol * std::max(diag, 1e-300);
    if (diag == 0.0 || err <= target) {
      GramResult r{pass.w, err, 0.0, pass.nodes};
      // Mass beyond the cut-off, sampled on a coarser grid.
      if (diag > 0.0) {
        const GramPass tail = gram_pass(ops, k_max, 2.0 * k_max, 4.0 * h, false);
        for (int l = 0; l < n; ++l) r.tail_estimate = std::max(r.tail_estimate, std::abs(tail.w(l, l).real()));
        if (r.tail_estimate > target) {
          std::ostringstream os;
          os << "spectral mass beyond k_max = " << k_max << " is " << r.tail_estimate
             << ", above the tolerance " << target << "; increase k_max";
          throw QuadratureFailure(os.str(), r.tail_estimate);
        }
      }
      return r;
    }
    if (attempt == 5) {
      std::ostringstream os;
      os << "Gram matrix did not reach tolerance " << target << " (estimate " << err << ")";
      throw QuadratureFailure(os.str(), err);
    }
  }
  throw QuadratureFailure("unreachable", 0.0);
}

double gamma_rule_lambda_pi(int d, double sigma, double lambda_phi) {
  if (!(sigma > 0.0)) throw BadParameter("sigma must be positive");
  if (!(lambda_phi > 0.0)) throw BadParameter("the gamma rule needs lambda_phi > 0");
  if (d != 2 && d != 3) throw BadParameter("dimension must be 2 or 3");
  return (kPi / 4.0) * std::pow(2.0 * kPi, 0.5 * d) * std::pow(sigma, d) / lambda_phi;
}

ConditionReport check_conditions(int d, double sigma, double lambda_phi, double lambda_pi) {
  if (!(sigma > 0.0)) throw BadParameter("sigma must be positive");
  if (d != 2 && d != 3) throw BadParameter("dimension must be 2 or 3");
  // Integrals of |F_A~|^2 and omega |F_A~|^2 / 2 for the Gaussian.
  const double norm2 = std::pow(2.0 * kPi, -0.5 * d) * std::pow(sigma, -d);
  const double pi_var = d == 3 ? 1.0 / (2.0 * kPi * kPi * std::pow(sigma, 4))
                               : std::sqrt(2.0 * kPi) / (8.0 * kPi * std::pow(sigma, 3));
  ConditionReport r;
  r.gamma_a = lambda_phi * lambda_pi * norm2;
  // lambda_pi cancels between gamma_a^2 and <pi_A^2>.
  r.strong_coupling_ratio = lambda_phi * lambda_phi * norm2 * norm2 / pi_var;
  const double turns = (r.gamma_a - kPi / 4.0) / (2.0 * kPi);
  r.fine_tuned = std::abs(turns - std::round(turns)) * 2.0 * kPi <= 1e-12;
  r.strong_coupling = r.strong_coupling_ratio >= kStrongCouplingThreshold;
  return r;
}

} // namespace qfield
