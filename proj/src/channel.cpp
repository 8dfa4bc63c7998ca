#include "qfield/channel.hpp"

#include "qfield/errors.hpp"
#include "qfield/parallel.hpp"
#include "qfield/propagation.hpp"

#include <cmath>
#include <string>

namespace qfield {

namespace {

int basis_index(int sign) { return sign > 0 ? 0 : 1; }

int slot_sign(unsigned pattern, int slot) { return (pattern >> slot) & 1u ? -1 : 1; }

bool gaussian_full_3d(const ChannelConfig& c) { return c.d == 3 && c.bob.variant != BobVariant::TruncatedInner &&
                                                       c.bob.variant != BobVariant::TruncatedOuter; }

// Per sign pattern, the C-side factor (1/2) sum_jk <k|A|j> |-j><-k| and Bob's
// factor, both of which depend only on the signs.
struct QubitFactors {
  std::array<CMatrix, 256> c_side;
  std::array<CMatrix, 256> bob;
};

const QubitFactors& qubit_factors() {
  static const QubitFactors f = [] {
    QubitFactors q;
    const CMatrix plus_y = qubit::projector_y(1);
    for (unsigned p = 0; p < 256; ++p) {
      const int z1 = slot_sign(p, 0), x1 = slot_sign(p, 1), x2 = slot_sign(p, 2), z2 = slot_sign(p, 3);
      const int z3 = slot_sign(p, 4), x3 = slot_sign(p, 5), x4 = slot_sign(p, 6), z4 = slot_sign(p, 7);
      const CMatrix a = qubit::projector_z(-z1) * qubit::projector_x(-x1) * qubit::projector_x(x4) *
                        qubit::projector_z(z4);
      CMatrix c(2);
      for (int j : {1, -1})
        for (int k : {1, -1})
          c(basis_index(-j), basis_index(-k)) += 0.5 * a(basis_index(k), basis_index(j));
      q.c_side[p] = c;
      q.bob[p] = qubit::projector_z(-z3) * qubit::projector_x(-x3) * plus_y * qubit::projector_x(x2) *
                 qubit::projector_z(z2);
    }
    return q;
  }();
  return f;
}

SpectralAmplitude field_term(FieldQuadrature kind, const SpectralProfile& s, double time) {
  FieldObservableSpec spec;
  spec.kind = kind;
  spec.profile = s;
  spec.time = time;
  spec.coupling = 1.0;
  return SpectralAmplitude(spec);
}

// Bob's pair from three spectra: x = phi[f3] + pi[f2], z = phi[f2] + pi[f1].
void bob_pair(ChannelOperators& ops, const SpectralProfile& f1, const SpectralProfile& f2,
              const SpectralProfile& f3, double t) {
  ops.bob_x = field_term(FieldQuadrature::Phi, f3, t) + field_term(FieldQuadrature::Pi, f2, t);
  ops.bob_z = field_term(FieldQuadrature::Phi, f2, t) + field_term(FieldQuadrature::Pi, f1, t);
}

} // namespace

void ChannelConfig::validate() const {
  if (d != 2 && d != 3) throw BadParameter("dimension must be 2 or 3");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw BadParameter("sigma must be positive");
  if (!std::isfinite(lambda_phi)) throw BadParameter("lambda_phi must be finite");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw BadParameter("delta must be non-negative");
  if (lambda_pi && !std::isfinite(*lambda_pi)) throw BadParameter("lambda_pi must be finite");
  if (!lambda_pi && !(lambda_phi > 0.0))
    throw BadParameter("lambda_phi must be positive when lambda_pi follows the gamma rule");
  if (!(rel_tol > 0.0)) throw BadParameter("rel_tol must be positive");
  if (bob.variant == BobVariant::TruncatedInner || bob.variant == BobVariant::TruncatedOuter) {
    if (d != 3) throw BadParameter("truncated Bobs are available in 3D only");
    if (!(bob.r0 > 0.0) || !(bob.eps > 0.0)) throw BadParameter("truncation needs r0 > 0 and eps > 0");
  }
}

double ChannelConfig::resolved_lambda_pi() const {
  return lambda_pi ? *lambda_pi : gamma_rule_lambda_pi(d, sigma, lambda_phi);
}

ChannelOperators unit_operators(const ChannelConfig& config) {
  config.validate();
  const int d = config.d;
  const double s = config.sigma;
  const bool windowed =
      config.bob.variant == BobVariant::TruncatedInner || config.bob.variant == BobVariant::TruncatedOuter;
  double k_max = config.k_max;
  if (k_max <= 0.0) k_max = (windowed ? kWindowedKmaxFactor : kGaussianKmaxFactor) / s;

  ChannelOperators ops;
  SpectralProfile fa = fourier_radial(RadialProfile::gaussian(s, d), k_max);
  ops.alice_phi = field_term(FieldQuadrature::Phi, fa, 0.0);
  ops.alice_pi = field_term(FieldQuadrature::Pi, fa, 0.0);

  switch (config.bob.variant) {
  case BobVariant::Full: {
    BobSpectra b = bob_spectra(fa, config.delta);
    bob_pair(ops, b.fb1, b.fb2, b.fb3, config.delta);
    break;
  }
  case BobVariant::TruncatedInner:
  case BobVariant::TruncatedOuter: {
    const Window w{config.bob.variant == BobVariant::TruncatedInner ? Window::Side::Inner : Window::Side::Outer,
                   config.bob.r0, config.bob.eps};
    BobProfiles p = bob_profiles_3d(s, config.delta);
    auto cut = [&](const RadialProfile& f) {
      return SpectralProfile::transformed(RadialProfile::windowed(f, w), k_max);
    };
    bob_pair(ops, cut(p.fb1), cut(p.fb2), cut(p.fb3), config.delta);
    break;
  }
  case BobVariant::Rank1Only: {
    BobSpectra b = bob_spectra(fa, config.delta);
    ops.bob_x = SpectralAmplitude::zero(d, k_max, s);
    ops.bob_z = field_term(FieldQuadrature::Phi, b.fb2, config.delta) +
                field_term(FieldQuadrature::Pi, b.fb1, config.delta);
    break;
  }
  case BobVariant::None:
    ops.bob_x = SpectralAmplitude::zero(d, k_max, s);
    ops.bob_z = SpectralAmplitude::zero(d, k_max, s);
    break;
  }
  return ops;
}

ExponentString ExponentTemplate::instantiate(const std::array<int, 8>& signs) const {
  const std::array<const SpectralAmplitude*, 4> by_index = {&ops.alice_phi, &ops.alice_pi, &ops.bob_x,
                                                            &ops.bob_z};
  ExponentString s;
  for (int slot = 0; slot < 8; ++slot) s.push_back({signs[slot], *by_index[kSlotOperators[slot]]});
  return s;
}

ExponentTemplate build_exponent_string(const ChannelConfig& config) {
  ExponentTemplate t;
  t.ops = unit_operators(config);
  const double lphi = config.lambda_phi, lpi = config.resolved_lambda_pi();
  auto scaled = [](const SpectralAmplitude& a, double lam) {
    SpectralAmplitude out = SpectralAmplitude::zero(a.dimension(), a.k_max(), a.length_scale());
    if (lam == 0.0) return out;
    for (FieldObservableSpec term : a.terms()) {
      term.coupling *= lam;
      out += SpectralAmplitude(term);
    }
    return out;
  };
  t.ops.alice_phi = scaled(t.ops.alice_phi, lphi);
  t.ops.alice_pi = scaled(t.ops.alice_pi, lpi);
  t.ops.bob_x = scaled(t.ops.bob_x, lpi);
  t.ops.bob_z = scaled(t.ops.bob_z, lphi);

  const QubitFactors& q = qubit_factors();
  t.terms.reserve(1024);
  for (unsigned p = 0; p < 256; ++p) {
    std::array<int, 8> signs{};
    for (int slot = 0; slot < 8; ++slot) signs[slot] = slot_sign(p, slot);
    const CMatrix a = qubit::projector_z(-signs[0]) * qubit::projector_x(-signs[1]) *
                      qubit::projector_x(signs[6]) * qubit::projector_z(signs[7]);
    for (int j : {1, -1})
      for (int k : {1, -1}) t.terms.push_back({signs, j, k, a(basis_index(k), basis_index(j)), q.bob[p]});
  }
  return t;
}

CMatrix unit_gram(const ChannelConfig& config, GramRoute route) {
  config.validate();
  const bool closed_ok = gaussian_full_3d(config);
  if (route == GramRoute::ClosedForm && !closed_ok)
    throw BadParameter("closed-form overlaps need a 3D Gaussian smearing with an untruncated Bob");
  if (route == GramRoute::ClosedForm || (route == GramRoute::Auto && closed_ok)) {
    // Bob's X and Z equal Alice's pi and phi as operators.
    const std::array<int, 4> xs = {0, 1, 1, 0}, zs = {1, 0, 0, 1};
    std::array<bool, 4> present = {true, true, config.bob.variant == BobVariant::Full,
                                   config.bob.variant != BobVariant::None};
    CMatrix g(4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (present[a] && present[b])
          g(a, b) = gaussian_W_closed_form(xs[a], zs[a], xs[b], zs[b], config.sigma, 1.0, 1.0);
    return g;
  }
  GramOptions opt;
  opt.k_max = config.k_max;
  opt.rel_tol = config.rel_tol;
  return gram_matrix(unit_operators(config).as_vector(), opt).w;
}

CMatrix scale_gram(const CMatrix& unit, double lambda_phi, double lambda_pi) {
  const std::array<double, 4> lam = {lambda_phi, lambda_pi, lambda_pi, lambda_phi};
  CMatrix g(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) g(a, b) = unit(a, b) * (lam[a] * lam[b]);
  return g;
}

std::array<cplx, 256> eight_slot_wick_values(const CMatrix& gram) {
  std::array<cplx, 256> out{};
  for (unsigned p = 0; p < 256; ++p) {
    std::array<int, 8> signs{};
    for (int slot = 0; slot < 8; ++slot) signs[slot] = slot_sign(p, slot);
    out[p] = std::exp(wick_exponent(signs.data(), kSlotOperators.data(), 8, gram));
  }
  return out;
}

CMatrix assemble_rho_cb(const CMatrix& gram) {
  const QubitFactors& q = qubit_factors();
  const auto wick = eight_slot_wick_values(gram);
  CMatrix rho(4);
  for (unsigned p = 0; p < 256; ++p)
    if (wick[p] != 0.0) rho += kron(q.c_side[p], q.bob[p]) * wick[p];
  return rho;
}

namespace {

std::array<cplx, 256> merged_values(const MergedOverlap& w, cplx c_const) {
  std::array<cplx, 256> out{};
  for (unsigned p = 0; p < 256; ++p) {
    std::array<int, 4> x{}, z{};
    // Pair i merges slots (2i, 2i+1); the Alice pairs list z before x.
    x[0] = slot_sign(p, 1), z[0] = slot_sign(p, 0);
    x[1] = slot_sign(p, 2), z[1] = slot_sign(p, 3);
    x[2] = slot_sign(p, 5), z[2] = slot_sign(p, 4);
    x[3] = slot_sign(p, 6), z[3] = slot_sign(p, 7);
    cplx e = c_const * double(x[0] * z[0] - x[1] * z[1] + x[2] * z[2] - x[3] * z[3]);
    for (int l = 0; l < 4; ++l) {
      e -= 0.5 * w(x[l], z[l], x[l], z[l]);
      for (int m = l + 1; m < 4; ++m) e -= w(x[l], z[l], x[m], z[m]);
    }
    out[p] = std::exp(e);
  }
  return out;
}

MergedOverlap gaussian_overlap(double sigma, double lambda_phi, double lambda_pi) {
  return [=](int xl, int zl, int xm, int zm) {
    return gaussian_W_closed_form(xl, zl, xm, zm, sigma, lambda_phi, lambda_pi);
  };
}

cplx gaussian_c(double sigma, double lambda_phi, double lambda_pi) {
  const cplx w_phipi = gaussian_W_closed_form(0, 1, 1, 0, sigma, lambda_phi, lambda_pi);
  return -0.5 * (w_phipi - std::conj(w_phipi));
}

} // namespace

CMatrix assemble_rho_cb_merged(const MergedOverlap& w, cplx c_const) {
  const QubitFactors& q = qubit_factors();
  const auto vals = merged_values(w, c_const);
  CMatrix rho(4);
  for (unsigned p = 0; p < 256; ++p)
    if (vals[p] != 0.0) rho += kron(q.c_side[p], q.bob[p]) * vals[p];
  return rho;
}

CMatrix rho_cb_merged_closed_form(double sigma, double lambda_phi, double lambda_pi) {
  return assemble_rho_cb_merged(gaussian_overlap(sigma, lambda_phi, lambda_pi),
                                gaussian_c(sigma, lambda_phi, lambda_pi));
}

std::array<cplx, 256> merged_wick_values(double sigma, double lambda_phi, double lambda_pi) {
  return merged_values(gaussian_overlap(sigma, lambda_phi, lambda_pi), gaussian_c(sigma, lambda_phi, lambda_pi));
}

DensityMatrix validated_state(const CMatrix& m) {
  try {
    return DensityMatrix(m);
  } catch (const NotHermitian& e) {
    throw InvalidState(std::string("assembled rho_CB is not Hermitian: ") + e.what());
  }
}

double worst_defect(const CMatrix& m) {
  const StateDefects s = state_defects(m);
  return std::max({s.hermiticity, s.trace, -s.min_eigenvalue, 0.0});
}

ChannelResult rho_cb(const ChannelConfig& config, GramRoute route) {
  const double lpi = config.resolved_lambda_pi();
  const CMatrix g = scale_gram(unit_gram(config, route), config.lambda_phi, lpi);
  DensityMatrix rho = validated_state(assemble_rho_cb(g));
  const double ic = coherent_information(rho);
  ConditionReport cond{};
  if (config.lambda_phi > 0.0) cond = check_conditions(config.d, config.sigma, config.lambda_phi, lpi);
  return {std::move(rho), ic, cond, g};
}

double coherent_info_of(const ChannelConfig& config) { return rho_cb(config).coherent_info; }

std::vector<CapacityRow> capacity_sweep(const std::vector<double>& lambda_grid, const ChannelConfig& base,
                                        int jobs) {
  std::vector<CapacityRow> rows(lambda_grid.size());
  parallel_for(lambda_grid.size(), jobs, [&](std::size_t i) {
    ChannelConfig c = base;
    c.lambda_phi = lambda_grid[i] * base.sigma;
    c.lambda_pi.reset();
    const ChannelResult r = rho_cb(c);
    rows[i] = {lambda_grid[i], r.coherent_info, std::max(0.0, r.coherent_info), worst_defect(r.rho_cb.matrix())};
  });
  return rows;
}

std::map<double, std::vector<BroadcastRow>> broadcast_sweep(const std::vector<double>& r0_grid,
                                                             const std::vector<double>& lambdas,
                                                             const ChannelConfig& base, int jobs) {
  for (double lam : lambdas)
    if (!(lam > 0.0)) throw BadParameter("broadcast couplings must be positive");
  std::vector<std::vector<BroadcastRow>> per_r0(r0_grid.size());
  parallel_for(r0_grid.size(), jobs, [&](std::size_t i) {
    ChannelConfig inner = base, outer = base;
    inner.bob = BobSpec::inner(r0_grid[i], base.bob.eps);
    outer.bob = BobSpec::outer(r0_grid[i], base.bob.eps);
    inner.lambda_phi = outer.lambda_phi = lambdas.front() * base.sigma;
    const CMatrix g1 = unit_gram(inner, GramRoute::Quadrature);
    const CMatrix g2 = unit_gram(outer, GramRoute::Quadrature);
    for (double lam : lambdas) {
      const double lphi = lam * base.sigma;
      const double lpi = gamma_rule_lambda_pi(base.d, base.sigma, lphi);
      const DensityMatrix rho1 = validated_state(assemble_rho_cb(scale_gram(g1, lphi, lpi)));
      const DensityMatrix rho2 = validated_state(assemble_rho_cb(scale_gram(g2, lphi, lpi)));
      per_r0[i].push_back({r0_grid[i], coherent_information(rho1), coherent_information(rho2),
                           std::max(worst_defect(rho1.matrix()), worst_defect(rho2.matrix()))});
    }
  });
  std::map<double, std::vector<BroadcastRow>> out;
  for (std::size_t l = 0; l < lambdas.size(); ++l)
    for (std::size_t i = 0; i < r0_grid.size(); ++i) out[lambdas[l]].push_back(per_r0[i][l]);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw BadParameter("invalid logarithmic grid");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = points == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  g.front() = lo;
  if (points > 1) g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (!(hi >= lo) || points < 1) throw BadParameter("invalid linear grid");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  return g;
}

} // namespace qfield
