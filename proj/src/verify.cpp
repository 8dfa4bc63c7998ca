#include "qfield/verify.hpp"

#include "qfield/channel.hpp"
#include "qfield/errors.hpp"
#include "qfield/propagation.hpp"
#include "qfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

namespace qfield {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

SuiteResult bounded(std::string name, std::string module, double worst, double tol, std::string detail = {}) {
  return {std::move(name), std::move(module), worst <= tol, worst, tol, std::move(detail)};
}

CMatrix mix(const CMatrix& a, const CMatrix& b, double lam) { return a * cplx(lam) + b * cplx(1.0 - lam); }

double peak_abs(const RadialProfile& f, double r_max, int n = 4000) {
  double m = 0.0;
  for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(f(r_max * i / n)));
  return m;
}

double measure(int d, double r) { return d == 3 ? 4.0 * kPi * r * r : 2.0 * kPi * r; }

// qmath

SuiteResult entropy_axioms(const VerifyOptions&) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const DensityMatrix c = random_density_matrix(2, 2 * seed), b = random_density_matrix(2, 2 * seed + 1);
    const DensityMatrix cb(kron(c.matrix(), b.matrix()));
    worst = std::max(worst, std::abs(von_neumann_entropy(cb) - von_neumann_entropy(c) - von_neumann_entropy(b)));
    worst = std::max(worst, -von_neumann_entropy(cb));
  }
  return bounded("entropy_axioms", "qmath", worst, 1e-9, "S >= 0 and additivity on 200 random products");
}

SuiteResult concavity(const VerifyOptions&) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const DensityMatrix r1 = random_density_matrix(4, rng());
    const DensityMatrix r2 = random_density_matrix(4, rng());
    const double lam = u(rng);
    const DensityMatrix m(mix(r1.matrix(), r2.matrix(), lam));
    const double gap = lam * conditional_entropy(r1) + (1.0 - lam) * conditional_entropy(r2) - conditional_entropy(m);
    worst = std::max(worst, gap);
  }
  return bounded("conditional_entropy_concavity", "qmath", worst, 1e-9, "1000 random triples");
}

SuiteResult separability(const VerifyOptions&) {
  double worst = -2.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    worst = std::max(worst, coherent_information(random_separable_state(1 + static_cast<int>(seed % 6), seed)));
  return bounded("separability_bound", "qmath", worst, 1e-9, "max I_c over 1000 random separable states");
}

SuiteResult eigen_residuals(const VerifyOptions&) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const DensityMatrix r = random_density_matrix(seed % 2 ? 4 : 2, seed);
    const EigenSystem e = hermitian_eigensystem(r.matrix());
    const int n = r.dim();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        cplx av = 0.0;
        for (int m = 0; m < n; ++m) av += r.matrix()(i, m) * e.vectors(m, j);
        worst = std::max(worst, std::abs(av - e.values[j] * e.vectors(i, j)));
      }
  }
  return bounded("eigen_residuals", "qmath", worst, 1e-10, "|A v - lambda v| over 500 random states");
}

// smearing

double sup_rel(const RadialProfile& a, const RadialProfile& b, double r_max, int n) {
  double err = 0.0, peak = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = r_max * i / n;
    err = std::max(err, std::abs(a(r) - b(r)));
    peak = std::max(peak, std::abs(b(r)));
  }
  return err / peak;
}

SuiteResult round_trip(const VerifyOptions&) {
  double worst = 0.0;
  for (int d : {2, 3}) {
    const auto g = gaussian_profile(1.0, d);
    InverseOptions io;
    io.force_numeric = true;
    worst = std::max(worst, sup_rel(inverse_fourier_radial(fourier_radial(g), io), g, 8.0, 801));
  }
  for (int order = 0; order <= 2; ++order) {
    const auto shell = RadialProfile::gaussian_shell(1.0, 4.0, order);
    InverseOptions io;
    io.force_numeric = true;
    io.h = 0.01;
    worst = std::max(worst, sup_rel(inverse_fourier_radial(fourier_radial(shell), io), shell, 12.0, 801));
  }
  return bounded("transform_round_trip", "smearing", worst, 1e-8, "Gaussians in 2D and 3D, three 3D shells");
}

SuiteResult parseval(const VerifyOptions&) {
  double worst = 0.0;
  auto check = [&](const RadialProfile& p) {
    const int d = p.dimension();
    const auto s = fourier_radial(p);
    auto [lo, hi] = p.support();
    QuadratureOptions q;
    const double xs = integrate<double>([&](double r) { return measure(d, r) * p(r) * p(r); }, lo, hi, q).value;
    const double ks =
        integrate<double>([&](double k) { return measure(d, k) * s(k) * s(k); }, 0.0, s.k_max(), q).value;
    worst = std::max(worst, std::abs(xs - ks) / xs);
  };
  check(gaussian_profile(1.0, 3));
  check(gaussian_profile(0.5, 2));
  for (int order = 0; order <= 2; ++order) check(RadialProfile::gaussian_shell(1.0, 6.0, order));
  check(RadialProfile::windowed(RadialProfile::gaussian_shell(1.0, 6.0, 1), Window{Window::Side::Inner, 6.0, 0.1}));
  return bounded("parseval", "smearing", worst, 1e-8, "relative mismatch of the two L2 norms");
}

SuiteResult oscillatory(const VerifyOptions& opt) {
  const auto s = SpectralProfile::modulated(SpectralProfile::gaussian(1.0, 3), Modulation::Cos, 10.0);
  const auto exact = RadialProfile::gaussian_shell(1.0, 10.0, 1);
  const double peak = peak_abs(exact, 20.0);
  double worst = 0.0;
  for (double r : {0.0, 2.5, 5.0, 9.0, 9.7, 10.0, 10.4, 12.0, 15.0})
    worst = std::max(worst, std::abs(inverse_fourier_radial_at(s, r, opt.rel_tol) - exact(r)) / peak);
  return bounded("oscillatory_quadrature", "smearing", worst, opt.rel_tol,
                 "Gaussian x cos(10 k) inverse against its closed form, relative to peak");
}

// observables

SpectralAmplitude alice_combo(int x, int z, double sigma, double lphi, double lpi) {
  const auto fa = SpectralProfile::gaussian(sigma, 3);
  SpectralAmplitude a = SpectralAmplitude::zero(3, fa.k_max(), sigma);
  if (z != 0) a += SpectralAmplitude({FieldQuadrature::Phi, fa, 0.0, z * lphi});
  if (x != 0) a += SpectralAmplitude({FieldQuadrature::Pi, fa, 0.0, x * lpi});
  return a;
}

SuiteResult conjugate_symmetry(const VerifyOptions& opt) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    SpectralAmplitude l = alice_combo(1, 1, 1.0, u(rng), u(rng));
    SpectralAmplitude m = SpectralAmplitude({FieldQuadrature::Phi, SpectralProfile::gaussian(0.8, 3), u(rng), u(rng)});
    const cplx a = overlap_W(l, m, {opt.rel_tol}), b = overlap_W(m, l, {opt.rel_tol});
    worst = std::max(worst, std::abs(a - std::conj(b)) / std::max(1e-300, std::abs(a)));
  }
  return bounded("conjugate_symmetry", "observables", worst, 1e-12, "W_lm = conj W_ml on 10 random pairs");
}

SuiteResult positivity(const VerifyOptions& opt) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ExponentString s;
    for (int j = 0; j < 5; ++j) {
      SpectralAmplitude a({FieldQuadrature::Phi, SpectralProfile::gaussian(1.0, 3), u(rng), u(rng)});
      a += SpectralAmplitude({FieldQuadrature::Pi, SpectralProfile::gaussian(1.0, 3), u(rng), u(rng)});
      worst = std::max(worst, -overlap_W(a, a, {opt.rel_tol}).real());
      s.push_back({j % 2 ? 1 : -1, a});
    }
    worst = std::max(worst, std::abs(wick_expectation(s, {opt.rel_tol})) - 1.0);
  }
  return bounded("positivity", "observables", worst, 1e-10, "Re W_ll >= 0 and |Wick| <= 1 on 20 strings");
}

SuiteResult closed_form(const VerifyOptions&) {
  double worst = 0.0;
  for (double ratio : {1.0, 10.0, 100.0}) {
    const double lphi = ratio, lpi = gamma_rule_lambda_pi(3, 1.0, lphi);
    for (int xl : {1, -1})
      for (int zl : {1, -1})
        for (int xm : {1, -1})
          for (int zm : {1, -1}) {
            const cplx c = gaussian_W_closed_form(xl, zl, xm, zm, 1.0, lphi, lpi);
            const cplx q = overlap_W(alice_combo(xl, zl, 1.0, lphi, lpi), alice_combo(xm, zm, 1.0, lphi, lpi));
            worst = std::max(worst, std::abs(c - q) / std::abs(c));
          }
  }
  return bounded("closed_form_vs_quadrature", "observables", worst, 1e-8, "16 sign patterns x 3 coupling ratios");
}

SuiteResult bch(const VerifyOptions& opt) {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ChannelConfig c;
    c.sigma = 0.5 + 1.5 * u(rng);
    c.lambda_phi = c.sigma * std::pow(10.0, -1.0 + 3.0 * u(rng));
    c.lambda_pi = std::pow(10.0, -1.0 + 2.0 * u(rng));
    c.delta = 10.0 * u(rng);
    c.rel_tol = opt.rel_tol;
    CMatrix g = scale_gram(unit_gram(c, GramRoute::Quadrature), c.lambda_phi, *c.lambda_pi);
    if (opt.gram_mutator) opt.gram_mutator(g);
    const auto eight = eight_slot_wick_values(g);
    const auto merged = merged_wick_values(c.sigma, c.lambda_phi, *c.lambda_pi);
    for (int p = 0; p < 256; ++p) worst = std::max(worst, std::abs(eight[p] - merged[p]));
  }
  return bounded("bch_consistency", "observables", worst, 1e-10,
                 "8-slot Wick values (quadrature W) vs merged 4-factor closed form, 50 random configs");
}

SuiteResult propagation_identity(const VerifyOptions&) {
  double worst = 0.0;
  for (int d : {2, 3})
    for (double delta : {0.0, 2.0, 10.0}) {
      const auto fa = SpectralProfile::gaussian(1.0, d);
      const BobSpectra bs = bob_spectra(fa, delta);
      const SpectralAmplitude a_phi({FieldQuadrature::Phi, fa, 0.0, 1.0});
      const SpectralAmplitude a_pi({FieldQuadrature::Pi, fa, 0.0, 1.0});
      const auto b_phi = SpectralAmplitude({FieldQuadrature::Phi, bs.fb2, delta, 1.0}) +
                         SpectralAmplitude({FieldQuadrature::Pi, bs.fb1, delta, 1.0});
      const auto b_pi = SpectralAmplitude({FieldQuadrature::Phi, bs.fb3, delta, 1.0}) +
                        SpectralAmplitude({FieldQuadrature::Pi, bs.fb2, delta, 1.0});
      double peak_phi = 0.0, peak_pi = 0.0, res_phi = 0.0, res_pi = 0.0;
      for (int i = 1; i <= 500; ++i) {
        const double k = 40.0 * i / 500.0;
        peak_phi = std::max(peak_phi, std::abs(a_phi(k)));
        peak_pi = std::max(peak_pi, std::abs(a_pi(k)));
        res_phi = std::max(res_phi, std::abs(a_phi(k) - b_phi(k)));
        res_pi = std::max(res_pi, std::abs(a_pi(k) - b_pi(k)));
      }
      worst = std::max({worst, res_phi / peak_phi, res_pi / peak_pi});
    }
  return bounded("propagation_identity", "observables", worst, 1e-10,
                 "Alice's phi and pi amplitudes vs Bob's re-expression, 500 k-points, relative to peak");
}

// propagation

SuiteResult localization(const VerifyOptions&) {
  const auto p = bob_profiles_3d(1.0, 10.0);
  double worst = 0.0;
  for (const RadialProfile* f : {&p.fb1, &p.fb2, &p.fb3})
    worst = std::max(worst, 1.0 - shell_mass_fraction(*f, 10.0, 5.0));
  return bounded("lightlike_localization", "propagation", worst, 1e-6,
                 "L1 mass outside |r - delta| <= 5 sigma, delta = 10 sigma");
}

SuiteResult huygens(const VerifyOptions&) {
  const double delta = 10.0;
  const auto p3 = bob_profiles_3d(1.0, delta);
  const double ratio3 = std::abs(p3.fb1(delta / 2)) / peak_abs(p3.fb1, 20.0, 20000);
  const auto f2 = bob_profile_2d_fb1(1.0, delta);
  const double ratio2 = std::abs(f2(delta / 2)) / peak_abs(f2, 20.0);
  SuiteResult r;
  r.name = "huygens_contrast";
  r.module = "propagation";
  r.worst = ratio3;
  r.tolerance = 1e-20;
  r.passed = ratio2 >= 1e-3 && ratio3 <= 1e-20;
  r.detail = fmt("2D interior ratio %.3g (needs >= 1e-3); 3D interior ratio %.3g (needs <= 1e-20)", ratio2, ratio3);
  return r;
}

SuiteResult dual_route(const VerifyOptions&) {
  const double delta = 10.0;
  const auto p = bob_profiles_3d(1.0, delta);
  const auto s = bob_spectra(SpectralProfile::gaussian(1.0, 3), delta);
  InverseOptions io;
  io.force_numeric = true;
  io.r_max = delta + 10.0;
  io.h = 0.005;
  double worst3 = 0.0;
  const RadialProfile* closed[] = {&p.fb1, &p.fb2, &p.fb3};
  const SpectralProfile* spec[] = {&s.fb1, &s.fb2, &s.fb3};
  for (int i = 0; i < 3; ++i) {
    const RadialProfile numeric = inverse_fourier_radial(*spec[i], io);
    const double peak = peak_abs(*closed[i], io.r_max);
    for (int j = 0; j < 200; ++j) {
      const double r = 0.1 * j;
      worst3 = std::max(worst3, std::abs(numeric(r) - (*closed[i])(r)) / peak);
    }
  }
  const auto numeric2 = bob_profiles_2d_numeric(1.0, delta);
  const double peak2 = peak_abs(numeric2.fb1, 20.0);
  double worst2 = 0.0;
  for (int j = 0; j < 50; ++j) {
    const double r = 0.39 * j + 0.05;
    worst2 = std::max(worst2, std::abs(numeric2.fb1(r) - bob_fb1_2d_value(1.0, delta, r)) / peak2);
  }
  SuiteResult r{"dual_route", "propagation", worst3 <= 1e-6 && worst2 <= 1e-4, worst2, 1e-4,
                fmt("3D shells vs inverse transform %.3g (<= 1e-6); 2D kernel vs Hankel route %.3g (<= 1e-4)",
                    worst3, worst2)};
  return r;
}

// channel

ChannelConfig gaussian_config(double lambda_phi, double rel_tol) {
  ChannelConfig c;
  c.lambda_phi = lambda_phi;
  c.rel_tol = rel_tol;
  return c;
}

SuiteResult validity(const VerifyOptions& opt) {
  std::vector<ChannelConfig> configs;
  for (double lam : {0.1, 1.0, 10.0, 100.0, 1000.0}) configs.push_back(gaussian_config(lam, opt.rel_tol));
  for (double r0 : {5.0, 10.0, 15.0})
    for (bool inner : {true, false}) {
      ChannelConfig c = gaussian_config(1000.0, opt.rel_tol);
      c.bob = inner ? BobSpec::inner(r0, 0.1) : BobSpec::outer(r0, 0.1);
      configs.push_back(c);
    }
  ChannelConfig two = gaussian_config(30.0, opt.rel_tol);
  two.d = 2;
  configs.push_back(two);
  double worst = 0.0;
  for (const ChannelConfig& c : configs) {
    const ChannelConfig unit = c;
    const CMatrix m = assemble_rho_cb(scale_gram(unit_gram(unit), c.lambda_phi, c.resolved_lambda_pi()));
    const StateDefects s = state_defects(m);
    worst = std::max({worst, s.hermiticity, s.trace, -s.min_eigenvalue});
  }
  return bounded("rho_cb_validity", "channel", worst, 1e-9,
                 fmt("Hermiticity, trace and positivity defects over %g configurations", double(configs.size())));
}

SuiteResult reduction(const VerifyOptions& opt) {
  double worst = 0.0;
  for (double lam : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    ChannelConfig c = gaussian_config(lam, opt.rel_tol);
    const double lpi = c.resolved_lambda_pi();
    const CMatrix eight = assemble_rho_cb(scale_gram(unit_gram(c, GramRoute::Quadrature), lam, lpi));
    worst = std::max(worst, max_abs_diff(eight, rho_cb_merged_closed_form(1.0, lam, lpi)));
  }
  return bounded("perfect_channel_reduction", "channel", worst, 1e-10,
                 "full Bob rho_CB entries, 8-slot vs merged closed form");
}

SuiteResult broadcast(const VerifyOptions& opt) {
  ChannelConfig base;
  base.rel_tol = opt.rel_tol;
  const auto rows = broadcast_sweep(linear_grid(1.0, 19.0, 9), {10.0, 1000.0}, base, opt.jobs);
  double worst = -2.0;
  for (const auto& [lam, table] : rows)
    for (const BroadcastRow& r : table) worst = std::max(worst, std::min(r.ic_bob1, r.ic_bob2));
  return bounded("no_simultaneous_broadcast", "channel", worst, 1e-6,
                 "max over r0 in {1, 3.25, ..., 19} and lambda in {10, 1000} of min(I_c1, I_c2)");
}

SuiteResult complementarity(const VerifyOptions& opt) {
  const double full = coherent_info_of(gaussian_config(10.0, opt.rel_tol));
  ChannelConfig c = gaussian_config(10.0, opt.rel_tol);
  c.bob = BobSpec::outer(0.05, 0.02);
  const double worst = std::abs(coherent_info_of(c) - full);
  return bounded("complementarity", "channel", worst, 1e-3, "outer Bob at r0 = 0.05, eps = 0.02 vs full Bob");
}

SuiteResult rank1(const VerifyOptions& opt) {
  double worst = -2.0;
  for (double lam : {1.0, 10.0, 100.0}) {
    ChannelConfig alice = gaussian_config(lam, opt.rel_tol);
    alice.lambda_pi = 0.0;
    worst = std::max(worst, coherent_info_of(alice));
    ChannelConfig bob = gaussian_config(lam, opt.rel_tol);
    bob.bob.variant = BobVariant::Rank1Only;
    worst = std::max(worst, coherent_info_of(bob));
  }
  return bounded("rank1_null_capacity", "channel", worst, 1e-9, "max I_c with a rank-1 coupling on either side");
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&);

struct Entry {
  const char* name;
  SuiteFn fn;
  const char* module;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {"entropy_axioms", entropy_axioms, "qmath"},
      {"conditional_entropy_concavity", concavity, "qmath"},
      {"separability_bound", separability, "qmath"},
      {"eigen_residuals", eigen_residuals, "qmath"},
      {"transform_round_trip", round_trip, "smearing"},
      {"parseval", parseval, "smearing"},
      {"oscillatory_quadrature", oscillatory, "smearing"},
      {"conjugate_symmetry", conjugate_symmetry, "observables"},
      {"positivity", positivity, "observables"},
      {"closed_form_vs_quadrature", closed_form, "observables"},
      {"bch_consistency", bch, "observables"},
      {"propagation_identity", propagation_identity, "observables"},
      {"lightlike_localization", localization, "propagation"},
      {"huygens_contrast", huygens, "propagation"},
      {"dual_route", dual_route, "propagation"},
      {"rho_cb_validity", validity, "channel"},
      {"perfect_channel_reduction", reduction, "channel"},
      {"no_simultaneous_broadcast", broadcast, "channel"},
      {"complementarity", complementarity, "channel"},
      {"rank1_null_capacity", rank1, "channel"},
  };
  return r;
}

} // namespace

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> n;
  for (const Entry& e : registry()) n.emplace_back(e.name);
  return n;
}

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& opt) {
  for (const std::string& want : opt.only) {
    const auto names = verify_suite_names();
    if (std::find(names.begin(), names.end(), want) == names.end()) throw BadParameter("unknown suite: " + want);
  }
  std::vector<SuiteResult> out;
  for (const Entry& e : registry()) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), e.name) == opt.only.end()) continue;
    try {
      out.push_back(e.fn(opt));
    } catch (const std::exception& ex) {
      // A numerical failure inside a suite is a failed suite, not a crash.
      out.push_back({e.name, e.module, false, std::nan(""), 0.0, std::string("error: ") + ex.what()});
    }
  }
  return out;
}

} // namespace qfield
