#include <doctest.h>

#include "qfield/errors.hpp"
#include "qfield/observables.hpp"
#include "qfield/propagation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qfield;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralAmplitude gaussian_obs(FieldQuadrature kind, double sigma, double coupling, double t = 0.0, int d = 3) {
  return momentum_amplitude(FieldObservableSpec{kind, SpectralProfile::gaussian(sigma, d), t, coupling});
}

// x lambda_pi pi_A + z lambda_phi phi_A.
SpectralAmplitude alice_combo(int x, int z, double sigma, double lphi, double lpi) {
  SpectralAmplitude a = SpectralAmplitude::zero(3, 40.0 / sigma, sigma);
  if (z != 0) a += gaussian_obs(FieldQuadrature::Phi, sigma, z * lphi);
  if (x != 0) a += gaussian_obs(FieldQuadrature::Pi, sigma, x * lpi);
  return a;
}

} // namespace

TEST_CASE("momentum_amplitude examples") {
  const auto b = gaussian_obs(FieldQuadrature::Phi, 1.0, 1.0);
  const cplx v = b(1.0);
  CHECK(v.real() == doctest::Approx(std::pow(2.0 * kPi, -1.5) * std::exp(-0.25) / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v.imag() == 0.0);

  const auto p = gaussian_obs(FieldQuadrature::Pi, 1.0, 1.0);
  for (double k : {0.1, 1.0, 3.0}) {
    CHECK(p(k).real() == 0.0);
    CHECK(p(k).imag() < 0.0);
  }

  const auto bt = gaussian_obs(FieldQuadrature::Phi, 1.0, 1.0, 2.5);
  for (double k : {0.1, 1.0, 3.0}) {
    const cplx ratio = bt(k) / b(k);
    CHECK(std::abs(ratio - std::exp(cplx(0.0, -2.5 * k))) <= 1e-15);
    // phi-kind with a real profile: b(k) e^{i omega t} is real.
    CHECK(std::abs((bt(k) * std::exp(cplx(0.0, 2.5 * k))).imag()) <= 1e-17);
  }
}

TEST_CASE("overlap_W examples") {
  for (int z : {1, -1}) {
    const auto o = gaussian_obs(FieldQuadrature::Phi, 1.0, z);
    const cplx w = overlap_W(o, o);
    CHECK(w.real() == doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-10));
    CHECK(std::abs(w.imag()) <= 1e-16);
  }
  const double lphi = 1.7, lpi = 0.6;
  const auto phi = gaussian_obs(FieldQuadrature::Phi, 1.0, lphi);
  const auto pi = gaussian_obs(FieldQuadrature::Pi, 1.0, lpi);
  const cplx w = overlap_W(phi, pi);
  const double expected = lphi * lpi / (2.0 * std::pow(2.0 * kPi, 1.5));
  CHECK(w.imag() == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(w.real()) <= 1e-14);
  CHECK(overlap_W(pi, phi).imag() == doctest::Approx(-expected).epsilon(1e-10));
}

TEST_CASE("overlap_W conjugate symmetry and positivity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<SpectralAmplitude> amps;
  for (int i = 0; i < 6; ++i) {
    SpectralAmplitude a = gaussian_obs(FieldQuadrature::Phi, 1.0, u(rng), u(rng));
    a += gaussian_obs(FieldQuadrature::Pi, 1.0, u(rng), u(rng));
    amps.push_back(a);
  }
  const BobSpectra bs = bob_spectra(SpectralProfile::gaussian(1.0, 3), 4.0);
  amps.push_back(momentum_amplitude(FieldObservableSpec{FieldQuadrature::Pi, bs.fb1, 4.0, 1.3}));
  amps.push_back(momentum_amplitude(FieldObservableSpec{FieldQuadrature::Phi, bs.fb3, 4.0, 0.4}));
  for (const auto& l : amps) {
    CHECK(overlap_W(l, l).real() >= 0.0);
    for (const auto& m : amps) {
      const cplx lm = overlap_W(l, m), ml = overlap_W(m, l);
      CHECK(std::abs(lm - std::conj(ml)) <= 1e-12 * std::max(1.0, std::abs(lm)));
    }
  }
}

TEST_CASE("gaussian_W_closed_form examples") {
  CHECK(gaussian_W_closed_form(0, 1, 0, 1, 1.0, 1.0, 0.0) == cplx(1.0 / (4.0 * kPi * kPi), 0.0));
  CHECK(gaussian_W_closed_form(1, 1, 1, 1, 1.3, 2.0, 0.7).imag() == 0.0);
  CHECK_THROWS_AS(gaussian_W_closed_form(2, 1, 1, 1, 1.0, 1.0, 1.0), BadParameter);
}

TEST_CASE("closed form agrees with quadrature for all sign patterns") {
  double worst = 0.0;
  for (double ratio : {1.0, 10.0, 100.0}) {
    const double sigma = 1.0, lphi = ratio * sigma;
    const double lpi = gamma_rule_lambda_pi(3, sigma, lphi);
    for (int pattern = 0; pattern < 16; ++pattern) {
      const int xl = pattern & 1 ? 1 : -1, zl = pattern & 2 ? 1 : -1;
      const int xm = pattern & 4 ? 1 : -1, zm = pattern & 8 ? 1 : -1;
      const cplx exact = gaussian_W_closed_form(xl, zl, xm, zm, sigma, lphi, lpi);
      const cplx quad = overlap_W(alice_combo(xl, zl, sigma, lphi, lpi), alice_combo(xm, zm, sigma, lphi, lpi));
      worst = std::max(worst, std::abs(quad - exact) / std::abs(exact));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("commutator_constant") {
  const auto c = commutator_constant(gaussian_obs(FieldQuadrature::Phi, 1.0, 1.0), gaussian_obs(FieldQuadrature::Pi, 1.0, 1.0));
  CHECK(std::abs(c.real()) <= 1e-15);
  CHECK(c.imag() == doctest::Approx(-1.0 / (2.0 * std::pow(2.0 * kPi, 1.5))).epsilon(1e-10));
  CHECK(c.imag() == doctest::Approx(-0.0317).epsilon(1e-3));

  const auto zero = commutator_constant(gaussian_obs(FieldQuadrature::Phi, 1.0, 1.0), gaussian_obs(FieldQuadrature::Pi, 1.0, 0.0));
  CHECK(zero == cplx(0.0));

  const cplx c1 = commutator_constant(gaussian_obs(FieldQuadrature::Phi, 0.8, 1.5), gaussian_obs(FieldQuadrature::Pi, 0.8, 0.9));
  const cplx c2 = commutator_constant(gaussian_obs(FieldQuadrature::Phi, 0.8, 3.0), gaussian_obs(FieldQuadrature::Pi, 0.8, 0.9));
  CHECK(std::abs(c2 - 2.0 * c1) <= 1e-12 * std::abs(c2));
}

TEST_CASE("wick_expectation examples") {
  CHECK(wick_expectation({}) == cplx(1.0));
  const auto phi = gaussian_obs(FieldQuadrature::Phi, 1.0, 2.0);
  const double w = overlap_W(phi, phi).real();
  CHECK(std::abs(wick_expectation({{1, phi}}) - std::exp(-w / 2.0)) <= 1e-14);
  // <+alpha|-alpha> = <0| e^{-i phi} e^{-i phi} |0>.
  const cplx overlap = wick_expectation({{-1, phi}, {-1, phi}});
  CHECK(std::abs(overlap) == doctest::Approx(std::exp(-2.0 * w)).epsilon(1e-12));
  // Mutually inverse factors cancel.
  CHECK(std::abs(wick_expectation({{1, phi}, {-1, phi}}) - 1.0) <= 1e-12);

  const auto other = momentum_amplitude(FieldObservableSpec{FieldQuadrature::Phi, SpectralProfile::gaussian(0.5, 3), 0.0, 1.0});
  CHECK_THROWS_AS(wick_expectation({{1, phi}, {1, other}}), BadParameter);
  ExponentString too_long(9, ExponentTerm{1, phi});
  CHECK_THROWS_AS(wick_expectation(too_long), BadParameter);
}

TEST_CASE("wick_expectation magnitude is bounded by one") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    ExponentString s;
    for (int j = 0; j < 5; ++j) {
      SpectralAmplitude a = gaussian_obs(FieldQuadrature::Phi, 1.0, u(rng), u(rng));
      a += gaussian_obs(FieldQuadrature::Pi, 1.0, u(rng), u(rng));
      s.push_back({j % 2 ? 1 : -1, a});
    }
    CHECK(std::abs(wick_expectation(s)) <= 1.0 + 1e-10);
  }
}

TEST_CASE("propagation identity at the amplitude level") {
  for (double delta : {0.0, 2.0, 10.0}) {
    const auto fa = SpectralProfile::gaussian(1.0, 3);
    const BobSpectra bs = bob_spectra(fa, delta);
    const auto a_phi = momentum_amplitude({FieldQuadrature::Phi, fa, 0.0, 1.0});
    const auto a_pi = momentum_amplitude({FieldQuadrature::Pi, fa, 0.0, 1.0});
    const auto b_phi = momentum_amplitude({FieldQuadrature::Phi, bs.fb2, delta, 1.0}) +
                       momentum_amplitude({FieldQuadrature::Pi, bs.fb1, delta, 1.0});
    const auto b_pi = momentum_amplitude({FieldQuadrature::Phi, bs.fb3, delta, 1.0}) +
                      momentum_amplitude({FieldQuadrature::Pi, bs.fb2, delta, 1.0});
    double peak_phi = 0.0, peak_pi = 0.0, res_phi = 0.0, res_pi = 0.0;
    for (int i = 1; i <= 500; ++i) {
      const double k = 40.0 * i / 500.0;
      peak_phi = std::max(peak_phi, std::abs(a_phi(k)));
      peak_pi = std::max(peak_pi, std::abs(a_pi(k)));
      res_phi = std::max(res_phi, std::abs(a_phi(k) - b_phi(k)));
      res_pi = std::max(res_pi, std::abs(a_pi(k) - b_pi(k)));
    }
    CHECK(res_phi <= 1e-10 * peak_phi);
    CHECK(res_pi <= 1e-10 * peak_pi);
  }
}

TEST_CASE("gram_matrix matches pairwise overlaps") {
  const auto fa = SpectralProfile::gaussian(1.0, 3);
  const BobSpectra bs = bob_spectra(fa, 10.0);
  const double lphi = 3.0, lpi = 0.8;
  std::vector<SpectralAmplitude> ops{
      momentum_amplitude({FieldQuadrature::Phi, fa, 0.0, lphi}),
      momentum_amplitude({FieldQuadrature::Pi, fa, 0.0, lpi}),
      momentum_amplitude({FieldQuadrature::Phi, bs.fb3, 10.0, lpi}) +
          momentum_amplitude({FieldQuadrature::Pi, bs.fb2, 10.0, lpi}),
      momentum_amplitude({FieldQuadrature::Phi, bs.fb2, 10.0, lphi}) +
          momentum_amplitude({FieldQuadrature::Pi, bs.fb1, 10.0, lphi}),
  };
  const GramResult g = gram_matrix(ops);
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m) {
      const cplx q = overlap_W(ops[l], ops[m]);
      CHECK(std::abs(g.w(l, m) - q) <= 1e-10 * g.w(0, 0).real());
    }
  // Bob's operators equal Alice's, so the Gram matrix is block-repeated.
  CHECK(std::abs(g.w(2, 3) - g.w(1, 0)) <= 1e-12 * g.w(0, 0).real());
  CHECK(std::abs(g.w(3, 3) - g.w(0, 0)) <= 1e-12 * g.w(0, 0).real());
  CHECK(g.tail_estimate <= 1e-30);
}

TEST_CASE("gram_matrix rejects an insufficient cut-off") {
  const auto p = RadialProfile::windowed(RadialProfile::gaussian_shell(1.0, 10.0, 1), Window{Window::Side::Inner, 10.0, 0.02});
  const auto spec = fourier_radial(p, 60.0);
  const auto amp = momentum_amplitude({FieldQuadrature::Pi, spec, 10.0, 1.0});
  CHECK_THROWS_AS(gram_matrix({amp}), QuadratureFailure);
}

TEST_CASE("check_conditions") {
  const double lpi = gamma_rule_lambda_pi(3, 1.0, 100.0);
  const ConditionReport r = check_conditions(3, 1.0, 100.0, lpi);
  CHECK(r.gamma_a == doctest::Approx(100.0 * lpi / std::pow(2.0 * kPi, 1.5)));
  CHECK(r.fine_tuned);
  CHECK(r.strong_coupling);
  CHECK(r.strong_coupling_ratio == doctest::Approx(1e4 / (4.0 * kPi)));

  const ConditionReport weak = check_conditions(3, 1.0, 1.0, gamma_rule_lambda_pi(3, 1.0, 1.0));
  CHECK(weak.fine_tuned);
  CHECK_FALSE(weak.strong_coupling);
  CHECK_FALSE(check_conditions(3, 1.0, 100.0, 2.0 * lpi).fine_tuned);

  // The 2D closed forms against quadrature.
  const auto fa = SpectralProfile::gaussian(1.3, 2);
  const auto phi = momentum_amplitude({FieldQuadrature::Phi, fa, 0.0, 2.0});
  const auto pi = momentum_amplitude({FieldQuadrature::Pi, fa, 0.0, 1.0});
  const ConditionReport r2 = check_conditions(2, 1.3, 2.0, 1.0);
  CHECK(r2.gamma_a == doctest::Approx(2.0 * commutator_constant(phi, pi).imag() * -1.0).epsilon(1e-9));
  CHECK(r2.strong_coupling_ratio == doctest::Approx(r2.gamma_a * r2.gamma_a / overlap_W(pi, pi).real()).epsilon(1e-9));
  CHECK_THROWS_AS(gamma_rule_lambda_pi(3, 1.0, 0.0), BadParameter);
}
