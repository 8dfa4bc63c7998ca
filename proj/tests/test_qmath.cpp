#include <doctest.h>

#include "qfield/errors.hpp"
#include "qfield/qmath.hpp"

#include <cmath>
#include <random>

using namespace qfield;

namespace {

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = nd(rng);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = cplx(nd(rng), nd(rng));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

double eigen_residual(const CMatrix& m, const EigenSystem& es) {
  double worst = 0.0;
  const int n = m.dim();
  for (int j = 0; j < n; ++j) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx mv = 0.0;
      for (int k = 0; k < n; ++k) mv += m(i, k) * es.vectors(k, j);
      r2 += std::norm(mv - es.values[j] * es.vectors(i, j));
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

CMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double lam) {
  return a.matrix() * lam + b.matrix() * (1.0 - lam);
}

} // namespace

TEST_CASE("qubit basis conventions") {
  for (int s : {1, -1}) {
    for (const CMatrix& p : {qubit::projector_x(s), qubit::projector_y(s), qubit::projector_z(s)}) {
      CHECK(max_abs_diff(p * p, p) < 1e-15);
      CHECK(p.hermiticity_defect() < 1e-15);
    }
  }
  CHECK(max_abs_diff(qubit::projector_x(1) + qubit::projector_x(-1), CMatrix::identity(2)) < 1e-15);
  CHECK(max_abs_diff(qubit::projector_z(1) + qubit::projector_z(-1), CMatrix::identity(2)) < 1e-15);

  const Ket2 y = qubit::ket_y(1);
  const CMatrix sy = qubit::pauli_y();
  for (int i = 0; i < 2; ++i) {
    const cplx v = sy(i, 0) * y[0] + sy(i, 1) * y[1];
    CHECK(std::abs(v - y[i]) < 1e-15);
  }
}

TEST_CASE("hermitian_eigenvalues: trivial cases") {
  const auto half = hermitian_eigenvalues(CMatrix::identity(2) * 0.5);
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

  CMatrix d(4);
  d(0, 0) = 1.0;
  const auto v = hermitian_eigenvalues(d);
  CHECK(v == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("hermitian_eigenvalues: dim 2 against the quadratic formula") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix m = random_hermitian(2, rng);
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double disc = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
    const auto ev = hermitian_eigenvalues(m);
    CHECK(std::abs(ev[0] - (0.5 * (a + d) + disc)) <= 1e-10);
    CHECK(std::abs(ev[1] - (0.5 * (a + d) - disc)) <= 1e-10);
  }
}

TEST_CASE("hermitian_eigensystem: residuals on random 4x4 matrices") {
  std::mt19937_64 rng(12);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const CMatrix m = random_hermitian(4, rng);
    const auto es = hermitian_eigensystem(m);
    worst = std::max(worst, eigen_residual(m, es));
    for (int j = 0; j + 1 < 4; ++j) CHECK(es.values[j] >= es.values[j + 1]);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("hermitian_eigenvalues rejects non-Hermitian input") {
  CMatrix m(2, {1.0, 0.5, 0.0, 1.0});
  CHECK_THROWS_AS(hermitian_eigenvalues(m), NotHermitian);
}

TEST_CASE("DensityMatrix invariants") {
  CHECK_THROWS_AS(DensityMatrix(CMatrix::identity(2)), InvalidState);
  CHECK_THROWS_AS(DensityMatrix(CMatrix(2, {1.2, 0.0, 0.0, -0.2})), InvalidState);
  CHECK_THROWS_AS(DensityMatrix(CMatrix::identity(3) * (1.0 / 3.0)), DimensionMismatch);
  // A tiny negative eigenvalue inside the tolerance is accepted and clamped.
  const DensityMatrix ok(CMatrix(2, {1.0 + 5e-10, 0.0, 0.0, -5e-10}));
  CHECK(von_neumann_entropy(ok) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("von_neumann_entropy examples") {
  CHECK(von_neumann_entropy(DensityMatrix(CMatrix::identity(2) * 0.5)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(von_neumann_entropy(DensityMatrix(qubit::projector_y(1)))) < 1e-14);
  CHECK(von_neumann_entropy(DensityMatrix(CMatrix::identity(4) * 0.25)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("partial_trace examples") {
  const DensityMatrix rc = random_density_matrix(2, 1);
  const DensityMatrix rb = random_density_matrix(2, 2);
  const DensityMatrix prod(kron(rc.matrix(), rb.matrix()));
  CHECK(max_abs_diff(partial_trace(prod, Subsystem::B).matrix(), rb.matrix()) < 1e-15);
  CHECK(max_abs_diff(partial_trace(prod, Subsystem::C).matrix(), rc.matrix()) < 1e-15);

  const double s = 1.0 / std::sqrt(2.0);
  CMatrix phi(4);
  const std::array<cplx, 4> v{s, 0.0, 0.0, s};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) phi(i, j) = v[i] * std::conj(v[j]);
  CHECK(max_abs_diff(partial_trace(DensityMatrix(phi), Subsystem::B).matrix(), CMatrix::identity(2) * 0.5) < 1e-15);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DensityMatrix r = random_density_matrix(4, seed);
    CHECK(std::abs(partial_trace(r, Subsystem::B).matrix().trace() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(rc, Subsystem::B), DimensionMismatch);
}

TEST_CASE("coherent and conditional information examples") {
  const DensityMatrix mixed_pure(kron(CMatrix::identity(2) * 0.5, qubit::projector_y(1)));
  CHECK(coherent_information(mixed_pure) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(conditional_entropy(mixed_pure) == doctest::Approx(1.0).epsilon(1e-13));

  const double s = 1.0 / std::sqrt(2.0);
  const std::array<cplx, 4> v{s, 0.0, 0.0, s};
  CMatrix phi(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) phi(i, j) = v[i] * std::conj(v[j]);
  CHECK(coherent_information(DensityMatrix(phi)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(conditional_entropy(DensityMatrix(phi)) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("random_density_matrix is valid and deterministic") {
  double trace_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const DensityMatrix r = random_density_matrix(seed % 2 ? 4 : 2, seed);
    trace_sum += r.matrix().trace().real();
    CHECK(state_defects(r.matrix()).valid());
  }
  CHECK(trace_sum / 1000.0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(random_density_matrix(4, 77).matrix() == random_density_matrix(4, 77).matrix());
  CHECK(!(random_density_matrix(4, 77).matrix() == random_density_matrix(4, 78).matrix()));
}

TEST_CASE("entropy additivity on products") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const DensityMatrix a = random_density_matrix(2, 2 * seed);
    const DensityMatrix b = random_density_matrix(2, 2 * seed + 1);
    const DensityMatrix ab(kron(a.matrix(), b.matrix()));
    CHECK(von_neumann_entropy(ab) >= 0.0);
    worst = std::max(worst, std::abs(von_neumann_entropy(ab) - von_neumann_entropy(a) - von_neumann_entropy(b)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("conditional entropy is concave") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -1.0;
  for (int t = 0; t < 1000; ++t) {
    const DensityMatrix r1 = random_density_matrix(4, rng());
    const DensityMatrix r2 = random_density_matrix(4, rng());
    const double lam = u(rng);
    const DensityMatrix m(mix(r1, r2, lam));
    const double gap = lam * conditional_entropy(r1) + (1.0 - lam) * conditional_entropy(r2) - conditional_entropy(m);
    worst = std::max(worst, gap);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("separable states carry no coherent information") {
  CHECK(std::abs(coherent_information(random_separable_state(1, 5))) < 1e-12);
  double worst = -2.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const DensityMatrix r = random_separable_state(1 + static_cast<int>(seed % 6), seed);
    CHECK(state_defects(r.matrix()).valid());
    worst = std::max(worst, coherent_information(r));
  }
  CHECK(worst <= 1e-9);
  CHECK_THROWS_AS(random_separable_state(0, 1), BadParameter);
}
