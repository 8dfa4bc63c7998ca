#include "qfield/qmath.hpp"

#include "qfield/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace qfield {

CMatrix::CMatrix(int n) : n_(n) {
  if (n < 1 || n > 4) {
    throw DimensionMismatch("CMatrix supports dimensions 1..4, got " + std::to_string(n));
  }
}

CMatrix::CMatrix(int n, std::initializer_list<cplx> row_major) : CMatrix(n) {
  if (row_major.size() != static_cast<std::size_t>(n * n)) {
    throw DimensionMismatch("initializer size does not match dimension");
  }
  int i = 0;
  for (const cplx& v : row_major) {
    (*this)(i / n, i % n) = v;
    ++i;
  }
}

CMatrix CMatrix::identity(int n) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (o.n_ != n_) throw DimensionMismatch("matrix sum dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (o.n_ != n_) throw DimensionMismatch("matrix difference dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& v : a_) v *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.n_ != b.n_) throw DimensionMismatch("matrix product dimension mismatch");
  CMatrix r(a.n_);
  for (int i = 0; i < a.n_; ++i)
    for (int k = 0; k < a.n_; ++k) {
      const cplx aik = a(i, k);
      for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

bool operator==(const CMatrix& a, const CMatrix& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

CMatrix outer(const Ket2& a, const Ket2& b) {
  CMatrix m(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const int n = a.dim() * b.dim();
  CMatrix r(n);
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < b.dim(); ++k)
        for (int l = 0; l < b.dim(); ++l) r(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
  return r;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff dimension mismatch");
  return (a - b).max_abs();
}

namespace qubit {

namespace {
int check_sign(int s) {
  if (s != 1 && s != -1) throw BadParameter("qubit sign must be +1 or -1");
  return s;
}
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
} // namespace

Ket2 ket_z(int sign) {
  return check_sign(sign) > 0 ? Ket2{1.0, 0.0} : Ket2{0.0, 1.0};
}

Ket2 ket_x(int sign) {
  return Ket2{kInvSqrt2, check_sign(sign) * kInvSqrt2};
}

Ket2 ket_y(int sign) {
  return Ket2{kInvSqrt2, cplx(0.0, check_sign(sign) * kInvSqrt2)};
}

CMatrix projector_z(int sign) { return outer(ket_z(sign), ket_z(sign)); }
CMatrix projector_x(int sign) { return outer(ket_x(sign), ket_x(sign)); }
CMatrix projector_y(int sign) { return outer(ket_y(sign), ket_y(sign)); }

CMatrix pauli_x() { return CMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
CMatrix pauli_y() { return CMatrix(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0}); }
CMatrix pauli_z() { return CMatrix(2, {1.0, 0.0, 0.0, -1.0}); }

} // namespace qubit

EigenSystem hermitian_eigensystem(const CMatrix& m, double tol) {
  const double defect = m.hermiticity_defect();
  if (defect > tol) {
    throw NotHermitian("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  const int n = m.dim();
  // Work on the exactly Hermitian part.
  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix v = CMatrix::identity(n);

  double frob = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) frob += std::norm(a(i, j));
  const double target = 1e-14 * std::max(1.0, std::sqrt(frob));

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq < 1e-300) continue;
        const cplx phase = std::conj(a(p, q)) / apq; // e^{-i arg a_pq}
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        CMatrix u = CMatrix::identity(n);
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * phase;
        u(q, q) = c * phase;
        a = u.adjoint() * a * u;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        v = v * u;
      }
    }
  }
  if (off_norm() > target) {
    throw std::runtime_error("Jacobi iteration did not converge");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

  EigenSystem es;
  es.vectors = CMatrix(n);
  for (int j = 0; j < n; ++j) {
    es.values.push_back(a(order[j], order[j]).real());
    for (int i = 0; i < n; ++i) es.vectors(i, j) = v(i, order[j]);
  }
  return es;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& m, double tol) {
  return hermitian_eigensystem(m, tol).values;
}

bool StateDefects::valid(double tol) const {
  return hermiticity <= tol && trace <= tol && min_eigenvalue >= -tol;
}

StateDefects state_defects(const CMatrix& m) {
  StateDefects d;
  d.hermiticity = m.hermiticity_defect();
  d.trace = std::abs(m.trace() - 1.0);
  // Positivity is judged on the Hermitian part.
  const CMatrix h = 0.5 * (m + m.adjoint());
  d.min_eigenvalue = hermitian_eigenvalues(h, std::numeric_limits<double>::infinity()).back();
  return d;
}

DensityMatrix::DensityMatrix(const CMatrix& m, double tol) : m_(m) {
  if (m.dim() != 2 && m.dim() != 4) {
    throw DimensionMismatch("density matrices have dimension 2 or 4");
  }
  const double herm = m.hermiticity_defect();
  if (herm > tol) throw NotHermitian("density matrix not Hermitian (defect " + std::to_string(herm) + ")");
  const double tr = std::abs(m.trace() - 1.0);
  if (tr > tol) throw InvalidState("density matrix trace deviates from 1 by " + std::to_string(tr));
  eig_ = hermitian_eigenvalues(m, tol);
  if (eig_.back() < -tol) {
    throw InvalidState("density matrix has eigenvalue " + std::to_string(eig_.back()));
  }
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lam : rho.eigenvalues()) {
    if (lam < -DensityMatrix::kTolerance) {
      throw InvalidState("negative eigenvalue " + std::to_string(lam) + " in entropy");
    }
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return s;
}

DensityMatrix partial_trace(const DensityMatrix& rho_cb, Subsystem keep) {
  if (rho_cb.dim() != 4) throw DimensionMismatch("partial_trace expects a two-qubit state");
  const CMatrix& m = rho_cb.matrix();
  CMatrix r(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int t = 0; t < 2; ++t) {
        if (keep == Subsystem::B) {
          r(i, j) += m(2 * t + i, 2 * t + j);
        } else {
          r(i, j) += m(2 * i + t, 2 * j + t);
        }
      }
  return DensityMatrix(r);
}

double coherent_information(const DensityMatrix& rho_cb) {
  const DensityMatrix rho_b = partial_trace(rho_cb, Subsystem::B);
  return von_neumann_entropy(rho_b) - von_neumann_entropy(rho_cb);
}

double conditional_entropy(const DensityMatrix& rho_cb) { return -coherent_information(rho_cb); }

namespace {

cplx complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const double re = nd(rng);
  const double im = nd(rng);
  return cplx(re, im) / std::sqrt(2.0);
}

Ket2 random_pure_qubit(std::mt19937_64& rng) {
  Ket2 k{complex_gaussian(rng), complex_gaussian(rng)};
  const double norm = std::sqrt(std::norm(k[0]) + std::norm(k[1]));
  k[0] /= norm;
  k[1] /= norm;
  return k;
}

} // namespace

DensityMatrix random_density_matrix(int dim, std::uint64_t seed) {
  if (dim != 2 && dim != 4) throw DimensionMismatch("random_density_matrix supports dim 2 or 4");
  std::mt19937_64 rng(seed);
  CMatrix g(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = complex_gaussian(rng);
  CMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return DensityMatrix(rho);
}

DensityMatrix random_separable_state(int n_terms, std::uint64_t seed) {
  if (n_terms < 1) throw BadParameter("random_separable_state needs at least one term");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ed(1.0);
  std::vector<double> w(n_terms);
  std::vector<CMatrix> terms;
  double total = 0.0;
  for (int t = 0; t < n_terms; ++t) {
    w[t] = ed(rng);
    total += w[t];
    const Ket2 c = random_pure_qubit(rng);
    const Ket2 b = random_pure_qubit(rng);
    terms.push_back(kron(outer(c, c), outer(b, b)));
  }
  CMatrix rho(4);
  for (int t = 0; t < n_terms; ++t) rho += terms[t] * (w[t] / total);
  return DensityMatrix(rho);
}

} // namespace qfield
