#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace qfield {

using cplx = std::complex<double>;

// Dense square complex matrix with fixed storage for n <= 4.
class CMatrix {
public:
  CMatrix() = default;
  explicit CMatrix(int n);
  CMatrix(int n, std::initializer_list<cplx> row_major);

  static CMatrix identity(int n);

  int dim() const { return n_; }
  cplx& operator()(int r, int c) { return a_[r * 4 + c]; }
  const cplx& operator()(int r, int c) const { return a_[r * 4 + c]; }

  CMatrix adjoint() const;
  cplx trace() const;
  // Largest |M_rc - conj(M_cr)|.
  double hermiticity_defect() const;
  double max_abs() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend bool operator==(const CMatrix& a, const CMatrix& b);

private:
  int n_ = 0;
  std::array<cplx, 16> a_{};
};

using Ket2 = std::array<cplx, 2>;

CMatrix outer(const Ket2& a, const Ket2& b); // |a><b|
CMatrix kron(const CMatrix& a, const CMatrix& b);
// Max over entries of |a - b|.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

// Eigenstates of the Pauli operators, sigma_y = [[0,-i],[i,0]].
namespace qubit {
Ket2 ket_z(int sign);
Ket2 ket_x(int sign);
Ket2 ket_y(int sign);
CMatrix projector_z(int sign);
CMatrix projector_x(int sign);
CMatrix projector_y(int sign);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
} // namespace qubit

struct EigenSystem {
  std::vector<double> values; // descending
  CMatrix vectors;            // column j pairs with values[j]
};

// Cyclic complex Jacobi. Throws NotHermitian when the input deviates from
// Hermitian by more than tol entrywise.
EigenSystem hermitian_eigensystem(const CMatrix& m, double tol = 1e-9);
std::vector<double> hermitian_eigenvalues(const CMatrix& m, double tol = 1e-9);

// Validated quantum state of dimension 2 or 4. Construction enforces
// Hermiticity, unit trace and positivity to `tol`.
class DensityMatrix {
public:
  static constexpr double kTolerance = 1e-9;

  explicit DensityMatrix(const CMatrix& m, double tol = kTolerance);

  int dim() const { return m_.dim(); }
  const CMatrix& matrix() const { return m_; }
  const std::vector<double>& eigenvalues() const { return eig_; }

private:
  CMatrix m_;
  std::vector<double> eig_;
};

struct StateDefects {
  double hermiticity = 0.0;
  double trace = 0.0;         // |Tr M - 1|
  double min_eigenvalue = 0.0;
  bool valid(double tol = DensityMatrix::kTolerance) const;
};

StateDefects state_defects(const CMatrix& m);

enum class Subsystem { C, B };

double von_neumann_entropy(const DensityMatrix& rho);
// Tensor order is C (x) B with C the left factor.
DensityMatrix partial_trace(const DensityMatrix& rho_cb, Subsystem keep);
double coherent_information(const DensityMatrix& rho_cb);
double conditional_entropy(const DensityMatrix& rho_cb);

DensityMatrix random_density_matrix(int dim, std::uint64_t seed);
DensityMatrix random_separable_state(int n_terms, std::uint64_t seed);

} // namespace qfield
