#pragma once

#include "qfield/qmath.hpp"
#include "qfield/smearing.hpp"

#include <vector>

namespace qfield {

enum class FieldQuadrature { Phi, Pi };

// Smeared field observable  coupling * {phi, pi}[profile](time).
struct FieldObservableSpec {
  FieldQuadrature kind = FieldQuadrature::Phi;
  SpectralProfile profile = SpectralProfile::zero(3, 1.0);
  double time = 0.0;
  double coupling = 1.0;

  static FieldObservableSpec from_profile(FieldQuadrature kind, const RadialProfile& profile, double time,
                                          double coupling, double k_max = 0.0);
};

// Annihilation-operator coefficient b(k) of a sum of smeared observables,
// stored as the list of terms. The reduced amplitude b(k) sqrt(2 omega) is
// finite at k = 0 and is what the overlap integrals use.
class SpectralAmplitude {
public:
  SpectralAmplitude() = default;
  explicit SpectralAmplitude(const FieldObservableSpec& term);
  static SpectralAmplitude zero(int d, double k_max, double length_scale = 1.0);

  int dimension() const { return d_; }
  double k_max() const { return k_max_; }
  double length_scale() const { return scale_; }
  // Largest spatial radius or propagation time among the terms; bounds the
  // oscillation rate in k.
  double radius() const;
  const std::vector<FieldObservableSpec>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx operator()(double k) const; // b(k); infinite at k = 0 for phi-kind terms
  cplx reduced(double k) const;    // b(k) sqrt(2|k|)
  void reduced_batch(const double* k, cplx* out, std::size_t n) const;

  SpectralAmplitude& operator+=(const SpectralAmplitude& o);
  friend SpectralAmplitude operator+(SpectralAmplitude a, const SpectralAmplitude& b) { return a += b; }

private:
  int d_ = 3;
  double k_max_ = 40.0;
  double scale_ = 1.0;
  std::vector<FieldObservableSpec> terms_;
};

SpectralAmplitude momentum_amplitude(const FieldObservableSpec& spec);

struct OverlapOptions {
  double rel_tol = 1e-10;
};

// W_lm = <0|O_l O_m|0> = integral of b_l(k) conj(b_m(k)) d^dk, by adaptive
// quadrature of the radial integral.
cplx overlap_W(const SpectralAmplitude& l, const SpectralAmplitude& m, const OverlapOptions& opt = {});

// Closed form of W for O = x lambda_pi pi_A + z lambda_phi phi_A with a 3D
// Gaussian smearing at equal times. Signs may also be 0 to drop a quadrature.
cplx gaussian_W_closed_form(int x_l, int z_l, int x_m, int z_m, double sigma, double lambda_phi, double lambda_pi);

// C = -(1/2) <[phi_A, pi_A]> for the given (coupling-scaled) amplitudes.
cplx commutator_constant(const SpectralAmplitude& phi_amp, const SpectralAmplitude& pi_amp,
                         const OverlapOptions& opt = {});

struct ExponentTerm {
  int sign = 1;
  SpectralAmplitude amplitude;
};
using ExponentString = std::vector<ExponentTerm>;

// <0| prod_j exp(i s_j O_j) |0>, ordered left to right.
cplx wick_expectation(const ExponentString& s, const OverlapOptions& opt = {});

// Exponent of the Wick identity, -sum_{l<m} s_l s_m G_{t_l t_m} - 1/2 sum_l G_{t_l t_l},
// for a string whose slot l holds operator t_l of a precomputed Gram matrix.
cplx wick_exponent(const int* signs, const int* types, int n, const CMatrix& gram);

struct GramOptions {
  double k_max = 0.0;       // <= 0: largest k_max among the amplitudes
  double rel_tol = 1e-10;   // relative to the largest diagonal entry
  double panel_width = 0.0; // <= 0: chosen from the amplitudes' radii
};

struct GramResult {
  CMatrix w;
  double error_estimate = 0.0; // Kronrod minus embedded Gauss, summed
  double tail_estimate = 0.0;  // diagonal mass on [k_max, 2 k_max]
  std::size_t nodes = 0;
};

// All pairwise overlaps of up to four amplitudes on one shared composite
// Gauss-Kronrod grid over [0, k_max]; the grid is refined until the embedded
// error estimate meets rel_tol. Using identical nodes for every entry keeps
// exact algebraic relations between entries intact to roundoff.
GramResult gram_matrix(const std::vector<SpectralAmplitude>& ops, const GramOptions& opt = {});

struct ConditionReport {
  double gamma_a = 0.0;           // lambda_phi lambda_pi integral |F_A~|^2
  double strong_coupling_ratio = 0.0; // gamma_a^2 / <0|pi_A^2|0>
  bool fine_tuned = false;        // gamma_a = pi/4 mod 2 pi within 1e-12
  bool strong_coupling = false;   // ratio >= kStrongCouplingThreshold
};

inline constexpr double kStrongCouplingThreshold = 100.0;

// Encoding conditions for a Gaussian Alice smearing.
ConditionReport check_conditions(int d, double sigma, double lambda_phi, double lambda_pi);

// lambda_pi solving gamma_a = pi/4 for a Gaussian Alice smearing.
double gamma_rule_lambda_pi(int d, double sigma, double lambda_phi);

} // namespace qfield
