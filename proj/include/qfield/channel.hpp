#pragma once

#include "qfield/observables.hpp"
#include "qfield/qmath.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace qfield {

enum class BobVariant { Full, TruncatedInner, TruncatedOuter, Rank1Only, None };

struct BobSpec {
  BobVariant variant = BobVariant::Full;
  double r0 = 0.0;  // truncation radius
  double eps = 0.1; // window roll-off

  static BobSpec full() { return {}; }
  static BobSpec inner(double r0, double eps) { return {BobVariant::TruncatedInner, r0, eps}; }
  static BobSpec outer(double r0, double eps) { return {BobVariant::TruncatedOuter, r0, eps}; }
};

struct ChannelConfig {
  int d = 3;
  double sigma = 1.0;
  double lambda_phi = 0.0;
  std::optional<double> lambda_pi; // empty: gamma_A = pi/4 rule
  double delta = 10.0;
  BobSpec bob;
  double rel_tol = 1e-10;
  double k_max = 0.0; // <= 0: 40/sigma for Gaussian spectra, 200/sigma for windowed ones

  void validate() const;
  double resolved_lambda_pi() const;
};

// Slot content of the vacuum string, left to right:
//   z1 phi_A, x1 pi_A, x2 X_B, z2 Z_B, z3 Z_B, x3 X_B, x4 pi_A, z4 phi_A.
// Operator indices used by the Gram matrix.
enum ChannelOperator : int { kAlicePhi = 0, kAlicePi = 1, kBobX = 2, kBobZ = 3 };
inline constexpr std::array<int, 8> kSlotOperators = {kAlicePhi, kAlicePi, kBobX, kBobZ,
                                                      kBobZ,     kBobX,    kAlicePi, kAlicePhi};

// Unit-coupling amplitudes of phi_A, pi_A and Bob's X and Z (Bob's with the
// coupling factored out: X = lambda_pi x, Z = lambda_phi z).
struct ChannelOperators {
  SpectralAmplitude alice_phi, alice_pi, bob_x, bob_z;

  std::vector<SpectralAmplitude> as_vector() const { return {alice_phi, alice_pi, bob_x, bob_z}; }
};

ChannelOperators unit_operators(const ChannelConfig& config);

// One of the 1024 terms: slot signs in string order plus the qubit factors.
struct ChannelTerm {
  std::array<int, 8> signs{}; // z1, x1, x2, z2, z3, x3, x4, z4
  int j = 1, k = 1;
  cplx alice = 0.0;           // <k| P_{-z1} P_{-x1} P_{x4} P_{z4} |j>
  CMatrix bob;                // P_{-z3} P_{-x3} |+y><+y| P_{x2} P_{z2}
};

struct ExponentTemplate {
  ChannelOperators ops; // coupling-scaled
  std::vector<ChannelTerm> terms;

  ExponentString instantiate(const std::array<int, 8>& signs) const;
};

ExponentTemplate build_exponent_string(const ChannelConfig& config);

enum class GramRoute { Auto, ClosedForm, Quadrature };

// 4x4 Gram matrix of the unit-coupling operators.
CMatrix unit_gram(const ChannelConfig& config, GramRoute route = GramRoute::Auto);
CMatrix scale_gram(const CMatrix& unit, double lambda_phi, double lambda_pi);

// Sum of the 1024 terms for a coupling-scaled Gram matrix, without validation.
CMatrix assemble_rho_cb(const CMatrix& gram);

// Overlap of O_l = x_l pi_A + z_l phi_A with O_m, called as w(x_l, z_l, x_m, z_m).
using MergedOverlap = std::function<cplx(int, int, int, int)>;

// Merged form: per sign pattern, e^{x1z1C} e^{-x2z2C} e^{x3z3C} e^{-x4z4C}
// times the Wick value of the four merged exponents O_i. Valid when Bob's
// operators coincide with Alice's (full Bob).
CMatrix assemble_rho_cb_merged(const MergedOverlap& w, cplx c_const);
// Merged form with the 3D Gaussian closed forms.
CMatrix rho_cb_merged_closed_form(double sigma, double lambda_phi, double lambda_pi);

// Wick value of each of the 256 slot-sign patterns (bit b of the index set
// means slot b carries sign -1).
std::array<cplx, 256> eight_slot_wick_values(const CMatrix& gram);
std::array<cplx, 256> merged_wick_values(double sigma, double lambda_phi, double lambda_pi);

struct ChannelResult {
  DensityMatrix rho_cb;
  double coherent_info;
  ConditionReport conditions;
  CMatrix gram; // coupling-scaled 4x4
};

ChannelResult rho_cb(const ChannelConfig& config, GramRoute route = GramRoute::Auto);
// Validated state from an assembled matrix; InvalidState beyond tolerance.
DensityMatrix validated_state(const CMatrix& m);
// Largest of the Hermiticity defect, |trace - 1| and the negated smallest eigenvalue.
double worst_defect(const CMatrix& m);
double coherent_info_of(const ChannelConfig& config);

struct CapacityRow {
  double lambda_over_sigma;
  double ic;
  double ic_clamped;
  double state_defect; // worst Hermiticity, trace or negativity defect of rho_CB
};

// lambda_phi = value * sigma at each grid point, lambda_pi from the gamma rule.
std::vector<CapacityRow> capacity_sweep(const std::vector<double>& lambda_grid, const ChannelConfig& base,
                                        int jobs = 1);

struct BroadcastRow {
  double r0;
  double ic_bob1; // Bob B1, inner window
  double ic_bob2; // Bob B2, outer window
  double state_defect; // worst defect of the two states
};

// For every r0, both truncated Bobs at every requested lambda_phi/sigma. The
// windowed spectra are built once per r0 and shared by all couplings.
std::map<double, std::vector<BroadcastRow>> broadcast_sweep(const std::vector<double>& r0_grid,
                                                             const std::vector<double>& lambdas,
                                                             const ChannelConfig& base, int jobs = 1);

std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> linear_grid(double lo, double hi, int points);

} // namespace qfield
