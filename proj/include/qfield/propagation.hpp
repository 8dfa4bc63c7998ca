#pragma once

#include "qfield/smearing.hpp"

namespace qfield {

// Bob's three smearings at t_B = t_A + delta that reproduce Alice's field
// observables: phi[F](t_A) = phi[F_B2](t_B) + pi[F_B1](t_B) and
// pi[F](t_A) = phi[F_B3](t_B) + pi[F_B2](t_B).
struct BobSpectra {
  SpectralProfile fb1, fb2, fb3;
};

struct BobProfiles {
  RadialProfile fb1, fb2, fb3;
};

struct PropagationResult {
  BobSpectra spectra;
  BobProfiles profiles;
  double delta = 0.0;
};

// Momentum-space propagation for massless fields. Any real delta is accepted;
// negative values propagate backwards.
BobSpectra bob_spectra(const SpectralProfile& fa, double delta);

// Closed-form 3D profiles for a Gaussian Alice smearing: shells of radius
// delta obtained from the Gaussian convolved with the lightcone and its
// first two delta-derivatives.
BobProfiles bob_profiles_3d(double sigma, double delta);

struct ProfileGridOptions {
  double r_max = 0.0; // <= 0: delta + 10 sigma
  double h = 0.0;     // <= 0: sigma / 50
  double rel_tol = 1e-10;
};

// 2D F_B1 at one radius from the lightcone-interior kernel,
// F_B1(x) = -(1/2 pi) int_{|x'-x|<delta} F_A(x') / sqrt(delta^2 - |x-x'|^2) d^2x'.
double bob_fb1_2d_value(double sigma, double delta, double r, double rel_tol = 1e-10);

// Tabulated 2D F_B1 from the kernel above.
RadialProfile bob_profile_2d_fb1(double sigma, double delta, const ProfileGridOptions& opt = {});

// Tabulated 2D profiles from numerical inverse Hankel transforms of bob_spectra.
BobProfiles bob_profiles_2d_numeric(double sigma, double delta, const ProfileGridOptions& opt = {});

// Spectra plus profiles for a Gaussian Alice smearing in d = 2 or 3.
PropagationResult propagate_gaussian(int d, double sigma, double delta, const ProfileGridOptions& opt = {});

// Fraction of the L1 mass (integral of |f| d^dx) of a profile lying in
// |r - center| <= half_width.
double shell_mass_fraction(const RadialProfile& f, double center, double half_width, double rel_tol = 1e-10);

} // namespace qfield
