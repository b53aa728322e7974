#pragma once

// Time integration of  i u_t + (-Delta)^alpha u = sign |u|^2 u  (sign = -1
// defocusing, +1 focusing) and of its Wick-ordered form
//   i w_t + (-Delta)^alpha w = sign (|w|^2 w - P w),   w = u exp(i sign P t).
// Integrating-factor RK4: the dispersive part is propagated exactly.

#include "fnls/spectral.hpp"

#include <vector>

namespace fnls {

struct SolverConfig {
  double alpha = 1.0;
  int sign = -1;
  double dt = 1e-3;
  double horizon = 1.0;
  int sample_stride = 1;
  double mask_constant = 1.0;
  bool wick = false;
  /// false switches the nonlinearity off (pure linear flow).
  bool nonlinear = true;
  DealiasRule dealias = DealiasRule::two_thirds;

  /// Throws InvalidConfig on any violated precondition.
  void validate() const;
  /// Number of time steps; horizon must be a whole number of dt*stride.
  long steps() const;
};

struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  std::vector<SpectralField> states;
  double wick_constant = 0.0;
};

inline constexpr double kBlowupGuard = 1e12;

/// 2 mass(u0) / L, i.e. mass/pi on the torus: twice the l2 mass of the
/// coefficients, the resonant self-interaction of the cubic term.
double wick_constant(const SpectralField& u0);

/// Right-hand side of u_t minus the dispersive part, in coefficient space.
SpectralField nonlinear_rhs(const SpectralField& u, const SolverConfig& cfg,
                            double wick_p);

SpectralField step(const SpectralField& u, const SolverConfig& cfg,
                   double wick_p = 0.0);

/// Projects u0 onto the dealiasing band, then steps to cfg.horizon.
Trajectory evolve(const SpectralField& u0, const SolverConfig& cfg);

/// circumference sum |xi|^{2 alpha} |c|^2 + potential_sign/2 int |u|^4.
double energy(const SpectralField& u, double alpha, int potential_sign);

/// The energy conserved by the flow with the given nonlinearity sign:
/// the potential term enters with the opposite sign.
double conserved_energy(const SpectralField& u, double alpha, int equation_sign);

/// Exact solution A exp(i k x + i theta t), theta = |k|^{2 alpha} - sign A^2.
SpectralField plane_wave_oracle(const TorusGrid& grid, double amplitude,
                                int index, double alpha, int sign, double t);
double plane_wave_frequency(const TorusGrid& grid, double amplitude, int index,
                            double alpha, int sign);

}  // namespace fnls
