#pragma once

// End-to-end campaigns built from the solver, the normal form and the
// verifiers. Every report is a pure function of its inputs.

#include "fnls/evolution.hpp"
#include "fnls/normal_form.hpp"
#include "fnls/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fnls {

/// Which linear flow the smoothing residual is measured against.
enum class SmoothingGauge {
  /// exp(-i sign P t) S(t) u0, P = 2 mass / L (torus and box).
  wick_rotated,
  /// S(t) u0.
  free,
};

struct SmoothingSetup {
  std::uint64_t seed = 0;
  double s = 0.7;
  double a = 0.5;
  double delta = 0.05;
  TorusGrid grid{256};
  SolverConfig solver;
  SmoothingGauge gauge = SmoothingGauge::wick_rotated;
  /// Tail-slope window: lo is a frequency xi (a lattice index on the torus),
  /// hi a lattice index, hi < 0 meaning N/3.
  int window_lo = 8;
  int window_hi = -1;
};

struct SmoothingReport {
  SmoothingSetup setup;
  bool admissible = false;
  std::vector<double> times;
  std::vector<double> residual_norm;  // ||res||_{H^{s+a}}
  std::vector<double> solution_norm;  // ||u(t)||_{H^s}
  int window_lo = 0, window_hi = 0;
  /// Zero when the window holds fewer than two nonzero modes.
  double datum_slope = 0.0;
  double residual_slope = 0.0;
  /// datum_slope - residual_slope: extra decay of the residual's coefficients.
  double slope_gain = 0.0;
  double bound_ratio = 0.0;
};

/// a <= min(2 alpha - 1, 2 s + alpha - 1).
bool smoothing_admissible(double s, double a, double alpha);

/// The datum of a smoothing run (before band projection by the solver).
SpectralField smoothing_datum(const SmoothingSetup& setup);

SmoothingReport run_smoothing(const SmoothingSetup& setup);
/// Same, with an explicit datum (setup.seed/s/delta are then only echoed).
SmoothingReport run_smoothing(const SmoothingSetup& setup, const SpectralField& u0);

struct GrowthSetup {
  std::uint64_t seed = 0;
  double s = 2.0;
  double delta = 0.05;
  TorusGrid grid{128};
  SolverConfig solver;
};

struct GrowthReport {
  GrowthSetup setup;
  std::vector<double> times;
  std::vector<double> hs_norm;
  std::vector<double> halpha_norm;
  std::vector<double> energy;  // conserved energy of the flow
  /// Least-squares slope of log ||u||_{H^s} against log <t> over t >= 1.
  double growth_exponent = 0.0;
  double halpha_drift = 0.0;  // max relative deviation from the t=0 value
  double energy_drift = 0.0;
};

GrowthReport run_growth(const GrowthSetup& setup);

struct MaskSensitivitySetup {
  std::uint64_t seed = 0;
  double s = 1.0;
  double delta = 0.05;
  TorusGrid grid{32};
  SolverConfig solver;  // wick is forced on for the torus identity
  std::vector<double> c_values{0.5, 1.0, 2.0};
};

struct MaskSensitivityRow {
  double c = 0.0;
  double identity_residual = 0.0;
  double b_norm = 0.0, r_norm = 0.0, nr1_norm = 0.0, nr2_norm = 0.0, nr3_norm = 0.0;
};

struct MaskSensitivityReport {
  MaskSensitivitySetup setup;
  std::vector<MaskSensitivityRow> rows;
  /// (max - min) / max of the identity residual over c.
  double residual_variation = 0.0;
};

MaskSensitivityReport mask_sensitivity(const MaskSensitivitySetup& setup);
MaskSensitivityReport mask_sensitivity(const MaskSensitivitySetup& setup,
                                       const SpectralField& u0);

struct ConvergenceSetup {
  std::uint64_t seed = 0;
  double s = 1.0;
  double delta = 0.05;
  TorusGrid grid{64};
  SolverConfig solver;  // dt is replaced by each level
  std::vector<double> dt_levels{4e-3, 2e-3, 1e-3};
  MaskVariant variant = MaskVariant::torus;
};

struct ConvergenceRow {
  double dt = 0.0;
  double evolve_error = 0.0;  // vs the next finer level; 0 on the finest
  double identity_residual = 0.0;
  double duhamel_defect = 0.0;
};

struct ConvergenceReport {
  ConvergenceSetup setup;
  std::vector<ConvergenceRow> rows;
  /// log2 ratios between consecutive levels.
  std::vector<double> evolve_order, identity_order, duhamel_order;
};

ConvergenceReport convergence_study(const ConvergenceSetup& setup);

}  // namespace fnls
