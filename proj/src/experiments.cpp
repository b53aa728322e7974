#include "fnls/experiments.hpp"

#include "fnls/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fnls {

namespace {

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

double relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double ref = series.front();
  double worst = 0.0;
  for (double v : series) {
    const double d = std::abs(v - ref);
    worst = std::max(worst, ref == 0.0 ? d : d / std::abs(ref));
  }
  return worst;
}

double log_ratio_order(double coarse_err, double fine_err, double coarse_dt,
                       double fine_dt) {
  if (!(coarse_err > 0.0) || !(fine_err > 0.0)) return 0.0;
  return std::log(coarse_err / fine_err) / std::log(coarse_dt / fine_dt);
}

// Fields with fewer than two nonzero modes in the window (zero data, plane
// waves) have no tail.
double slope_or_zero(const SpectralField& u, int lo, int hi) {
  try {
    return tail_slope(u, lo, hi);
  } catch (const InsufficientSamples&) {
    return 0.0;
  }
}

}  // namespace

bool smoothing_admissible(double s, double a, double alpha) {
  return a <= std::min(2.0 * alpha - 1.0, 2.0 * s + alpha - 1.0);
}

SpectralField smoothing_datum(const SmoothingSetup& setup) {
  return random_sobolev_field(setup.seed, setup.s, setup.delta, setup.grid);
}

SmoothingReport run_smoothing(const SmoothingSetup& setup) {
  return run_smoothing(setup, smoothing_datum(setup));
}

SmoothingReport run_smoothing(const SmoothingSetup& setup, const SpectralField& u0) {
  if (!(u0.grid() == setup.grid))
    throw PreconditionViolated("datum does not live on the configured grid");
  SolverConfig cfg = setup.solver;
  cfg.wick = false;
  const Trajectory traj = evolve(u0, cfg);
  const SpectralField& start = traj.states.front();
  const double rotation =
      setup.gauge == SmoothingGauge::wick_rotated ? cfg.sign * traj.wick_constant : 0.0;

  SmoothingReport rep;
  rep.setup = setup;
  rep.admissible = smoothing_admissible(setup.s, setup.a, cfg.alpha);
  const double u0_norm = sobolev_norm(start, setup.s);
  const double bound = std::pow(u0_norm, 3) + std::pow(u0_norm, 5);
  SpectralField last_residual(setup.grid);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.times[i];
    SpectralField res = smoothing_residual(traj.states[i], start, t, cfg.alpha, rotation);
    rep.times.push_back(t);
    rep.residual_norm.push_back(sobolev_norm(res, setup.s + setup.a));
    rep.solution_norm.push_back(sobolev_norm(traj.states[i], setup.s));
    last_residual = std::move(res);
  }
  const int band = band_limit(setup.grid, cfg.dealias);
  // window_lo is a frequency; on a box it is converted to a lattice index.
  rep.window_lo = static_cast<int>(std::ceil(setup.window_lo / setup.grid.spacing() - 1e-9));
  rep.window_hi = setup.window_hi < 0 ? std::min(setup.grid.size() / 3, band)
                                      : setup.window_hi;
  rep.datum_slope = slope_or_zero(start, rep.window_lo, rep.window_hi);
  rep.residual_slope = slope_or_zero(last_residual, rep.window_lo, rep.window_hi);
  rep.slope_gain = rep.datum_slope - rep.residual_slope;
  const double peak = *std::max_element(rep.residual_norm.begin(), rep.residual_norm.end());
  rep.bound_ratio = bound == 0.0 ? 0.0 : peak / bound;
  return rep;
}

GrowthReport run_growth(const GrowthSetup& setup) {
  const SpectralField u0 = random_sobolev_field(setup.seed, setup.s, setup.delta, setup.grid);
  SolverConfig cfg = setup.solver;
  cfg.wick = false;
  const Trajectory traj = evolve(u0, cfg);
  GrowthReport rep;
  rep.setup = setup;
  const int eq_sign = cfg.nonlinear ? cfg.sign : 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const SpectralField& u = traj.states[i];
    const double t = traj.times[i];
    rep.times.push_back(t);
    rep.hs_norm.push_back(sobolev_norm(u, setup.s));
    rep.halpha_norm.push_back(sobolev_norm(u, cfg.alpha));
    rep.energy.push_back(conserved_energy(u, cfg.alpha, eq_sign));
    if (t >= 1.0) {
      lx.push_back(std::log(std::sqrt(1.0 + t * t)));
      ly.push_back(std::log(rep.hs_norm.back()));
    }
  }
  rep.growth_exponent = slope_fit(lx, ly);
  rep.halpha_drift = relative_drift(rep.halpha_norm);
  rep.energy_drift = relative_drift(rep.energy);
  return rep;
}

MaskSensitivityReport mask_sensitivity(const MaskSensitivitySetup& setup) {
  return mask_sensitivity(
      setup, random_sobolev_field(setup.seed, setup.s, setup.delta, setup.grid));
}

MaskSensitivityReport mask_sensitivity(const MaskSensitivitySetup& setup,
                                       const SpectralField& u0) {
  if (setup.c_values.empty()) throw PreconditionViolated("no mask constants given");
  for (double c : setup.c_values)
    if (!(c > 0.0)) throw PreconditionViolated("mask constants must be positive");
  SolverConfig cfg = setup.solver;
  cfg.wick = true;
  const Trajectory traj = evolve(u0, cfg);
  const SpectralField& start = traj.states.front();
  MaskSensitivityReport rep;
  rep.setup = setup;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < setup.c_values.size(); ++i) {
    NormalFormSpec spec;
    spec.c = setup.c_values[i];
    spec.variant = MaskVariant::torus;
    spec.band = band_limit(setup.grid, cfg.dealias);
    const NormalFormTerms t = normal_form_terms(start, cfg.alpha, spec);
    MaskSensitivityRow row;
    row.c = spec.c;
    row.identity_residual = normal_form_identity_residual(traj, spec);
    row.b_norm = sobolev_norm(t.b, 0.0);
    row.r_norm = sobolev_norm(t.r, 0.0);
    row.nr1_norm = sobolev_norm(t.nr1, 0.0);
    row.nr2_norm = sobolev_norm(t.nr2, 0.0);
    row.nr3_norm = sobolev_norm(*t.nr3, 0.0);
    lo = i == 0 ? row.identity_residual : std::min(lo, row.identity_residual);
    hi = i == 0 ? row.identity_residual : std::max(hi, row.identity_residual);
    rep.rows.push_back(row);
  }
  rep.residual_variation = hi == 0.0 ? 0.0 : (hi - lo) / hi;
  return rep;
}

ConvergenceReport convergence_study(const ConvergenceSetup& setup) {
  if (setup.dt_levels.size() < 3)
    throw InsufficientSamples("convergence study needs at least 3 dt levels");
  for (std::size_t i = 1; i < setup.dt_levels.size(); ++i)
    if (!(setup.dt_levels[i] < setup.dt_levels[i - 1]))
      throw PreconditionViolated("dt levels must be strictly decreasing");
  const SpectralField u0 = random_sobolev_field(setup.seed, setup.s, setup.delta, setup.grid);
  NormalFormSpec spec;
  spec.variant = setup.variant;
  spec.c = setup.solver.mask_constant;
  ConvergenceReport rep;
  rep.setup = setup;
  std::vector<SpectralField> finals;
  for (double dt : setup.dt_levels) {
    SolverConfig cfg = setup.solver;
    cfg.dt = dt;
    cfg.wick = setup.variant == MaskVariant::torus;
    const Trajectory traj = evolve(u0, cfg);
    ConvergenceRow row;
    row.dt = dt;
    row.identity_residual = normal_form_identity_residual(traj, spec);
    row.duhamel_defect = duhamel_residual(traj, spec);
    finals.push_back(traj.states.back());
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < finals.size(); ++i)
    rep.rows[i].evolve_error = sobolev_norm(finals[i] - finals[i + 1], 0.0);
  const auto& r = rep.rows;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double dc = r[i].dt, df = r[i + 1].dt;
    if (i + 2 < r.size())
      rep.evolve_order.push_back(
          log_ratio_order(r[i].evolve_error, r[i + 1].evolve_error, dc, df));
    rep.identity_order.push_back(
        log_ratio_order(r[i].identity_residual, r[i + 1].identity_residual, dc, df));
    rep.duhamel_order.push_back(
        log_ratio_order(r[i].duhamel_defect, r[i + 1].duhamel_defect, dc, df));
  }
  return rep;
}

}  // namespace fnls
