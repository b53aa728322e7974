#include "fnls/evolution.hpp"

#include "fnls/errors.hpp"

#include <cmath>
#include <string>

namespace fnls {

namespace {

void guard(const SpectralField& u, double time) {
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) {
    const Complex c = u.coeffs()[i];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NonFiniteState("non-finite coefficient", time);
    if (std::abs(c) > kBlowupGuard)
      throw NonFiniteState("coefficient exceeded blowup guard", time);
  }
}

// Coefficientwise multiplier exp(i h |xi|^{2 alpha}), built once per step size.
CoeffVector propagator(const TorusGrid& g, double h, double alpha) {
  CoeffVector e(g.size());
  for (int slot = 0; slot < g.size(); ++slot)
    e[slot] = std::polar(1.0, h * dispersion_symbol(g.frequency(g.index(slot)), alpha));
  return e;
}

// SpectralField's constructor rejects non-finite values; steps run on raw
// vectors and are checked by guard() instead.
CoeffVector rhs(const TorusGrid& g, const CoeffVector& c, const SolverConfig& cfg,
                double wick_p) {
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()) ||
        std::abs(c[i]) > kBlowupGuard)
      throw NonFiniteState("state left the finite regime inside a stage", 0.0);
  return nonlinear_rhs(SpectralField(g, c), cfg, wick_p).coeffs();
}

CoeffVector rk4_step(const TorusGrid& g, const CoeffVector& c,
                     const SolverConfig& cfg, double wick_p,
                     const CoeffVector& half, const CoeffVector& full) {
  const double h = cfg.dt;
  const CoeffVector k1 = rhs(g, c, cfg, wick_p);
  const CoeffVector k2 =
      rhs(g, half.cwiseProduct(c + (0.5 * h) * k1), cfg, wick_p);
  const CoeffVector k3 =
      rhs(g, half.cwiseProduct(c) + (0.5 * h) * k2, cfg, wick_p);
  const CoeffVector k4 =
      rhs(g, full.cwiseProduct(c) + h * half.cwiseProduct(k3), cfg, wick_p);
  return full.cwiseProduct(c) +
         (h / 6.0) * (full.cwiseProduct(k1) + 2.0 * half.cwiseProduct(k2 + k3) + k4);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw InvalidConfig("alpha must satisfy alpha in (1/2,1]");
  if (sign != 1 && sign != -1) throw InvalidConfig("sign must be +1 or -1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidConfig("dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidConfig("horizon must be positive");
  if (dt > horizon) throw InvalidConfig("dt must not exceed horizon");
  if (sample_stride <= 0) throw InvalidConfig("sample_stride must be positive");
  if (!(mask_constant > 0.0)) throw InvalidConfig("mask constant c must be positive");
  const double samples = horizon / (dt * sample_stride);
  if (std::abs(samples - std::round(samples)) > 1e-9 * std::max(1.0, samples))
    throw InvalidConfig("horizon must be a whole number of dt*sample_stride");
}

long SolverConfig::steps() const {
  return std::lround(horizon / (dt * sample_stride)) * sample_stride;
}

double wick_constant(const SpectralField& u0) {
  return 2.0 * mass(u0) / u0.grid().circumference();
}

SpectralField nonlinear_rhs(const SpectralField& u, const SolverConfig& cfg,
                            double wick_p) {
  if (!cfg.nonlinear) return SpectralField(u.grid());
  CoeffVector n = cubic_product(u, band_limit(u.grid(), cfg.dealias)).coeffs();
  if (cfg.wick) n -= wick_p * project_band(u, band_limit(u.grid(), cfg.dealias)).coeffs();
  return SpectralField(u.grid(), Complex(0.0, -cfg.sign) * n);
}

SpectralField step(const SpectralField& u, const SolverConfig& cfg, double wick_p) {
  cfg.validate();
  const TorusGrid& g = u.grid();
  const CoeffVector half = propagator(g, 0.5 * cfg.dt, cfg.alpha);
  const CoeffVector full = propagator(g, cfg.dt, cfg.alpha);
  SpectralField next(g);
  try {
    next = SpectralField(g, rk4_step(g, u.coeffs(), cfg, wick_p, half, full));
  } catch (const PreconditionViolated&) {
    throw NonFiniteState("non-finite coefficient", cfg.dt);
  }
  guard(next, cfg.dt);
  return next;
}

Trajectory evolve(const SpectralField& u0, const SolverConfig& cfg) {
  cfg.validate();
  const TorusGrid& g = u0.grid();
  Trajectory traj;
  traj.config = cfg;
  SpectralField state = project_band(u0, band_limit(g, cfg.dealias));
  traj.wick_constant = wick_constant(state);
  traj.times.push_back(0.0);
  traj.states.push_back(state);

  const CoeffVector half = propagator(g, 0.5 * cfg.dt, cfg.alpha);
  const CoeffVector full = propagator(g, cfg.dt, cfg.alpha);
  CoeffVector c = state.coeffs();
  const long n = cfg.steps();
  for (long i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    try {
      c = rk4_step(g, c, cfg, traj.wick_constant, half, full);
    } catch (const NonFiniteState& e) {
      throw NonFiniteState("state left the finite regime", t);
    }
    if (i % cfg.sample_stride == 0) {
      SpectralField sample(g);
      try {
        sample = SpectralField(g, c);
      } catch (const PreconditionViolated&) {
        throw NonFiniteState("non-finite coefficient", t);
      }
      guard(sample, t);
      traj.times.push_back(t);
      traj.states.push_back(std::move(sample));
    }
  }
  return traj;
}

double energy(const SpectralField& u, double alpha, int potential_sign) {
  const TorusGrid& g = u.grid();
  double kinetic = 0.0;
  for (int slot = 0; slot < g.size(); ++slot)
    kinetic += dispersion_symbol(g.frequency(g.index(slot)), alpha) *
               std::norm(u.coeffs()[slot]);
  kinetic *= g.circumference();
  return kinetic + 0.5 * potential_sign * quartic_integral(u);
}

double conserved_energy(const SpectralField& u, double alpha, int equation_sign) {
  return energy(u, alpha, -equation_sign);
}

double plane_wave_frequency(const TorusGrid& grid, double amplitude, int index,
                            double alpha, int sign) {
  return dispersion_symbol(grid.frequency(index), alpha) -
         sign * amplitude * amplitude;
}

SpectralField plane_wave_oracle(const TorusGrid& grid, double amplitude,
                                int index, double alpha, int sign, double t) {
  const double theta = plane_wave_frequency(grid, amplitude, index, alpha, sign);
  return SpectralField::mode(grid, index, std::polar(amplitude, theta * t));
}

}  // namespace fnls
