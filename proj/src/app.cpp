#include "fnls/app.hpp"

#include "fnls/errors.hpp"
#include "fnls/estimates.hpp"

#include <cmath>

namespace fnls {

namespace {

using nlohmann::json;

TorusGrid grid_of(const RunConfig& c) {
  return TorusGrid(static_cast<int>(c.integer("n_modes")), c.real("circumference"));
}

DealiasRule dealias_of(const RunConfig& c) {
  const std::string& d = c.text("dealias");
  if (d == "one_third") return DealiasRule::one_third;
  if (d == "none") return DealiasRule::none;
  return DealiasRule::two_thirds;
}

SolverConfig solver_of(const RunConfig& c) {
  SolverConfig s;
  s.alpha = c.real("alpha");
  s.sign = static_cast<int>(c.integer("sign"));
  s.dt = c.real("dt");
  s.horizon = c.real("horizon");
  s.sample_stride = static_cast<int>(c.integer("stride"));
  s.mask_constant = c.real("c");
  s.dealias = dealias_of(c);
  return s;
}

MaskVariant variant_of(const RunConfig& c) {
  return c.text("variant") == "line" ? MaskVariant::line : MaskVariant::torus;
}

double l2(const SpectralField& u) { return sobolev_norm(u, 0.0); }

Report base(const RunConfig& c) {
  Report r;
  r.config = run_metadata(c.echo(), c.seed());
  return r;
}

Report sweep_report(Report r, const DyadicSweep& s) {
  r.columns = {"level", "value"};
  for (std::size_t i = 0; i < s.levels.size(); ++i)
    r.rows.push_back({static_cast<long long>(s.levels[i]), s.values[i]});
  r.summary["verdict"] = to_string(s.verdict);
  r.summary["growth_slope"] = s.growth_slope;
  return r;
}

Report run_simulate(const RunConfig& c) {
  const TorusGrid g = grid_of(c);
  SolverConfig cfg = solver_of(c);
  cfg.wick = c.flag("wick");
  cfg.nonlinear = c.flag("nonlinear");
  const std::string& datum = c.text("datum");
  SpectralField u0(g);
  if (datum == "random")
    u0 = random_sobolev_field(c.seed(), c.real("s"), c.real("delta"), g);
  else if (datum == "plane_wave")
    u0 = SpectralField::mode(g, static_cast<int>(c.integer("mode")), c.real("amplitude"));
  const Trajectory traj = evolve(u0, cfg);
  Report r = base(c);
  r.columns = {"time", "mass", "energy", "hs_norm"};
  const int eq_sign = cfg.nonlinear ? cfg.sign : 0;
  double m0 = 0, e0 = 0, dm = 0, de = 0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const SpectralField& u = traj.states[i];
    const double m = mass(u), e = conserved_energy(u, cfg.alpha, eq_sign);
    if (i == 0) {
      m0 = m;
      e0 = e;
    }
    dm = std::max(dm, m0 == 0 ? std::abs(m - m0) : std::abs(m - m0) / m0);
    de = std::max(de, e0 == 0 ? std::abs(e - e0) : std::abs(e - e0) / std::abs(e0));
    r.rows.push_back({traj.times[i], m, e, sobolev_norm(u, c.real("s"))});
  }
  r.summary["mass_drift"] = dm;
  r.summary["energy_drift"] = de;
  r.summary["wick_constant"] = traj.wick_constant;
  return r;
}

Report run_normal_form(const RunConfig& c) {
  const TorusGrid g = grid_of(c);
  SolverConfig cfg = solver_of(c);
  const MaskVariant variant = variant_of(c);
  cfg.wick = variant == MaskVariant::torus;
  const SpectralField u0 = random_sobolev_field(c.seed(), c.real("s"), c.real("delta"), g);
  const Trajectory traj = evolve(u0, cfg);
  NormalFormSpec spec;
  spec.c = cfg.mask_constant;
  spec.variant = variant;
  spec.band = band_limit(g, cfg.dealias);
  const std::vector<double> defects = duhamel_defects(traj, spec);
  Report r = base(c);
  r.columns = {"time", "duhamel_defect"};
  for (std::size_t i = 0; i < defects.size(); ++i) r.rows.push_back({traj.times[i], defects[i]});
  if (traj.states.size() >= 3)
    r.summary["identity_residual"] = normal_form_identity_residual(traj, spec);
  const NormalFormTerms t = normal_form_terms(traj.states.front(), cfg.alpha, spec);
  r.summary["b_norm"] = l2(t.b);
  r.summary["r_norm"] = l2(t.r);
  r.summary["nr1_norm"] = l2(t.nr1);
  r.summary["nr2_norm"] = l2(t.nr2);
  if (t.nr3) r.summary["nr3_norm"] = l2(*t.nr3);
  return r;
}

Report run_verify(const RunConfig& c) {
  Report r = base(c);
  const std::string& check = c.text("check");
  const double alpha = c.real("alpha"), s = c.real("s"), a = c.real("a");
  const int K = static_cast<int>(c.integer("K"));
  const std::vector<int> levels =
      dyadic_levels(static_cast<int>(c.integer("k_min")), static_cast<int>(c.integer("k_max")));
  SupremumOptions sup;
  sup.c = c.real("c");
  sup.inner_factor = static_cast<int>(c.integer("inner_factor"));
  LemmaSumOptions lem;
  lem.epsilon = c.real("epsilon");
  lem.a_grid = c.list("a_grid");
  lem.inner_factor = sup.inner_factor;
  lem.enforce_preconditions = c.flag("enforce_preconditions");
  if (check == "phase") {
    r.columns = {"K", "min_ratio"};
    const double half = verify_phase_lower_bound(alpha, std::max(16, K / 2));
    const double full = verify_phase_lower_bound(alpha, K);
    r.rows.push_back({static_cast<long long>(std::max(16, K / 2)), half});
    r.rows.push_back({static_cast<long long>(K), full});
    r.summary["min_ratio"] = full;
    r.summary["relative_change"] = std::abs(full - half) / half;
    r.summary["real_scan_min"] = phase_ratio_real_scan(alpha, K, 100000, c.seed());
  } else if (check == "lemma_sums") {
    r.columns = {"beta", "gamma", "k1", "k2", "K", "ratio"};
    const double ratio = verify_lemma_sums(c.real("beta"), c.real("gamma"), c.integer("k1"),
                                           c.integer("k2"), K);
    r.rows.push_back({c.real("beta"), c.real("gamma"), c.integer("k1"), c.integer("k2"),
                      static_cast<long long>(K), ratio});
    r.summary["ratio"] = ratio;
  } else if (check == "bestimate") {
    r = sweep_report(std::move(r), bestimate_supremum(s, a, alpha, levels, sup));
  } else if (check == "rmultiplier") {
    r = sweep_report(std::move(r), r_multiplier_supremum(s, a, alpha, levels, sup));
  } else if (check == "cubic_resonance") {
    r.columns = {"K", "max_ratio"};
    const double half = verify_lemma_231(s, std::max(1, K / 2), lem);
    const double full = verify_lemma_231(s, K, lem);
    r.rows.push_back({static_cast<long long>(std::max(1, K / 2)), half});
    r.rows.push_back({static_cast<long long>(K), full});
    r.summary["max_ratio"] = full;
    r.summary["doubling_ratio"] = full / half;
  } else {
    r.columns = {"p1", "p2", "p3", "K", "max_ratio"};
    double best = 0.0;
    for (const SignPattern& p : all_sign_patterns()) {
      const double v = verify_lemma_23alpha(s, alpha, p, K, lem);
      best = std::max(best, v);
      r.rows.push_back({static_cast<long long>(p.p1), static_cast<long long>(p.p2),
                        static_cast<long long>(p.p3), static_cast<long long>(K), v});
    }
    r.summary["max_ratio"] = best;
  }
  return r;
}

Report run_quintic(const RunConfig& c) {
  const std::vector<int> levels =
      dyadic_levels(static_cast<int>(c.integer("k_min")), static_cast<int>(c.integer("k_max")));
  const double s = c.real("s"), a = c.real("a"), eps = c.real("epsilon");
  Report r = sweep_report(base(c), quintic_multiplier_supremum(s, a, levels, eps));
  const int kd = static_cast<int>(c.integer("direct_check_k"));
  if (kd > 0) {
    const double direct = quintic_level(s, a, kd, eps, QuinticMethod::direct);
    const double collapsed = quintic_level(s, a, kd, eps, QuinticMethod::collapsed);
    r.summary["direct_value"] = direct;
    r.summary["collapsed_value"] = collapsed;
    r.summary["collapsed_over_direct"] = collapsed / direct;
  }
  r.summary["lattice"] = std::string("unit-spacing lattice surrogate of the real-line integral");
  return r;
}

}  // namespace

Report to_report(const SmoothingReport& s, json config) {
  Report r;
  r.config = std::move(config);
  r.columns = {"time", "residual_norm", "solution_norm"};
  for (std::size_t i = 0; i < s.times.size(); ++i)
    r.rows.push_back({s.times[i], s.residual_norm[i], s.solution_norm[i]});
  r.summary["admissible"] = static_cast<long long>(s.admissible);
  r.summary["window_lo"] = static_cast<long long>(s.window_lo);
  r.summary["window_hi"] = static_cast<long long>(s.window_hi);
  r.summary["datum_slope"] = s.datum_slope;
  r.summary["residual_slope"] = s.residual_slope;
  r.summary["slope_gain"] = s.slope_gain;
  r.summary["bound_ratio"] = s.bound_ratio;
  return r;
}

Report to_report(const GrowthReport& g, json config) {
  Report r;
  r.config = std::move(config);
  r.columns = {"time", "hs_norm", "halpha_norm", "energy"};
  for (std::size_t i = 0; i < g.times.size(); ++i)
    r.rows.push_back({g.times[i], g.hs_norm[i], g.halpha_norm[i], g.energy[i]});
  r.summary["growth_exponent"] = g.growth_exponent;
  r.summary["halpha_drift"] = g.halpha_drift;
  r.summary["energy_drift"] = g.energy_drift;
  r.summary["label"] = std::string("qualitative: finite-time desk-scale run");
  return r;
}

Report to_report(const MaskSensitivityReport& m, json config) {
  Report r;
  r.config = std::move(config);
  r.columns = {"c", "identity_residual", "b_norm", "r_norm", "nr1_norm", "nr2_norm", "nr3_norm"};
  for (const auto& row : m.rows)
    r.rows.push_back({row.c, row.identity_residual, row.b_norm, row.r_norm, row.nr1_norm,
                      row.nr2_norm, row.nr3_norm});
  r.summary["residual_variation"] = m.residual_variation;
  return r;
}

Report to_report(const ConvergenceReport& c, json config) {
  Report r;
  r.config = std::move(config);
  r.columns = {"dt", "evolve_error", "identity_residual", "duhamel_defect"};
  for (const auto& row : c.rows)
    r.rows.push_back({row.dt, row.evolve_error, row.identity_residual, row.duhamel_defect});
  for (std::size_t i = 0; i < c.evolve_order.size(); ++i)
    r.summary["evolve_order_" + std::to_string(i)] = c.evolve_order[i];
  for (std::size_t i = 0; i < c.identity_order.size(); ++i)
    r.summary["identity_order_" + std::to_string(i)] = c.identity_order[i];
  for (std::size_t i = 0; i < c.duhamel_order.size(); ++i)
    r.summary["duhamel_order_" + std::to_string(i)] = c.duhamel_order[i];
  return r;
}

Report execute(const RunConfig& c) {
  validate_config(c);
  const json meta = run_metadata(c.echo(), c.seed());
  switch (c.subcommand) {
    case Subcommand::simulate:
      return run_simulate(c);
    case Subcommand::normal_form:
      return run_normal_form(c);
    case Subcommand::verify:
      return run_verify(c);
    case Subcommand::quintic:
      return run_quintic(c);
    case Subcommand::smoothing: {
      SmoothingSetup s;
      s.seed = c.seed();
      s.s = c.real("s");
      s.a = c.real("a");
      s.delta = c.real("delta");
      s.grid = grid_of(c);
      s.solver = solver_of(c);
      s.gauge = c.text("gauge") == "free" ? SmoothingGauge::free : SmoothingGauge::wick_rotated;
      s.window_lo = static_cast<int>(c.integer("window_lo"));
      s.window_hi = static_cast<int>(c.integer("window_hi"));
      return to_report(run_smoothing(s), meta);
    }
    case Subcommand::growth: {
      GrowthSetup g;
      g.seed = c.seed();
      g.s = c.real("s");
      g.delta = c.real("delta");
      g.grid = grid_of(c);
      g.solver = solver_of(c);
      g.solver.nonlinear = c.flag("nonlinear");
      return to_report(run_growth(g), meta);
    }
    case Subcommand::sensitivity: {
      MaskSensitivitySetup m;
      m.seed = c.seed();
      m.s = c.real("s");
      m.delta = c.real("delta");
      m.grid = grid_of(c);
      m.solver = solver_of(c);
      m.c_values = c.list("c_values");
      return to_report(mask_sensitivity(m), meta);
    }
    case Subcommand::convergence: {
      ConvergenceSetup v;
      v.seed = c.seed();
      v.s = c.real("s");
      v.delta = c.real("delta");
      v.grid = grid_of(c);
      v.solver = solver_of(c);
      v.dt_levels = c.list("dt_levels");
      v.variant = variant_of(c);
      return to_report(convergence_study(v), meta);
    }
  }
  throw PreconditionViolated("unknown subcommand");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonFiniteState*>(&e) || dynamic_cast<const DivisionNearZero*>(&e))
    return 2;
  if (dynamic_cast<const IoError*>(&e)) return 3;
  return 1;
}

}  // namespace fnls
