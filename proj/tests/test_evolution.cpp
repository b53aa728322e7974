#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fnls;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig config(double alpha, int sign, double dt, double horizon) {
  SolverConfig c;
  c.alpha = alpha;
  c.sign = sign;
  c.dt = dt;
  c.horizon = horizon;
  return c;
}

double rel(const SpectralField& a, const SpectralField& b) {
  return (a.coeffs() - b.coeffs()).norm() / std::max(1e-300, b.coeffs().norm());
}

double max_drift(const std::vector<double>& series) {
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
  return worst / std::abs(series.front());
}

}  // namespace

TEST(WickConstant, Examples) {
  const TorusGrid g(16);
  EXPECT_NEAR(wick_constant(SpectralField::mode(g, 1, 1.0)), 2.0, 1e-15);
  EXPECT_EQ(wick_constant(SpectralField(g)), 0.0);
  EXPECT_NEAR(wick_constant(SpectralField::mode(g, 1, 0.3)), 2 * 0.09, 1e-15);
}

TEST(SolverConfig, Validation) {
  EXPECT_THROW(config(1.0, -1, 1e-3, 0.0).validate(), InvalidConfig);
  EXPECT_THROW(config(0.5, -1, 1e-3, 1.0).validate(), InvalidConfig);
  EXPECT_THROW(config(1.0, 0, 1e-3, 1.0).validate(), InvalidConfig);
  EXPECT_THROW(config(1.0, -1, 2.0, 1.0).validate(), InvalidConfig);
  EXPECT_THROW(config(1.0, -1, 0.3, 1.0).validate(), InvalidConfig);
  SolverConfig c = config(1.0, -1, 1e-3, 1.0);
  c.mask_constant = 0.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = config(1.0, -1, 1e-3, 1.0);
  c.sample_stride = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  EXPECT_NO_THROW(config(0.75, 1, 1e-3, 1.0).validate());
  EXPECT_EQ(config(1.0, -1, 1e-3, 1.0).steps(), 1000);
  const TorusGrid g(16);
  EXPECT_THROW(evolve(SpectralField(g), config(1.0, -1, 1e-3, 0.0)), InvalidConfig);
}

TEST(Step, ZeroStaysZero) {
  const TorusGrid g(32);
  EXPECT_EQ(step(SpectralField(g), config(0.75, 1, 1e-2, 1.0)).coeffs().norm(), 0.0);
  const Trajectory t = evolve(SpectralField(g), config(0.75, -1, 1e-2, 0.1));
  ASSERT_EQ(t.states.size(), 11u);
  for (const auto& s : t.states) EXPECT_EQ(s.coeffs().norm(), 0.0);
}

TEST(Step, PlaneWaveOneStep) {
  const TorusGrid g(16);
  const SolverConfig cfg = config(1.0, -1, 1e-3, 1.0);
  const SpectralField next = step(SpectralField::mode(g, 1, 1.0), cfg);
  EXPECT_LT(rel(next, plane_wave_oracle(g, 1.0, 1, 1.0, -1, 1e-3)), 1e-12);
}

TEST(Step, LocalErrorIsFifthOrder) {
  const TorusGrid g(32);
  const SpectralField u = random_sobolev_field(7, 2.0, 0.05, g);
  auto local_error = [&](double dt) {
    const SpectralField coarse = step(u, config(0.75, 1, dt, 1.0));
    SpectralField fine = u;
    for (int i = 0; i < 16; ++i) fine = step(fine, config(0.75, 1, dt / 16, 1.0));
    return (coarse.coeffs() - fine.coeffs()).norm();
  };
  const double ratio = local_error(0.1) / local_error(0.05);
  EXPECT_GT(ratio, 24.0);
  EXPECT_LT(ratio, 40.0);
}

TEST(PlaneWave, FrequencyExamples) {
  const TorusGrid g(16);
  EXPECT_DOUBLE_EQ(plane_wave_frequency(g, 1.0, 1, 1.0, -1), 2.0);
  EXPECT_NEAR(plane_wave_frequency(g, 2.0, 2, 0.75, 1), 2 * std::sqrt(2.0) - 4, 1e-14);
  EXPECT_EQ(plane_wave_oracle(g, 0.0, 3, 0.8, 1, 5.0).coeffs().norm(), 0.0);
}

TEST(PlaneWave, EvolutionMatchesExactSolution) {
  const TorusGrid g(32);
  for (auto [amp, k] : {std::pair{1.0, 1}, std::pair{0.5, 3}})
    for (double alpha : {1.0, 0.75})
      for (int sign : {-1, 1}) {
        const Trajectory t = evolve(SpectralField::mode(g, k, amp), config(alpha, sign, 1e-3, 1.0));
        EXPECT_LT(rel(t.states.back(), plane_wave_oracle(g, amp, k, alpha, sign, 1.0)), 1e-6)
            << amp << " " << k << " " << alpha << " " << sign;
      }
}

TEST(Evolve, TrajectoryInvariants) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(3, 1.5, 0.05, g);
  SolverConfig cfg = config(0.8, -1, 1e-2, 0.5);
  cfg.sample_stride = 5;
  const Trajectory t = evolve(u0, cfg);
  ASSERT_EQ(t.times.size(), 11u);
  EXPECT_EQ(t.times.front(), 0.0);
  EXPECT_NEAR(t.times.back(), 0.5, 1e-15);
  for (std::size_t i = 1; i < t.times.size(); ++i) EXPECT_GT(t.times[i], t.times[i - 1]);
  EXPECT_EQ(t.states.front().coeffs(),
            project_band(u0, band_limit(g, DealiasRule::two_thirds)).coeffs());
  for (const auto& s : t.states) EXPECT_EQ(s.grid(), g);
  EXPECT_NEAR(t.wick_constant, wick_constant(t.states.front()), 1e-15);
}

TEST(Evolve, MassConservation) {
  const TorusGrid g(128);
  for (int sign : {-1, 1}) {
    const Trajectory t =
        evolve(0.5 * random_sobolev_field(5, 2.0, 0.05, g), config(0.75, sign, 1e-3, 1.0));
    std::vector<double> m;
    for (const auto& s : t.states) m.push_back(mass(s));
    EXPECT_LT(max_drift(m), 1e-10) << sign;
  }
}

TEST(Energy, Examples) {
  const TorusGrid g(16);
  EXPECT_NEAR(energy(SpectralField::mode(g, 1, 1.0), 1.0, 1), 3 * kPi, 1e-13);
  EXPECT_EQ(energy(SpectralField(g), 0.75, -1), 0.0);
  EXPECT_NEAR(conserved_energy(SpectralField::mode(g, 1, 1.0), 1.0, -1), 3 * kPi, 1e-13);
}

TEST(Energy, DerivedPairingConservesAndVerbatimPairingDrifts) {
  const TorusGrid g(64);
  for (double alpha : {1.0, 0.75})
    for (int sign : {-1, 1}) {
      const Trajectory t =
          evolve(0.5 * random_sobolev_field(9, 2.0, 0.05, g), config(alpha, sign, 1e-3, 1.0));
      std::vector<double> conserved, verbatim;
      for (const auto& s : t.states) {
        conserved.push_back(conserved_energy(s, alpha, sign));
        verbatim.push_back(energy(s, alpha, sign));
      }
      EXPECT_LT(max_drift(conserved), 1e-8) << alpha << " " << sign;
      EXPECT_GT(max_drift(verbatim), 1e-4) << alpha << " " << sign;
    }
}

TEST(Evolve, GlobalSelfConvergenceIsFourthOrder) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(2, 2.0, 0.05, g);
  const SpectralField ref = evolve(u0, config(0.75, -1, 0.025 / 16, 0.5)).states.back();
  auto err = [&](double dt) {
    return (evolve(u0, config(0.75, -1, dt, 0.5)).states.back().coeffs() - ref.coeffs()).norm();
  };
  const double ratio = err(0.05) / err(0.025);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Evolve, WickGaugeEquivalence) {
  const TorusGrid g(64);
  const SpectralField u0 = random_sobolev_field(4, 1.5, 0.05, g);
  for (int sign : {-1, 1}) {
    // The P w term is integrated by RK4, so the two runs differ by O(dt^4).
    SolverConfig cfg = config(0.75, sign, 5e-4, 1.0);
    cfg.sample_stride = 200;
    const Trajectory plain = evolve(u0, cfg);
    cfg.wick = true;
    const Trajectory wick = evolve(u0, cfg);
    ASSERT_EQ(plain.times.size(), wick.times.size());
    for (std::size_t i = 0; i < plain.times.size(); ++i) {
      const SpectralField gauged = rotate_phase(plain.states[i], sign * plain.wick_constant * plain.times[i]);
      EXPECT_LT((wick.states[i].coeffs() - gauged.coeffs()).cwiseAbs().maxCoeff(), 1e-8) << i;
    }
  }
}

TEST(Evolve, LinearFlowIsExact) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(6, 1.0, 0.05, g);
  SolverConfig cfg = config(0.6, 1, 0.1, 1.0);
  cfg.nonlinear = false;
  const Trajectory t = evolve(u0, cfg);
  EXPECT_LT(rel(t.states.back(), free_propagate(t.states.front(), 1.0, 0.6)), 1e-13);
}

TEST(Evolve, BlowupGuardReportsTime) {
  const TorusGrid g(16);
  const SolverConfig cfg = config(1.0, 1, 0.05, 5.0);
  try {
    evolve(SpectralField::mode(g, 0, 1e7), cfg);
    FAIL() << "expected NonFiniteState";
  } catch (const NonFiniteState& e) {
    EXPECT_GT(e.time(), 0.0);
  }
}
