#include "fnls/errors.hpp"
#include "fnls/normal_form.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace fnls;

namespace {

double rel(const CoeffVector& a, const CoeffVector& b) {
  const double scale = b.norm();
  return scale == 0.0 ? a.norm() : (a - b).norm() / scale;
}

SpectralField two_modes(const TorusGrid& g) {
  CoeffVector c = CoeffVector::Zero(g.size());
  c[g.slot(0)] = 1.0;
  c[g.slot(1)] = 1.0;
  return SpectralField(g, c);
}

// Exhaustive torus oracle written from the definitions, independent of the
// library's lattice code. Integer frequencies, band J, threshold c<k>^{2-2a}.
struct TorusOracle {
  const SpectralField& u;
  double alpha, c;
  int band;

  Complex at(int j) const { return std::abs(j) <= band ? u[j] : Complex(0.0); }
  double w(int j) const { return std::pow(std::abs(double(j)), 2 * alpha); }
  double thr(int k) const { return c * std::pow(std::sqrt(1.0 + double(k) * k), 2 - 2 * alpha); }
  bool b_mask(int k, int k1, int k2) const {
    const double p = std::abs(double(k1 - k)) * std::abs(double(k2 - k1));
    return p > 0 && p >= thr(k);
  }
  bool r_mask(int k, int k1, int k2) const {
    const double p = std::abs(double(k1 - k)) * std::abs(double(k2 - k1));
    return p > 0 && p < thr(k);
  }
  // Cubic sum at j without the pairs a = j and b = a.
  Complex q(int j) const {
    Complex s = 0.0;
    for (int a = -band; a <= band; ++a)
      for (int b = -band; b <= band; ++b) {
        if (a == j || b == a) continue;
        s += at(a) * std::conj(at(b)) * at(j - a + b);
      }
    return s;
  }
  // Sum over masked (k1, k2) of f(k1, k2, k3) / Phi.
  Complex masked(int k, const std::function<Complex(int, int, int)>& f, bool divide = true) const {
    Complex s = 0.0;
    for (int k1 = -band; k1 <= band; ++k1)
      for (int k2 = -band; k2 <= band; ++k2) {
        const int k3 = k - k1 + k2;
        if (std::abs(k3) > band) continue;
        if (divide ? !b_mask(k, k1, k2) : !r_mask(k, k1, k2)) continue;
        const double phi = w(k) - w(k1) + w(k2) - w(k3);
        s += f(k1, k2, k3) / (divide ? phi : 1.0);
      }
    return s;
  }
  CoeffVector field(const std::function<Complex(int)>& value) const {
    CoeffVector out = CoeffVector::Zero(u.grid().size());
    for (int k = -band; k <= band; ++k) out[u.grid().slot(k)] = value(k);
    return out;
  }
  CoeffVector b() const {
    return field([&](int k) {
      return masked(k, [&](int a, int b, int c3) { return at(a) * std::conj(at(b)) * at(c3); });
    });
  }
  CoeffVector r() const {
    return field([&](int k) {
      return -std::norm(at(k)) * at(k) +
             masked(k, [&](int a, int b, int c3) { return at(a) * std::conj(at(b)) * at(c3); },
                    false);
    });
  }
  CoeffVector nr1() const {
    std::map<int, Complex> qs;
    for (int j = -3 * band; j <= 3 * band; ++j) qs[j] = std::abs(j) <= band ? q(j) : 0.0;
    return field([&](int k) {
      return 2.0 * masked(k, [&](int a, int b, int c3) { return at(a) * std::conj(at(b)) * qs[c3]; });
    });
  }
  CoeffVector nr2() const {
    std::map<int, Complex> qs;
    for (int j = -band; j <= band; ++j) qs[j] = q(j);
    return field([&](int k) {
      return -masked(k, [&](int a, int b, int c3) { return at(a) * std::conj(qs[b]) * at(c3); });
    });
  }
  CoeffVector nr3() const {
    return field([&](int k) {
      return masked(k, [&](int a, int b, int c3) {
        return at(a) * std::conj(at(b)) * at(c3) * (std::norm(at(b)) - 2 * std::norm(at(c3)));
      });
    });
  }
};

SolverConfig wick_config(double alpha, int sign, double dt, double horizon) {
  SolverConfig c;
  c.alpha = alpha;
  c.sign = sign;
  c.dt = dt;
  c.horizon = horizon;
  c.wick = true;
  return c;
}

}  // namespace

TEST(PhaseG, Examples) {
  EXPECT_DOUBLE_EQ(phase_g(2, 3, 5, 1.0), 12.0);
  for (double n : {-3.0, 0.5, 7.0})
    for (double k : {-2.0, 0.0, 4.0}) EXPECT_EQ(phase_g(0, n, k, 0.8), 0.0);
  EXPECT_NEAR(phase_g(1, 1, 0, 0.75), 2 * std::sqrt(2.0) - 2, 1e-15);
}

TEST(PhaseG, QuadraticCaseIsTwiceProduct) {
  for (int m = -4; m <= 4; ++m)
    for (int n = -4; n <= 4; ++n)
      for (int k = -6; k <= 6; ++k)
        EXPECT_NEAR(phase_g(m, n, k, 1.0), 2.0 * std::abs(m * n), 1e-12);
}

TEST(ResonanceMask, Examples) {
  MaskSpec b{1.0, MaskVariant::torus, MaskRole::b};
  MaskSpec r{1.0, MaskVariant::torus, MaskRole::r};
  EXPECT_TRUE(resonance_mask(2, 1, 0, 1.0, b));
  for (double alpha : {1.0, 0.75, 0.6}) {
    EXPECT_FALSE(resonance_mask(5, 5, 3, alpha, b));
    EXPECT_FALSE(resonance_mask(5, 5, 3, alpha, r));
  }
  EXPECT_FALSE(resonance_mask(100, 101, 102, 0.75, b));
  EXPECT_TRUE(resonance_mask(100, 101, 102, 0.75, r));
}

TEST(ResonanceMask, LineRIsComplementOfB) {
  MaskSpec b{1.0, MaskVariant::line, MaskRole::b};
  MaskSpec r{1.0, MaskVariant::line, MaskRole::r};
  for (double k : {0.0, 0.5, 3.25})
    for (double k1 : {-1.0, 0.0, 0.5, 2.0})
      for (double k2 : {-0.25, 0.5, 4.0})
        EXPECT_NE(resonance_mask(k, k1, k2, 0.7, b), resonance_mask(k, k1, k2, 0.7, r));
}

TEST(TransformB, TwoModeOracle) {
  const TorusGrid g(8);
  const SpectralField b = transform_b(two_modes(g), 1.0, {});
  EXPECT_NEAR(std::abs(b[2] - 0.5), 0.0, 1e-15);
  EXPECT_EQ(b[0], Complex(0.0));
}

TEST(Transforms, SingleModeHasOnlyDiagonalR) {
  const TorusGrid g(16);
  for (double alpha : {1.0, 0.7})
    for (double c : {0.5, 1.0, 2.0}) {
      const SpectralField u = SpectralField::mode(g, 1, 2.0);
      const NormalFormSpec spec{c};
      const NormalFormTerms t = normal_form_terms(u, alpha, spec);
      EXPECT_LT(t.b.coeffs().norm(), 1e-14);
      EXPECT_LT(t.nr1.coeffs().norm(), 1e-14);
      EXPECT_LT(t.nr2.coeffs().norm(), 1e-14);
      EXPECT_LT(t.nr3->coeffs().norm(), 1e-14);
      EXPECT_NEAR(std::abs(t.r[1] + 8.0), 0.0, 1e-14);
      EXPECT_NEAR(t.r.coeffs().norm(), 8.0, 1e-14);
    }
}

TEST(TransformR, QuadraticDispersionLeavesOnlyDiagonal) {
  const TorusGrid g(32);
  const SpectralField u = random_sobolev_field(3, 0.5, 0.05, g);
  const SpectralField r = transform_r(u, 1.0, {});
  const int band = band_limit(g, DealiasRule::two_thirds);
  for (int k = g.min_index(); k <= g.max_index(); ++k) {
    const Complex expected = std::abs(k) <= band ? -std::norm(u[k]) * u[k] : Complex(0.0);
    EXPECT_NEAR(std::abs(r[k] - expected), 0.0, 1e-15) << k;
  }
}

TEST(Transforms, TwoModeQuinticOracle) {
  const TorusGrid g(8);
  const SpectralField u = two_modes(g);
  const TorusOracle o{u, 1.0, 1.0, 2};
  const NormalFormTerms t = normal_form_terms(u, 1.0, {});
  EXPECT_LT(rel(t.nr1.coeffs(), o.nr1()), 1e-14);
  EXPECT_LT(rel(t.nr2.coeffs(), o.nr2()), 1e-14);
  EXPECT_LT(rel(t.nr3->coeffs(), o.nr3()), 1e-14);
  // Real nonnegative coefficients with |u0| = |u1| = 1: every NR3 term is
  // minus the matching B term.
  EXPECT_LT((t.nr3->coeffs() + t.b.coeffs()).norm(), 1e-15);
  EXPECT_GT(t.b.coeffs().norm(), 0.0);
}

class FastVsExhaustive : public ::testing::TestWithParam<std::tuple<int, double, double>> {};

TEST_P(FastVsExhaustive, AllTermsAgree) {
  const auto [n, alpha, c] = GetParam();
  const TorusGrid g(n);
  const SpectralField u = random_sobolev_field(40 + n, 0.3, 0.05, g);
  const NormalFormSpec spec{c};
  const TorusOracle o{u, alpha, c, spec.resolved_band(g)};
  const NormalFormTerms t = normal_form_terms(u, alpha, spec);
  EXPECT_LT(rel(t.b.coeffs(), o.b()), 1e-12);
  EXPECT_LT(rel(t.r.coeffs(), o.r()), 1e-12);
  EXPECT_LT(rel(t.nr1.coeffs(), o.nr1()), 1e-12);
  EXPECT_LT(rel(t.nr2.coeffs(), o.nr2()), 1e-12);
  EXPECT_LT(rel(t.nr3->coeffs(), o.nr3()), 1e-12);
  EXPECT_LT(rel(transform_b(u, alpha, spec).coeffs(), reference::transform_b(u, alpha, spec).coeffs()), 1e-12);
  EXPECT_LT(rel(transform_r(u, alpha, spec).coeffs(), reference::transform_r(u, alpha, spec).coeffs()), 1e-12);
  EXPECT_LT(rel(transform_nr1(u, alpha, spec).coeffs(), reference::transform_nr1(u, alpha, spec).coeffs()), 1e-12);
  EXPECT_LT(rel(transform_nr2(u, alpha, spec).coeffs(), reference::transform_nr2(u, alpha, spec).coeffs()), 1e-12);
  EXPECT_LT(rel(transform_nr3(u, alpha, spec).coeffs(), reference::transform_nr3(u, alpha, spec).coeffs()), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Grid, FastVsExhaustive,
                         ::testing::Combine(::testing::Values(8, 12, 16),
                                            ::testing::Values(1.0, 0.75, 0.6),
                                            ::testing::Values(0.5, 1.0, 2.0)));

TEST(Transforms, LineFastMatchesReference) {
  const TorusGrid box(24, 6 * std::numbers::pi);
  const SpectralField u = random_sobolev_field(5, 0.8, 0.05, box);
  for (double alpha : {1.0, 0.7}) {
    const NormalFormSpec spec{1.0, MaskVariant::line};
    EXPECT_LT(rel(transform_b(u, alpha, spec).coeffs(), reference::transform_b(u, alpha, spec).coeffs()), 1e-12);
    EXPECT_LT(rel(transform_r(u, alpha, spec).coeffs(), reference::transform_r(u, alpha, spec).coeffs()), 1e-12);
    EXPECT_LT(rel(transform_nr1(u, alpha, spec).coeffs(), reference::transform_nr1(u, alpha, spec).coeffs()), 1e-12);
    EXPECT_LT(rel(transform_nr2(u, alpha, spec).coeffs(), reference::transform_nr2(u, alpha, spec).coeffs()), 1e-12);
    EXPECT_FALSE(normal_form_terms(u, alpha, spec).nr3.has_value());
    EXPECT_THROW(transform_nr3(u, alpha, spec), PreconditionViolated);
  }
}

TEST(Transforms, LineAndTorusBAgreeWhenMasksCoincide) {
  // At alpha = 1 both thresholds equal c, so the B masks coincide on Z.
  const TorusGrid g(16);
  const SpectralField u = random_sobolev_field(8, 0.5, 0.05, g);
  EXPECT_LT(rel(transform_b(u, 1.0, {1.0, MaskVariant::line}).coeffs(),
                transform_b(u, 1.0, {1.0, MaskVariant::torus}).coeffs()),
            1e-14);
}

TEST(Transforms, InnerCubicIsNonresonantPartOnTorus) {
  const TorusGrid g(16);
  const SpectralField u = random_sobolev_field(2, 0.3, 0.05, g);
  const NormalFormSpec spec{};
  const int band = spec.resolved_band(g);
  const TorusOracle o{u, 0.8, 1.0, band};
  const SpectralField q = inner_cubic(u, spec);
  for (int j = -band; j <= band; ++j) EXPECT_NEAR(std::abs(q[j] - o.q(j)), 0.0, 1e-13) << j;
  const SpectralField full = inner_cubic(u, {1.0, MaskVariant::line});
  const SpectralField n = cubic_product(u, band);
  for (int j = -band; j <= band; ++j) EXPECT_NEAR(std::abs(full[j] - n[j]), 0.0, 1e-13);
}

TEST(Transforms, GaugeCovarianceAndScaling) {
  const TorusGrid g(24);
  const SpectralField u = random_sobolev_field(6, 0.5, 0.05, g);
  const Complex phase = std::polar(1.0, 0.9);
  const double lambda = 1.7;
  const NormalFormTerms t = normal_form_terms(u, 0.75, {});
  const NormalFormTerms rotated = normal_form_terms(phase * u, 0.75, {});
  const NormalFormTerms scaled = normal_form_terms(Complex(lambda) * u, 0.75, {});
  const double l3 = std::pow(lambda, 3), l5 = std::pow(lambda, 5);
  EXPECT_LT(rel(rotated.b.coeffs(), phase * t.b.coeffs()), 1e-13);
  EXPECT_LT(rel(rotated.r.coeffs(), phase * t.r.coeffs()), 1e-13);
  EXPECT_LT(rel(rotated.nr1.coeffs(), phase * t.nr1.coeffs()), 1e-13);
  EXPECT_LT(rel(rotated.nr2.coeffs(), phase * t.nr2.coeffs()), 1e-13);
  EXPECT_LT(rel(rotated.nr3->coeffs(), phase * t.nr3->coeffs()), 1e-13);
  EXPECT_LT(rel(scaled.b.coeffs(), l3 * t.b.coeffs()), 1e-13);
  EXPECT_LT(rel(scaled.r.coeffs(), l3 * t.r.coeffs()), 1e-13);
  EXPECT_LT(rel(scaled.nr1.coeffs(), l5 * t.nr1.coeffs()), 1e-13);
  EXPECT_LT(rel(scaled.nr2.coeffs(), l5 * t.nr2.coeffs()), 1e-13);
  EXPECT_LT(rel(scaled.nr3->coeffs(), l5 * t.nr3->coeffs()), 1e-13);
}

TEST(Transforms, Nr3BoundedByModulusB) {
  const TorusGrid g(32);
  for (std::uint64_t seed : {1, 2, 3}) {
    const SpectralField u = random_sobolev_field(seed, 0.4, 0.05, g);
    CoeffVector mod = u.coeffs().cwiseAbs().cast<Complex>();
    const SpectralField abs_u(g, mod);
    const double sup2 = std::pow(u.coeffs().cwiseAbs().maxCoeff(), 2);
    // B evaluated on |u| with |Phi| in the denominator.
    const int band = band_limit(g, DealiasRule::two_thirds);
    const TorusOracle o{abs_u, 0.75, 1.0, band};
    const SpectralField nr3 = transform_nr3(u, 0.75, {});
    for (int k = -band; k <= band; ++k) {
      double bound = 0.0;
      for (int k1 = -band; k1 <= band; ++k1)
        for (int k2 = -band; k2 <= band; ++k2) {
          const int k3 = k - k1 + k2;
          if (std::abs(k3) > band || !o.b_mask(k, k1, k2)) continue;
          const double phi = o.w(k) - o.w(k1) + o.w(k2) - o.w(k3);
          bound += o.at(k1).real() * o.at(k2).real() * o.at(k3).real() / std::abs(phi);
        }
      EXPECT_LE(std::abs(nr3[k]), 3 * sup2 * bound * (1 + 1e-12) + 1e-300) << k;
    }
  }
}

TEST(Transforms, MaskedDenominatorsRespectLowerBound) {
  // On the B-mask |Phi| = g(m, n, k) > 0; DivisionNearZero must never fire.
  const TorusGrid g(64);
  const SpectralField u = random_sobolev_field(1, 0.0, 0.05, g);
  for (double alpha : {1.0, 0.75, 0.6})
    for (double c : {1.0, 2.0}) EXPECT_NO_THROW(normal_form_terms(u, alpha, {c}));
  const int band = band_limit(g, DealiasRule::two_thirds);
  for (double alpha : {0.75, 0.6}) {
    MaskSpec b{1.0, MaskVariant::torus, MaskRole::b};
    double worst = 1e300;
    for (int k = -band; k <= band; ++k)
      for (int k1 = -band; k1 <= band; ++k1)
        for (int k2 = -band; k2 <= band; ++k2) {
          if (std::abs(k - k1 + k2) > band || !resonance_mask(k, k1, k2, alpha, b)) continue;
          const double m = k1 - k, n = k2 - k1;
          const double ratio = phase_g(m, n, k, alpha) /
                               (std::abs(m * n) / std::pow(std::abs(m) + std::abs(n) + std::abs(k), 2 - 2 * alpha));
          worst = std::min(worst, ratio);
        }
    EXPECT_GT(worst, 0.1) << alpha;
  }
}

TEST(IdentityResidual, ZeroTrajectory) {
  const TorusGrid g(16);
  const Trajectory t = evolve(SpectralField(g), wick_config(0.75, -1, 1e-2, 0.1));
  EXPECT_EQ(normal_form_identity_residual(t, {}), 0.0);
  EXPECT_EQ(duhamel_residual(t, {}), 0.0);
}

TEST(IdentityResidual, Preconditions) {
  const TorusGrid g(16);
  const SpectralField u = SpectralField::mode(g, 1, 1.0);
  Trajectory short_run = evolve(u, wick_config(1.0, -1, 1e-2, 1e-2));
  EXPECT_THROW(normal_form_identity_residual(short_run, {}), InsufficientSamples);
  SolverConfig plain = wick_config(1.0, -1, 1e-2, 0.1);
  plain.wick = false;
  EXPECT_THROW(normal_form_identity_residual(evolve(u, plain), {}), PreconditionViolated);
  EXPECT_THROW(normal_form_identity_residual(evolve(u, wick_config(1.0, -1, 1e-2, 0.1)),
                                             {1.0, MaskVariant::line}),
               PreconditionViolated);
}

TEST(IdentityResidual, PlaneWaveAtTruncationLevel) {
  const TorusGrid g(16);
  auto residual = [&](double dt) {
    return normal_form_identity_residual(
        evolve(SpectralField::mode(g, 1, 1.0), wick_config(1.0, -1, dt, 0.2)), {});
  };
  const double coarse = residual(2e-3), fine = residual(1e-3);
  EXPECT_LT(coarse, 1e-4);
  EXPECT_NEAR(coarse / fine, 4.0, 0.2);
}

TEST(IdentityResidual, RandomDatumSecondOrder) {
  const TorusGrid g(64);
  const SpectralField u0 = random_sobolev_field(3, 1.0, 0.05, g);
  auto residual = [&](double dt) {
    return normal_form_identity_residual(evolve(u0, wick_config(0.75, -1, dt, 0.2)), {});
  };
  const double ratio = residual(2e-3) / residual(1e-3);
  EXPECT_GE(ratio, 3.2);
  EXPECT_LE(ratio, 4.8);
}

TEST(IdentityResidual, HoldsForEveryMaskConstant) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(5, 1.0, 0.05, g);
  const Trajectory coarse = evolve(u0, wick_config(0.7, 1, 2e-3, 0.1));
  const Trajectory fine = evolve(u0, wick_config(0.7, 1, 1e-3, 0.1));
  for (double c : {0.5, 1.0, 2.0}) {
    const double ratio =
        normal_form_identity_residual(coarse, {c}) / normal_form_identity_residual(fine, {c});
    EXPECT_GE(ratio, 3.2) << c;
    EXPECT_LE(ratio, 4.8) << c;
  }
}

TEST(IdentityResidual, LineVariantOnBox) {
  const TorusGrid box(32, 4 * std::numbers::pi);
  const SpectralField u0 = random_sobolev_field(5, 1.0, 0.05, box);
  SolverConfig cfg = wick_config(0.8, -1, 1e-3, 0.1);
  cfg.wick = false;
  const Trajectory t = evolve(u0, cfg);
  EXPECT_LT(normal_form_identity_residual(t, {1.0, MaskVariant::line}), 1e-4);
}

TEST(Duhamel, StartsAtZeroAndConvergesAtSecondOrder) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(3, 1.0, 0.05, g);
  SolverConfig cfg = wick_config(0.75, -1, 1e-3, 0.2);
  cfg.sample_stride = 20;
  const Trajectory coarse = evolve(u0, cfg);
  cfg.sample_stride = 10;
  const Trajectory fine = evolve(u0, cfg);
  EXPECT_EQ(duhamel_defects(coarse, {}).front(), 0.0);
  const double ratio = duhamel_residual(coarse, {}) / duhamel_residual(fine, {});
  EXPECT_NEAR(ratio, 4.0, 0.4);
}

TEST(SmoothingResidual, Examples) {
  const TorusGrid g(32);
  const SpectralField u0 = random_sobolev_field(4, 1.0, 0.05, g);
  EXPECT_EQ(smoothing_residual(u0, u0, 0.0, 0.75, 1.3).coeffs().norm(), 0.0);

  SolverConfig linear = wick_config(0.75, -1, 1e-2, 1.0);
  linear.wick = false;
  linear.nonlinear = false;
  const Trajectory t = evolve(u0, linear);
  EXPECT_LT(smoothing_residual(t.states.back(), t.states.front(), 1.0, 0.75, 0.0).coeffs().norm(), 1e-13);
}

TEST(SmoothingResidual, PlaneWaveDoesNotVanish) {
  // exp(2it) against exp(it) exp(-i sigma P t) = exp(3it): |res| = 2|sin(t/2)|.
  const TorusGrid g(16);
  const SpectralField u0 = SpectralField::mode(g, 1, 1.0);
  for (double t : {0.25, 1.0, 2.0}) {
    const SpectralField ut = plane_wave_oracle(g, 1.0, 1, 1.0, -1, t);
    const double res = smoothing_residual(ut, u0, t, 1.0, -1 * wick_constant(u0)).coeffs().norm();
    EXPECT_NEAR(res, 2 * std::abs(std::sin(t / 2)), 1e-14) << t;
  }
  SolverConfig cfg = wick_config(1.0, -1, 1e-3, 1.0);
  cfg.wick = false;
  const Trajectory run = evolve(u0, cfg);
  const double res = smoothing_residual(run.states.back(), u0, 1.0, 1.0, -wick_constant(u0)).coeffs().norm();
  EXPECT_NEAR(res, 2 * std::sin(0.5), 1e-10);
}
