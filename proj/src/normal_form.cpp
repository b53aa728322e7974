#include "fnls/normal_form.hpp"

#include "fnls/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace fnls {

namespace {

// Ties go to B. On a boxed line the product is formed from rounded
// frequencies, so a relative slack keeps both evaluation orders on one side.
bool mask_b_product(double product, double threshold) {
  return product > 0.0 && product >= threshold * (1.0 - 1e-12);
}

double threshold_for(MaskVariant variant, double c, double k, double m,
                     double n, double alpha) {
  const double power = 2.0 - 2.0 * alpha;
  if (variant == MaskVariant::torus) return c * std::pow(japanese_bracket(k), power);
  return c * std::pow(std::abs(m) + std::abs(n) + std::abs(k), power);
}

// Band-restricted view of a field: dense arrays over [-J, J].
struct Lattice {
  TorusGrid grid;
  int band;
  double spacing;
  std::vector<double> omega;
  std::vector<Complex> u;

  Lattice(const SpectralField& f, int j, double alpha)
      : grid(f.grid()), band(j), spacing(f.grid().spacing()),
        omega(2 * j + 1), u(2 * j + 1) {
    if (j < 1 || j > f.grid().max_index())
      throw PreconditionViolated("band must lie in [1, N/2-1]");
    for (int i = -j; i <= j; ++i) {
      omega[i + j] = dispersion_symbol(i * spacing, alpha);
      u[i + j] = f[i];
    }
  }
  bool in(int i) const { return std::abs(i) <= band; }
  Complex at(int i) const { return u[i + band]; }
  double w(int i) const { return omega[i + band]; }
  double phase(int k, int k1, int k2, int k3) const {
    return w(k) - w(k1) + w(k2) - w(k3);
  }
  SpectralField field(const std::vector<Complex>& values) const {
    CoeffVector c = CoeffVector::Zero(grid.size());
    for (int i = -band; i <= band; ++i) c[grid.slot(i)] = values[i + band];
    return SpectralField(grid, std::move(c));
  }
};

double checked_denominator(double phi) {
  if (std::abs(phi) < kDenominatorGuard)
    throw DivisionNearZero("phase denominator vanished on a masked term");
  return phi;
}

int band_for(const SpectralField& u, const NormalFormSpec& spec) {
  return spec.resolved_band(u.grid());
}

struct Accumulated {
  std::vector<Complex> b, r, nr1, nr2, nr3;
};

// One sweep over (k, k1, k2) computing every requested term.
Accumulated sweep(const Lattice& lat, const std::vector<Complex>& q,
                  double alpha, const NormalFormSpec& spec) {
  const int j = lat.band;
  const int width = 2 * j + 1;
  Accumulated out{std::vector<Complex>(width), std::vector<Complex>(width),
                  std::vector<Complex>(width), std::vector<Complex>(width),
                  std::vector<Complex>(width)};
  const bool torus = spec.variant == MaskVariant::torus;
  const double d = lat.spacing;
  for (int k = -j; k <= j; ++k) {
    Complex b = 0, r = 0, nr1 = 0, nr2 = 0, nr3 = 0;
    const double thr_torus = threshold_for(MaskVariant::torus, spec.c, k * d, 0, 0, alpha);
    for (int k1 = -j; k1 <= j; ++k1) {
      const int m = k1 - k;
      const Complex u1 = lat.at(k1);
      for (int k2 = -j; k2 <= j; ++k2) {
        const int n = k2 - k1;
        const int k3 = k + n;
        if (!lat.in(k3)) continue;
        const double product = std::abs(m * d) * std::abs(n * d);
        const double thr =
            torus ? thr_torus
                  : threshold_for(MaskVariant::line, spec.c, k * d, m * d, n * d, alpha);
        const Complex u2 = lat.at(k2);
        const Complex u3 = lat.at(k3);
        if (!mask_b_product(product, thr)) {
          if (!torus || product > 0.0) r += u1 * std::conj(u2) * u3;
          continue;
        }
        const double phi = checked_denominator(lat.phase(k, k1, k2, k3));
        const Complex cubic = u1 * std::conj(u2) * u3 / phi;
        b += cubic;
        nr1 += 2.0 * u1 * std::conj(u2) * q[k3 + j] / phi;
        nr2 -= u1 * std::conj(q[k2 + j]) * u3 / phi;
        if (torus) nr3 += cubic * (std::norm(u2) - 2.0 * std::norm(u3));
      }
    }
    if (torus) r -= std::norm(lat.at(k)) * lat.at(k);
    out.b[k + j] = b;
    out.r[k + j] = r;
    out.nr1[k + j] = nr1;
    out.nr2[k + j] = nr2;
    out.nr3[k + j] = nr3;
  }
  return out;
}

std::vector<Complex> inner_values(const SpectralField& u, int band,
                                  MaskVariant variant) {
  const SpectralField n = cubic_product(u, band);
  double p = 0.0;
  for (int i = -band; i <= band; ++i) p += 2.0 * std::norm(u[i]);
  std::vector<Complex> q(2 * band + 1);
  for (int i = -band; i <= band; ++i) {
    q[i + band] = n[i];
    if (variant == MaskVariant::torus)
      q[i + band] += -p * u[i] + std::norm(u[i]) * u[i];
  }
  return q;
}

Accumulated compute(const SpectralField& u, double alpha, const NormalFormSpec& spec,
                    const Lattice& lat) {
  return sweep(lat, inner_values(u, lat.band, spec.variant), alpha, spec);
}

}  // namespace

int NormalFormSpec::resolved_band(const TorusGrid& grid) const {
  return band < 0 ? band_limit(grid, DealiasRule::two_thirds) : band;
}

double phase_g(double m, double n, double k, double alpha) {
  const double a2 = 2.0 * alpha;
  return std::abs(std::pow(std::abs(k + n), a2) - std::pow(std::abs(k + m + n), a2) +
                  std::pow(std::abs(k + m), a2) - std::pow(std::abs(k), a2));
}

bool resonance_mask(double k, double k1, double k2, double alpha,
                    const MaskSpec& spec) {
  const double m = k1 - k;
  const double n = spec.role == MaskRole::nr2 ? k2 - k : k2 - k1;
  const double product = std::abs(m) * std::abs(n);
  const double thr = threshold_for(spec.variant, spec.c, k, m, n, alpha);
  const bool b_type = mask_b_product(product, thr);
  if (spec.role != MaskRole::r) return b_type;
  if (spec.variant == MaskVariant::torus) return product > 0.0 && !b_type;
  return !b_type;
}

SpectralField inner_cubic(const SpectralField& u, const NormalFormSpec& spec) {
  const int band = band_for(u, spec);
  const Lattice lat(u, band, 1.0);
  return lat.field(inner_values(u, band, spec.variant));
}

NormalFormTerms normal_form_terms(const SpectralField& u, double alpha,
                                  const NormalFormSpec& spec) {
  const Lattice lat(u, band_for(u, spec), alpha);
  const Accumulated acc = compute(u, alpha, spec, lat);
  NormalFormTerms t{lat.field(acc.b), lat.field(acc.r), lat.field(acc.nr1),
                    lat.field(acc.nr2), std::nullopt};
  if (spec.variant == MaskVariant::torus) t.nr3 = lat.field(acc.nr3);
  return t;
}

SpectralField transform_b(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec) {
  return normal_form_terms(u, alpha, spec).b;
}

SpectralField transform_r(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec) {
  return normal_form_terms(u, alpha, spec).r;
}

SpectralField transform_nr1(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  return normal_form_terms(u, alpha, spec).nr1;
}

SpectralField transform_nr2(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  return normal_form_terms(u, alpha, spec).nr2;
}

SpectralField transform_nr3(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  if (spec.variant != MaskVariant::torus)
    throw PreconditionViolated("NR3 exists only on the torus");
  return *normal_form_terms(u, alpha, spec).nr3;
}

namespace reference {

namespace {

bool masked(const Lattice& lat, int k, int k1, int k2, double alpha,
            const NormalFormSpec& spec, MaskRole role) {
  const double d = lat.spacing;
  return resonance_mask(k * d, k1 * d, k2 * d, alpha, spec.mask(role));
}

double denominator(const Lattice& lat, int k, int k1, int k2, int k3) {
  return checked_denominator(lat.phase(k, k1, k2, k3));
}

// Inner triple (a, b, c) feeding target j is excluded on the torus when it is
// resonant: a == j or b == a.
bool inner_allowed(const NormalFormSpec& spec, int target, int a, int b) {
  if (spec.variant == MaskVariant::line) return true;
  return a != target && b != a;
}

}  // namespace

SpectralField transform_b(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec) {
  const Lattice lat(u, band_for(u, spec), alpha);
  const int j = lat.band;
  std::vector<Complex> out(2 * j + 1);
  for (int k = -j; k <= j; ++k)
    for (int k1 = -j; k1 <= j; ++k1)
      for (int k2 = -j; k2 <= j; ++k2)
        for (int k3 = -j; k3 <= j; ++k3) {
          if (k - k1 + k2 - k3 != 0) continue;
          if (!masked(lat, k, k1, k2, alpha, spec, MaskRole::b)) continue;
          out[k + j] += lat.at(k1) * std::conj(lat.at(k2)) * lat.at(k3) /
                        denominator(lat, k, k1, k2, k3);
        }
  return lat.field(out);
}

SpectralField transform_r(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec) {
  const Lattice lat(u, band_for(u, spec), alpha);
  const int j = lat.band;
  std::vector<Complex> out(2 * j + 1);
  for (int k = -j; k <= j; ++k) {
    if (spec.variant == MaskVariant::torus)
      out[k + j] -= std::norm(lat.at(k)) * lat.at(k);
    for (int k1 = -j; k1 <= j; ++k1)
      for (int k2 = -j; k2 <= j; ++k2)
        for (int k3 = -j; k3 <= j; ++k3) {
          if (k - k1 + k2 - k3 != 0) continue;
          if (!masked(lat, k, k1, k2, alpha, spec, MaskRole::r)) continue;
          out[k + j] += lat.at(k1) * std::conj(lat.at(k2)) * lat.at(k3);
        }
  }
  return lat.field(out);
}

SpectralField transform_nr1(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  const Lattice lat(u, band_for(u, spec), alpha);
  const int j = lat.band;
  std::vector<Complex> out(2 * j + 1);
  for (int k = -j; k <= j; ++k)
    for (int k1 = -j; k1 <= j; ++k1)
      for (int k2 = -j; k2 <= j; ++k2) {
        const int target = k - k1 + k2;
        if (!lat.in(target)) continue;
        if (!masked(lat, k, k1, k2, alpha, spec, MaskRole::nr1)) continue;
        const Complex outer = 2.0 * lat.at(k1) * std::conj(lat.at(k2)) /
                              denominator(lat, k, k1, k2, target);
        for (int k3 = -j; k3 <= j; ++k3)
          for (int k4 = -j; k4 <= j; ++k4) {
            const int k5 = target - k3 + k4;
            if (!lat.in(k5) || !inner_allowed(spec, target, k3, k4)) continue;
            out[k + j] += outer * lat.at(k3) * std::conj(lat.at(k4)) * lat.at(k5);
          }
      }
  return lat.field(out);
}

SpectralField transform_nr2(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  const Lattice lat(u, band_for(u, spec), alpha);
  const int j = lat.band;
  std::vector<Complex> out(2 * j + 1);
  for (int k = -j; k <= j; ++k)
    for (int k1 = -j; k1 <= j; ++k1)
      for (int k3 = -j; k3 <= j; ++k3) {
        const int target = k1 + k3 - k;
        if (!lat.in(target)) continue;
        if (!masked(lat, k, k1, k3, alpha, spec, MaskRole::nr2)) continue;
        const Complex outer = -lat.at(k1) * lat.at(k3) /
                              denominator(lat, k, k1, target, k3);
        // conj of the inner cubic at target: conj(u_a) u_b conj(u_c) with
        // a - b + c = target; in the quintic labelling a = k2, c = k4, b = k5.
        for (int k2 = -j; k2 <= j; ++k2)
          for (int k4 = -j; k4 <= j; ++k4) {
            const int k5 = k - k1 + k2 - k3 + k4;
            if (!lat.in(k5) || !inner_allowed(spec, target, k2, k5)) continue;
            out[k + j] += outer * std::conj(lat.at(k2)) * std::conj(lat.at(k4)) *
                          lat.at(k5);
          }
      }
  return lat.field(out);
}

SpectralField transform_nr3(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec) {
  if (spec.variant != MaskVariant::torus)
    throw PreconditionViolated("NR3 exists only on the torus");
  const Lattice lat(u, band_for(u, spec), alpha);
  const int j = lat.band;
  std::vector<Complex> out(2 * j + 1);
  for (int k = -j; k <= j; ++k)
    for (int k1 = -j; k1 <= j; ++k1)
      for (int k2 = -j; k2 <= j; ++k2)
        for (int k3 = -j; k3 <= j; ++k3) {
          if (k - k1 + k2 - k3 != 0) continue;
          if (!masked(lat, k, k1, k2, alpha, spec, MaskRole::nr3)) continue;
          const Complex u2 = lat.at(k2), u3 = lat.at(k3);
          out[k + j] += lat.at(k1) * std::conj(u2) * u3 *
                        (std::norm(u2) - 2.0 * std::norm(u3)) /
                        denominator(lat, k, k1, k2, k3);
        }
  return lat.field(out);
}

}  // namespace reference

namespace {

void require_flow(const Trajectory& traj, const NormalFormSpec& spec) {
  if (traj.states.empty()) throw InsufficientSamples("empty trajectory");
  if (!traj.config.nonlinear)
    throw PreconditionViolated("normal form needs the nonlinear flow");
  if (spec.variant == MaskVariant::torus && !traj.config.wick)
    throw PreconditionViolated("torus identity needs a Wick-ordered trajectory");
  if (spec.variant == MaskVariant::line && traj.config.wick)
    throw PreconditionViolated("line identity needs the plain (non-Wick) flow");
}

// X(t) = S(-t)[w - sigma B(w)] and Y(t) = S(-t)[sigma R(w) - NR1 - NR2 - NR3].
struct Frames {
  std::vector<CoeffVector> x, y;
};

Frames frames(const Trajectory& traj, const NormalFormSpec& spec) {
  NormalFormSpec s = spec;
  s.band = band_limit(traj.states.front().grid(), traj.config.dealias);
  const double alpha = traj.config.alpha;
  const double sigma = traj.config.sign;
  Frames f;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const SpectralField& w = traj.states[i];
    const NormalFormTerms t = normal_form_terms(w, alpha, s);
    CoeffVector x = w.coeffs() - sigma * t.b.coeffs();
    CoeffVector y = sigma * t.r.coeffs() - t.nr1.coeffs() - t.nr2.coeffs();
    if (t.nr3) y -= t.nr3->coeffs();
    const double time = traj.times[i];
    f.x.push_back(free_propagate(SpectralField(w.grid(), x), -time, alpha).coeffs());
    f.y.push_back(free_propagate(SpectralField(w.grid(), y), -time, alpha).coeffs());
  }
  return f;
}

double h0(const CoeffVector& c) { return c.norm(); }

}  // namespace

double normal_form_identity_residual(const Trajectory& traj,
                                     const NormalFormSpec& spec) {
  require_flow(traj, spec);
  if (traj.states.size() < 3)
    throw InsufficientSamples("central differences need three samples");
  const Frames f = frames(traj, spec);
  double worst = 0.0;
  const Complex i(0.0, 1.0);
  for (std::size_t n = 1; n + 1 < f.x.size(); ++n) {
    const double h = traj.times[n + 1] - traj.times[n - 1];
    const CoeffVector defect = i * (f.x[n + 1] - f.x[n - 1]) / h - f.y[n];
    worst = std::max(worst, h0(defect));
  }
  return worst;
}

std::vector<double> duhamel_defects(const Trajectory& traj,
                                    const NormalFormSpec& spec) {
  require_flow(traj, spec);
  const Frames f = frames(traj, spec);
  std::vector<double> out(f.x.size(), 0.0);
  CoeffVector integral = CoeffVector::Zero(f.x.front().size());
  const Complex i(0.0, 1.0);
  for (std::size_t n = 1; n < f.x.size(); ++n) {
    const double h = traj.times[n] - traj.times[n - 1];
    integral += 0.5 * h * (f.y[n] + f.y[n - 1]);
    out[n] = h0(f.x[n] - f.x[0] + i * integral);
  }
  return out;
}

double duhamel_residual(const Trajectory& traj, const NormalFormSpec& spec) {
  if (traj.states.size() < 2)
    throw InsufficientSamples("Duhamel check needs at least two samples");
  return duhamel_defects(traj, spec).back();
}

SpectralField smoothing_residual(const SpectralField& u_t,
                                 const SpectralField& u0, double t,
                                 double alpha, double rotation) {
  const SpectralField linear = rotate_phase(free_propagate(u0, t, alpha), -rotation * t);
  return u_t - linear;
}

}  // namespace fnls
