#pragma once

// Differentiation-by-parts normal form for the cubic fractional NLS.
//
// Frequencies are lattice indices restricted to a band |j| <= band; products
// and phases use the physical frequencies xi_j = j * 2pi/L. With
//   m = k1 - k,  n = k2 - k1 (= k3 - k),  Phi = w(k) - w(k1) + w(k2) - w(k3),
//   w(x) = |x|^{2 alpha},
// the transforms are
//   B(k)   =   sum_{B-mask} u1 conj(u2) u3 / Phi
//   R(k)   = - |u_k|^2 u_k + sum_{0 < |m n| < thr} u1 conj(u2) u3     (torus)
//            sum_{|m n| < thr} u1 conj(u2) u3                         (line)
//   NR1(k) =  2 sum_{B-mask} u1 conj(u2) Q(k3) / Phi
//   NR2(k) = -  sum_{B-mask} u1 conj(Q(k2)) u3 / Phi
//   NR3(k) =    sum_{B-mask} u1 conj(u2) u3 (|u2|^2 - 2|u3|^2) / Phi   (torus)
// where Q is the inner cubic sum: the nonresonant part N - P u + |u|^2 u on
// the torus, the full cubic coefficient N on the line.
//
// With S(t) the free flow exp(i t |k|^{2 alpha}) and w the (Wick-ordered on
// the torus) solution with nonlinearity sign sigma, these satisfy
//   i d/dt S(-t)[w - sigma B(w)] = S(-t)[sigma R(w) - NR1 - NR2 - NR3].

#include "fnls/evolution.hpp"
#include "fnls/spectral.hpp"

#include <optional>

namespace fnls {

enum class MaskVariant { torus, line };
enum class MaskRole { b, r, nr1, nr2, nr3 };

struct MaskSpec {
  double c = 1.0;
  MaskVariant variant = MaskVariant::torus;
  MaskRole role = MaskRole::b;
};

/// Settings shared by every transform.
struct NormalFormSpec {
  double c = 1.0;
  MaskVariant variant = MaskVariant::torus;
  /// Largest |index| summed over; negative means the two-thirds band.
  int band = -1;

  MaskSpec mask(MaskRole role) const { return {c, variant, role}; }
  int resolved_band(const TorusGrid& grid) const;
};

struct NormalFormTerms {
  SpectralField b, r, nr1, nr2;
  std::optional<SpectralField> nr3;
};

inline constexpr double kDenominatorGuard = 1e-14;

/// |(k+n)^{2a} - (k+m+n)^{2a} + (k+m)^{2a} - k^{2a}| with |.|^{2a} powers.
double phase_g(double m, double n, double k, double alpha);

/// For NR2 the third frequency is k3 and the product is |k1-k||k-k3|;
/// otherwise it is k2 and the product is |k1-k||k2-k1|.
bool resonance_mask(double k, double k1, double k2, double alpha,
                    const MaskSpec& spec);

SpectralField transform_b(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec);
SpectralField transform_r(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec);
SpectralField transform_nr1(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);
SpectralField transform_nr2(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);
/// Torus only.
SpectralField transform_nr3(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);

/// All terms from one pass over the (k1, k2) plane.
NormalFormTerms normal_form_terms(const SpectralField& u, double alpha,
                                  const NormalFormSpec& spec);

/// The inner cubic sum Q used by NR1/NR2 (see header comment).
SpectralField inner_cubic(const SpectralField& u, const NormalFormSpec& spec);

// Exhaustive lattice sums: O(N^3) per output frequency for cubic terms,
// O(N^4) for quintic ones. Independent of the fast path above.
namespace reference {
SpectralField transform_b(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec);
SpectralField transform_r(const SpectralField& u, double alpha,
                          const NormalFormSpec& spec);
SpectralField transform_nr1(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);
SpectralField transform_nr2(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);
SpectralField transform_nr3(const SpectralField& u, double alpha,
                            const NormalFormSpec& spec);
}  // namespace reference

/// Max over interior samples of the H^0 norm of the central-difference defect
/// in the identity above. Torus: trajectory must be Wick-ordered. Line: not.
/// Sums run over the trajectory's own dealiasing band; spec.band is ignored.
double normal_form_identity_residual(const Trajectory& traj,
                                     const NormalFormSpec& spec);

/// H^0 norm of the integrated-identity defect at each sample time
/// (composite trapezoid in time); element 0 is zero.
std::vector<double> duhamel_defects(const Trajectory& traj,
                                    const NormalFormSpec& spec);
double duhamel_residual(const Trajectory& traj, const NormalFormSpec& spec);

/// u(t) - exp(-i P t) S(t) u0. P is the signed rotation (sign * wick constant
/// on the torus flow, 0 for a pure linear comparison).
SpectralField smoothing_residual(const SpectralField& u_t,
                                 const SpectralField& u0, double t,
                                 double alpha, double rotation);

}  // namespace fnls
