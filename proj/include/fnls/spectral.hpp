#pragma once

// Frequency lattice, spectral fields and the pure operations on them.
//
// Fourier normalization (used everywhere in the library):
//   u(x) = sum_j c_j exp(i xi_j x),   c_j = (1/L) int_0^L u(x) exp(-i xi_j x) dx,
//   xi_j = j * 2pi/L,  j in [-N/2, N/2).
// On the torus (L = 2pi) c_j is exactly \hat f(j) and Plancherel reads
//   int |u|^2 = L * sum_j |c_j|^2.

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace fnls {

using Complex = std::complex<double>;
using CoeffVector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Frequency lattice of n_modes modes on a circle of the given circumference.
/// Coefficients are stored centered: slot = index + n_modes/2, so slot 0 is the
/// Nyquist index -n_modes/2.
class TorusGrid {
 public:
  explicit TorusGrid(int n_modes, double circumference = kTwoPi);

  int size() const { return n_modes_; }
  double circumference() const { return circumference_; }
  double spacing() const { return kTwoPi / circumference_; }
  int min_index() const { return -n_modes_ / 2; }
  int max_index() const { return n_modes_ / 2 - 1; }
  int slot(int index) const { return index + n_modes_ / 2; }
  int index(int slot) const { return slot - n_modes_ / 2; }
  double frequency(int index) const { return index * spacing(); }
  /// True for the 2pi-periodic torus proper (as opposed to a boxed line).
  bool is_torus() const;

  bool operator==(const TorusGrid& other) const = default;

 private:
  int n_modes_;
  double circumference_;
};

/// alpha in (1/2, 1].
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);
  double value() const { return alpha_; }
  operator double() const { return alpha_; }

 private:
  double alpha_;
};

struct RegularityParams {
  double s = 1.0;
  double a = 0.0;
  double delta = 0.05;
};

enum class DealiasRule { two_thirds, one_third, none };

/// Immutable state at one time: one complex coefficient per lattice index.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);
  SpectralField(TorusGrid grid, CoeffVector coeffs);

  const TorusGrid& grid() const { return grid_; }
  const CoeffVector& coeffs() const { return coeffs_; }
  Complex operator[](int index) const { return coeffs_[grid_.slot(index)]; }

  /// Single nonzero coefficient at the given index.
  static SpectralField mode(TorusGrid grid, int index, Complex value);

 private:
  TorusGrid grid_;
  CoeffVector coeffs_;
};

/// Largest |index| kept under a dealiasing rule.
int band_limit(const TorusGrid& grid, DealiasRule rule);

/// Zero every coefficient with |index| > max_index (and the Nyquist slot).
SpectralField project_band(const SpectralField& u, int max_index);

double dispersion_symbol(double k, double alpha);
double japanese_bracket(double x);

double sobolev_norm(const SpectralField& u, double s);
double mass(const SpectralField& u);

/// Multiplier exp(i t |k|^{2 alpha}); negative t gives the inverse flow.
SpectralField free_propagate(const SpectralField& u, double t, double alpha);

/// Multiply every coefficient by exp(i phase).
SpectralField rotate_phase(const SpectralField& u, double phase);

/// Physical values on an n_points uniform grid (n_points >= n_modes).
std::vector<Complex> to_physical(const SpectralField& u, int n_points);
/// Coefficients of len-n_points physical samples, restricted to grid's indices.
SpectralField from_physical(const TorusGrid& grid,
                            const std::vector<Complex>& values);

/// Coefficients of |u|^2 u restricted to |index| <= max_index, with u first
/// restricted to the same band. Alias-free: evaluated on a zero-padded grid.
SpectralField cubic_product(const SpectralField& u, int max_index);

/// sign * |u|^2 u with two-thirds dealiasing; Nyquist forced to zero.
SpectralField nonlinear_cubic(const SpectralField& u, int sign,
                              DealiasRule rule = DealiasRule::two_thirds);

/// Direct triple convolution sum_{j1-j2+j3=j} c_j1 conj(c_j2) c_j3 over all
/// grid indices, O(N^3). Reference for the FFT route.
SpectralField cubic_convolution_reference(const SpectralField& u,
                                          int max_index);

/// int |u|^4 dx, by collocation on a grid fine enough to be exact.
double quartic_integral(const SpectralField& u);

inline constexpr const char* kRandomAlgorithm = "splitmix64-counter";

/// Uniform [0,1) value at position `counter` of the stream keyed by `seed`.
double counter_uniform(std::uint64_t seed, std::int64_t counter);

/// c_j = (2pi/L) <xi_j>^{-s-1/2-delta} exp(i theta_j), theta_j uniform from
/// the counter-based stream (seed, j); Nyquist coefficient zero.
SpectralField random_sobolev_field(std::uint64_t seed, double s, double delta,
                                   const TorusGrid& grid);

/// Least-squares slope of log|c_j| against log<xi_j> over lo <= |j| <= hi,
/// skipping exact zeros.
double tail_slope(const SpectralField& u, int lo, int hi);

/// Coefficientwise difference / sum helpers (fields must share a grid).
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator*(Complex scale, const SpectralField& a);

}  // namespace fnls
