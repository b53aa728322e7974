#include "fnls/spectral.hpp"

#include "fnls/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <string>

namespace fnls {

namespace {

Eigen::FFT<double>& fft_engine() {
  // kissfft caches twiddles per size; one engine per thread keeps that safe.
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return engine;
}

int wrap(int index, int n) {
  const int r = index % n;
  return r < 0 ? r + n : r;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid()))
    throw PreconditionViolated("fields live on different grids");
}

}  // namespace

TorusGrid::TorusGrid(int n_modes, double circumference)
    : n_modes_(n_modes), circumference_(circumference) {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw PreconditionViolated("n_modes must be an even integer >= 8, got " +
                               std::to_string(n_modes));
  if (!(circumference > 0.0) || !std::isfinite(circumference))
    throw PreconditionViolated("circumference must be positive");
}

bool TorusGrid::is_torus() const {
  return std::abs(circumference_ - kTwoPi) < 1e-12;
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw PreconditionViolated("alpha must satisfy alpha in (1/2,1], got " +
                               std::to_string(alpha));
}

SpectralField::SpectralField(TorusGrid grid)
    : grid_(grid), coeffs_(CoeffVector::Zero(grid.size())) {}

SpectralField::SpectralField(TorusGrid grid, CoeffVector coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw PreconditionViolated("coefficient count does not match grid");
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    if (!std::isfinite(coeffs_[i].real()) || !std::isfinite(coeffs_[i].imag()))
      throw PreconditionViolated("non-finite coefficient at slot " +
                                 std::to_string(i));
  }
}

SpectralField SpectralField::mode(TorusGrid grid, int index, Complex value) {
  CoeffVector c = CoeffVector::Zero(grid.size());
  c[grid.slot(index)] = value;
  return SpectralField(grid, std::move(c));
}

int band_limit(const TorusGrid& grid, DealiasRule rule) {
  const int n = grid.size();
  switch (rule) {
    case DealiasRule::two_thirds:
      return std::min(n / 3, n / 2 - 1);
    case DealiasRule::one_third:
      return n / 6;
    case DealiasRule::none:
      return n / 2 - 1;
  }
  return n / 2 - 1;
}

SpectralField project_band(const SpectralField& u, int max_index) {
  CoeffVector c = u.coeffs();
  const TorusGrid& g = u.grid();
  for (int s = 0; s < g.size(); ++s) {
    const int j = g.index(s);
    if (std::abs(j) > max_index || j == g.min_index()) c[s] = 0.0;
  }
  return SpectralField(g, std::move(c));
}

double dispersion_symbol(double k, double alpha) {
  return std::pow(std::abs(k), 2.0 * alpha);
}

double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

double sobolev_norm(const SpectralField& u, double s) {
  const TorusGrid& g = u.grid();
  double acc = 0.0;
  for (int slot = 0; slot < g.size(); ++slot) {
    const double xi = g.frequency(g.index(slot));
    acc += std::pow(1.0 + xi * xi, s) * std::norm(u.coeffs()[slot]);
  }
  return std::sqrt(acc);
}

double mass(const SpectralField& u) {
  return u.grid().circumference() * u.coeffs().squaredNorm();
}

SpectralField free_propagate(const SpectralField& u, double t, double alpha) {
  const TorusGrid& g = u.grid();
  CoeffVector c = u.coeffs();
  for (int slot = 0; slot < g.size(); ++slot) {
    const double omega = dispersion_symbol(g.frequency(g.index(slot)), alpha);
    c[slot] *= std::polar(1.0, t * omega);
  }
  return SpectralField(g, std::move(c));
}

SpectralField rotate_phase(const SpectralField& u, double phase) {
  return SpectralField(u.grid(), u.coeffs() * std::polar(1.0, phase));
}

std::vector<Complex> to_physical(const SpectralField& u, int n_points) {
  const TorusGrid& g = u.grid();
  if (n_points < g.size())
    throw PreconditionViolated("physical grid coarser than spectral grid");
  std::vector<Complex> spectrum(n_points, Complex(0.0));
  for (int slot = 0; slot < g.size(); ++slot)
    spectrum[wrap(g.index(slot), n_points)] += u.coeffs()[slot];
  std::vector<Complex> values;
  fft_engine().inv(values, spectrum);
  return values;
}

SpectralField from_physical(const TorusGrid& grid,
                            const std::vector<Complex>& values) {
  const int m = static_cast<int>(values.size());
  if (m < grid.size())
    throw PreconditionViolated("physical grid coarser than spectral grid");
  std::vector<Complex> spectrum;
  fft_engine().fwd(spectrum, values);
  CoeffVector c(grid.size());
  for (int slot = 0; slot < grid.size(); ++slot)
    c[slot] = spectrum[wrap(grid.index(slot), m)] / static_cast<double>(m);
  return SpectralField(grid, std::move(c));
}

SpectralField cubic_product(const SpectralField& u, int max_index) {
  const TorusGrid& g = u.grid();
  // Products reach 3*max_index; aliases land on |j| <= max_index only when
  // the padded size exceeds 4*max_index.
  const int padded = std::max(2 * g.size(), 4 * max_index + 2);
  std::vector<Complex> values = to_physical(project_band(u, max_index), padded);
  for (Complex& v : values) v *= std::norm(v);
  return project_band(from_physical(g, values), max_index);
}

SpectralField nonlinear_cubic(const SpectralField& u, int sign,
                              DealiasRule rule) {
  const SpectralField cubic = cubic_product(u, band_limit(u.grid(), rule));
  return SpectralField(u.grid(), static_cast<double>(sign) * cubic.coeffs());
}

SpectralField cubic_convolution_reference(const SpectralField& u,
                                          int max_index) {
  const TorusGrid& g = u.grid();
  const SpectralField v = project_band(u, max_index);
  CoeffVector out = CoeffVector::Zero(g.size());
  for (int k = -max_index; k <= max_index; ++k) {
    Complex acc = 0.0;
    for (int k1 = -max_index; k1 <= max_index; ++k1)
      for (int k2 = -max_index; k2 <= max_index; ++k2) {
        const int k3 = k - k1 + k2;
        if (std::abs(k3) > max_index) continue;
        acc += v[k1] * std::conj(v[k2]) * v[k3];
      }
    out[g.slot(k)] = acc;
  }
  return SpectralField(g, std::move(out));
}

double quartic_integral(const SpectralField& u) {
  const int points = 4 * u.grid().size();
  const std::vector<Complex> values = to_physical(u, points);
  double acc = 0.0;
  for (const Complex& v : values) acc += std::norm(v) * std::norm(v);
  return u.grid().circumference() * acc / points;
}

double counter_uniform(std::uint64_t seed, std::int64_t counter) {
  // splitmix64 finalizer over a (seed, counter) keyed state: stateless, so a
  // mode's phase does not depend on how many modes the grid has.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL +
                    static_cast<std::uint64_t>(counter) * 0xD1B54A32D192ED03ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

SpectralField random_sobolev_field(std::uint64_t seed, double s, double delta,
                                   const TorusGrid& grid) {
  if (!(delta > 0.0)) throw PreconditionViolated("delta must be positive");
  CoeffVector c = CoeffVector::Zero(grid.size());
  const double exponent = -s - 0.5 - delta;
  for (int slot = 1; slot < grid.size(); ++slot) {
    const int j = grid.index(slot);
    const double amplitude =
        grid.spacing() * std::pow(japanese_bracket(grid.frequency(j)), exponent);
    c[slot] = std::polar(amplitude, kTwoPi * counter_uniform(seed, j));
  }
  return SpectralField(grid, std::move(c));
}

double tail_slope(const SpectralField& u, int lo, int hi) {
  const TorusGrid& g = u.grid();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int j = -hi; j <= hi; ++j) {
    if (std::abs(j) < lo || j < g.min_index() || j > g.max_index()) continue;
    const double mod = std::abs(u[j]);
    if (mod == 0.0) continue;
    const double x = std::log(japanese_bracket(g.frequency(j)));
    const double y = std::log(mod);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InsufficientSamples("tail slope needs two nonzero modes");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  return SpectralField(a.grid(), a.coeffs() - b.coeffs());
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  return SpectralField(a.grid(), a.coeffs() + b.coeffs());
}

SpectralField operator*(Complex scale, const SpectralField& a) {
  return SpectralField(a.grid(), scale * a.coeffs());
}

}  // namespace fnls
