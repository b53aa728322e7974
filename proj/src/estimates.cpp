#include "fnls/estimates.hpp"

#include "fnls/errors.hpp"
#include "fnls/parallel.hpp"
#include "fnls/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace fnls {

namespace {

double bracket_pow(double x, double p) { return std::pow(1.0 + x * x, 0.5 * p); }

// Dense table over the integer range [-radius, radius].
struct Table {
  int radius;
  std::vector<double> v;
  template <typename F>
  Table(int r, F f) : radius(r), v(2 * static_cast<std::size_t>(r) + 1) {
    for (int x = -r; x <= r; ++x) v[x + r] = f(x);
  }
  double operator[](int x) const { return v[x + radius]; }
  const double* centre() const { return v.data() + radius; }
};

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

int ipow2_at_least(long n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void require_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw InsufficientSamples("sweep needs at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw PreconditionViolated("sweep levels must be positive");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw PreconditionViolated("sweep levels must be strictly increasing");
  }
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::plateau:
      return "plateau";
    case Verdict::growth:
      return "growth";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

DyadicSweep classify_sweep(std::vector<int> levels, std::vector<double> values) {
  require_levels(levels);
  if (levels.size() != values.size())
    throw PreconditionViolated("one value per level required");
  if (levels.size() < 2) throw InsufficientSamples("a verdict needs two levels");
  DyadicSweep out;
  out.levels = std::move(levels);
  out.values = std::move(values);
  const std::size_t top = out.levels.size() - 1;
  std::size_t half = top - 1;
  for (std::size_t i = 0; i < top; ++i)
    if (2 * out.levels[i] == out.levels[top]) half = i;
  const double last = out.values[top];
  const double prev = out.values[half];
  if (prev == 0.0) {
    out.verdict = last == 0.0 ? Verdict::plateau : Verdict::growth;
  } else {
    const double ratio = last / prev;
    out.verdict = ratio < kPlateauRatio ? Verdict::plateau
                  : ratio > kGrowthRatio ? Verdict::growth
                                         : Verdict::inconclusive;
  }
  const std::size_t first = out.levels.size() >= 3 ? out.levels.size() - 3 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = first; i <= top; ++i) {
    if (!(out.values[i] > 0.0)) {
      n = 0;
      break;
    }
    const double x = std::log(static_cast<double>(out.levels[i]));
    const double y = std::log(out.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  out.growth_slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return out;
}

std::vector<int> dyadic_levels(int first, int last) {
  std::vector<int> out;
  for (int k = first; k <= last; k *= 2) out.push_back(k);
  return out;
}

std::vector<int> default_levels() { return dyadic_levels(16, 512); }

double phi_beta(long k, double beta) {
  const long r = std::abs(k);
  double acc = 0.0;
  for (long n = -r; n <= r; ++n) acc += bracket_pow(static_cast<double>(n), -beta);
  return acc;
}

double verify_lemma_sums(double beta, double gamma, long k1, long k2, long K) {
  if (!(beta >= gamma && gamma >= 0.0 && beta + gamma > 1.0))
    throw PreconditionViolated("need beta >= gamma >= 0 and beta+gamma > 1");
  if (K < 0) throw PreconditionViolated("truncation must be nonnegative");
  double acc = 0.0;
  for (long n = -K; n <= K; ++n)
    acc += bracket_pow(static_cast<double>(n - k1), -beta) *
           bracket_pow(static_cast<double>(n - k2), -gamma);
  const double d = static_cast<double>(k1 - k2);
  return acc / (bracket_pow(d, -gamma) * phi_beta(k1 - k2, beta));
}

double verify_phase_lower_bound(double alpha, int K, unsigned threads) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw PreconditionViolated("alpha must satisfy alpha in (1/2,1]");
  if (K < 16) throw PreconditionViolated("phase scan needs K >= 16");
  const Table omega(3 * K, [&](int x) { return std::pow(std::abs(x), 2.0 * alpha); });
  const Table weight(3 * K, [&](int x) { return std::pow(std::abs(x), 2.0 - 2.0 * alpha); });
  // g and the ratio are invariant under (m,n,k) -> (-m,-n,-k).
  std::vector<double> minima(K + 1, std::numeric_limits<double>::infinity());
  parallel_for(0, K + 1, threads, [&](std::ptrdiff_t kk) {
    const int k = static_cast<int>(kk);
    double best = std::numeric_limits<double>::infinity();
    for (int m = -K; m <= K; ++m) {
      if (m == 0) continue;
      for (int n = -K; n <= K; ++n) {
        if (n == 0) continue;
        const double g =
            std::abs(omega[k + n] - omega[k + m + n] + omega[k + m] - omega[k]);
        const double r = g * weight[std::abs(m) + std::abs(n) + k] /
                         (static_cast<double>(std::abs(m)) * std::abs(n));
        best = std::min(best, r);
      }
    }
    minima[k] = best;
  });
  return *std::min_element(minima.begin(), minima.end());
}

double phase_ratio_real_scan(double alpha, double K, int samples,
                             std::uint64_t seed) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw PreconditionViolated("alpha must satisfy alpha in (1/2,1]");
  double best = std::numeric_limits<double>::infinity();
  const double a2 = 2.0 * alpha;
  auto w = [&](double x) { return std::pow(std::abs(x), a2); };
  for (int i = 0; i < samples; ++i) {
    const double m = K * (2.0 * counter_uniform(seed, 3L * i) - 1.0);
    const double n = K * (2.0 * counter_uniform(seed, 3L * i + 1) - 1.0);
    const double k = K * (2.0 * counter_uniform(seed, 3L * i + 2) - 1.0);
    const double mn = std::abs(m) * std::abs(n);
    if (mn < 1e-6) continue;
    const double g = std::abs(w(k + n) - w(k + m + n) + w(k + m) - w(k));
    best = std::min(best, g * std::pow(std::abs(m) + std::abs(n) + std::abs(k), 2.0 - a2) / mn);
  }
  return best;
}

namespace {

struct MultiplierTables {
  Table w;      // <x>^{-2s}
  Table omega;  // |x|^{2 alpha}
  MultiplierTables(double s, double alpha, int radius)
      : w(radius, [&](int x) { return bracket_pow(x, -2.0 * s); }),
        omega(radius, [&](int x) { return std::pow(std::abs(x), 2.0 * alpha); }) {}
};

// Smallest n >= 1 with |m| n >= thr.
int first_admissible(int am, double thr) {
  int n = std::max(1, static_cast<int>(std::ceil(thr / am)));
  while (n > 1 && static_cast<double>(am) * (n - 1) >= thr) --n;
  while (static_cast<double>(am) * n < thr) ++n;
  return n;
}

// sum_{n=lo}^{hi} w[k+n] w[k+m+n] / (omega[k+n] - omega[k+m+n] + c0)^2,
// c0 = omega[k+m] - omega[k].
double b_run(const MultiplierTables& t, int k, int m, int lo, int hi) {
  if (lo > hi) return 0.0;
  const double* w = t.w.centre();
  const double* om = t.omega.centre();
  const double c0 = om[k + m] - om[k];
  double acc = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const double g = om[k + n] - om[k + m + n] + c0;
    acc += w[k + n] * w[k + m + n] / (g * g);
  }
  return acc;
}

}  // namespace

double bestimate_level(double s, double a, double alpha, int K,
                       const SupremumOptions& opt) {
  if (!(s > 0.75 - 0.5 * alpha))
    throw PreconditionViolated("need s > 3/4 - alpha/2");
  if (K < 1 || opt.inner_factor < 1 || !(opt.c > 0.0))
    throw PreconditionViolated("invalid truncation or mask constant");
  const int M = opt.inner_factor * K;
  const MultiplierTables t(s, alpha, K + 2 * M);
  std::vector<double> per_k(K + 1, 0.0);
  // Summand is even in (k,m,n) jointly and symmetric in m <-> n, so k >= 0
  // and n >= m suffice (off-diagonal pairs counted twice).
  parallel_for(0, K + 1, opt.threads, [&](std::ptrdiff_t kk) {
    const int k = static_cast<int>(kk);
    const double thr = opt.c * bracket_pow(k, 2.0 - 2.0 * alpha);
    double off = 0.0, diag = 0.0;
    for (int m = -M; m <= M; ++m) {
      if (m == 0) continue;
      const int am = std::abs(m);
      const int nmin = first_admissible(am, thr);
      if (nmin > M) continue;
      double row = 0.0;
      row += b_run(t, k, m, std::max(nmin, m + 1), M);
      row += b_run(t, k, m, std::max(-M, m + 1), -nmin);
      off += t.w[k + m] * row;
      if (am >= nmin) diag += t.w[k + m] * b_run(t, k, m, m, m);
    }
    per_k[k] = bracket_pow(k, 2.0 * s + 2.0 * a) * (2.0 * off + diag);
  });
  return max_of(per_k);
}

DyadicSweep bestimate_supremum(double s, double a, double alpha,
                               const std::vector<int>& levels,
                               const SupremumOptions& opt) {
  require_levels(levels);
  std::vector<double> values;
  for (int K : levels) values.push_back(bestimate_level(s, a, alpha, K, opt));
  return classify_sweep(levels, std::move(values));
}

double r_multiplier_level(double s, double a, double alpha, int K,
                          const SupremumOptions& opt) {
  if (K < 1 || opt.inner_factor < 1 || !(opt.c > 0.0))
    throw PreconditionViolated("invalid truncation or mask constant");
  const int M = opt.inner_factor * K;
  const MultiplierTables t(s, alpha, K + 2 * M);
  std::vector<double> per_k(K + 1, 0.0);
  parallel_for(0, K + 1, opt.threads, [&](std::ptrdiff_t kk) {
    const int k = static_cast<int>(kk);
    const double thr = opt.c * bracket_pow(k, 2.0 - 2.0 * alpha);
    double acc = 0.0;
    for (int m = -M; m <= M; ++m) {
      if (m == 0) continue;
      const int am = std::abs(m);
      for (int n = -M; n <= M; ++n) {
        if (n == 0) continue;
        if (!(static_cast<double>(am) * std::abs(n) < thr)) continue;
        acc += t.w[k + m] * t.w[k + m + n] * t.w[k + n];
      }
    }
    per_k[k] = bracket_pow(k, 2.0 * s + 2.0 * a) * acc;
  });
  return max_of(per_k);
}

DyadicSweep r_multiplier_supremum(double s, double a, double alpha,
                                  const std::vector<int>& levels,
                                  const SupremumOptions& opt) {
  require_levels(levels);
  std::vector<double> values;
  for (int K : levels) values.push_back(r_multiplier_level(s, a, alpha, K, opt));
  return classify_sweep(levels, std::move(values));
}

namespace {

// max over k in [0,K] and the A grid of <k>^{2s} sum w1 w2 w3 <A + phase>^{-(1-eps)}
// with k3 = k - k1 + k2; phase(k1,k2,k3) supplied by the caller.
template <typename Phase>
double lemma_sum(double s, int K, const LemmaSumOptions& opt, Phase phase) {
  if (K < 1 || opt.inner_factor < 1) throw PreconditionViolated("invalid truncation");
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0))
    throw PreconditionViolated("epsilon must lie in (0,1)");
  if (opt.a_grid.empty()) throw PreconditionViolated("empty A grid");
  const int M = opt.inner_factor * K;
  const Table w(M, [&](int x) { return bracket_pow(x, -2.0 * s); });
  const double p = 0.5 * (1.0 - opt.epsilon);
  const std::size_t na = opt.a_grid.size();
  std::vector<double> per_k(K + 1, 0.0);
  parallel_for(0, K + 1, opt.threads, [&](std::ptrdiff_t kk) {
    const int k = static_cast<int>(kk);
    std::vector<double> acc(na, 0.0);
    for (int k1 = -M; k1 <= M; ++k1) {
      const int lo = std::max(-M, -M - k + k1);
      const int hi = std::min(M, M - k + k1);
      for (int k2 = lo; k2 <= hi; ++k2) {
        const int k3 = k - k1 + k2;
        const double weight = w[k1] * w[k2] * w[k3];
        const double ph = phase(k1, k2, k3);
        for (std::size_t i = 0; i < na; ++i) {
          const double y = opt.a_grid[i] + ph;
          acc[i] += weight * std::exp(-p * std::log1p(y * y));
        }
      }
    }
    per_k[k] = bracket_pow(k, 2.0 * s) * *std::max_element(acc.begin(), acc.end());
  });
  return max_of(per_k);
}

}  // namespace

double verify_lemma_231(double s, int K, const LemmaSumOptions& opt) {
  if (opt.enforce_preconditions && !(s > 0.25 && s <= 0.5))
    throw PreconditionViolated("need 1/4 < s <= 1/2");
  return lemma_sum(s, K, opt, [](int k1, int k2, int k3) {
    return -static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 -
           static_cast<double>(k3) * k3;
  });
}

std::vector<SignPattern> all_sign_patterns() {
  std::vector<SignPattern> out;
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int c : {1, -1}) out.push_back({a, b, c});
  return out;
}

double verify_lemma_23alpha(double s, double alpha, SignPattern pattern, int K,
                            const LemmaSumOptions& opt) {
  if (opt.enforce_preconditions) {
    if (!(alpha > 0.5 && alpha < 1.0))
      throw PreconditionViolated("need 1/2 < alpha < 1");
    if (!(s > 0.75 - 0.5 * alpha && s <= 0.5))
      throw PreconditionViolated("need 3/4 - alpha/2 < s <= 1/2");
  }
  for (int p : {pattern.p1, pattern.p2, pattern.p3})
    if (p != 1 && p != -1) throw PreconditionViolated("signs must be +1 or -1");
  const int M = opt.inner_factor * K;
  const Table omega(M, [&](int x) { return std::pow(std::abs(x), 2.0 * alpha); });
  return lemma_sum(s, K, opt, [&](int k1, int k2, int k3) {
    return pattern.p1 * omega[k1] + pattern.p2 * omega[k2] + pattern.p3 * omega[k3];
  });
}

double verify_lemma_23alpha(double s, double alpha, int K,
                            const LemmaSumOptions& opt) {
  double best = 0.0;
  for (const SignPattern& p : all_sign_patterns())
    best = std::max(best, verify_lemma_23alpha(s, alpha, p, K, opt));
  return best;
}

namespace {

// Per-xi sums without the <xi>^{2s+2a} prefactor, xi in [0, K].
std::vector<double> quintic_direct_profile(double s, int K, double epsilon,
                                           unsigned threads) {
  if (K > kQuinticDirectMaxK)
    throw PreconditionViolated("direct quintic sum limited to K <= 24");
  const Table w(K, [&](int x) { return bracket_pow(x, -2.0 * s); });
  const Table kappa(3 * K * K, [&](int y) { return bracket_pow(y, -(1.0 - epsilon)); });
  std::vector<double> out(K + 1, 0.0);
  parallel_for(0, K + 1, threads, [&](std::ptrdiff_t xx) {
    const int xi = static_cast<int>(xx);
    double acc = 0.0;
    for (int x1 = -K; x1 <= K; ++x1)
      for (int x2 = -K; x2 <= K; ++x2)
        for (int x3 = -K; x3 <= K; ++x3) {
          const int base = xi - x1 + x2 - x3;
          const double w123 = w[x1] * w[x2] * w[x3];
          const int p = xi * xi - x1 * x1 + x2 * x2 - x3 * x3;
          for (int x4 = -K; x4 <= K; ++x4) {
            const int x5 = base + x4;
            if (x5 < -K || x5 > K) continue;
            acc += w123 * w[x4] * w[x5] * kappa[p + x4 * x4 - x5 * x5];
          }
        }
    out[xi] = acc;
  });
  return out;
}

std::vector<double> quintic_collapsed_profile(double s, int K, double epsilon,
                                              unsigned threads) {
  const Table w(K, [&](int x) { return bracket_pow(x, -2.0 * s); });
  const long k2 = static_cast<long>(K) * K;
  // q + K^2 and p + K^2 lie in [0, 3K^2].
  const int size = ipow2_at_least(6 * k2 + 1);
  // Kernel at every difference p - q in [-3K^2, 3K^2], stored circularly.
  std::vector<std::complex<double>> kernel(size, 0.0);
  for (long d = -3 * k2; d <= 3 * k2; ++d)
    kernel[(d + size) % size] = bracket_pow(static_cast<double>(d), -(1.0 - epsilon));
  Eigen::FFT<double> plan;
  std::vector<std::complex<double>> kernel_hat;
  plan.fwd(kernel_hat, kernel);

  // Channel z = xi - xi1 + xi2 = xi3 - xi4 + xi5 in [-3K, 3K]; two channels
  // share one complex transform (real and imaginary parts), which is exact
  // because the kernel's transform is real.
  const int zmin = -3 * K, zcount = 6 * K + 1;
  const int pairs = (zcount + 1) / 2;
  std::vector<std::vector<double>> contrib(zcount);
  parallel_for(0, pairs, threads, [&](std::ptrdiff_t pi) {
    thread_local Eigen::FFT<double> local;
    std::vector<std::complex<double>> bins(size, 0.0), hat, conv;
    const int za = zmin + 2 * static_cast<int>(pi);
    const int zb = za + 1;
    const bool has_b = zb <= 3 * K;
    for (int x3 = -K; x3 <= K; ++x3)
      for (int x4 = -K; x4 <= K; ++x4) {
        const double w34 = w[x3] * w[x4];
        const long base = static_cast<long>(x3) * x3 - static_cast<long>(x4) * x4 + k2;
        const int x5a = za - x3 + x4;
        if (x5a >= -K && x5a <= K)
          bins[base + static_cast<long>(x5a) * x5a] += w34 * w[x5a];
        const int x5b = zb - x3 + x4;
        if (has_b && x5b >= -K && x5b <= K)
          bins[base + static_cast<long>(x5b) * x5b] +=
              std::complex<double>(0.0, w34 * w[x5b]);
      }
    local.fwd(hat, bins);
    for (int i = 0; i < size; ++i) hat[i] *= kernel_hat[i].real();
    local.inv(conv, hat);  // Eigen's inverse includes the 1/size factor
    for (int which = 0; which < (has_b ? 2 : 1); ++which) {
      const int z = which == 0 ? za : zb;
      std::vector<double> row(K + 1, 0.0);
      for (int xi = 0; xi <= K; ++xi) {
        double acc = 0.0;
        for (int x1 = -K; x1 <= K; ++x1) {
          const int x2 = z - xi + x1;
          if (x2 < -K || x2 > K) continue;
          const long p = static_cast<long>(xi) * xi - static_cast<long>(x1) * x1 +
                         static_cast<long>(x2) * x2 + k2;
          const double c = which == 0 ? conv[p].real() : conv[p].imag();
          acc += w[x1] * w[x2] * c;
        }
        row[xi] = acc;
      }
      contrib[z - zmin] = std::move(row);
    }
  });
  std::vector<double> out(K + 1, 0.0);
  for (int z = 0; z < zcount; ++z)
    for (int xi = 0; xi <= K; ++xi) out[xi] += contrib[z][xi];
  return out;
}

double apply_prefactor(const std::vector<double>& profile, double s, double a) {
  double best = 0.0;
  for (std::size_t xi = 0; xi < profile.size(); ++xi)
    best = std::max(best, bracket_pow(static_cast<double>(xi), 2.0 * s + 2.0 * a) *
                              profile[xi]);
  return best;
}

}  // namespace

double quintic_level(double s, double a, int K, double epsilon,
                     QuinticMethod method, unsigned threads) {
  if (!(s > 1.0 / 3.0)) throw PreconditionViolated("need s > 1/3");
  if (K < 1) throw PreconditionViolated("truncation must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw PreconditionViolated("epsilon must lie in (0,1)");
  const std::vector<double> profile =
      method == QuinticMethod::direct ? quintic_direct_profile(s, K, epsilon, threads)
                                      : quintic_collapsed_profile(s, K, epsilon, threads);
  return apply_prefactor(profile, s, a);
}

std::vector<DyadicSweep> quintic_sweeps(double s, const std::vector<double>& a_values,
                                        const std::vector<int>& levels,
                                        double epsilon, unsigned threads) {
  require_levels(levels);
  if (!(s > 1.0 / 3.0)) throw PreconditionViolated("need s > 1/3");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw PreconditionViolated("epsilon must lie in (0,1)");
  std::vector<std::vector<double>> values(a_values.size());
  for (int K : levels) {
    const std::vector<double> profile = quintic_collapsed_profile(s, K, epsilon, threads);
    for (std::size_t i = 0; i < a_values.size(); ++i)
      values[i].push_back(apply_prefactor(profile, s, a_values[i]));
  }
  std::vector<DyadicSweep> out;
  for (auto& v : values) out.push_back(classify_sweep(levels, std::move(v)));
  return out;
}

DyadicSweep quintic_multiplier_supremum(double s, double a,
                                        const std::vector<int>& levels,
                                        double epsilon, unsigned threads) {
  return quintic_sweeps(s, {a}, levels, epsilon, threads).front();
}

}  // namespace fnls
