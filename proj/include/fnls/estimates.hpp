#pragma once

// Brute-force lattice evaluations of the weighted sums and multipliers whose
// boundedness the smoothing estimates rest on. "Bounded in k" is certified
// empirically: a truncated supremum is tracked over dyadic radii and a
// plateau is declared when the last doubling changes it by less than 15%.

#include <cstdint>
#include <string>
#include <vector>

namespace fnls {

enum class Verdict { plateau, growth, inconclusive };

std::string to_string(Verdict v);

struct DyadicSweep {
  std::vector<int> levels;
  std::vector<double> values;
  Verdict verdict = Verdict::inconclusive;
  /// Least-squares slope of log value against log K over the top levels.
  double growth_slope = 0.0;
};

inline constexpr double kPlateauRatio = 1.15;
inline constexpr double kGrowthRatio = 1.3;

/// Validates the levels and fills verdict and slope.
DyadicSweep classify_sweep(std::vector<int> levels, std::vector<double> values);

/// 16, 32, ..., 512.
std::vector<int> default_levels();
std::vector<int> dyadic_levels(int first, int last);

/// sum_{|n| <= |k|} <n>^{-beta}.
double phi_beta(long k, double beta);

/// sum_{|n| <= K} <n-k1>^{-beta} <n-k2>^{-gamma}, divided by
/// <k1-k2>^{-gamma} phi_beta(k1-k2). Needs beta >= gamma >= 0, beta+gamma > 1.
double verify_lemma_sums(double beta, double gamma, long k1, long k2, long K);

/// g(m,n,k) (|m|+|n|+|k|)^{2-2 alpha} / (|m||n|) minimised over nonzero
/// integers |m|,|n| <= K and |k| <= K.
double verify_phase_lower_bound(double alpha, int K, unsigned threads = 0);

/// Same ratio at `samples` real triples drawn uniformly from [-K, K]^3
/// (counter-based stream keyed by seed); returns the minimum seen.
double phase_ratio_real_scan(double alpha, double K, int samples,
                             std::uint64_t seed);

struct SupremumOptions {
  double c = 1.0;
  /// Inner sums run over |m|, |n| <= inner_factor * K.
  int inner_factor = 4;
  unsigned threads = 0;
};

/// sup_{|k|<=K} sum_{|mn| >= c<k>^{2-2a}} <k>^{2s+2a} <k+m>^{-2s}
///   <k+m+n>^{-2s} <k+n>^{-2s} / g(m,n,k)^2  at one truncation radius.
double bestimate_level(double s, double a, double alpha, int K,
                       const SupremumOptions& opt = {});
DyadicSweep bestimate_supremum(double s, double a, double alpha,
                               const std::vector<int>& levels,
                               const SupremumOptions& opt = {});

/// Same weights, no denominator, over 0 < |mn| < c<k>^{2-2 alpha}.
double r_multiplier_level(double s, double a, double alpha, int K,
                          const SupremumOptions& opt = {});
DyadicSweep r_multiplier_supremum(double s, double a, double alpha,
                                  const std::vector<int>& levels,
                                  const SupremumOptions& opt = {});

struct LemmaSumOptions {
  double epsilon = 0.05;
  std::vector<double> a_grid{0.0, 7.0, 1e3, 1e6};
  int inner_factor = 4;
  /// false skips the hypothesis check, for below-threshold comparisons.
  bool enforce_preconditions = true;
  unsigned threads = 0;
};

/// max over |k| <= K and A in the grid of
///   <k>^{2s} sum_{k = k1-k2+k3} <k1>^{-2s}<k2>^{-2s}<k3>^{-2s}
///        / <A - k1^2 + k2^2 - k3^2>^{1-eps}.
/// Needs 1/4 < s <= 1/2.
double verify_lemma_231(double s, int K, const LemmaSumOptions& opt = {});

/// Phase signs (p1, p2, p3), each +1 or -1, applied to |k_i|^{2 alpha}.
struct SignPattern {
  int p1 = 1, p2 = 1, p3 = 1;
};
std::vector<SignPattern> all_sign_patterns();

/// As verify_lemma_231 with denominator <A + p1|k1|^{2a} + p2|k2|^{2a} +
/// p3|k3|^{2a}>^{1-eps}; one pattern. Needs 1/2 < alpha < 1 and
/// 3/4 - alpha/2 < s <= 1/2.
double verify_lemma_23alpha(double s, double alpha, SignPattern pattern, int K,
                            const LemmaSumOptions& opt = {});
/// Max over all eight patterns.
double verify_lemma_23alpha(double s, double alpha, int K,
                            const LemmaSumOptions& opt = {});

enum class QuinticMethod { direct, collapsed };

/// sup_{|xi|<=K} sum over xi - xi1 + xi2 - xi3 + xi4 - xi5 = 0, |xi_i| <= K
/// (unit lattice) of <xi>^{2s+2a} prod <xi_i>^{-2s}
///   / <xi^2 - xi1^2 + xi2^2 - xi3^2 + xi4^2 - xi5^2>^{1-eps}.
/// direct: the five-fold sum (K <= 24). collapsed: the (xi3, xi4, xi5)
/// weights are binned by their quadratic phase and convolved with the
/// denominator kernel by FFT, leaving a two-fold outer sum.
double quintic_level(double s, double a, int K, double epsilon,
                     QuinticMethod method, unsigned threads = 0);
DyadicSweep quintic_multiplier_supremum(double s, double a,
                                        const std::vector<int>& levels,
                                        double epsilon = 0.05,
                                        unsigned threads = 0);
/// One sweep per value of a; the lattice sums do not depend on a, so they are
/// computed once per level.
std::vector<DyadicSweep> quintic_sweeps(double s, const std::vector<double>& a_values,
                                        const std::vector<int>& levels,
                                        double epsilon = 0.05, unsigned threads = 0);

inline constexpr int kQuinticDirectMaxK = 24;

}  // namespace fnls
