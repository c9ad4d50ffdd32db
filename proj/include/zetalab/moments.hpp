#pragma once

// Averages over [T, 2T]: quadrature rules, a bank of per-ordinate samples
// shared by every moment, and the moment, correlation, Goldston and weighted
// distribution experiments built on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "zetalab/diagonal.hpp"
#include "zetalab/error.hpp"
#include "zetalab/parallel.hpp"
#include "zetalab/prime_table.hpp"
#include "zetalab/statistics.hpp"
#include "zetalab/test_function.hpp"
#include "zetalab/zeros.hpp"

namespace zetalab {

enum class QuadratureMode { full_grid, stratified_random };

inline std::string quadrature_name(QuadratureMode m) {
  return m == QuadratureMode::full_grid ? "full_grid" : "stratified_random";
}

inline QuadratureMode parse_quadrature(const std::string& s) {
  if (s == "full_grid") return QuadratureMode::full_grid;
  if (s == "stratified_random") return QuadratureMode::stratified_random;
  throw ConfigError("unknown quadrature mode '" + s + "'");
}

struct QuadratureSpec {
  QuadratureMode mode = QuadratureMode::stratified_random;
  std::int64_t points = 200000;
  double samples_per_gap = 8.0;  // full_grid only
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw, so the
/// stream is identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Move t off any zero closer than the singular distance.
inline double offset_from_zeros(double t, const ZeroTable* zeros) {
  if (!zeros) return t;
  const double shift = 1e-5 * mean_zero_gap(t);
  for (int i = 0; i < 100 && nearest_zero_distance(t, *zeros) < kSingularDistance; ++i) t += shift;
  return t;
}

/// Ordinates of the rule on [T, 2T]. full_grid takes midpoints and refines
/// until the spacing is at most mean gap / samples_per_gap; stratified_random
/// draws one uniform point in each of M equal strata.
inline std::vector<double> quadrature_ordinates(double T, const QuadratureSpec& spec, const ZeroTable* zeros) {
  if (spec.points < 1000) throw ConfigError("quadrature needs at least 1000 points");
  std::int64_t m = spec.points;
  if (spec.mode == QuadratureMode::full_grid) {
    if (spec.samples_per_gap < 8.0) throw ConfigError("full_grid needs samples_per_gap >= 8");
    const double needed = std::ceil(T * spec.samples_per_gap / mean_zero_gap(2.0 * T));
    m = std::max<std::int64_t>(m, static_cast<std::int64_t>(needed));
  }
  std::vector<double> t(static_cast<std::size_t>(m));
  const double width = T / static_cast<double>(m);
  if (spec.mode == QuadratureMode::full_grid) {
    for (std::int64_t i = 0; i < m; ++i) t[i] = T + (static_cast<double>(i) + 0.5) * width;
  } else {
    std::mt19937_64 rng(spec.seed);
    for (std::int64_t i = 0; i < m; ++i) t[i] = T + (static_cast<double>(i) + uniform01(rng)) * width;
  }
  for (double& v : t) v = offset_from_zeros(v, zeros);
  return t;
}

/// Mean with a standard error for each of the real and imaginary parts.
struct Estimate {
  std::complex<double> value;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  double standard_error() const { return std::hypot(stderr_re, stderr_im); }
};

/// Pairwise mean. For the stratified rule the error is the delete-one
/// jackknife of the mean; the midpoint rule reports zero.
inline Estimate estimate_mean(std::span<const std::complex<double>> samples, QuadratureMode mode) {
  const auto n = static_cast<double>(samples.size());
  Estimate e;
  const std::complex<double> total = pairwise_sum(samples);
  e.value = total / n;
  if (mode == QuadratureMode::full_grid || samples.size() < 2) return e;
  std::vector<double> dre(samples.size()), dim(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::complex<double> loo = (total - samples[i]) / (n - 1.0);
    dre[i] = (loo.real() - e.value.real()) * (loo.real() - e.value.real());
    dim[i] = (loo.imag() - e.value.imag()) * (loo.imag() - e.value.imag());
  }
  const double scale = (n - 1.0) / n;
  e.stderr_re = std::sqrt(scale * pairwise_sum<double>(dre));
  e.stderr_im = std::sqrt(scale * pairwise_sum<double>(dim));
  return e;
}

/// (1/T) int_T^{2T} f(t) dt.
inline Estimate integrate(const std::function<std::complex<double>(double)>& f, double T, const QuadratureSpec& spec,
                          const ZeroTable* zeros = nullptr) {
  if (zeros && !zeros->covers(T, 2.0 * T)) throw CoverageError("integrate: zeros not certified on [T, 2T]");
  const auto t = quadrature_ordinates(T, spec, zeros);
  std::vector<std::complex<double>> values(t.size());
  parallel_for(t.size(), spec.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      values[i] = f(t[i]);
      if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
        throw PoisonedSampleError("integrand is not finite at t = " + std::to_string(t[i]), t[i]);
      }
    }
  });
  return estimate_mean(values, spec.mode);
}

/// Which per-ordinate quantities a bank holds.
struct SampleColumns {
  bool log_zeta = true;
  bool n_phi = true;
  bool s_phi_star = false;
  bool p_x = false;
};

/// Per-ordinate values on one quadrature rule, computed once and shared by
/// every moment and check that uses the same (T, x, phi, rule).
class SampleBank {
 public:
  SampleBank(double T, double x, const TestFunction& tf, const PrimeTable& primes, const ZeroTable* zeros,
             const QuadratureSpec& spec, SampleColumns columns)
      : T_(T), x_(x), tf_(&tf), primes_(&primes), zeros_(zeros), spec_(spec), columns_(columns) {
    if (!(T >= 1000.0)) throw ConfigError("T must be >= 1000");
    const bool needs_zeros = columns.log_zeta || columns.n_phi;
    if (needs_zeros) {
      if (!zeros) throw CoverageError("sample bank needs a zero table");
      if (!zeros->certified) throw CoverageError("sample bank refuses an uncertified zero table");
      const double w = columns.n_phi ? zero_window(T, tf) : 0.0;
      if (!zeros->covers(T - w, 2.0 * T + w)) {
        throw CoverageError("zeros must be certified on [" + std::to_string(T - w) + ", " + std::to_string(2.0 * T + w) +
                            "]");
      }
    }
    t_ = quadrature_ordinates(T, spec, needs_zeros ? zeros : nullptr);
    const std::size_t n = t_.size();
    if (columns.log_zeta) log_zeta_.resize(n);
    if (columns.n_phi) n_centered_.resize(n);
    if (columns.s_phi_star) s_star_.resize(n);
    if (columns.p_x) p_x_.resize(n);
    std::optional<PrimePowerSum> s_star;
    if (columns.s_phi_star) s_star.emplace(T, tf, primes, true);
    std::optional<PrimePolynomial> poly;
    if (columns.p_x) poly.emplace(x, primes);
    const double hat0 = tf.hatphi0();
    parallel_for(n, spec.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double t = t_[i];
        if (columns.log_zeta) {
          log_zeta_[i] = zetalab::log_zeta(t, *zeros).log_zeta();
          if (!std::isfinite(log_zeta_[i].real())) throw PoisonedSampleError("log zeta not finite", t);
        }
        if (columns.n_phi) n_centered_[i] = zetalab::n_phi(t, *zeros, T, tf) - hat0;
        if (s_star) s_star_[i] = (*s_star)(t);
        if (poly) p_x_[i] = (*poly)(t);
      }
    });
  }

  double T() const noexcept { return T_; }
  double x() const noexcept { return x_; }
  const TestFunction& test_function() const noexcept { return *tf_; }
  const PrimeTable& primes() const noexcept { return *primes_; }
  const ZeroTable* zeros() const noexcept { return zeros_; }
  const QuadratureSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return t_.size(); }

  std::span<const double> t() const noexcept { return t_; }
  std::span<const std::complex<double>> log_zeta() const { return require(log_zeta_, columns_.log_zeta, "log_zeta"); }
  std::span<const double> n_centered() const { return require(n_centered_, columns_.n_phi, "n_phi"); }
  std::span<const double> s_phi_star() const { return require(s_star_, columns_.s_phi_star, "s_phi_star"); }
  std::span<const std::complex<double>> p_x() const { return require(p_x_, columns_.p_x, "p_x"); }

  /// Mean of f(i) over the bank's ordinates.
  template <class F>
  Estimate mean(F&& f) const {
    std::vector<std::complex<double>> v(t_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = f(i);
      if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
        throw PoisonedSampleError("integrand is not finite at t = " + std::to_string(t_[i]), t_[i]);
      }
    }
    return estimate_mean(v, spec_.mode);
  }

 private:
  template <class V>
  static std::span<const typename V::value_type> require(const V& v, bool present, const char* name) {
    if (!present) throw ConfigError(std::string("sample bank was built without the ") + name + " column");
    return v;
  }

  double T_, x_;
  const TestFunction* tf_;
  const PrimeTable* primes_;
  const ZeroTable* zeros_;
  QuadratureSpec spec_;
  SampleColumns columns_;
  std::vector<double> t_;
  std::vector<std::complex<double>> log_zeta_, p_x_;
  std::vector<double> n_centered_, s_star_;
};

enum class IntegrandMode { zeta_nphi, zeta_sstar, dirichlet };

inline std::string integrand_name(IntegrandMode m) {
  switch (m) {
    case IntegrandMode::zeta_nphi: return "zeta_nphi";
    case IntegrandMode::zeta_sstar: return "zeta_sstar";
    case IntegrandMode::dirichlet: return "dirichlet";
  }
  return "?";
}

inline IntegrandMode parse_integrand(const std::string& s) {
  if (s == "zeta_nphi") return IntegrandMode::zeta_nphi;
  if (s == "zeta_sstar") return IntegrandMode::zeta_sstar;
  if (s == "dirichlet") return IntegrandMode::dirichlet;
  throw ConfigError("unknown integrand mode '" + s + "'");
}

struct MomentReport {
  std::string experiment;
  std::string mode;
  int h = 0, l = 0, k = 0;
  double T = 0.0, x = 0.0, eta = 0.0;
  std::complex<double> empirical;
  double stderr_re = 0.0, stderr_im = 0.0;
  double finite_T_prediction = 0.0;
  double asymptotic_prediction = 0.0;
  // size of the neglected terms, (log log T)^{(h+l-1)/2}; shown, never asserted
  double error_scale = 0.0;
  std::string quadrature;
  std::int64_t points = 0;
  std::uint64_t seed = 0;
  // off-diagonal allowance, carried through from the configuration
  double epsilon = 0.02;

  double standard_error() const { return std::hypot(stderr_re, stderr_im); }
};

namespace detail {

inline std::complex<double> ipow(std::complex<double> z, int n) {
  std::complex<double> r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

inline double ipow(double z, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

inline void check_moment_indices(int h, int l, int k, const TestFunction& tf, SupportMode support) {
  if (h < 0 || l < 0 || k < 0) throw ConfigError("moment indices must be nonnegative");
  if (h + l + k > 8) throw ConfigError("moment order h + l + k must be <= 8");
  if (!validate_support(tf, k, support)) {
    throw ConfigError("support condition fails for eta = " + std::to_string(tf.eta()) + ", k = " + std::to_string(k));
  }
}

inline MomentReport base_report(const SampleBank& bank, const std::string& experiment, int h, int l, int k) {
  MomentReport r;
  r.experiment = experiment;
  r.h = h;
  r.l = l;
  r.k = k;
  r.T = bank.T();
  r.x = bank.x();
  r.eta = bank.test_function().eta();
  r.quadrature = quadrature_name(bank.spec().mode);
  r.points = static_cast<std::int64_t>(bank.size());
  r.seed = bank.spec().seed;
  r.error_scale = std::pow(std::log(std::log(bank.T())), (h + l - 1) / 2.0);
  return r;
}

}  // namespace detail

/// (1/T) int A^h conj(A)^l B^k dt with (A, B) = (log zeta, N_phi - phi_hat(0)),
/// (log zeta, S*_phi) or (P_x, S*_phi).
inline MomentReport joint_moment(int h, int l, int k, const SampleBank& bank, IntegrandMode mode,
                                 SupportMode support = SupportMode::unconditional) {
  const auto& tf = bank.test_function();
  detail::check_moment_indices(h, l, k, tf, support);
  const auto sums = relation_sums(bank.x(), bank.T(), tf, bank.primes());
  std::span<const std::complex<double>> a;
  std::span<const double> b;
  switch (mode) {
    case IntegrandMode::zeta_nphi:
      a = bank.log_zeta();
      b = bank.n_centered();
      break;
    case IntegrandMode::zeta_sstar:
      a = bank.log_zeta();
      b = bank.s_phi_star();
      break;
    case IntegrandMode::dirichlet:
      a = bank.p_x();
      b = bank.s_phi_star();
      break;
  }
  const auto est = bank.mean([&](std::size_t i) {
    return detail::ipow(a[i], h) * detail::ipow(std::conj(a[i]), l) * detail::ipow(b[i], k);
  });
  auto r = detail::base_report(bank, "joint_moments", h, l, k);
  r.mode = integrand_name(mode);
  r.empirical = est.value;
  r.stderr_re = est.stderr_re;
  r.stderr_im = est.stderr_im;
  r.finite_T_prediction = predicted_moment(h, l, k, sums);
  r.asymptotic_prediction = asymptotic_prediction(h, l, k, bank.T(), tf);
  return r;
}

/// (1/T) int (Im log zeta)^l (N_phi - phi_hat(0))^k dt against
/// mu_l mu_k sigma^k V^{l/2}, V = (1/2) log log T or, at finite T, (1/2) S_1.
inline MomentReport imaginary_moment(int l, int k, const SampleBank& bank) {
  const auto& tf = bank.test_function();
  detail::check_moment_indices(0, l, k, tf, SupportMode::rh_imaginary);
  const auto lz = bank.log_zeta();
  const auto nc = bank.n_centered();
  const auto est =
      bank.mean([&](std::size_t i) { return std::complex<double>(detail::ipow(lz[i].imag(), l) * detail::ipow(nc[i], k)); });
  auto r = detail::base_report(bank, "imaginary_moments", 0, l, k);
  r.mode = "zeta_nphi";
  r.empirical = est.value;
  r.stderr_re = est.stderr_re;
  const double base = gaussian_moment(l) * gaussian_moment(k) * std::pow(tf.sigma_sq(), k / 2.0);
  const double s1 = bank.primes().prime_reciprocal_sum(bank.x());
  r.finite_T_prediction = base * std::pow(0.5 * s1, l / 2.0);
  r.asymptotic_prediction = base * std::pow(0.5 * std::log(std::log(bank.T())), l / 2.0);
  return r;
}

struct CorrelationReport {
  double T = 0.0, eta = 0.0;
  std::complex<double> empirical;
  double stderr_re = 0.0, stderr_im = 0.0;
  double finite_T_prediction = 0.0;
  double asymptotic_prediction = 0.0;  // -phi(0)/2
  double mean_abs_log_zeta_sq = 0.0;
  double mean_n_centered_sq = 0.0;
  double coefficient = 0.0;            // Re E[log zeta (N - phi_hat(0))] / sqrt(E|log zeta|^2 E(N - phi_hat(0))^2)
  double coefficient_prediction = 0.0; // -phi(0) / (2 sigma sqrt(log log T))
  std::string quadrature;
  std::int64_t points = 0;
  std::uint64_t seed = 0;
};

/// -(1/log T) sum_{n >= 2} Lambda(n)^2 / (n log n) phi_hat(log n / log T).
inline double correlation_finite_prediction(double T, const TestFunction& tf, const PrimeTable& table) {
  const double L = std::log(T);
  const double n_max = std::floor(std::exp(tf.eta() * L) * (1.0 + 1e-12));
  if (n_max > static_cast<double>(table.limit())) throw RangeError("correlation: prime table below T^eta");
  double acc = 0.0;
  for (std::uint64_t n = 2; static_cast<double>(n) <= n_max; ++n) {
    const double lam = table.von_mangoldt(n);
    if (lam == 0.0) continue;
    const double ln = std::log(static_cast<double>(n));
    acc += lam * lam / (static_cast<double>(n) * ln) * tf.hat(ln / L);
  }
  return -acc / L;
}

inline CorrelationReport correlation_experiment(const SampleBank& bank) {
  const auto& tf = bank.test_function();
  if (!validate_support(tf, 0, SupportMode::correlation)) {
    throw ConfigError("correlation needs eta < 1, got " + std::to_string(tf.eta()));
  }
  const auto lz = bank.log_zeta();
  const auto nc = bank.n_centered();
  const auto est = bank.mean([&](std::size_t i) { return lz[i] * nc[i]; });
  CorrelationReport r;
  r.T = bank.T();
  r.eta = tf.eta();
  r.empirical = est.value;
  r.stderr_re = est.stderr_re;
  r.stderr_im = est.stderr_im;
  r.finite_T_prediction = correlation_finite_prediction(bank.T(), tf, bank.primes());
  r.asymptotic_prediction = -tf.phi0() / 2.0;
  r.mean_abs_log_zeta_sq = bank.mean([&](std::size_t i) { return std::complex<double>(std::norm(lz[i])); }).value.real();
  r.mean_n_centered_sq = bank.mean([&](std::size_t i) { return std::complex<double>(nc[i] * nc[i]); }).value.real();
  r.coefficient = r.empirical.real() / std::sqrt(r.mean_abs_log_zeta_sq * r.mean_n_centered_sq);
  r.coefficient_prediction = -tf.phi0() / (2.0 * std::sqrt(tf.sigma_sq()) * std::sqrt(std::log(std::log(bank.T()))));
  r.quadrature = quadrature_name(bank.spec().mode);
  r.points = static_cast<std::int64_t>(bank.size());
  r.seed = bank.spec().seed;
  return r;
}

struct GoldstonReport {
  std::uint64_t n = 0;
  double T = 0.0;
  Estimate plus;    // (1/T) int log zeta n^{it}
  Estimate minus;   // (1/T) int log zeta n^{-it}
  double prediction = 0.0;  // Lambda(n) / (sqrt(n) log n); the minus variant predicts 0
};

inline GoldstonReport goldston_check(std::uint64_t n, const SampleBank& bank) {
  if (n < 2 || static_cast<double>(n) > bank.T()) throw ConfigError("goldston_check needs 2 <= n <= T");
  const auto lz = bank.log_zeta();
  const auto t = bank.t();
  const long double ln = std::log(static_cast<long double>(n));
  const double hi = static_cast<double>(ln), lo = static_cast<double>(ln - static_cast<long double>(hi));
  std::vector<std::complex<double>> rot(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rot[i] = std::polar(1.0, detail::reduced_product(t[i], hi, lo));
  GoldstonReport r;
  r.n = n;
  r.T = bank.T();
  r.plus = bank.mean([&](std::size_t i) { return lz[i] * rot[i]; });
  r.minus = bank.mean([&](std::size_t i) { return lz[i] * std::conj(rot[i]); });
  const double lambda = bank.primes().von_mangoldt(n);
  r.prediction = lambda / (std::sqrt(static_cast<double>(n)) * std::log(static_cast<double>(n)));
  return r;
}

/// The probability measure |N_phi - phi_hat(0)|^k dt / C on the bank's rule.
struct WeightedSample {
  int k = 0;
  std::vector<double> weight;          // |N_phi - phi_hat(0)|^k per ordinate
  double normalizer = 0.0;             // C_{phi,k}: mean weight
  std::vector<std::size_t> resampled;  // ordinate indices drawn from the measure
};

inline WeightedSample weighted_sample(const SampleBank& bank, int k, std::size_t n_resample, std::uint64_t seed) {
  if (k < 0 || k % 2 != 0) throw ParityError("weighted_sample: k must be even and nonnegative");
  const auto nc = bank.n_centered();
  WeightedSample s;
  s.k = k;
  s.weight.resize(nc.size());
  for (std::size_t i = 0; i < nc.size(); ++i) s.weight[i] = detail::ipow(std::abs(nc[i]), k);
  const double total = pairwise_sum<double>(s.weight);
  s.normalizer = total / static_cast<double>(nc.size());
  if (!(s.normalizer > 0.0)) throw DegenerateMeasureError("weighted_sample: all weights vanish");
  std::vector<double> cumulative(s.weight.size());
  double run = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) cumulative[i] = (run += s.weight[i]);
  std::mt19937_64 rng(seed);
  s.resampled.reserve(n_resample);
  for (std::size_t j = 0; j < n_resample; ++j) {
    const double u = uniform01(rng) * run;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    s.resampled.push_back(static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                            static_cast<std::ptrdiff_t>(nc.size()) - 1)));
  }
  return s;
}

inline double normal_cdf(double x, double variance = 1.0) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance)); }

/// Kolmogorov distance between the weighted empirical CDF of values and the
/// centred normal CDF with the given variance.
inline double weighted_ks_distance(std::span<const double> values, std::span<const double> weights,
                                   double variance = 1.0) {
  if (values.size() != weights.size()) throw ConfigError("weighted_ks_distance: size mismatch");
  double sum_w = 0.0, sum_w2 = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("weighted_ks_distance: negative weight");
    sum_w += w;
    sum_w2 += w * w;
  }
  if (!(sum_w > 0.0)) throw DegenerateMeasureError("weighted_ks_distance: zero total weight");
  const double effective = sum_w * sum_w / sum_w2;
  if (effective < 1000.0) {
    throw InsufficientSampleError("weighted_ks_distance: effective sample size " + std::to_string(effective) +
                                  " below 1000");
  }
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double cum = 0.0, dist = 0.0;
  for (std::size_t j = 0; j < order.size();) {
    const double v = values[order[j]];
    const double f = normal_cdf(v, variance);
    dist = std::max(dist, std::abs(f - cum / sum_w));
    while (j < order.size() && values[order[j]] == v) cum += weights[order[j++]];
    dist = std::max(dist, std::abs(f - cum / sum_w));
  }
  return dist;
}

enum class CdfStatistic { im_log_norm, complex_log_norm };

/// im_log_norm: Im log zeta / sqrt((1/2) log log T) against N(0, 1).
/// complex_log_norm: Re and Im of log zeta / sqrt(log log T) against N(0, 1/2);
/// the larger of the two distances is returned.
inline double weighted_cdf_distance(const SampleBank& bank, std::span<const double> weights, CdfStatistic statistic) {
  const auto lz = bank.log_zeta();
  const double lll = std::log(std::log(bank.T()));
  std::vector<double> a(lz.size());
  if (statistic == CdfStatistic::im_log_norm) {
    const double scale = 1.0 / std::sqrt(0.5 * lll);
    for (std::size_t i = 0; i < lz.size(); ++i) a[i] = lz[i].imag() * scale;
    return weighted_ks_distance(a, weights, 1.0);
  }
  const double scale = 1.0 / std::sqrt(lll);
  std::vector<double> b(lz.size());
  for (std::size_t i = 0; i < lz.size(); ++i) {
    a[i] = lz[i].real() * scale;
    b[i] = lz[i].imag() * scale;
  }
  return std::max(weighted_ks_distance(a, weights, 0.5), weighted_ks_distance(b, weights, 0.5));
}

/// Explicit-formula residual N_phi - phi_hat(0) - S_phi on a midpoint grid.
struct ExplicitFormulaReport {
  double T = 0.0;
  std::size_t points = 0;
  double rms = 0.0;
  double mean = 0.0;
  double fitted_constant = 0.0;    // rms * log T
  double star_sup = 0.0;           // sup |S_phi - S*_phi|
};

inline ExplicitFormulaReport explicit_formula_residual(double T, const TestFunction& tf, const PrimeTable& table,
                                                       const ZeroTable& zeros, std::size_t points = 1000,
                                                       unsigned threads = 0) {
  const PrimePowerSum full(T, tf, table, false), star(T, tf, table, true);
  std::vector<double> r(points), d(points);
  parallel_for(points, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double t = T + T * (static_cast<double>(i) + 0.5) / static_cast<double>(points);
      const double s = full(t);
      r[i] = n_phi(t, zeros, T, tf) - tf.hatphi0() - s;
      d[i] = std::abs(s - star(t));
    }
  });
  ExplicitFormulaReport rep;
  rep.T = T;
  rep.points = points;
  std::vector<double> sq(points);
  for (std::size_t i = 0; i < points; ++i) sq[i] = r[i] * r[i];
  rep.rms = std::sqrt(pairwise_sum<double>(sq) / static_cast<double>(points));
  rep.mean = pairwise_sum<double>(r) / static_cast<double>(points);
  rep.fitted_constant = rep.rms * std::log(T);
  rep.star_sup = *std::max_element(d.begin(), d.end());
  return rep;
}

/// (1/T) int |Re E_x|^{2m} and |Im E_x|^{2m} with E_x = log zeta - P_x.
inline std::pair<Estimate, Estimate> approximation_error_moments(const SampleBank& bank, double x, int m) {
  const PrimePolynomial poly(x, bank.primes());
  const auto lz = bank.log_zeta();
  const auto t = bank.t();
  std::vector<std::complex<double>> e(lz.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = lz[i] - poly(t[i]);
  const auto re = bank.mean([&](std::size_t i) { return std::complex<double>(detail::ipow(e[i].real(), 2 * m)); });
  const auto im = bank.mean([&](std::size_t i) { return std::complex<double>(detail::ipow(e[i].imag(), 2 * m)); });
  return {re, im};
}

}  // namespace zetalab
