#pragma once

// Critical-line evaluation of zeta: the Riemann-Siegel theta function, the
// Hardy Z function (Riemann-Siegel main sum with four correction terms), a
// uniform-grid sweep for zero searching, and an Euler-Maclaurin evaluator used
// for small heights and as an independent cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "zetalab/error.hpp"

namespace zetalab {

inline constexpr long double kPiL = std::numbers::pi_v<long double>;
inline constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Below this height hardy_z switches from Riemann-Siegel to Euler-Maclaurin.
inline constexpr double kRiemannSiegelMinHeight = 1000.0;

/// Reduce a phase to (-pi, pi].
inline long double reduce_phase(long double phase) {
  return phase - kTwoPiL * std::nearbyint(phase / kTwoPiL);
}

/// theta(t) in extended precision, from the Stirling expansion of
/// Im log Gamma(1/4 + it/2) - (t/2) log pi with five correction terms.
inline long double riemann_siegel_theta_ld(long double t) {
  if (!(t >= 10.0L)) {
    throw DomainError("riemann_siegel_theta: t must be >= 10, got " + std::to_string(static_cast<double>(t)));
  }
  const long double inv = 1.0L / t;
  const long double inv2 = inv * inv;
  const long double series =
      inv * (1.0L / 48.0L +
             inv2 * (7.0L / 5760.0L +
                     inv2 * (31.0L / 80640.0L + inv2 * (127.0L / 430080.0L + inv2 * (511.0L / 1216512.0L)))));
  return 0.5L * t * std::log(t / kTwoPiL) - 0.5L * t - kPiL / 8.0L + series;
}

inline double riemann_siegel_theta(double t) { return static_cast<double>(riemann_siegel_theta_ld(t)); }

/// Mean spacing of zeros at height t.
inline double mean_zero_gap(double t) { return kTwoPi / std::log(std::max(t, 20.0) / kTwoPi); }

/// zeta(1/2 + it) by Euler-Maclaurin summation. Cost grows linearly in t.
inline std::complex<double> zeta_critical_euler_maclaurin(double t) {
  using C = std::complex<double>;
  const C s(0.5, t);
  const int terms = 20;
  const auto n_cut = static_cast<long>(std::ceil((std::abs(t) + 2.0 * terms) / kPi)) + 5;
  C sum = 0.0;
  for (long n = 1; n < n_cut; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double phase = static_cast<double>(reduce_phase(static_cast<long double>(t) * std::log(static_cast<long double>(n))));
    sum += std::exp(-0.5 * ln) * C(std::cos(phase), -std::sin(phase));
  }
  const double big_n = static_cast<double>(n_cut);
  const double log_n = std::log(big_n);
  const double phase_n = static_cast<double>(reduce_phase(static_cast<long double>(t) * std::log(static_cast<long double>(n_cut))));
  const C n_pow_minus_s = std::exp(-0.5 * log_n) * C(std::cos(phase_n), -std::sin(phase_n));
  sum += n_pow_minus_s * big_n / (s - 1.0);
  sum += 0.5 * n_pow_minus_s;
  // sum_k B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
  C rising = s;  // s (s+1) ... (s + 2k - 2)
  C n_pow = n_pow_minus_s / big_n;
  double factorial = 2.0;
  for (int k = 1; k <= terms; ++k) {
    sum += boost::math::bernoulli_b2n<double>(k) / factorial * rising * n_pow;
    rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
    n_pow /= big_n * big_n;
    factorial *= static_cast<double>((2 * k + 1) * (2 * k + 2));
  }
  return sum;
}

namespace detail {

// Smallest prime factor and extended-precision logarithms for the integers
// used in the Riemann-Siegel main sum, so that n^{-it} for composite n is a
// product of already computed prime terms.
struct MainSumTables {
  static constexpr int kSize = 1 << 16;
  std::vector<std::uint32_t> least_factor;
  std::vector<std::uint32_t> cofactor;  // n / least_factor[n]
  std::vector<long double> log_n;
  // log n split as hi + lo doubles, so t * log n can be formed to ~1e-30 relative
  std::vector<double> log_hi, log_lo;
  std::vector<double> inv_sqrt;

  MainSumTables()
      : least_factor(kSize + 1, 0), cofactor(kSize + 1, 1), log_n(kSize + 1), log_hi(kSize + 1), log_lo(kSize + 1), inv_sqrt(kSize + 1) {
    for (std::uint32_t n = 2; n <= kSize; ++n) {
      if (least_factor[n] == 0) {
        for (std::uint32_t m = n; m <= kSize; m += n) {
          if (least_factor[m] == 0) least_factor[m] = n;
        }
      }
    }
    for (std::uint32_t n = 2; n <= kSize; ++n) cofactor[n] = n / least_factor[n];
    for (int n = 1; n <= kSize; ++n) {
      log_n[n] = std::log(static_cast<long double>(n));
      log_hi[n] = static_cast<double>(log_n[n]);
      log_lo[n] = static_cast<double>(log_n[n] - static_cast<long double>(log_hi[n]));
      inv_sqrt[n] = 1.0 / std::sqrt(static_cast<double>(n));
    }
  }

  static const MainSumTables& get() {
    static const MainSumTables tables;
    return tables;
  }
};

// Riemann-Siegel correction coefficients C_0..C_4 as polynomials in
// z = p - 1/2, built from the Taylor series of
//   Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
// about p = 1/2. Psi is entire, so the Taylor coefficients are recovered from a
// Cauchy integral on |z| = 1 with a trapezoid rule (spectrally accurate).
struct CorrectionPolynomials {
  static constexpr int kSeriesDegree = 96;
  static constexpr int kSamples = 512;
  std::array<std::vector<double>, 5> coeffs;

  CorrectionPolynomials() {
    using CL = std::complex<long double>;
    std::vector<long double> taylor(kSeriesDegree + 1, 0.0L);
    for (int m = 0; m < kSamples; ++m) {
      const long double angle = kTwoPiL * m / kSamples;
      const CL z = std::polar(1.0L, angle);
      const CL psi = -std::cos(kTwoPiL * z * z - 5.0L * kPiL / 8.0L) / std::cos(kTwoPiL * z);
      for (int j = 0; j <= kSeriesDegree; ++j) {
        taylor[j] += (psi * std::polar(1.0L, -angle * j)).real();
      }
    }
    for (auto& a : taylor) a /= kSamples;

    const auto derivative = [&](int order) {
      std::vector<long double> d(kSeriesDegree + 1 - order);
      for (std::size_t j = 0; j < d.size(); ++j) {
        long double f = 1.0L;
        for (int i = 1; i <= order; ++i) f *= static_cast<long double>(j + i);
        d[j] = taylor[j + order] * f;
      }
      return d;
    };
    const long double pi2 = kPiL * kPiL;
    const long double pi4 = pi2 * pi2;
    const long double pi6 = pi4 * pi2;
    const long double pi8 = pi4 * pi4;
    const std::array<std::vector<std::pair<int, long double>>, 5> recipe{{
        {{0, 1.0L}},
        {{3, -1.0L / (96.0L * pi2)}},
        {{2, 1.0L / (64.0L * pi2)}, {6, 1.0L / (18432.0L * pi4)}},
        {{1, -1.0L / (64.0L * pi2)}, {5, -1.0L / (3840.0L * pi4)}, {9, -1.0L / (5308416.0L * pi6)}},
        {{0, 1.0L / (128.0L * pi2)},
         {4, 19.0L / (24576.0L * pi4)},
         {8, 11.0L / (5898240.0L * pi6)},
         {12, 1.0L / (2038431744.0L * pi8)}},
    }};
    for (int k = 0; k < 5; ++k) {
      std::vector<long double> poly(kSeriesDegree + 1, 0.0L);
      for (const auto& [order, weight] : recipe[k]) {
        const auto d = derivative(order);
        for (std::size_t j = 0; j < d.size(); ++j) poly[j] += weight * d[j];
      }
      // Drop the tail that cannot matter for |z| <= 1/2.
      std::size_t used = poly.size();
      while (used > 1 && std::abs(poly[used - 1]) * std::pow(0.5L, static_cast<long double>(used - 1)) < 1e-22L) --used;
      coeffs[k].assign(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(used));
    }
  }

  double eval(int k, double z) const {
    const auto& c = coeffs[k];
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  // sum_k C_k(z) a^k, with the five Horner chains interleaved.
  double combined(double z, double a) const {
    std::size_t longest = 0;
    for (const auto& c : coeffs) longest = std::max(longest, c.size());
    double acc[5] = {0, 0, 0, 0, 0};
    for (std::size_t j = longest; j-- > 0;) {
      for (int k = 0; k < 5; ++k) {
        acc[k] = acc[k] * z + (j < coeffs[k].size() ? coeffs[k][j] : 0.0);
      }
    }
    double total = 0.0;
    for (int k = 4; k >= 0; --k) total = total * a + acc[k];
    return total;
  }

  static const CorrectionPolynomials& get() {
    static const CorrectionPolynomials poly;
    return poly;
  }
};

// (-1)^{N-1} (2pi/t)^{1/4} sum_k C_k(p) (2pi/t)^{k/2}
inline double riemann_siegel_remainder(double t) {
  const double tau = std::sqrt(t / kTwoPi);
  const double floor_tau = std::floor(tau);
  const auto n = static_cast<long>(floor_tau);
  const double z = (tau - floor_tau) - 0.5;
  const double a = 1.0 / tau;  // (2pi/t)^{1/2}
  const double acc = CorrectionPolynomials::get().combined(z, a);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  return sign * std::sqrt(a) * acc;
}

inline int main_sum_length(long double t) {
  return static_cast<int>(std::floor(std::sqrt(t / kTwoPiL)));
}

// t * (hi + lo) reduced to (-pi, pi], for t exactly representable as a double.
inline double reduced_product(double t, double hi, double lo) {
  constexpr double kTwoPiHi = 6.283185307179586232;
  constexpr double kTwoPiLo = 2.4492935982947064e-16;
  const double prod = t * hi;
  const double prod_err = std::fma(t, hi, -prod);
  // round-to-nearest via the 1.5 * 2^52 shift; |prod| stays far below 2^51
  constexpr double kShift = 6755399441055744.0;
  const double k = (prod / kTwoPiHi + kShift) - kShift;
  double r = std::fma(-k, kTwoPiHi, prod);
  r = r - k * kTwoPiLo + (prod_err + t * lo);
  return r;
}

// Fill v_n = n^{-1/2} e^{-i t log n}, n = 1..count, from prime terms.
inline void fill_main_terms(long double t, int count, std::span<double> re, std::span<double> im) {
  const auto& tab = MainSumTables::get();
  const auto t_hi = static_cast<double>(t);
  if (count > MainSumTables::kSize) throw DomainError("hardy_z: height beyond main-sum table");
  // n^{-1/2} is completely multiplicative too, so composites are plain products.
  re[1] = 1.0;
  im[1] = 0.0;
  for (int n = 2; n <= count; ++n) {
    const std::uint32_t q = tab.cofactor[n];
    if (q == 1) {
      const double phase = reduced_product(t_hi, tab.log_hi[n], tab.log_lo[n]);
      double s, c;
      ::sincos(phase, &s, &c);
      re[n] = c * tab.inv_sqrt[n];
      im[n] = -s * tab.inv_sqrt[n];
    } else {
      const std::uint32_t p = tab.least_factor[n];
      re[n] = re[p] * re[q] - im[p] * im[q];
      im[n] = re[p] * im[q] + im[p] * re[q];
    }
  }
}

inline std::pair<double, double> sum_terms(const double* re, const double* im, int count) {
  double r[4] = {0, 0, 0, 0}, i[4] = {0, 0, 0, 0};
  int n = 1;
  for (; n + 3 <= count; n += 4) {
    for (int l = 0; l < 4; ++l) {
      r[l] += re[n + l];
      i[l] += im[n + l];
    }
  }
  for (; n <= count; ++n) {
    r[0] += re[n];
    i[0] += im[n];
  }
  return {(r[0] + r[1]) + (r[2] + r[3]), (i[0] + i[1]) + (i[2] + i[3])};
}

}  // namespace detail

/// Hardy's Z(t), real with |Z(t)| = |zeta(1/2 + it)|.
///
/// Riemann-Siegel main sum plus the C_0..C_4 corrections for t >= 1000;
/// Euler-Maclaurin below that.
inline double hardy_z(double t) {
  if (!(t >= 10.0)) throw DomainError("hardy_z: t must be >= 10, got " + std::to_string(t));
  const long double tl = t;
  const long double theta = riemann_siegel_theta_ld(tl);
  if (t < kRiemannSiegelMinHeight) {
    const auto zeta = zeta_critical_euler_maclaurin(t);
    const double th = static_cast<double>(reduce_phase(theta));
    return std::cos(th) * zeta.real() - std::sin(th) * zeta.imag();
  }
  const int count = detail::main_sum_length(tl);
  thread_local std::vector<double> re, im;
  re.resize(count + 1);
  im.resize(count + 1);
  detail::fill_main_terms(tl, count, re, im);
  const auto [sum_re, sum_im] = detail::sum_terms(re.data(), im.data(), count);
  const double th = static_cast<double>(reduce_phase(theta));
  return 2.0 * (std::cos(th) * sum_re - std::sin(th) * sum_im) + detail::riemann_siegel_remainder(t);
}

/// Evaluates Z on an arithmetic progression t0 + j*step, j = 0..count-1.
///
/// Above the Riemann-Siegel threshold the main-sum terms are advanced by
/// complex rotation between grid points and resynchronised from scratch every
/// kResync steps, which keeps the per-point cost to a few flops per term.
class HardyZSweep {
 public:
  static constexpr int kResync = 256;

  void evaluate(long double t0, long double step, std::span<double> out) {
    const std::size_t count = out.size();
    std::size_t j = 0;
    while (j < count) {
      const long double t = t0 + step * static_cast<long double>(j);
      if (t < kRiemannSiegelMinHeight) {
        out[j] = hardy_z(static_cast<double>(t));
        ++j;
        continue;
      }
      const int terms = detail::main_sum_length(t);
      // The block ends at the resync interval or where the main-sum length changes.
      std::size_t block = 0;
      while (j + block < count && block < static_cast<std::size_t>(kResync)) {
        const long double tb = t0 + step * static_cast<long double>(j + block);
        if (detail::main_sum_length(tb) != terms) break;
        ++block;
      }
      run_block(t0, step, j, block, terms, out);
      j += block;
    }
  }

 private:
  void run_block(long double t0, long double step, std::size_t first, std::size_t block, int terms,
                 std::span<double> out) {
    const auto& tab = detail::MainSumTables::get();
    re_.resize(terms + 1);
    im_.resize(terms + 1);
    rot_re_.resize(terms + 1);
    rot_im_.resize(terms + 1);
    const long double t_first = t0 + step * static_cast<long double>(first);
    detail::fill_main_terms(t_first, terms, re_, im_);
    for (int n = 1; n <= terms; ++n) {
      const double phase = static_cast<double>(step * tab.log_n[n]);
      rot_re_[n] = std::cos(phase);
      rot_im_[n] = -std::sin(phase);
    }
    double* __restrict vr = re_.data();
    double* __restrict vi = im_.data();
    const double* __restrict rr = rot_re_.data();
    const double* __restrict ri = rot_im_.data();
    for (std::size_t b = 0; b < block; ++b) {
      const long double t = t0 + step * static_cast<long double>(first + b);
      const auto [sum_re, sum_im] = detail::sum_terms(vr, vi, terms);
      const double th = static_cast<double>(reduce_phase(riemann_siegel_theta_ld(t)));
      out[first + b] =
          2.0 * (std::cos(th) * sum_re - std::sin(th) * sum_im) + detail::riemann_siegel_remainder(static_cast<double>(t));
      for (int n = 1; n <= terms; ++n) {
        const double a = vr[n], c = vi[n];
        vr[n] = a * rr[n] - c * ri[n];
        vi[n] = a * ri[n] + c * rr[n];
      }
    }
  }

  std::vector<double> re_, im_, rot_re_, rot_im_;
};

}  // namespace zetalab
