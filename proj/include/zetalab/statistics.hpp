#pragma once

// Pointwise statistics at an ordinate t: the zero sum N_phi, its prime-power
// counterparts S_phi and S*_phi, the prime polynomial P_x and the remainder
// E_x = log zeta - P_x.

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "zetalab/error.hpp"
#include "zetalab/prime_table.hpp"
#include "zetalab/riemann_siegel.hpp"
#include "zetalab/test_function.hpp"
#include "zetalab/zeros.hpp"

namespace zetalab {

/// Sum_n w_n n^{-it} over a fixed finite set of n, with t log n reduced in
/// double-double so that t up to ~1e8 keeps full phase accuracy.
class DirichletSum {
 public:
  DirichletSum() = default;

  void add(std::uint64_t n, double weight) {
    const long double ln = std::log(static_cast<long double>(n));
    log_hi_.push_back(static_cast<double>(ln));
    log_lo_.push_back(static_cast<double>(ln - static_cast<long double>(log_hi_.back())));
    weight_.push_back(weight);
    n_.push_back(n);
  }

  std::size_t size() const noexcept { return weight_.size(); }
  std::span<const std::uint64_t> terms() const noexcept { return n_; }
  std::span<const double> weights() const noexcept { return weight_; }

  /// Sum_n w_n cos(t log n).
  double cos_sum(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weight_.size(); ++i) {
      acc += weight_[i] * std::cos(detail::reduced_product(t, log_hi_[i], log_lo_[i]));
    }
    return acc;
  }

  /// Sum_n w_n n^{-it}.
  std::complex<double> value(double t) const {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < weight_.size(); ++i) {
      double s, c;
      ::sincos(detail::reduced_product(t, log_hi_[i], log_lo_[i]), &s, &c);
      re += weight_[i] * c;
      im -= weight_[i] * s;
    }
    return {re, im};
  }

 private:
  std::vector<double> log_hi_, log_lo_, weight_;
  std::vector<std::uint64_t> n_;
};

/// Coefficients of S_phi (or S*_phi) for one (T, phi) pair:
///   S(t) = -(2 / log T) Sum_n Lambda(n) n^{-1/2} phi_hat(log n / log T) cos(t log n).
/// Only n <= T^eta contribute.
class PrimePowerSum {
 public:
  PrimePowerSum(double T, const TestFunction& tf, const PrimeTable& table, bool squares_only) : log_T_(std::log(T)) {
    const double n_max = std::floor(std::exp(tf.eta() * log_T_) * (1.0 + 1e-12));
    if (n_max > static_cast<double>(table.limit())) {
      throw RangeError("prime table limit " + std::to_string(table.limit()) + " below T^eta = " +
                       std::to_string(n_max));
    }
    const double scale = -2.0 / log_T_;
    for (std::uint64_t n = 2; static_cast<double>(n) <= n_max; ++n) {
      const double lambda = squares_only ? table.von_mangoldt_star(n) : table.von_mangoldt(n);
      if (lambda == 0.0) continue;
      const double h = tf.hat(std::log(static_cast<double>(n)) / log_T_);
      if (h == 0.0) continue;
      sum_.add(n, scale * lambda / std::sqrt(static_cast<double>(n)) * h);
    }
  }

  double operator()(double t) const { return sum_.cos_sum(t); }
  const DirichletSum& terms() const noexcept { return sum_; }

 private:
  double log_T_;
  DirichletSum sum_;
};

/// P_x(t) = Sum_{p <= x} p^{-1/2 - it}.
class PrimePolynomial {
 public:
  PrimePolynomial(double x, const PrimeTable& table) : x_(x) {
    for (std::uint32_t p : table.primes_up_to(x)) sum_.add(p, 1.0 / std::sqrt(static_cast<double>(p)));
  }
  std::complex<double> operator()(double t) const { return sum_.value(t); }
  double x() const noexcept { return x_; }
  std::size_t size() const noexcept { return sum_.size(); }

 private:
  double x_;
  DirichletSum sum_;
};

/// Half-width of the zero window N_phi looks at, in t units.
inline double zero_window(double T, const TestFunction& tf) { return kTwoPi * tf.truncation_radius() / std::log(T); }

/// N_phi(t) = Sum_gamma phi((log T / 2pi)(gamma - t)).
inline double n_phi(double t, const ZeroTable& zeros, double T, const TestFunction& tf) {
  const double w = zero_window(T, tf);
  if (!zeros.covers(t - w, t + w)) {
    throw CoverageError("n_phi: certified zeros do not cover [" + std::to_string(t - w) + ", " +
                        std::to_string(t + w) + "]");
  }
  const double scale = std::log(T) / kTwoPi;
  double acc = 0.0;
  for (double g : zeros.between(t - w, t + w)) acc += tf.phi(scale * (g - t));
  return acc;
}

/// Zero-sum without the coverage check, for hand-built tables in tests.
inline double n_phi_unchecked(double t, std::span<const double> gammas, double T, const TestFunction& tf) {
  const double scale = std::log(T) / kTwoPi;
  double acc = 0.0;
  for (double g : gammas) acc += tf.phi(scale * (g - t));
  return acc;
}

inline double s_phi(double t, double T, const PrimeTable& table, const TestFunction& tf) {
  return PrimePowerSum(T, tf, table, false)(t);
}

inline double s_phi_star(double t, double T, const PrimeTable& table, const TestFunction& tf) {
  return PrimePowerSum(T, tf, table, true)(t);
}

inline std::complex<double> p_x(double t, double x, const PrimeTable& table) { return PrimePolynomial(x, table)(t); }

inline std::complex<double> approx_error_e_x(double t, double x, const ZeroTable& zeros, const PrimeTable& table) {
  return log_zeta(t, zeros).log_zeta() - p_x(t, x, table);
}

struct StatisticPoint {
  double t = 0.0;
  double n_phi = 0.0;
  double s_phi = 0.0;
  double s_phi_star = 0.0;
  std::complex<double> p_x;
  std::complex<double> e_x;
};

/// All statistics at one ordinate, reusing prebuilt coefficient arrays.
struct StatisticEvaluator {
  StatisticEvaluator(double T_, double x, const TestFunction& tf_, const PrimeTable& table)
      : T(T_), tf(&tf_), s_full(T_, tf_, table, false), s_star(T_, tf_, table, true), poly(x, table) {}

  StatisticPoint operator()(double t, const ZeroTable& zeros) const {
    StatisticPoint p;
    p.t = t;
    p.n_phi = zetalab::n_phi(t, zeros, T, *tf);
    p.s_phi = s_full(t);
    p.s_phi_star = s_star(t);
    p.p_x = poly(t);
    p.e_x = log_zeta(t, zeros).log_zeta() - p.p_x;
    return p;
  }

  double T;
  const TestFunction* tf;
  PrimePowerSum s_full, s_star;
  PrimePolynomial poly;
};

}  // namespace zetalab
