#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zetalab/error.hpp"

namespace zetalab {

/// Sieve-backed table of primes and prime powers up to a fixed limit.
///
/// For every n <= limit the table stores the exponent alpha when n = p^alpha
/// (0 otherwise), so the von Mangoldt function and its square-truncated
/// variant are O(1) lookups: log p = log(n) / alpha. Immutable after
/// construction and safe to share between threads.
class PrimeTable {
 public:
  static constexpr std::uint64_t kMaxLimit = 1'000'000'000ULL;

  explicit PrimeTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2 || limit > kMaxLimit) {
      throw ConfigError("prime table limit must lie in [2, 1e9], got " + std::to_string(limit));
    }
    exponent_.assign(limit + 1, 0);
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t p = 2; p <= limit; ++p) {
      if (composite[p]) continue;
      primes_.push_back(static_cast<std::uint32_t>(p));
      if (p * p <= limit) {
        for (std::uint64_t m = p * p; m <= limit; m += p) composite[m] = true;
      }
      std::uint8_t alpha = 1;
      for (std::uint64_t q = p; q <= limit; ++alpha) {
        exponent_[q] = alpha;
        if (q > limit / p) break;
        q *= p;
      }
    }
  }

  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }

  bool is_prime(std::uint64_t n) const {
    check(n);
    return exponent_[n] == 1;
  }

  /// Exponent alpha if n = p^alpha, else 0.
  int prime_power_exponent(std::uint64_t n) const {
    check(n);
    return exponent_[n];
  }

  double von_mangoldt(std::uint64_t n) const {
    check(n);
    const int alpha = exponent_[n];
    if (alpha == 0) return 0.0;
    return alpha == 1 ? std::log(static_cast<double>(n)) : std::log(static_cast<double>(n)) / alpha;
  }

  /// Lambda restricted to primes and prime squares.
  double von_mangoldt_star(std::uint64_t n) const {
    check(n);
    const int alpha = exponent_[n];
    if (alpha != 1 && alpha != 2) return 0.0;
    return std::log(static_cast<double>(n)) / alpha;
  }

  /// Sum of 1/p over primes p <= x.
  double prime_reciprocal_sum(double x) const {
    if (x > static_cast<double>(limit_)) {
      throw RangeError("prime_reciprocal_sum: x = " + std::to_string(x) +
                       " exceeds table limit " + std::to_string(limit_));
    }
    double sum = 0.0;
    for (std::uint32_t p : primes_) {
      if (p > x) break;
      sum += 1.0 / p;
    }
    return sum;
  }

  /// Primes p <= x, as a view into the table.
  std::span<const std::uint32_t> primes_up_to(double x) const {
    if (x > static_cast<double>(limit_)) {
      throw RangeError("primes_up_to: x = " + std::to_string(x) + " exceeds table limit " +
                       std::to_string(limit_));
    }
    if (x < 2.0) return {};
    const auto end = std::upper_bound(primes_.begin(), primes_.end(),
                                      static_cast<std::uint64_t>(std::floor(x)),
                                      [](std::uint64_t v, std::uint32_t p) { return v < p; });
    return {primes_.data(), static_cast<std::size_t>(end - primes_.begin())};
  }

 private:
  void check(std::uint64_t n) const {
    if (n < 1 || n > limit_) {
      throw RangeError("prime table lookup n = " + std::to_string(n) + " outside [1, " +
                       std::to_string(limit_) + "]");
    }
  }

  std::uint64_t limit_;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint8_t> exponent_;
};

}  // namespace zetalab
