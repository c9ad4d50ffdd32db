#pragma once

// Exact diagonal of the mixed moment
//   M(h, l, k) = (1/T) int P_x^h conj(P_x)^l (S*_phi)^k dt,
// i.e. the terms whose two multiplicative sides coincide, together with the
// relation sums that organise it and the resulting main-term predictions.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "zetalab/error.hpp"
#include "zetalab/prime_table.hpp"
#include "zetalab/test_function.hpp"

namespace zetalab {

/// The ten relation sums S_1..S_10 (index 0 unused). Every n-variable in a
/// relation brings a factor -1/log T.
struct RelationSums {
  std::array<double, 11> s{};
  double x = 0.0;
  double T = 0.0;
  double eta = 0.0;

  double operator[](int i) const { return s.at(static_cast<std::size_t>(i)); }
};

inline RelationSums relation_sums(double x, double T, const TestFunction& tf, const PrimeTable& table) {
  const double L = std::log(T);
  const double n_max = std::floor(std::exp(tf.eta() * L) * (1.0 + 1e-12));
  if (n_max > static_cast<double>(table.limit()) || x > static_cast<double>(table.limit())) {
    throw RangeError("relation_sums: prime table limit " + std::to_string(table.limit()) + " too small");
  }
  RelationSums r;
  r.x = x;
  r.T = T;
  r.eta = tf.eta();
  auto& s = r.s;
  s[1] = table.prime_reciprocal_sum(x);
  for (std::uint32_t p : table.primes_up_to(x)) {
    const double lp = std::log(static_cast<double>(p));
    const double pd = p;
    const double h1 = tf.hat(lp / L), h2 = tf.hat(2.0 * lp / L);
    s[2] += -lp * h1 / pd / L;
    s[5] += -lp * h2 / (pd * pd) / L;
    s[6] += lp * lp * h1 * h2 / (pd * pd) / (L * L);
  }
  for (std::uint64_t n = 2; static_cast<double>(n) <= n_max; ++n) {
    const double lam = table.von_mangoldt_star(n);
    if (lam == 0.0) continue;
    const double h = tf.hat(std::log(static_cast<double>(n)) / L);
    s[4] += lam * lam * h * h / static_cast<double>(n) / (L * L);
  }
  // n_j n_j' = n_j'' forces p * p = p^2, with p^2 <= T^eta.
  for (std::uint32_t p : table.primes_up_to(std::sqrt(n_max))) {
    const double lp = std::log(static_cast<double>(p));
    const double pd = p;
    const double h1 = tf.hat(lp / L), h2 = tf.hat(2.0 * lp / L);
    s[7] += -lp * lp * lp * h1 * h1 * h2 / (pd * pd) / (L * L * L);
  }
  s[3] = s[2];
  s[8] = s[5];
  s[9] = s[6];
  s[10] = s[7];
  return r;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// (k-1)!! for even k, 0 for odd k.
inline double gaussian_moment(int k) {
  if (k < 0) throw ConfigError("gaussian_moment: negative order");
  if (k % 2 != 0) return 0.0;
  double m = 1.0;
  for (int i = k - 1; i > 1; i -= 2) m *= i;
  return m;
}

/// h! k!/(k/2)! when h = l and k is even, else 0.
inline std::int64_t matching_count(int h, int l, int k) {
  if (h < 0 || l < 0 || k < 0) throw ConfigError("matching_count: negative index");
  if (h != l || k % 2 != 0) return 0;
  std::int64_t c = 1;
  for (int i = 2; i <= h; ++i) c *= i;
  for (int i = k / 2 + 1; i <= k; ++i) c *= i;
  return c;
}

/// Enumerates every split J of the n-variables and every set partition of all
/// h + l + k variables into blocks of equal symbols, keeps those whose two
/// products agree as multisets, and counts the ones made only of p-q and n-n
/// pairs across the two sides.
inline std::int64_t matching_count_bruteforce(int h, int l, int k) {
  if (h < 0 || l < 0 || k < 0) throw ConfigError("matching_count_bruteforce: negative index");
  const int m = h + l + k;
  if (m > 8) throw BudgetError("matching_count_bruteforce: h + l + k must be <= 8");
  // variable kinds: 0 = p (left), 1 = q (right), 2 = n (side set by J)
  std::vector<int> kind;
  for (int i = 0; i < h; ++i) kind.push_back(0);
  for (int i = 0; i < l; ++i) kind.push_back(1);
  for (int i = 0; i < k; ++i) kind.push_back(2);

  std::int64_t count = 0;
  std::vector<int> block(static_cast<std::size_t>(m), 0);
  for (std::uint32_t J = 0; J < (1u << k); ++J) {
    const auto side = [&](int v) {
      if (kind[v] == 0) return 0;
      if (kind[v] == 1) return 1;
      return ((J >> (v - h - l)) & 1u) ? 0 : 1;
    };
    // restricted growth strings enumerate set partitions
    std::function<void(int, int)> rec = [&](int v, int blocks) {
      if (v == m) {
        std::vector<int> left(blocks, 0), right(blocks, 0), size(blocks, 0);
        for (int u = 0; u < m; ++u) {
          (side(u) == 0 ? left : right)[block[u]]++;
          size[block[u]]++;
        }
        for (int b = 0; b < blocks; ++b) {
          if (left[b] != right[b]) return;
        }
        for (int b = 0; b < blocks; ++b) {
          if (size[b] != 2) return;
        }
        for (int u = 0; u < m; ++u) {
          for (int w = u + 1; w < m; ++w) {
            if (block[u] != block[w]) continue;
            const bool pq = (kind[u] == 0 && kind[w] == 1) || (kind[u] == 1 && kind[w] == 0);
            const bool nn = kind[u] == 2 && kind[w] == 2;
            if (!pq && !nn) return;
          }
        }
        ++count;
        return;
      }
      for (int b = 0; b <= blocks; ++b) {
        block[v] = b;
        rec(v + 1, b == blocks ? blocks + 1 : blocks);
      }
    };
    rec(0, 0);
  }
  return count;
}

/// h! S_1^h k!/(k/2)! S_4^{k/2}; zero unless h = l and k is even.
inline double predicted_moment(int h, int l, int k, const RelationSums& sums) {
  if (h != l || k % 2 != 0) return 0.0;
  return static_cast<double>(matching_count(h, l, k)) * std::pow(sums[1], h) * std::pow(sums[4], k / 2);
}

/// mu_k sigma^k 1(h = l) h! (log log T)^h.
inline double asymptotic_prediction(int h, int l, int k, double T, const TestFunction& tf) {
  if (k % 2 != 0) throw ParityError("asymptotic_prediction: k must be even, got " + std::to_string(k));
  if (h != l) return 0.0;
  return gaussian_moment(k) * std::pow(tf.sigma_sq(), k / 2.0) * factorial(h) * std::pow(std::log(std::log(T)), h);
}

enum class DiagonalMethod { bruteforce_nested, bruteforce_grouped, main_term_formula };

struct DiagonalValue {
  int h = 0, l = 0, k = 0;
  double value = 0.0;
  DiagonalMethod method = DiagonalMethod::bruteforce_nested;
};

namespace detail {

using Key = unsigned __int128;

struct KeyHash {
  std::size_t operator()(Key k) const noexcept {
    const auto lo = static_cast<std::uint64_t>(k), hi = static_cast<std::uint64_t>(k >> 64);
    return std::hash<std::uint64_t>{}(lo * 0x9E3779B97F4A7C15ULL ^ hi);
  }
};

// One variable's admissible values with their weights (excluding 1/sqrt).
struct Alphabet {
  std::vector<std::uint64_t> value;
  std::vector<double> weight;
  std::uint64_t max = 1;
};

struct DiagonalSetup {
  Alphabet primes;     // p_i, q_i <= x, weight 1
  Alphabet n_values;   // Lambda*(n) phi_hat(log n / log T) over Lambda*(n) != 0
  double prefactor = 1.0;
};

inline DiagonalSetup diagonal_setup(int h, int l, int k, double x, double T, const TestFunction& tf,
                                    const PrimeTable& table) {
  if (h < 0 || l < 0 || k < 0) throw ConfigError("diagonal: negative index");
  const double L = std::log(T);
  const double n_max = std::floor(std::exp(tf.eta() * L) * (1.0 + 1e-12));
  if (x > 50.0 || n_max > 200.0 || h + l + k > 7) {
    throw BudgetError("diagonal_bruteforce: search space too large (need x <= 50, T^eta <= 200, h+l+k <= 7)");
  }
  if (n_max > static_cast<double>(table.limit()) || x > static_cast<double>(table.limit())) {
    throw RangeError("diagonal_bruteforce: prime table too small");
  }
  DiagonalSetup s;
  for (std::uint32_t p : table.primes_up_to(x)) {
    s.primes.value.push_back(p);
    s.primes.weight.push_back(1.0);
    s.primes.max = p;
  }
  for (std::uint64_t n = 2; static_cast<double>(n) <= n_max; ++n) {
    const double lam = table.von_mangoldt_star(n);
    if (lam == 0.0) continue;
    const double w = lam * tf.hat(std::log(static_cast<double>(n)) / L);
    if (w == 0.0) continue;
    s.n_values.value.push_back(n);
    s.n_values.weight.push_back(w);
    s.n_values.max = n;
  }
  s.prefactor = ((k % 2) ? -1.0 : 1.0) / std::pow(L, k);
  return s;
}

inline Key power_bound(std::uint64_t base, int e) {
  Key r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

/// Nested enumeration of every tuple, testing the product identity directly.
/// The right side is only extended while its partial product divides the
/// left product.
inline DiagonalValue diagonal_bruteforce_nested(int h, int l, int k, double x, double T, const TestFunction& tf,
                                                const PrimeTable& table) {
  const auto setup = detail::diagonal_setup(h, l, k, x, T, tf, table);
  double total = 0.0;
  for (std::uint32_t J = 0; J < (1u << k); ++J) {
    const int left_n = std::popcount(J);
    const int right_n = k - left_n;
    // left variables: h primes then left_n n-values; right: l primes then right_n n-values
    std::vector<const detail::Alphabet*> left, right;
    for (int i = 0; i < h; ++i) left.push_back(&setup.primes);
    for (int i = 0; i < left_n; ++i) left.push_back(&setup.n_values);
    for (int i = 0; i < l; ++i) right.push_back(&setup.primes);
    for (int i = 0; i < right_n; ++i) right.push_back(&setup.n_values);
    const detail::Key right_max =
        detail::power_bound(setup.primes.max, l) * detail::power_bound(setup.n_values.max, right_n);
    if ((h > 0 && setup.primes.value.empty()) || (l > 0 && setup.primes.value.empty())) continue;

    double j_total = 0.0;
    std::function<void(std::size_t, detail::Key, double)> walk_right;
    detail::Key target = 1;
    double left_weight = 1.0;
    walk_right = [&](std::size_t v, detail::Key prod, double w) {
      if (v == right.size()) {
        if (prod == target) j_total += left_weight * w / static_cast<double>(target);
        return;
      }
      const auto& a = *right[v];
      for (std::size_t i = 0; i < a.value.size(); ++i) {
        const detail::Key next = prod * a.value[i];
        if (target % next != 0) continue;
        walk_right(v + 1, next, w * a.weight[i]);
      }
    };
    std::function<void(std::size_t, detail::Key, double)> walk_left = [&](std::size_t v, detail::Key prod, double w) {
      if (prod > right_max) return;
      if (v == left.size()) {
        target = prod;
        left_weight = w;
        walk_right(0, 1, 1.0);
        return;
      }
      const auto& a = *left[v];
      for (std::size_t i = 0; i < a.value.size(); ++i) walk_left(v + 1, prod * a.value[i], w * a.weight[i]);
    };
    walk_left(0, 1, 1.0);
    total += j_total;
  }
  return {h, l, k, setup.prefactor * total, DiagonalMethod::bruteforce_nested};
}

/// Groups each side by the value of its product and pairs equal keys.
inline DiagonalValue diagonal_bruteforce_grouped(int h, int l, int k, double x, double T, const TestFunction& tf,
                                                 const PrimeTable& table) {
  const auto setup = detail::diagonal_setup(h, l, k, x, T, tf, table);
  using Map = std::unordered_map<detail::Key, double, detail::KeyHash>;
  // keys above the other side's largest possible product can never pair
  const auto side_map = [&](int primes, int ns, detail::Key bound) {
    Map cur{{detail::Key{1}, 1.0}};
    const auto extend = [&](const detail::Alphabet& a) {
      Map next;
      for (const auto& [key, w] : cur) {
        for (std::size_t i = 0; i < a.value.size(); ++i) {
          const detail::Key product = key * a.value[i];
          if (product <= bound) next[product] += w * a.weight[i];
        }
      }
      cur.swap(next);
    };
    for (int i = 0; i < primes; ++i) extend(setup.primes);
    for (int i = 0; i < ns; ++i) extend(setup.n_values);
    return cur;
  };
  // side maps depend on J only through |J|, so build them once per size
  std::vector<Map> left_maps, right_maps;
  for (int j = 0; j <= k; ++j) {
    const detail::Key n_bound = detail::power_bound(setup.n_values.max, k - j);
    left_maps.push_back(side_map(h, j, detail::power_bound(setup.primes.max, l) * n_bound));
    right_maps.push_back(side_map(l, j, detail::power_bound(setup.primes.max, h) * n_bound));
  }
  double total = 0.0;
  for (std::uint32_t J = 0; J < (1u << k); ++J) {
    const int left_n = std::popcount(J);
    const Map& a = left_maps[left_n];
    const Map& b = right_maps[k - left_n];
    const Map& small = a.size() <= b.size() ? a : b;
    const Map& large = a.size() <= b.size() ? b : a;
    double j_total = 0.0;
    for (const auto& [key, w] : small) {
      const auto it = large.find(key);
      if (it != large.end()) j_total += w * it->second / static_cast<double>(key);
    }
    total += j_total;
  }
  return {h, l, k, setup.prefactor * total, DiagonalMethod::bruteforce_grouped};
}

inline DiagonalValue diagonal_main_term(int h, int l, int k, const RelationSums& sums) {
  return {h, l, k, predicted_moment(h, l, k, sums), DiagonalMethod::main_term_formula};
}

}  // namespace zetalab
