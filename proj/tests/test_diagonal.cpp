#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "zetalab/diagonal.hpp"

using namespace zetalab;

namespace {

const PrimeTable& primes() {
  static const PrimeTable t(10000);
  return t;
}

// T^eta = 200 exactly (up to rounding) keeps the exhaustive search small.
TestFunction small_bump(double T) {
  return TestFunction(Family::smooth_bump_hat, std::log(200.0) / std::log(T) * (1.0 - 1e-12));
}

// Independent naive evaluation for k <= 2 and h, l <= 1: expand the product
// explicitly and keep the terms whose two sides agree.
double naive_diagonal(int h, int l, int k, double x, double T, const TestFunction& tf) {
  const double L = std::log(T);
  std::vector<double> p;
  for (auto q : primes().primes_up_to(x)) p.push_back(q);
  std::map<std::uint64_t, double> a;  // n -> Lambda*(n) phi_hat(log n / log T)
  for (std::uint64_t n = 2; static_cast<double>(n) <= std::exp(tf.eta() * L) * (1 + 1e-12); ++n) {
    const double w = primes().von_mangoldt_star(n);
    if (w != 0.0) a[n] = w * tf.hat(std::log(static_cast<double>(n)) / L);
  }
  // S* = -(1/log T) sum_n a_n n^{-1/2} (n^{-it} + n^{it})
  std::vector<std::pair<double, double>> nterm;
  for (auto [n, w] : a) nterm.emplace_back(static_cast<double>(n), -w / (L * std::sqrt(static_cast<double>(n))));
  // each factor contributes a frequency ratio num/den; a term survives the
  // average exactly when num == den
  struct Term {
    double num, den, coef;
  };
  std::vector<Term> terms{{1.0, 1.0, 1.0}};
  const auto extend = [&](const std::vector<Term>& cur, const std::vector<Term>& factor) {
    std::vector<Term> out;
    for (const auto& c : cur)
      for (const auto& f : factor) out.push_back({c.num * f.num, c.den * f.den, c.coef * f.coef});
    return out;
  };
  std::vector<Term> pf, qf, nf;
  for (double q : p) pf.push_back({q, 1.0, 1.0 / std::sqrt(q)});
  for (double q : p) qf.push_back({1.0, q, 1.0 / std::sqrt(q)});
  for (auto [n, c] : nterm) {
    nf.push_back({n, 1.0, c});
    nf.push_back({1.0, n, c});
  }
  for (int i = 0; i < h; ++i) terms = extend(terms, pf);
  for (int i = 0; i < l; ++i) terms = extend(terms, qf);
  for (int i = 0; i < k; ++i) terms = extend(terms, nf);
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.num == t.den) acc += t.coef;
  return acc;
}

}  // namespace

TEST(MatchingCount, AgreesWithEnumeration) {
  for (int h = 0; h <= 4; ++h)
    for (int l = 0; l <= 4; ++l)
      for (int k = 0; h + l + k <= 8; k += 2) {
        EXPECT_EQ(matching_count(h, l, k), matching_count_bruteforce(h, l, k)) << h << l << k;
      }
  EXPECT_EQ(matching_count(1, 1, 1), 0);
  EXPECT_EQ(matching_count_bruteforce(1, 1, 1), 0);
  EXPECT_THROW(matching_count_bruteforce(3, 3, 4), BudgetError);
}

TEST(MatchingCount, GaussianMomentIdentity) {
  // k!/(k/2)! = 2^{k/2} (k-1)!!
  for (int k = 0; k <= 8; k += 2) {
    EXPECT_DOUBLE_EQ(static_cast<double>(matching_count(0, 0, k)), std::pow(2.0, k / 2) * gaussian_moment(k));
  }
  EXPECT_EQ(gaussian_moment(3), 0.0);
  EXPECT_EQ(gaussian_moment(6), 15.0);
}

TEST(Diagonal, NestedAndGroupedAgree) {
  const double T = 1e6;
  const auto tf = small_bump(T);
  for (double x : {10.0, 50.0}) {
    for (int h = 0; h <= 3; ++h)
      for (int l = 0; l <= 3; ++l)
        for (int k = 0; h + l + k <= 5; ++k) {
          const double a = diagonal_bruteforce_nested(h, l, k, x, T, tf, primes()).value;
          const double b = diagonal_bruteforce_grouped(h, l, k, x, T, tf, primes()).value;
          EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << h << l << k << " x=" << x;
        }
  }
}

TEST(Diagonal, MatchesNaiveExpansion) {
  const double T = 1e6, x = 30.0;
  const auto tf = small_bump(T);
  for (auto [h, l, k] : {std::tuple{1, 1, 0}, {0, 0, 2}, {1, 1, 2}, {1, 0, 1}, {0, 0, 1}, {1, 1, 1}}) {
    EXPECT_NEAR(diagonal_bruteforce_grouped(h, l, k, x, T, tf, primes()).value, naive_diagonal(h, l, k, x, T, tf), 1e-12)
        << h << l << k;
  }
}

TEST(Diagonal, LowOrderClosedForms) {
  const double T = 1e6, x = 50.0;
  const auto tf = small_bump(T);
  const auto s = relation_sums(x, T, tf, primes());
  EXPECT_NEAR(s[1], primes().prime_reciprocal_sum(x), 1e-14);
  EXPECT_NEAR(diagonal_bruteforce_grouped(1, 1, 0, x, T, tf, primes()).value, s[1], 1e-14);
  EXPECT_NEAR(diagonal_bruteforce_grouped(0, 0, 2, x, T, tf, primes()).value, 2.0 * s[4], 1e-14);
  EXPECT_NEAR(diagonal_main_term(0, 0, 2, s).value, 2.0 * s[4], 1e-15);
  EXPECT_NEAR(diagonal_main_term(2, 2, 0, s).value, 2.0 * s[1] * s[1], 1e-14);
  EXPECT_EQ(diagonal_bruteforce_grouped(2, 1, 0, x, T, tf, primes()).value, 0.0);
  EXPECT_EQ(diagonal_main_term(2, 1, 2, s).value, 0.0);
}

TEST(Diagonal, Guards) {
  const double T = 1e6;
  const auto tf = small_bump(T);
  EXPECT_THROW(diagonal_bruteforce_grouped(1, 1, 2, 60.0, T, tf, primes()), BudgetError);
  EXPECT_THROW(diagonal_bruteforce_nested(3, 3, 2, 10.0, T, tf, primes()), BudgetError);
  const TestFunction wide(Family::smooth_bump_hat, 0.5);
  EXPECT_THROW(diagonal_bruteforce_grouped(1, 1, 2, 10.0, T, wide, primes()), BudgetError);
  EXPECT_THROW(asymptotic_prediction(1, 1, 3, T, tf), ParityError);
  EXPECT_EQ(asymptotic_prediction(2, 1, 2, T, tf), 0.0);
  EXPECT_NEAR(asymptotic_prediction(1, 1, 2, T, tf), tf.sigma_sq() * std::log(std::log(T)), 1e-15);
}
