#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "zetalab/riemann_siegel.hpp"
#include "zetalab/zero_cache.hpp"
#include "zetalab/zeros.hpp"

using namespace zetalab;
namespace fs = std::filesystem;

namespace {

// theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, with log Gamma from the
// recurrence up to z + 20 and the Stirling series there.
long double theta_oracle(long double t) {
  using C = std::complex<long double>;
  C z(0.25L, t / 2.0L);
  C shift(0.0L, 0.0L);
  for (int k = 0; k < 20; ++k) shift += std::log(z + static_cast<long double>(k));
  const C w = z + 20.0L;
  const long double b[] = {1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66, -691.0L / 2730, 7.0L / 6};
  C series(0.0L, 0.0L);
  C wpow = w;
  for (int k = 1; k <= 7; ++k) {
    series += b[k - 1] / (static_cast<long double>(2 * k * (2 * k - 1)) * wpow);
    wpow *= w * w;
  }
  const C lg = (w - 0.5L) * std::log(w) - w + 0.5L * std::log(2.0L * std::numbers::pi_v<long double>) + series - shift;
  return lg.imag() - t / 2.0L * std::log(std::numbers::pi_v<long double>);
}

const std::vector<double> kFirstZeros{14.134725141734694, 21.022039638771555, 25.010857580145689,
                                      30.424876125859513, 32.935061587739189, 37.586178158825671};

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("zetalab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Theta, MatchesLogGammaOracle) {
  for (double t : {20.0, 100.0, 999.0, 1000.0, 12345.678, 1e5, 1e6 + 0.3, 2e6}) {
    const double tol = 4e-16 * t + 1e-12;
    EXPECT_NEAR(riemann_siegel_theta(t), static_cast<double>(theta_oracle(t)), tol) << t;
  }
}

TEST(HardyZ, VanishesAtKnownZeros) {
  for (double g : kFirstZeros) EXPECT_LT(std::abs(hardy_z(g)), 1e-9) << g;
}

TEST(HardyZ, ModulusMatchesZeta) {
  for (double t : {17.0, 50.5, 321.25}) {
    EXPECT_NEAR(std::abs(hardy_z(t)), std::abs(zeta_critical_euler_maclaurin(t)), 1e-10) << t;
  }
}

TEST(HardyZ, RiemannSiegelAgreesWithEulerMaclaurin) {
  // hardy_z switches to the Riemann-Siegel expansion at 1000; the
  // Euler-Maclaurin evaluation is exact to rounding at every height.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1000.0, 1200.0);
  for (int i = 0; i < 40; ++i) {
    const double t = u(rng);
    const auto z = zeta_critical_euler_maclaurin(t) * std::polar(1.0, riemann_siegel_theta(t));
    EXPECT_NEAR(hardy_z(t), z.real(), 1e-8) << t;
    EXPECT_NEAR(z.imag(), 0.0, 1e-8) << t;
  }
}

TEST(HardyZ, SweepMatchesPointEvaluation) {
  for (long double t0 : {1500.0L, 1e5L + 0.125L, 1e6L}) {
    std::vector<double> out(300);
    HardyZSweep sweep;
    sweep.evaluate(t0, 0.0625L, out);
    for (std::size_t i = 0; i < out.size(); i += 7) {
      const double t = static_cast<double>(t0 + 0.0625L * i);
      EXPECT_NEAR(out[i], hardy_z(t), 1e-9 * (1.0 + std::abs(out[i]))) << t;
    }
  }
}

TEST(Zeros, FirstTwentyNineAreCertified) {
  const auto z = find_zeros(10.0, 100.0);
  ASSERT_TRUE(z.certified);
  ASSERT_EQ(z.size(), 29u);
  for (std::size_t i = 0; i < kFirstZeros.size(); ++i) EXPECT_NEAR(z.gammas[i], kFirstZeros[i], 1e-9);
  EXPECT_NEAR(z.gammas.back(), 98.831194218, 1e-8);
  EXPECT_EQ(z.count_below, 0);
  EXPECT_EQ(turing::parity_count(100.0), 29);
}

TEST(Zeros, EmptyWindowStillKnowsItsOffset) {
  const auto z = find_zeros(14.2, 21.0);
  EXPECT_TRUE(z.certified);
  EXPECT_EQ(z.size(), 0u);
  EXPECT_EQ(z.count_below, 1);
}

TEST(Zeros, CountAtOneHundredThousand) {
  const auto z = find_zeros(1e5, 1e5 + 100.0);
  ASSERT_TRUE(z.certified);
  EXPECT_EQ(z.count_below, 138069);
  for (double g : z.gammas) ASSERT_LT(std::abs(hardy_z(g)), 1e-7);
}

TEST(Zeros, WindowsAcrossTheParityLimitAgree) {
  const auto a = find_zeros(250.0, 700.0);
  const auto b = find_zeros(550.0, 700.0);
  ASSERT_TRUE(a.certified);
  ASSERT_TRUE(b.certified);
  EXPECT_EQ(a.count_before(550.0), b.count_below);
  EXPECT_EQ(a.between(550.0, 700.0).size(), b.size());
}

TEST(Zeros, RejectsLowWindows) {
  EXPECT_THROW(find_zeros(5.0, 50.0), DomainError);
  EXPECT_THROW(find_zeros(60.0, 50.0), DomainError);
}

TEST(Zeros, SliceKeepsTheCountingFunction) {
  const auto z = find_zeros(10.0, 100.0);
  const auto s = z.slice(30.0, 60.0);
  EXPECT_EQ(s.count_below, 3);
  EXPECT_EQ(s.size(), z.between(30.0, 60.0).size());
  EXPECT_THROW(z.slice(5.0, 60.0), CoverageError);
  EXPECT_EQ(recount_below(s), 3);
}

TEST(LogZeta, ExponentiatesBackToZeta) {
  const auto z = find_zeros(10.0, 400.0);
  for (double t : {40.0, 123.4, 250.0, 399.0}) {
    const auto s = log_zeta(t, z);
    const auto zeta = zeta_critical_euler_maclaurin(t);
    EXPECT_NEAR(std::abs(std::exp(s.log_zeta()) - zeta), 0.0, 1e-9 * std::abs(zeta)) << t;
    // Im log zeta = pi S(t) with |S| < 1 this low
    EXPECT_LT(std::abs(s.im_log), std::numbers::pi) << t;
  }
}

TEST(LogZeta, RefusesSingularAndUncoveredOrdinates) {
  const auto z = find_zeros(10.0, 100.0);
  EXPECT_THROW(log_zeta(z.gammas[3] + 1e-7, z), SingularOrdinateError);
  EXPECT_THROW(log_zeta(150.0, z), CoverageError);
  auto unc = z;
  unc.certified = false;
  EXPECT_THROW(log_zeta(50.0, unc), CoverageError);
}

TEST(ZeroCache, RoundTripIsBitIdentical) {
  const auto dir = scratch_dir("roundtrip");
  ZeroProvenance p1, p2;
  const auto a = cached_zeros(1000.0, 1300.0, dir, {}, &p1);
  const auto b = cached_zeros(1000.0, 1300.0, dir, {}, &p2);
  EXPECT_EQ(p1.source, "computed");
  EXPECT_EQ(p2.source, "cache");
  EXPECT_EQ(a.gammas, b.gammas);
  EXPECT_EQ(a.count_below, b.count_below);
  const auto c = cached_zeros(1100.0, 1200.0, dir, {}, &p2);
  EXPECT_EQ(p2.source, "cache-slice");
  EXPECT_EQ(c.count_below, a.count_before(1100.0));
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().extension(), ".txt");
  fs::remove_all(dir);
}

TEST(ZeroCache, DamagedFilesAreRejected) {
  const auto dir = scratch_dir("damaged");
  auto table = find_zeros(10.0, 100.0);
  normalize_for_cache(table);
  const auto path = zero_cache_path(dir, 10.0, 100.0);
  const auto rewrite = [&](auto edit) {
    save_zero_table(table, path);
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    edit(lines);
    std::ofstream out(path, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
  };
  save_zero_table(table, path);
  EXPECT_EQ(load_zero_table(path).gammas, table.gammas);

  rewrite([](auto& l) { l.pop_back(); });
  EXPECT_THROW(load_zero_table(path), CacheError);
  rewrite([](auto& l) { std::swap(l[3], l[4]); });
  EXPECT_THROW(load_zero_table(path), CacheError);
  rewrite([](auto& l) { l[1] = "14.200000000"; });
  EXPECT_THROW(load_zero_table(path), CacheError);
  rewrite([](auto& l) { l[0] = "# zeroes 10 100"; });
  EXPECT_THROW(load_zero_table(path), CacheError);

  // a readable header over a damaged body is tried, rejected and recomputed
  rewrite([](auto& l) { std::swap(l[3], l[4]); });
  ZeroProvenance p;
  const auto again = cached_zeros(10.0, 100.0, dir, {}, &p);
  EXPECT_EQ(p.source, "computed");
  EXPECT_FALSE(p.note.empty());
  EXPECT_EQ(again.gammas, table.gammas);
  fs::remove_all(dir);
}
