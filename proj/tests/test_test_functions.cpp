#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "zetalab/test_function.hpp"

using namespace zetalab;

namespace {


// phi(x) = 2 int_0^eta phi_hat(u) cos(2 pi x u) du by composite Simpson with
// n panels, split at the kink of a dip.
double phi_by_simpson(const TestFunction& tf, double x, int n = 20000) {
  double total = 0.0;
  const double e = tf.eta();
  for (auto [a, b] : {std::pair{0.0, 0.5 * e}, std::pair{0.5 * e, e}}) {
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double u = a + i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * tf.hat(u) * std::cos(2.0 * kPi * x * u);
    }
    total += s * h / 3.0;
  }
  return 2.0 * total;
}

double sigma_by_simpson(const TestFunction& tf, int n = 200000) {
  const double e = tf.eta(), h = e / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = i * h, w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * u * tf.hat(u) * tf.hat(u);
  }
  return 2.0 * s * h / 3.0;
}

}  // namespace

TEST(TriangleHat, ClosedForms) {
  for (double eta : {0.3, 0.5, 1.0}) {
    const TestFunction tf(Family::triangle_hat, eta);
    EXPECT_NEAR(tf.phi0(), eta, 1e-12);
    EXPECT_NEAR(tf.hatphi0(), 1.0, 1e-15);
    EXPECT_NEAR(tf.sigma_sq(), eta * eta / 6.0, 1e-12);
    for (double x : {0.3, 1.7, 12.25}) {
      const double s = std::sin(kPi * eta * x) / (kPi * eta * x);
      EXPECT_NEAR(tf.phi(x), eta * s * s, 1e-9) << x;
    }
    EXPECT_DOUBLE_EQ(tf.hat(eta), 0.0);
    EXPECT_NEAR(tf.hat(0.5 * eta), 0.5, 1e-15);
  }
  EXPECT_FALSE(TestFunction(Family::triangle_hat, 0.5).smooth());
}

TEST(SmoothBump, MatchesDirectFourierIntegral) {
  for (double eta : {0.4, 0.8}) {
    const TestFunction tf(Family::smooth_bump_hat, eta);
    for (double x : {0.0, 0.7, 3.1, 10.0, 25.5}) {
      EXPECT_NEAR(tf.phi(x), phi_by_simpson(tf, x), 1e-9) << eta << " " << x;
    }
    EXPECT_NEAR(tf.sigma_sq(), sigma_by_simpson(tf), 1e-10);
    EXPECT_NEAR(tf.hatphi0(), std::exp(-1.0), 1e-15);
    EXPECT_TRUE(tf.smooth());
  }
}

TEST(SmoothBump, SupportAndTruncation) {
  const TestFunction tf(Family::smooth_bump_hat, 0.4);
  EXPECT_DOUBLE_EQ(tf.hat(0.4), 0.0);
  EXPECT_DOUBLE_EQ(tf.hat(0.5), 0.0);
  EXPECT_GT(tf.hat(0.399), 0.0);
  EXPECT_DOUBLE_EQ(tf.phi(tf.truncation_radius() + 1.0), 0.0);
  for (double x = tf.truncation_radius(); x < tf.truncation_radius() + 20.0; x += 0.37) {
    EXPECT_LT(std::abs(tf.phi_direct(x)), 1e-9) << x;
  }
  EXPECT_LT(tf.grid_error(), 1e-10);
}

TEST(BumpSquared, IsNonnegativeWithMatchingTransform) {
  const TestFunction tf(Family::bump_squared_hat, 0.4);
  for (double x = 0.0; x < tf.truncation_radius(); x += 0.113) EXPECT_GE(tf.phi(x), -1e-12) << x;
  for (double x : {0.0, 1.3, 6.0}) EXPECT_NEAR(tf.phi(x), phi_by_simpson(tf, x), 1e-9) << x;
  EXPECT_NEAR(tf.sigma_sq(), sigma_by_simpson(tf), 1e-10);
}

TEST(TestFunction, DipCancelsTheCentralValue) {
  // phi(0) = int phi_hat; a dip of 2 at half width removes it exactly
  const TestFunction tf(Family::smooth_bump_hat, 0.8, {1.0, 2.0});
  EXPECT_NEAR(tf.phi0(), 0.0, 1e-12);
  EXPECT_NEAR(tf.phi(0.0), 0.0, 1e-10);
  EXPECT_LT(tf.hatphi0(), 0.0);
  EXPECT_GT(tf.sigma_sq(), 0.0);
}

TEST(TestFunction, EvenInBothVariables) {
  const TestFunction tf(Family::smooth_bump_hat, 0.6, {1.5, 0.5});
  for (double x : {0.1, 2.2, 7.9}) EXPECT_EQ(tf.phi(x), tf.phi(-x));
  for (double u : {0.05, 0.29, 0.31, 0.59}) EXPECT_EQ(tf.hat(u), tf.hat(-u));
}

TEST(TestFunction, RejectsBadParameters) {
  EXPECT_THROW(TestFunction(Family::smooth_bump_hat, 0.0), ConfigError);
  EXPECT_THROW(TestFunction(Family::smooth_bump_hat, 2.5), ConfigError);
  EXPECT_THROW(TestFunction(Family::triangle_hat, 0.5, {0.0, 0.0}), ConfigError);
  EXPECT_THROW(parse_family("gaussian"), ConfigError);
  EXPECT_EQ(parse_family("bump_squared_hat"), Family::bump_squared_hat);
}

TEST(SupportValidation, Conditions) {
  const TestFunction a(Family::triangle_hat, 0.4), b(Family::triangle_hat, 0.6), c(Family::triangle_hat, 1.5);
  EXPECT_TRUE(validate_support(a, 2, SupportMode::unconditional));
  EXPECT_FALSE(validate_support(b, 2, SupportMode::unconditional));
  EXPECT_TRUE(validate_support(b, 2, SupportMode::rh_imaginary));
  EXPECT_FALSE(validate_support(c, 2, SupportMode::rh_imaginary));
  EXPECT_TRUE(validate_support(c, 0, SupportMode::unconditional));
  EXPECT_FALSE(validate_support(c, 0, SupportMode::correlation));
  EXPECT_TRUE(validate_support(b, 0, SupportMode::correlation));
  EXPECT_FALSE(validate_support(a, 6, SupportMode::unconditional));
  EXPECT_TRUE(validate_support(a, 4, SupportMode::hughes_rudnick));
  EXPECT_THROW(validate_support(a, 3, SupportMode::unconditional), ParityError);
}
