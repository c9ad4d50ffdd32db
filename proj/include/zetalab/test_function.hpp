#pragma once

// Even, real test functions phi whose Fourier transform
//   phi_hat(u) = int phi(x) exp(-2 pi i x u) dx
// is supported in [-eta, eta]. phi itself is tabulated once on a dense grid
// and read back by cubic Hermite interpolation.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zetalab/error.hpp"
#include "zetalab/riemann_siegel.hpp"

namespace zetalab {

enum class Family { triangle_hat, smooth_bump_hat, bump_squared_hat };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::triangle_hat: return "triangle_hat";
    case Family::smooth_bump_hat: return "smooth_bump_hat";
    case Family::bump_squared_hat: return "bump_squared_hat";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  if (name == "triangle_hat") return Family::triangle_hat;
  if (name == "smooth_bump_hat") return Family::smooth_bump_hat;
  if (name == "bump_squared_hat") return Family::bump_squared_hat;
  throw ConfigError("unknown test function family '" + std::string(name) + "'");
}

/// phi_hat = amplitude * base(u; eta) - dip * base(u; eta / 2).
///
/// With dip = 0 this is the plain family member. A positive dip subtracts a
/// narrower copy, which is how a signed phi_hat with phi(0) = 0 is built.
struct TestFunctionParams {
  double amplitude = 1.0;
  double dip = 0.0;
};

enum class SupportMode { unconditional, rh_imaginary, correlation, hughes_rudnick };

inline SupportMode parse_support_mode(std::string_view name) {
  if (name == "unconditional") return SupportMode::unconditional;
  if (name == "rh_imaginary") return SupportMode::rh_imaginary;
  if (name == "correlation") return SupportMode::correlation;
  if (name == "hughes_rudnick") return SupportMode::hughes_rudnick;
  throw ConfigError("unknown support mode '" + std::string(name) + "'");
}

namespace detail {

inline double bump(double v) {
  const double s = 1.0 - v * v;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// int_a^b f by composite 20-point Gauss-Legendre on equal panels.
template <class F>
double gauss_panels(F&& f, double a, double b, int panels) {
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + width * i;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + width);
  }
  return total;
}

inline double sinc(double y) {
  if (std::abs(y) < 1e-8) return 1.0 - (kPi * y) * (kPi * y) / 6.0;
  return std::sin(kPi * y) / (kPi * y);
}

// d/dx of sinc(a x)^2
inline double sinc_sq_derivative(double a, double x) {
  const double y = a * x;
  if (std::abs(y) < 1e-6) return -2.0 * kPi * kPi * a * a * x / 3.0;
  const double py = kPi * y;
  const double s = std::sin(py), c = std::cos(py);
  // sinc^2 = s^2 / py^2
  return a * kPi * (2.0 * s * c / (py * py) - 2.0 * s * s / (py * py * py));
}

}  // namespace detail

class TestFunction {
 public:
  static constexpr double kGridStep = 0.01;
  static constexpr double kCutoff = 1e-9;

  TestFunction(Family family, double eta, TestFunctionParams params = {})
      : family_(family), eta_(eta), params_(params) {
    if (!(eta > 0.0 && eta <= 2.0)) {
      throw ConfigError("test function eta must lie in (0, 2], got " + std::to_string(eta));
    }
    if (!std::isfinite(params.amplitude) || !std::isfinite(params.dip)) {
      throw ConfigError("test function parameters must be finite");
    }
    if (params.amplitude == 0.0 && params.dip == 0.0) throw ConfigError("test function is identically zero");
    build_cache();
    hatphi0_ = hat(0.0);
    phi0_ = integrate_hat([this](double u) { return hat(u); });
    sigma_sq_ = compute_sigma_sq();
  }

  Family family() const noexcept { return family_; }
  double eta() const noexcept { return eta_; }
  const TestFunctionParams& params() const noexcept { return params_; }
  /// The triangle is continuous but not smooth at 0 and +-eta.
  bool smooth() const noexcept { return family_ != Family::triangle_hat; }

  double phi0() const noexcept { return phi0_; }
  double hatphi0() const noexcept { return hatphi0_; }
  double sigma_sq() const noexcept { return sigma_sq_; }
  /// |phi(x)| < 1e-9 for |x| >= truncation_radius().
  double truncation_radius() const noexcept { return x0_; }

  /// phi_hat(u), exact (closed form or a small fixed quadrature).
  double hat(double u) const {
    return params_.amplitude * base_hat(std::abs(u), eta_) - params_.dip * base_hat(std::abs(u), 0.5 * eta_);
  }

  /// phi(x) from the tabulated grid; 0 beyond the truncation radius.
  double phi(double x) const {
    x = std::abs(x);
    if (x >= x0_) return 0.0;
    const double pos = x / kGridStep;
    const auto i = static_cast<std::size_t>(pos);
    const double s = pos - static_cast<double>(i);
    const double y0 = values_[i], y1 = values_[i + 1];
    const double d0 = slopes_[i] * kGridStep, d1 = slopes_[i + 1] * kGridStep;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
  }

  /// phi(x) evaluated directly (closed form or quadrature), bypassing the grid.
  double phi_direct(double x) const {
    x = std::abs(x);
    return params_.amplitude * base_phi(x, eta_) - params_.dip * base_phi(x, 0.5 * eta_);
  }

  /// Largest interpolation error against phi_direct seen when the grid was built.
  double grid_error() const noexcept { return grid_error_; }

  std::string describe() const {
    return std::string(family_name(family_)) + "(eta=" + std::to_string(eta_) +
           ", amplitude=" + std::to_string(params_.amplitude) + ", dip=" + std::to_string(params_.dip) + ")";
  }

 private:
  // Transform pair of the unit-amplitude family member with support radius r.
  double base_hat(double u, double r) const {
    if (u >= r) return 0.0;
    switch (family_) {
      case Family::triangle_hat: return 1.0 - u / r;
      case Family::smooth_bump_hat: return detail::bump(u / r);
      case Family::bump_squared_hat: {
        // (B * B)(u), B(v) = bump(2v / r) supported on |v| < r/2
        const double h = 0.5 * r;
        const double lo = u - h, hi = h;
        return detail::gauss_panels([&](double v) { return detail::bump(v / h) * detail::bump((u - v) / h); },
                                    lo, hi, 8);
      }
    }
    return 0.0;
  }

  // Number of Gauss panels that keeps the phase per panel below ~2pi/1.5.
  static int panels_for(double x, double r) { return std::max(6, static_cast<int>(std::ceil(1.5 * x * r)) + 2); }

  // inverse transform of bump(v / r): 2 int_0^r bump(v/r) cos(2 pi x v) dv
  static double bump_transform(double x, double r) {
    return 2.0 * detail::gauss_panels([&](double v) { return detail::bump(v / r) * std::cos(kTwoPi * x * v); }, 0.0,
                                      r, panels_for(x, r));
  }
  static double bump_transform_derivative(double x, double r) {
    return -2.0 * detail::gauss_panels(
                      [&](double v) { return kTwoPi * v * detail::bump(v / r) * std::sin(kTwoPi * x * v); }, 0.0, r,
                      panels_for(x, r));
  }

  double base_phi(double x, double r) const {
    switch (family_) {
      case Family::triangle_hat: return r * detail::sinc(r * x) * detail::sinc(r * x);
      case Family::smooth_bump_hat: return bump_transform(x, r);
      case Family::bump_squared_hat: {
        const double g = bump_transform(x, 0.5 * r);
        return g * g;
      }
    }
    return 0.0;
  }

  double base_phi_derivative(double x, double r) const {
    switch (family_) {
      case Family::triangle_hat: return r * detail::sinc_sq_derivative(r, x);
      case Family::smooth_bump_hat: return bump_transform_derivative(x, r);
      case Family::bump_squared_hat:
        return 2.0 * bump_transform(x, 0.5 * r) * bump_transform_derivative(x, 0.5 * r);
    }
    return 0.0;
  }

  double phi_derivative_direct(double x) const {
    return params_.amplitude * base_phi_derivative(x, eta_) - params_.dip * base_phi_derivative(x, 0.5 * eta_);
  }

  // Tabulate phi until it stays below the cutoff for several oscillation periods.
  void build_cache() {
    // The triangle's tail is a known envelope; the smooth families are scanned.
    double limit = 1e4;
    if (family_ == Family::triangle_hat) {
      // |phi| <= (|A| + 2|dip|) / (pi^2 eta x^2)
      const double scale = (std::abs(params_.amplitude) + 2.0 * std::abs(params_.dip)) / (kPi * kPi * eta_);
      limit = std::sqrt(scale / kCutoff) + kGridStep;
    }
    const double quiet_run = 4.0 / eta_ + 1.0;
    double last_loud = 0.0;
    values_.clear();
    slopes_.clear();
    for (std::size_t i = 0;; ++i) {
      const double x = static_cast<double>(i) * kGridStep;
      const double v = phi_direct(x);
      values_.push_back(v);
      slopes_.push_back(phi_derivative_direct(x));
      if (std::abs(v) >= kCutoff) last_loud = x;
      if (family_ == Family::triangle_hat ? x >= limit : x - last_loud > quiet_run) break;
      if (x > limit) throw ConfigError("test function does not decay below 1e-9 within |x| <= 1e4");
    }
    x0_ = last_loud + kGridStep;
    // two more nodes so interpolation never reads past the end
    const std::size_t need = static_cast<std::size_t>(x0_ / kGridStep) + 2;
    while (values_.size() < need + 1) {
      const double x = static_cast<double>(values_.size()) * kGridStep;
      values_.push_back(phi_direct(x));
      slopes_.push_back(phi_derivative_direct(x));
    }
    values_.resize(need + 1);
    slopes_.resize(need + 1);
    grid_error_ = 0.0;
    for (double x = 0.5 * kGridStep; x < std::min(x0_, 20.0 / eta_); x += 0.37 * kGridStep * 7.0) {
      grid_error_ = std::max(grid_error_, std::abs(phi(x) - phi_direct(x)));
    }
  }

  // int over the support of a function of u, split at the kinks the families can have.
  template <class F>
  double integrate_hat(F&& f, bool weighted = false) const {
    std::vector<double> cuts{0.0, 0.5 * eta_, eta_};
    if (weighted && eta_ > 1.0) cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] <= cuts[i]) continue;
      double err = 0.0;
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13,
                                                                              &err);
    }
    return 2.0 * total;
  }

  double compute_sigma_sq() const {
    return integrate_hat(
        [this](double u) {
          const double h = hat(u);
          return std::min(u, 1.0) * h * h;
        },
        true);
  }

  Family family_;
  double eta_;
  TestFunctionParams params_;
  double phi0_ = 0.0, hatphi0_ = 0.0, sigma_sq_ = 0.0, x0_ = 0.0, grid_error_ = 0.0;
  std::vector<double> values_, slopes_;
};

/// Support condition for the moment theorems; k = 0 is unrestricted except
/// for the correlation, which always needs eta < 1.
inline bool validate_support(const TestFunction& tf, int k, SupportMode mode) {
  if (k < 0) throw ConfigError("moment order k must be nonnegative");
  const double eta = tf.eta();
  if (mode == SupportMode::correlation) return eta < 1.0;
  if (k % 2 != 0) throw ParityError("moment order k must be even, got " + std::to_string(k));
  if (k == 0) return true;
  switch (mode) {
    case SupportMode::unconditional: return eta < 2.0 / (k + 2);
    case SupportMode::rh_imaginary:
    case SupportMode::hughes_rudnick: return eta < 2.0 / k;
    case SupportMode::correlation: break;
  }
  return false;
}

}  // namespace zetalab
