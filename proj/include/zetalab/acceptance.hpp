#pragma once

// The acceptance suite: one check per criterion, each returning a pass flag and
// a one-line account of the numbers behind it. Shared by the acceptance test
// binary and `zetalab selftest`.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zetalab/diagonal.hpp"
#include "zetalab/moments.hpp"
#include "zetalab/prime_table.hpp"
#include "zetalab/statistics.hpp"
#include "zetalab/test_function.hpp"
#include "zetalab/zero_cache.hpp"
#include "zetalab/zeros.hpp"

namespace zetalab {

/// Zeros needed for averages over [T, 2T] of statistics built from tf: the
/// window is padded by the N_phi reach, rounded up to a multiple of 10 and at
/// least 60, so runs with different test functions can share one cached table.
inline std::pair<double, double> analysis_window(double T, const TestFunction& tf) {
  const double pad = std::max(60.0, 10.0 * std::ceil((zero_window(T, tf) + 1.0) / 10.0));
  return {T - pad, 2.0 * T + pad};
}

inline ZeroTable analysis_zeros(double T, const TestFunction& tf, const std::optional<std::filesystem::path>& cache_dir,
                                unsigned threads, ZeroProvenance* provenance = nullptr) {
  const auto [a, b] = analysis_window(T, tf);
  ZeroSearchOptions opt;
  opt.threads = threads;
  if (cache_dir) std::filesystem::create_directories(*cache_dir);
  auto table = cached_zeros(a, b, cache_dir, opt, provenance);
  if (!table.certified) {
    throw CoverageError("zeros on [" + std::to_string(a) + ", " + std::to_string(b) + "] could not be certified");
  }
  return table;
}

/// Largest |int phi^2 - int phi_hat^2|, integrating the tabulated phi cell by
/// cell with a rule exact for its piecewise cubic form.
inline double parseval_defect(const TestFunction& tf) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const double h = TestFunction::kGridStep;
  const auto cells = static_cast<std::size_t>(std::ceil(tf.truncation_radius() / h));
  double lhs = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = static_cast<double>(i) * h;
    lhs += gauss<double, 4>::integrate([&](double x) { return tf.phi(x) * tf.phi(x); }, a, a + h);
  }
  lhs *= 2.0;
  const auto sq = [&](double u) { return tf.hat(u) * tf.hat(u); };
  const double e = tf.eta();
  double rhs = gauss_kronrod<double, 61>::integrate(sq, 0.0, 0.5 * e, 10, 1e-14) +
               gauss_kronrod<double, 61>::integrate(sq, 0.5 * e, e, 10, 1e-14);
  rhs *= 2.0;
  return std::abs(lhs - rhs);
}

/// Largest |f(x) - f(-x)| for phi and phi_hat over a symmetric grid.
inline double evenness_defect(const TestFunction& tf) {
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = tf.truncation_radius() * i / 2000.0;
    worst = std::max(worst, std::abs(tf.phi(x) - tf.phi(-x)));
    const double u = 1.2 * tf.eta() * i / 2000.0;
    worst = std::max(worst, std::abs(tf.hat(u) - tf.hat(-u)));
  }
  return worst;
}

struct CriterionResult {
  std::string id;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline std::string format(const char* fmt, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct AcceptanceOptions {
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 0;
  std::int64_t points = 200000;
  std::uint64_t seed = 20240601;
};

/// Shared state for the criteria: test functions, zero tables and sample
/// banks are built on first use and reused across checks.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions options) : opt_(std::move(options)), primes_(200000) {}

  const PrimeTable& primes() const { return primes_; }

  const TestFunction& bump(double eta) {
    auto& slot = functions_[eta];
    if (!slot) slot = std::make_unique<TestFunction>(Family::smooth_bump_hat, eta);
    return *slot;
  }

  const ZeroTable& zeros(double T) {
    auto& slot = zeros_[T];
    if (!slot) slot = std::make_unique<ZeroTable>(analysis_zeros(T, bump(0.4), opt_.cache_dir, opt_.threads));
    return *slot;
  }

  /// Bank with log zeta and N_phi for a bump of the given eta.
  const SampleBank& bank(double T, double eta) {
    auto& slot = banks_[{T, eta}];
    if (!slot) {
      QuadratureSpec q;
      q.points = opt_.points;
      q.seed = opt_.seed;
      q.threads = opt_.threads;
      slot = std::make_unique<SampleBank>(T, std::pow(T, 0.02), bump(eta), primes_, &zeros(T), q,
                                          SampleColumns{true, true, false, false});
    }
    return *slot;
  }

  CriterionResult a1_zero_certification() {
    return timed("A1", 60.0, [&](CriterionResult& r) {
      ZeroSearchOptions o;
      o.threads = opt_.threads;
      const auto low = find_zeros(10.0, 100.0, o);
      const bool first_ok = low.size() > 0 && std::abs(low.gammas.front() - 14.134725) <= 1e-6;
      const bool low_ok = low.certified && low.size() == 29 && first_ok;

      const double a = 1e5, b = 1e5 + 1e3;
      const auto mid = find_zeros(a, b, o);
      // Independent count: pin N at both ends from Turing integrals over a
      // separately scanned, wider window.
      const auto wide = detail::scan_zeros(a - 60.0, b + 60.0, detail::dyadic_step(mean_zero_gap(b + 60.0), 8.0),
                                           1e-11, opt_.threads == 0 ? resolve_threads(0) : opt_.threads);
      const double na_hi = std::floor(turing::forward_upper(a, 50.0, wide));
      const double na_lo = std::ceil(turing::backward_lower(a, 50.0, wide));
      const double nb_hi = std::floor(turing::forward_upper(b, 50.0, wide));
      const double nb_lo = std::ceil(turing::backward_lower(b, 50.0, wide));
      const bool pinned = na_hi == na_lo && nb_hi == nb_lo;
      const auto predicted = static_cast<std::int64_t>(nb_hi - na_hi);
      const bool mid_ok = mid.certified && pinned && static_cast<std::int64_t>(mid.size()) == predicted;
      r.passed = low_ok && mid_ok;
      r.detail = format("[10,100]: %zu zeros, certified=%d, first=%.9f; [1e5,1e5+1e3]: %zu zeros, certified=%d, "
                        "Turing prediction %lld (pinned=%d)",
                        low.size(), int(low.certified), low.size() ? low.gammas.front() : 0.0, mid.size(),
                        int(mid.certified), static_cast<long long>(predicted), int(pinned));
    });
  }

  CriterionResult a2_explicit_formula() {
    return timed("A2", 600.0, [&](CriterionResult& r) {
      const auto& tf = bump(0.4);
      const auto lo = explicit_formula_residual(1e5, tf, primes_, zeros(1e5), 1000, opt_.threads);
      const auto hi = explicit_formula_residual(1e6, tf, primes_, zeros(1e6), 1000, opt_.threads);
      const double b5 = 5.0 / std::log(1e5), b6 = 5.0 / std::log(1e6);
      r.passed = lo.rms <= b5 && hi.rms <= b6 && hi.rms < lo.rms;
      r.detail = format("RMS %.5f (bound %.4f) at T=1e5, %.5f (bound %.4f) at T=1e6; mean residual %.5f, %.5f",
                        lo.rms, b5, hi.rms, b6, lo.mean, hi.mean);
    });
  }

  CriterionResult a3_hughes_rudnick() {
    return timed("A3", 900.0, [&](CriterionResult& r) {
      const double T = 1e6;
      const auto& b = bank(T, 0.4);
      const auto m = joint_moment(0, 0, 2, b, IntegrandMode::zeta_nphi, SupportMode::hughes_rudnick);
      const auto sums = relation_sums(b.x(), T, b.test_function(), primes_);
      const double v = m.empirical.real(), two_s4 = 2.0 * sums[4], sig = b.test_function().sigma_sq();
      const double rel_finite = std::abs(v - two_s4) / two_s4, rel_sigma = std::abs(v - sig) / sig;
      const auto nc = b.n_centered();
      const double mean = pairwise_sum<double>(nc) / static_cast<double>(nc.size());
      r.passed = rel_finite <= 0.10 && rel_sigma <= 0.20;
      r.detail = format("empirical %.6f +- %.6f; 2 s4 = %.6f (rel %.3f, need <= 0.10); sigma^2 = %.6f (rel %.3f, "
                        "need <= 0.20); mean of N_phi - phi_hat(0) = %.5f, variance about that mean %.6f",
                        v, m.standard_error(), two_s4, rel_finite, sig, rel_sigma, mean, v - mean * mean);
    });
  }

  CriterionResult a4_joint_factorization() {
    return timed("A4", 0.0, [&](CriterionResult& r) {
      const double T = 1e6;
      const auto& tf = bump(0.4);
      const auto run = [&](double exponent) {
        QuadratureSpec q;
        q.points = opt_.points;
        q.seed = opt_.seed;
        q.threads = opt_.threads;
        const SampleBank b(T, std::pow(T, exponent), tf, primes_, nullptr, q, SampleColumns{false, false, true, true});
        const auto sums = relation_sums(b.x(), T, tf, primes_);
        return std::tuple{joint_moment(1, 1, 2, b, IntegrandMode::dirichlet),
                          joint_moment(1, 0, 2, b, IntegrandMode::dirichlet), sums[1] * 2.0 * sums[4]};
      };
      const auto [m112, m102, pred] = run(0.02);
      const double d112 = std::abs(m112.empirical - std::complex<double>(pred));
      const bool ok112 = d112 <= 3.0 * m112.standard_error() && d112 <= 0.15 * std::abs(pred);
      const bool ok102 = std::abs(m102.empirical) <= 3.0 * m102.standard_error();
      r.passed = ok112 && ok102;
      const auto [w112, w102, wpred] = run(0.1);
      r.detail = format("x = %.4f: M(1,1,2) = %.6g +- %.3g vs s1*2s4 = %.6g; M(1,0,2) = %.3g +- %.3g. "
                        "Reference at x = %.3f: M(1,1,2) = %.6g +- %.3g vs %.6g, M(1,0,2) = %.3g +- %.3g",
                        std::pow(T, 0.02), m112.empirical.real(), m112.standard_error(), pred, std::abs(m102.empirical),
                        m102.standard_error(), std::pow(T, 0.1), w112.empirical.real(), w112.standard_error(), wpred,
                        std::abs(w102.empirical), w102.standard_error());
    });
  }

  CriterionResult a5_correlation() {
    return timed("A5", 0.0, [&](CriterionResult& r) {
      const auto c = correlation_experiment(bank(1e5, 0.8));
      const double se = std::hypot(c.stderr_re, c.stderr_im);
      const double d = std::abs(c.empirical - std::complex<double>(c.finite_T_prediction));
      const double rel = std::abs(c.finite_T_prediction - c.asymptotic_prediction) / std::abs(c.asymptotic_prediction);
      r.passed = d <= 3.0 * se && rel <= 0.25;
      r.detail = format("empirical %.5f%+.5fi +- %.5f; finite-T %.5f (|diff| = %.2f stderr); -phi(0)/2 = %.5f "
                        "(rel %.3f, need <= 0.25); coefficient %.4f vs %.4f",
                        c.empirical.real(), c.empirical.imag(), se, c.finite_T_prediction, d / se,
                        c.asymptotic_prediction, rel, c.coefficient, c.coefficient_prediction);
    });
  }

  CriterionResult a6_weighted_clt() {
    return timed("A6", 0.0, [&](CriterionResult& r) {
      const auto& b = bank(1e6, 0.4);
      const auto w2 = weighted_sample(b, 2, 0, opt_.seed);
      const std::vector<double> w0(b.size(), 1.0);
      const double d0 = weighted_cdf_distance(b, w0, CdfStatistic::im_log_norm);
      const double d2 = weighted_cdf_distance(b, w2.weight, CdfStatistic::im_log_norm);
      r.passed = d2 <= 0.2 && std::abs(d2 - d0) <= 0.05;
      r.detail = format("Kolmogorov distance k=2: %.4f (need <= 0.2), k=0: %.4f, difference %.4f (need <= 0.05); "
                        "C_2 = %.6f vs sigma^2 = %.6f",
                        d2, d0, std::abs(d2 - d0), w2.normalizer, b.test_function().sigma_sq());
    });
  }

  CriterionResult a7_diagonal() {
    return timed("A7", 120.0, [&](CriterionResult& r) {
      const double T = 1e5, x = 50.0;
      const TestFunction tf(Family::smooth_bump_hat, std::log(200.0) / std::log(T) * (1.0 - 1e-12));
      double worst = 0.0;
      int triples = 0;
      for (int total = 0; total <= 5; ++total) {
        for (int h = 0; h <= total; ++h) {
          for (int l = 0; h + l <= total; ++l) {
            const int k = total - h - l;
            const double a = diagonal_bruteforce_nested(h, l, k, x, T, tf, primes_).value;
            const double c = diagonal_bruteforce_grouped(h, l, k, x, T, tf, primes_).value;
            worst = std::max(worst, std::abs(a - c));
            ++triples;
          }
        }
      }
      bool counts = true;
      for (int h = 0; h <= 2; ++h) {
        for (int k = 0; k <= 4; k += 2) counts = counts && matching_count(h, h, k) == matching_count_bruteforce(h, h, k);
      }
      bool gaussian = true;
      for (int k = 0; k <= 12; k += 2) {
        double dfact = 1.0;
        for (int j = k - 1; j > 1; j -= 2) dfact *= j;
        gaussian = gaussian && static_cast<double>(matching_count(0, 0, k)) * std::pow(0.5, k / 2) == dfact;
      }
      r.passed = worst <= 1e-10 && counts && gaussian;
      r.detail = format("nested vs grouped over %d triples: max |diff| = %.2e; matching counts %s; "
                        "(k-1)!! identity %s",
                        triples, worst, counts ? "agree" : "DISAGREE", gaussian ? "holds" : "FAILS");
    });
  }

  CriterionResult a8_mean_value() {
    return timed("A8", 0.0, [&](CriterionResult& r) {
      DirichletSum d;
      for (std::uint32_t p : primes_.primes_up_to(100.0)) d.add(p, 1.0 / std::sqrt(static_cast<double>(p)));
      QuadratureSpec q;
      q.points = opt_.points;
      q.seed = opt_.seed;
      q.threads = opt_.threads;
      const auto e = integrate([&](double t) { return std::complex<double>(std::norm(d.value(t))); }, 1e5, q);
      const double target = primes_.prime_reciprocal_sum(100.0);
      const double rel = std::abs(e.value.real() - target) / target;
      r.passed = rel <= 0.05;
      r.detail = format("mean |D|^2 = %.5f +- %.5f vs sum 1/p = %.5f (rel %.4f)", e.value.real(), e.standard_error(), target,
                        rel);
    });
  }

  CriterionResult a9_goldston() {
    return timed("A9", 0.0, [&](CriterionResult& r) {
      const auto& b = bank(1e5, 0.8);
      bool ok = true;
      std::string detail;
      for (std::uint64_t n : {2, 3, 4}) {
        const auto g = goldston_check(n, b);
        const double dp = std::abs(g.plus.value - std::complex<double>(g.prediction));
        const double dm = std::abs(g.minus.value);
        ok = ok && dp <= 3.0 * g.plus.standard_error() && dm <= 3.0 * g.minus.standard_error();
        detail += format("%sn=%llu: %.4f%+.4fi vs %.4f (%.2f se), minus %.2f se", detail.empty() ? "" : "; ",
                         static_cast<unsigned long long>(n), g.plus.value.real(), g.plus.value.imag(), g.prediction,
                         dp / g.plus.standard_error(), dm / g.minus.standard_error());
      }
      r.passed = ok;
      r.detail = detail;
    });
  }

  CriterionResult a10_symmetry() {
    return timed("A10", 0.0, [&](CriterionResult& r) {
      const auto& b = bank(1e6, 0.4);
      bool conj_ok = true;
      for (auto [h, l, k] : {std::tuple{1, 0, 0}, {2, 1, 0}, {1, 2, 2}, {3, 1, 2}, {0, 1, 2}}) {
        const auto a = joint_moment(h, l, k, b, IntegrandMode::zeta_nphi);
        const auto c = joint_moment(l, h, k, b, IntegrandMode::zeta_nphi);
        conj_ok = conj_ok && a.empirical == std::conj(c.empirical);
      }
      bool parity_ok = true;
      std::string parity;
      for (auto [l, k] : {std::pair{1, 0}, {3, 0}, {1, 2}}) {
        const auto m = imaginary_moment(l, k, b);
        const double z = std::abs(m.empirical.real()) / m.standard_error();
        parity_ok = parity_ok && z <= 3.0;
        parity += format(" (%d,%d): %.2f se", l, k, z);
      }
      double parseval = 0.0, even = 0.0, sigma_min = 1.0;
      const std::vector<TestFunction> fs{
          TestFunction(Family::triangle_hat, 0.5), bump(0.4), bump(0.8), TestFunction(Family::bump_squared_hat, 0.4),
          TestFunction(Family::smooth_bump_hat, 0.8, {1.0, 2.0})};
      for (const auto& tf : fs) {
        parseval = std::max(parseval, parseval_defect(tf));
        even = std::max(even, evenness_defect(tf));
        sigma_min = std::min(sigma_min, tf.sigma_sq());
      }
      const bool tf_ok = parseval <= 1e-6 && even <= 1e-6 && sigma_min > 0.0;
      r.passed = conj_ok && parity_ok && tf_ok;
      r.detail = format("conjugation %s; odd-l imaginary moments:%s; Parseval defect %.2e, evenness defect %.2e, "
                        "min sigma^2 %.3g",
                        conj_ok ? "exact" : "BROKEN", parity.c_str(), parseval, even, sigma_min);
    });
  }

  /// Runs the criteria in order; `only` selects one id such as "A5", and
  /// `on_result` sees each result as soon as it is ready.
  std::vector<CriterionResult> run_all(const std::string& only = "",
                                       const std::function<void(const CriterionResult&)>& on_result = {}) {
    using Member = CriterionResult (AcceptanceSuite::*)();
    static const std::pair<const char*, Member> table[] = {
        {"A1", &AcceptanceSuite::a1_zero_certification}, {"A2", &AcceptanceSuite::a2_explicit_formula},
        {"A3", &AcceptanceSuite::a3_hughes_rudnick},     {"A4", &AcceptanceSuite::a4_joint_factorization},
        {"A5", &AcceptanceSuite::a5_correlation},        {"A6", &AcceptanceSuite::a6_weighted_clt},
        {"A7", &AcceptanceSuite::a7_diagonal},           {"A8", &AcceptanceSuite::a8_mean_value},
        {"A9", &AcceptanceSuite::a9_goldston},           {"A10", &AcceptanceSuite::a10_symmetry}};
    std::vector<CriterionResult> out;
    for (const auto& [id, fn] : table) {
      if (!only.empty() && only != id) continue;
      out.push_back((this->*fn)());
      if (on_result) on_result(out.back());
    }
    if (!only.empty() && out.empty()) throw ConfigError("no acceptance criterion named " + only);
    return out;
  }

 private:
  // A positive limit turns the wall time into part of the criterion.
  template <class F>
  CriterionResult timed(const char* id, double limit_seconds, F&& body) {
    CriterionResult r;
    r.id = id;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_seconds > 0.0 && r.seconds > limit_seconds) {
      r.passed = false;
      r.detail += format(" [runtime %.1f s exceeds %.0f s]", r.seconds, limit_seconds);
    }
    return r;
  }

  AcceptanceOptions opt_;
  PrimeTable primes_;
  std::map<double, std::unique_ptr<TestFunction>> functions_;
  std::map<double, std::unique_ptr<ZeroTable>> zeros_;
  std::map<std::pair<double, double>, std::unique_ptr<SampleBank>> banks_;
};

}  // namespace zetalab
