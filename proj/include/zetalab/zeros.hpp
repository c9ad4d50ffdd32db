#pragma once

// Zero location on the critical line, completeness certification, and
// log zeta(1/2 + it) with the argument fixed by zero counting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "zetalab/error.hpp"
#include "zetalab/riemann_siegel.hpp"

namespace zetalab {

/// Sorted zero ordinates on [t_low, t_high].
///
/// count_below is N(t_low), the number of zeros with 0 < gamma < t_low. It is
/// what turns a local list into the global counting function, and therefore
/// into Im log zeta.
struct ZeroTable {
  double t_low = 0.0;
  double t_high = 0.0;
  std::vector<double> gammas;
  bool certified = false;
  std::int64_t count_below = 0;

  std::size_t size() const noexcept { return gammas.size(); }

  bool covers(double a, double b) const noexcept { return certified && t_low <= a && b <= t_high; }

  /// N(t) for t in [t_low, t_high]: zeros with gamma < t.
  std::int64_t count_before(double t) const {
    const auto it = std::lower_bound(gammas.begin(), gammas.end(), t);
    return count_below + static_cast<std::int64_t>(it - gammas.begin());
  }

  /// Zeros with a <= gamma <= b.
  std::span<const double> between(double a, double b) const {
    const auto first = std::lower_bound(gammas.begin(), gammas.end(), a);
    const auto last = std::upper_bound(first, gammas.end(), b);
    return {gammas.data() + (first - gammas.begin()), static_cast<std::size_t>(last - first)};
  }

  ZeroTable slice(double a, double b) const {
    if (!(t_low <= a && a <= b && b <= t_high)) {
      throw CoverageError("zero table slice [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] outside [" + std::to_string(t_low) + ", " + std::to_string(t_high) + "]");
    }
    ZeroTable out;
    out.t_low = a;
    out.t_high = b;
    out.certified = certified;
    out.count_below = count_before(a);
    const auto span = between(a, b);
    out.gammas.assign(span.begin(), span.end());
    return out;
  }
};

struct ZeroSearchOptions {
  double samples_per_gap = 8.0;
  double turing_span = 50.0;      // length L of each Turing integral
  int refinement_rounds = 3;
  int refinement_factor = 4;
  double chunk_length = 0.0;      // certification chunk; 0 picks a default
  double tolerance = 1e-11;       // on the final secant step
  unsigned threads = 0;           // 0 = hardware concurrency
};

namespace turing {

// |S(t)| < 1 holds for 0 < t < 280, which together with the sign of Z pins N(t).
inline constexpr double kParityLimit = 280.0;
// Lehman's bound on integrals of S(t) is stated for t >= 168 pi.
inline constexpr double kIntegralLimit = 168.0 * std::numbers::pi;

/// Lehman: |int_{t1}^{t2} S(t) dt| <= 2.30 + 0.128 log(t2 / 2pi) for 168pi <= t1 < t2.
inline double lehman_bound(double t2) { return 2.30 + 0.128 * std::log(t2 / kTwoPi); }

/// int_a^b theta(t)/pi dt by composite Gauss-Legendre.
inline double theta_over_pi_integral(double a, double b) {
  if (b <= a) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 5.0)));
  const long double width = (static_cast<long double>(b) - a) / panels;
  long double total = 0.0L;
  for (int i = 0; i < panels; ++i) {
    const long double lo = a + width * i;
    const long double hi = (i + 1 == panels) ? static_cast<long double>(b) : lo + width;
    total += boost::math::quadrature::gauss<long double, 10>::integrate(
        [](long double t) { return riemann_siegel_theta_ld(t); }, lo, hi);
  }
  return static_cast<double>(total / kPiL);
}

/// N(c) from sign(Z(c)) for c < 280; empty if Z(c) is too small to trust.
inline std::optional<std::int64_t> parity_count(double c) {
  if (!(c >= 10.0 && c < kParityLimit)) return std::nullopt;
  const double z = hardy_z(c);
  if (std::abs(z) < 1e-8) return std::nullopt;
  const double base = riemann_siegel_theta(c) / kPi;
  const auto first = static_cast<std::int64_t>(std::floor(base)) + 1;
  const std::int64_t parity = z < 0.0 ? 0 : 1;
  return (((first % 2) + 2) % 2 == parity) ? first : first + 1;
}

/// Upper bound on N(c) from zeros found in (c, c + span]. Valid even when
/// some zeros were missed (missing zeros only loosen it).
inline double forward_upper(double c, double span, std::span<const double> sorted_zeros) {
  double step_integral = 0.0;
  const auto first = std::upper_bound(sorted_zeros.begin(), sorted_zeros.end(), c);
  for (auto it = first; it != sorted_zeros.end() && *it <= c + span; ++it) step_integral += c + span - *it;
  const double integral = step_integral - theta_over_pi_integral(c, c + span) - span;
  return (lehman_bound(c + span) - integral) / span;
}

/// Lower bound on N(c) from zeros found in (c - span, c].
inline double backward_lower(double c, double span, std::span<const double> sorted_zeros) {
  double step_integral = 0.0;
  const auto first = std::upper_bound(sorted_zeros.begin(), sorted_zeros.end(), c - span);
  for (auto it = first; it != sorted_zeros.end() && *it <= c; ++it) step_integral += *it - (c - span);
  const double integral = step_integral + theta_over_pi_integral(c - span, c) + span;
  return (integral - lehman_bound(c)) / span;
}

}  // namespace turing

namespace detail {

// Root of the cubic through four equally spaced samples, inside (x1, x2).
inline double cubic_guess(double x0, double step, const double* f) {
  const auto p = [&](double s) {
    // Lagrange basis on nodes -1, 0, 1, 2 in units of step
    return f[0] * (-s * (s - 1) * (s - 2) / 6.0) + f[1] * ((s + 1) * (s - 1) * (s - 2) / 2.0) +
           f[2] * (-(s + 1) * s * (s - 2) / 2.0) + f[3] * ((s + 1) * s * (s - 1) / 6.0);
  };
  double lo = 0.0, hi = 1.0;
  double plo = p(lo), phi = p(hi);
  if ((plo < 0) == (phi < 0)) return x0 + step * f[1] / (f[1] - f[2]);
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double pm = p(mid);
    if ((pm < 0) == (plo < 0)) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
    }
  }
  return x0 + step * 0.5 * (lo + hi);
}

// Safeguarded secant iteration inside a sign-change bracket [a, b].
template <class F>
double refine_root(F&& f, double a, double b, double fa, double fb, double guess, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  // a few ulps of t is the best any iteration can do
  tol = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b));
  double x = std::clamp(guess, a + 0.01 * (b - a), b - 0.01 * (b - a));
  double fx = f(x);
  // previous iterate starts as the bracket end on the other side of the guess
  double xp = ((fx < 0) == (fa < 0)) ? b : a;
  double fp = ((fx < 0) == (fa < 0)) ? fb : fa;
  for (int iter = 0; iter < 100; ++iter) {
    if (fx == 0.0) return x;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    double next = x - fx * (x - xp) / (fx - fp);
    if (std::isfinite(next) && std::abs(next - x) < tol) return std::clamp(next, a, b);
    if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (a + b);
    if ((b - a) < tol) return next;
    xp = x;
    fp = fx;
    x = next;
    fx = f(x);
  }
  return 0.5 * (a + b);
}

// All sign-change zeros of Z with lo < gamma <= hi, on the grid k * step.
inline std::vector<double> scan_zeros(double lo, double hi, double step, double tol, unsigned threads) {
  const auto k_begin = static_cast<std::int64_t>(std::floor(lo / step));
  const auto k_end = static_cast<std::int64_t>(std::ceil(hi / step));
  constexpr std::int64_t kSegment = 4096;
  const std::int64_t segments = std::max<std::int64_t>(1, (k_end - k_begin + kSegment - 1) / kSegment);
  std::vector<std::vector<double>> found(static_cast<std::size_t>(segments));
  std::atomic<std::int64_t> next{0};

  const auto worker = [&] {
    HardyZSweep sweep;
    std::vector<double> values;
    for (std::int64_t s = next++; s < segments; s = next++) {
      const std::int64_t k0 = k_begin + s * kSegment;
      const std::int64_t k1 = std::min(k_end, k0 + kSegment);
      // one extra sample on each side feeds the cubic guess
      const std::int64_t first = std::max<std::int64_t>(k0 - 1, static_cast<std::int64_t>(std::ceil(10.0 / step)));
      const std::int64_t last = k1 + 1;
      if (last <= first) continue;
      values.assign(static_cast<std::size_t>(last - first + 1), 0.0);
      sweep.evaluate(static_cast<long double>(first) * step, step, values);
      auto& out = found[static_cast<std::size_t>(s)];
      for (std::int64_t k = std::max(k0, first); k < k1; ++k) {
        const auto i = static_cast<std::size_t>(k - first);
        const double fa = values[i], fb = values[i + 1];
        if ((fa < 0.0) == (fb < 0.0)) continue;
        const double a = static_cast<double>(k) * step;
        const double b = static_cast<double>(k + 1) * step;
        double guess;
        if (i >= 1 && i + 2 < values.size()) {
          guess = cubic_guess(a, step, &values[i - 1]);
        } else {
          guess = a + step * fa / (fa - fb);
        }
        const double root = refine_root([](double t) { return hardy_z(t); }, a, b, fa, fb, guess, tol);
        if (root > lo && root <= hi) out.push_back(root);
      }
    }
  };
  const unsigned n_threads = std::max<unsigned>(1, std::min<unsigned>(threads, static_cast<unsigned>(segments)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  std::vector<double> zeros;
  for (auto& v : found) zeros.insert(zeros.end(), v.begin(), v.end());
  return zeros;
}

// Largest power of two not exceeding gap / samples.
inline double dyadic_step(double gap, double samples) {
  return std::exp2(std::floor(std::log2(gap / samples)));
}

}  // namespace detail

/// Finds every zero of Z with t_low <= gamma <= t_high and certifies completeness.
///
/// The counting function is pinned at chunk boundaries, either from the sign
/// of Z (below height 280) or from two-sided Turing integrals, and each chunk
/// must hold exactly the difference of those counts. Chunks that disagree are
/// rescanned on a finer grid. If some chunk is still inconsistent after the
/// last round the table comes back with certified = false.
inline ZeroTable find_zeros(double t_low, double t_high, const ZeroSearchOptions& options = {}) {
  if (!(t_low >= 10.0) || !(t_high > t_low)) {
    throw DomainError("find_zeros: need 10 <= t_low < t_high, got [" + std::to_string(t_low) + ", " +
                      std::to_string(t_high) + "]");
  }
  if (options.samples_per_gap < 2.0 || options.turing_span <= 0.0 || options.refinement_rounds < 0 ||
      options.refinement_factor < 2) {
    throw ConfigError("find_zeros: invalid search options");
  }
  const double span = options.turing_span;
  const unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());

  // Boundaries where the counting function is pinned. Extra anchors are added
  // where neither the parity rule nor both Turing integrals are available.
  std::vector<double> bounds{t_low};
  const double chunk = options.chunk_length > 0.0 ? options.chunk_length : std::max(500.0, 4.0 * span);
  for (double c = std::floor(t_low / chunk + 1.0) * chunk; c < t_high; c += chunk) bounds.push_back(c);
  bounds.push_back(t_high);
  if (t_low >= turing::kParityLimit && t_low - span < turing::kIntegralLimit) {
    bounds.insert(bounds.begin(), turing::kParityLimit - 1.0);
  }
  if (t_high >= turing::kParityLimit && t_high < turing::kIntegralLimit) {
    bounds.push_back(turing::kIntegralLimit + 1.0);
  }
  const auto has_parity = [](double c) { return c < turing::kParityLimit; };
  const auto has_forward = [](double c) { return c >= turing::kIntegralLimit; };
  const auto has_backward = [&](double c) { return c - span >= turing::kIntegralLimit; };

  double scan_lo = bounds.front(), scan_hi = bounds.back();
  for (double c : bounds) {
    if (has_forward(c)) scan_hi = std::max(scan_hi, c + span);
    if (has_backward(c)) scan_lo = std::min(scan_lo, c - span);
  }
  scan_lo = std::max(scan_lo, 10.0);
  // Z has no zeros below 14, so starting the scan at 10 misses nothing.
  const double step0 = detail::dyadic_step(mean_zero_gap(scan_hi), options.samples_per_gap);
  std::vector<double> zeros = detail::scan_zeros(scan_lo, scan_hi, step0, options.tolerance, threads);
  std::sort(zeros.begin(), zeros.end());

  const std::size_t m = bounds.size();
  std::vector<double> lower(m), upper(m);
  std::vector<std::optional<std::int64_t>> parity(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (has_parity(bounds[i])) parity[i] = turing::parity_count(bounds[i]);
  }
  const auto found_between = [&](double a, double b) {
    return static_cast<std::int64_t>(std::upper_bound(zeros.begin(), zeros.end(), b) -
                                     std::upper_bound(zeros.begin(), zeros.end(), a));
  };

  bool certified = false;
  std::vector<std::int64_t> exact(m, -1);
  for (int round = 0;; ++round) {
    for (std::size_t i = 0; i < m; ++i) {
      const double c = bounds[i];
      lower[i] = -std::numeric_limits<double>::infinity();
      upper[i] = std::numeric_limits<double>::infinity();
      if (parity[i]) lower[i] = upper[i] = static_cast<double>(*parity[i]);
      if (has_forward(c)) upper[i] = std::min(upper[i], std::floor(turing::forward_upper(c, span, zeros)));
      if (has_backward(c)) lower[i] = std::max(lower[i], std::ceil(turing::backward_lower(c, span, zeros)));
    }
    // Found zeros are genuine, so counts propagate as one-sided bounds.
    for (std::size_t i = 1; i < m; ++i) {
      lower[i] = std::max(lower[i], lower[i - 1] + static_cast<double>(found_between(bounds[i - 1], bounds[i])));
    }
    for (std::size_t i = m - 1; i-- > 0;) {
      upper[i] = std::min(upper[i], upper[i + 1] - static_cast<double>(found_between(bounds[i], bounds[i + 1])));
    }
    std::vector<std::size_t> bad_chunks;
    for (std::size_t i = 0; i < m; ++i) exact[i] = (lower[i] == upper[i]) ? static_cast<std::int64_t>(lower[i]) : -1;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (exact[i] < 0 || exact[i + 1] < 0 || exact[i + 1] - exact[i] != found_between(bounds[i], bounds[i + 1])) {
        bad_chunks.push_back(i);
      }
    }
    if (bad_chunks.empty()) {
      certified = true;
      break;
    }
    if (round >= options.refinement_rounds) break;

    // Rescan each bad chunk, plus the Turing spans of unresolved boundaries.
    double factor = 1.0;
    for (int r = 0; r <= round; ++r) factor *= options.refinement_factor;
    const double step = step0 / factor;
    std::vector<std::pair<double, double>> regions;
    for (std::size_t i : bad_chunks) {
      double lo = bounds[i], hi = bounds[i + 1];
      if (exact[i] < 0 && has_backward(bounds[i])) lo = bounds[i] - span;
      if (exact[i + 1] < 0 && has_forward(bounds[i + 1])) hi = bounds[i + 1] + span;
      regions.emplace_back(std::max(lo, scan_lo), std::min(hi, scan_hi));
    }
    std::sort(regions.begin(), regions.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& r : regions) {
      if (!merged.empty() && r.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, r.second);
      } else {
        merged.push_back(r);
      }
    }
    for (const auto& [lo, hi] : merged) {
      auto fresh = detail::scan_zeros(lo, hi, step, options.tolerance, threads);
      std::erase_if(zeros, [&](double g) { return g > lo && g <= hi; });
      zeros.insert(zeros.end(), fresh.begin(), fresh.end());
    }
    std::sort(zeros.begin(), zeros.end());
  }

  ZeroTable table;
  table.t_low = t_low;
  table.t_high = t_high;
  table.certified = certified;
  const auto first = std::lower_bound(zeros.begin(), zeros.end(), t_low);
  const auto last = std::upper_bound(zeros.begin(), zeros.end(), t_high);
  table.gammas.assign(first, last);
  // exact[] holds counts of gamma <= c; count_below wants gamma < t_low.
  const std::size_t low_index = static_cast<std::size_t>(std::find(bounds.begin(), bounds.end(), t_low) - bounds.begin());
  if (exact[low_index] >= 0) {
    const bool on_zero = first != zeros.end() && *first == t_low;
    table.count_below = exact[low_index] - (on_zero ? 1 : 0);
  } else {
    table.count_below = static_cast<std::int64_t>(std::llround(lower[low_index]));
    table.certified = false;
  }
  return table;
}

/// N(t_low) recomputed from the table's own zeros, without any new zero search.
/// Used to validate tables read back from disk.
inline std::optional<std::int64_t> recount_below(const ZeroTable& table, double span = 50.0) {
  const auto& g = table.gammas;
  if (table.t_low < turing::kParityLimit) {
    const auto n = turing::parity_count(table.t_low);
    if (!n) return std::nullopt;
    const bool on_zero = !g.empty() && g.front() == table.t_low;
    return *n - (on_zero ? 1 : 0);
  }
  // With a complete table N(t) = N(c) + found(c, t], so the forward Turing
  // integral bounds N(c) from both sides.
  const double c = std::max(table.t_low, turing::kIntegralLimit);
  if (c + span > table.t_high) return std::nullopt;
  double step_integral = 0.0;
  for (auto it = std::upper_bound(g.begin(), g.end(), c); it != g.end() && *it <= c + span; ++it) {
    step_integral += c + span - *it;
  }
  const double integral = step_integral - turing::theta_over_pi_integral(c, c + span) - span;
  const double bound = turing::lehman_bound(c + span);
  const double lo = std::ceil((-bound - integral) / span);
  const double hi = std::floor((bound - integral) / span);
  if (lo != hi) return std::nullopt;
  const auto at_or_after_low = std::lower_bound(g.begin(), g.end(), table.t_low);
  const auto up_to_c = std::upper_bound(g.begin(), g.end(), c);
  return static_cast<std::int64_t>(lo) - static_cast<std::int64_t>(up_to_c - at_or_after_low);
}

/// Values of zeta at one point of the critical line.
struct ZetaSample {
  double t = 0.0;
  double log_abs = 0.0;  // log |zeta(1/2 + it)|
  double im_log = 0.0;   // Im log zeta(1/2 + it) = pi S(t)
  double z_value = 0.0;  // Hardy Z(t)

  std::complex<double> log_zeta() const { return {log_abs, im_log}; }
};

/// Distance below which an ordinate counts as sitting on a zero.
inline constexpr double kSingularDistance = 1e-6;

inline double nearest_zero_distance(double t, const ZeroTable& zeros) {
  const auto it = std::lower_bound(zeros.gammas.begin(), zeros.gammas.end(), t);
  double d = std::numeric_limits<double>::infinity();
  if (it != zeros.gammas.end()) d = *it - t;
  if (it != zeros.gammas.begin()) d = std::min(d, t - *(it - 1));
  return d;
}

/// log zeta(1/2 + it) with Im log zeta = pi (N(t) - theta(t)/pi - 1).
inline ZetaSample log_zeta(double t, const ZeroTable& zeros) {
  if (!zeros.certified) throw CoverageError("log_zeta: zero table is not certified");
  if (!(t >= zeros.t_low && t <= zeros.t_high)) {
    throw CoverageError("log_zeta: t = " + std::to_string(t) + " outside certified range [" +
                        std::to_string(zeros.t_low) + ", " + std::to_string(zeros.t_high) + "]");
  }
  if (nearest_zero_distance(t, zeros) < kSingularDistance) {
    throw SingularOrdinateError("log_zeta: t = " + std::to_string(t) + " is within 1e-6 of a zero", t);
  }
  ZetaSample s;
  s.t = t;
  s.z_value = hardy_z(t);
  s.log_abs = std::log(std::abs(s.z_value));
  const long double theta = riemann_siegel_theta_ld(t);
  const auto n = static_cast<long double>(zeros.count_before(t));
  s.im_log = static_cast<double>(kPiL * (n - 1.0L) - theta);
  return s;
}

}  // namespace zetalab
