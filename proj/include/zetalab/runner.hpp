#pragma once

// Runs one configured experiment end to end and writes its records:
//   <out>/<experiment>.jsonl   one JSON object per row
//   <out>/<experiment>.csv     the same rows as a flat table
//   <out>/manifest.json        config echo, zero provenance, checks, timing
// The .jsonl and .csv files depend only on the config and seed; wall time
// and cache provenance go to the manifest alone.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zetalab/acceptance.hpp"
#include "zetalab/config.hpp"
#include "zetalab/diagonal.hpp"
#include "zetalab/moments.hpp"
#include "zetalab/zero_cache.hpp"

namespace zetalab {

using Json = nlohmann::ordered_json;

struct ReportRow {
  std::string experiment;
  std::string label;  // distinguishes rows of one experiment, e.g. "n=2,plus"
  int h = 0, l = 0, k = 0;
  double T = 0.0, x = 0.0, eta = 0.0;
  std::complex<double> empirical;
  double standard_error = 0.0;
  double finite_T_pred = 0.0;
  double asymptotic_pred = 0.0;
  std::uint64_t seed = 0;
  Json extra = Json::object();

  Json to_json() const {
    Json j;
    j["experiment"] = experiment;
    j["label"] = label;
    j["h"] = h;
    j["l"] = l;
    j["k"] = k;
    j["T"] = T;
    j["x"] = x;
    j["eta"] = eta;
    j["empirical_re"] = empirical.real();
    j["empirical_im"] = empirical.imag();
    j["stderr"] = standard_error;
    j["finite_T_pred"] = finite_T_pred;
    j["asymptotic_pred"] = asymptotic_pred;
    j["seed"] = seed;
    j["version"] = kVersion;
    for (const auto& [key, value] : extra.items()) j[key] = value;
    return j;
  }
};

inline const char* kCsvHeader =
    "experiment,h,l,k,T,x,eta,empirical_re,empirical_im,stderr,finite_T_pred,asymptotic_pred,label,seed,version";

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string csv_line(const ReportRow& r) {
  std::string label = r.label;
  if (label.find_first_of(",\"") != std::string::npos) {
    std::string q = "\"";
    for (char c : label) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    label = q + "\"";
  }
  std::ostringstream os;
  os << r.experiment << ',' << r.h << ',' << r.l << ',' << r.k << ',' << csv_number(r.T) << ',' << csv_number(r.x)
     << ',' << csv_number(r.eta) << ',' << csv_number(r.empirical.real()) << ',' << csv_number(r.empirical.imag())
     << ',' << csv_number(r.standard_error) << ',' << csv_number(r.finite_T_pred) << ',' << csv_number(r.asymptotic_pred)
     << ',' << label << ',' << r.seed << ',' << kVersion;
  return os.str();
}

/// Writes via a temporary file and rename, so readers never see half a file.
inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline void write_reports(const std::vector<ReportRow>& rows, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::string jsonl, csv = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    jsonl += r.to_json().dump() + "\n";
    csv += csv_line(r) + "\n";
  }
  write_atomically(dir / (stem + ".jsonl"), jsonl);
  write_atomically(dir / (stem + ".csv"), csv);
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  // shown in the manifest but left out of all_passed()
  bool informational = false;
};

struct RunManifest {
  ExperimentConfig config;
  std::vector<ZeroProvenance> zero_sources;
  std::optional<CheckResult> cache_spot_check;
  std::vector<CheckResult> checks;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;

  bool all_passed() const {
    bool ok = !cache_spot_check || cache_spot_check->passed;
    for (const auto& c : checks) ok = ok && (c.passed || c.informational);
    return ok;
  }

  Json to_json() const {
    Json j;
    j["version"] = kVersion;
    Json cfg = Json::object();
    for (const auto& [k, v] : config.echo()) cfg[k] = v;
    j["config"] = cfg;
    Json zs = Json::array();
    for (const auto& z : zero_sources) zs.push_back({{"source", z.source}, {"path", z.path}, {"note", z.note}});
    j["zeros"] = zs;
    if (cache_spot_check) {
      j["cache_spot_check"] = {{"passed", cache_spot_check->passed}, {"detail", cache_spot_check->detail}};
    }
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"informational", c.informational}, {"detail", c.detail}});
    j["checks"] = cs;
    j["all_passed"] = all_passed();
    j["wall_seconds"] = wall_seconds;
    Json outs = Json::array();
    for (const auto& p : outputs) outs.push_back(p.string());
    j["outputs"] = outs;
    return j;
  }
};

/// Recomputes zeros on a short stretch of a cached table and compares.
inline CheckResult spot_check_cache(const ZeroTable& cached, double start, unsigned threads) {
  CheckResult c;
  c.name = "cache_spot_check";
  const double len = 40.0 * mean_zero_gap(start);
  const double a = std::max(start, cached.t_low), b = std::min(a + len, cached.t_high);
  ZeroSearchOptions o;
  o.threads = threads;
  const auto fresh = find_zeros(std::max(a, 10.0), b, o);
  const auto old = cached.between(a, b);
  double worst = 0.0;
  bool same = fresh.certified && fresh.size() == old.size();
  if (same) {
    for (std::size_t i = 0; i < old.size(); ++i) worst = std::max(worst, std::abs(old[i] - fresh.gammas[i]));
    same = worst <= 1e-8;
  }
  c.passed = same;
  c.detail = format("[%.3f, %.3f]: cached %zu zeros, recomputed %zu, max |diff| %.2e", a, b, old.size(),
                    fresh.size(), worst);
  return c;
}

struct RunResult {
  std::vector<ReportRow> rows;
  RunManifest manifest;
};

namespace detail {

inline ReportRow row_from(const MomentReport& m, const std::string& label = "") {
  ReportRow r;
  r.experiment = m.experiment;
  r.label = label.empty() ? m.mode : label;
  r.h = m.h;
  r.l = m.l;
  r.k = m.k;
  r.T = m.T;
  r.x = m.x;
  r.eta = m.eta;
  r.empirical = m.empirical;
  r.standard_error = m.standard_error();
  r.finite_T_pred = m.finite_T_prediction;
  r.asymptotic_pred = m.asymptotic_prediction;
  r.seed = m.seed;
  r.extra = {{"mode", m.mode},
             {"quadrature", m.quadrature},
             {"points", m.points},
             {"error_scale", m.error_scale},
             {"epsilon", m.epsilon}};
  return r;
}

inline CheckResult within_stderr(const std::string& name, std::complex<double> value, double target, double se,
                                 double n_se = 3.0) {
  const double d = std::abs(value - std::complex<double>(target));
  return {name, d <= n_se * se, format("|%.6g - %.6g| = %.3g vs %.1f x %.3g", value.real(), target, d, n_se, se)};
}

}  // namespace detail

/// Runs the configured experiment; throws ConfigError (and friends) on
/// invalid input before any heavy work starts.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  auto& man = out.manifest;
  man.config = cfg;
  auto& rows = out.rows;
  const unsigned threads = cfg.quadrature.threads;
  const std::uint64_t seed = cfg.quadrature.seed;
  const double T = cfg.T, x = cfg.x();

  const PrimeTable primes(cfg.prime_limit());
  const TestFunction tf(cfg.family, cfg.eta, cfg.params);
  const std::string name = experiment_name(cfg.experiment);

  std::optional<ZeroTable> zeros;
  const auto need_zeros = [&]() -> const ZeroTable& {
    if (!zeros) {
      ZeroProvenance prov;
      zeros = analysis_zeros(T, tf, cfg.cache_dir, threads, &prov);
      man.zero_sources.push_back(prov);
      if (prov.source != "computed") man.cache_spot_check = spot_check_cache(*zeros, T, threads);
    }
    return *zeros;
  };
  const auto make_bank = [&](SampleColumns cols) {
    return SampleBank(T, x, tf, primes, (cols.log_zeta || cols.n_phi) ? &need_zeros() : nullptr, cfg.quadrature,
                      cols);
  };

  switch (cfg.experiment) {
    case Experiment::explicit_formula: {
      const auto e = explicit_formula_residual(T, tf, primes, need_zeros(), 1000, threads);
      ReportRow r;
      r.experiment = name;
      r.label = "rms_residual";
      r.T = T;
      r.x = x;
      r.eta = cfg.eta;
      r.empirical = e.rms;
      r.seed = seed;
      r.extra = {{"mean_residual", e.mean},
                 {"fitted_constant", e.fitted_constant},
                 {"sup_s_minus_sstar", e.star_sup},
                 {"bound", 5.0 / std::log(T)},
                 {"points", e.points}};
      rows.push_back(r);
      man.checks.push_back({"rms_within_5_over_logT", e.rms <= 5.0 / std::log(T),
                            format("RMS %.5f vs %.5f", e.rms, 5.0 / std::log(T))});
      break;
    }
    case Experiment::hughes_rudnick: {
      const auto bank = make_bank({false, true, true, false});
      const auto sums = relation_sums(x, T, tf, primes);
      for (int j = 2; j <= std::max(2, cfg.k); j += 2) {
        for (auto mode : {IntegrandMode::zeta_nphi, IntegrandMode::zeta_sstar}) {
          auto m = joint_moment(0, 0, j, bank, mode, cfg.effective_support());
          m.experiment = name;
          m.epsilon = cfg.epsilon;
          rows.push_back(detail::row_from(m));
          if (j == 2 && mode == IntegrandMode::zeta_nphi) {
            const double v = m.empirical.real(), f = 2.0 * sums[4], s = tf.sigma_sq();
            man.checks.push_back({"variance_within_10pct_of_2s4", std::abs(v - f) <= 0.10 * f,
                                  format("%.6f vs %.6f", v, f)});
            man.checks.push_back({"variance_within_20pct_of_sigma_sq", std::abs(v - s) <= 0.20 * s,
                                  format("%.6f vs %.6f", v, s)});
          }
        }
      }
      break;
    }
    case Experiment::joint_moments: {
      const bool dir = cfg.integrand == IntegrandMode::dirichlet;
      const bool nphi = cfg.integrand == IntegrandMode::zeta_nphi;
      const auto bank = make_bank({!dir, nphi, !nphi, dir});
      auto m = joint_moment(cfg.h, cfg.l, cfg.k, bank, cfg.integrand, cfg.effective_support());
      m.epsilon = cfg.epsilon;
      rows.push_back(detail::row_from(m));
      // The main term leaves out lower-order relation sums, so at finite T the
      // gap can exceed the sampling error; the comparison is reported only.
      auto check = detail::within_stderr("main_term_within_3_stderr", m.empirical, m.finite_T_prediction,
                                         m.standard_error());
      check.informational = true;
      man.checks.push_back(check);
      break;
    }
    case Experiment::imaginary_moments: {
      const auto bank = make_bank({true, true, false, false});
      auto m = imaginary_moment(cfg.l, cfg.k, bank);
      m.epsilon = cfg.epsilon;
      rows.push_back(detail::row_from(m));
      if (cfg.l % 2 == 1) {
        man.checks.push_back(detail::within_stderr("odd_l_consistent_with_zero", m.empirical, 0.0, m.standard_error()));
      }
      break;
    }
    case Experiment::correlation: {
      const auto bank = make_bank({true, true, false, false});
      const auto c = correlation_experiment(bank);
      ReportRow r;
      r.experiment = name;
      r.label = "log_zeta_times_n_centered";
      r.h = 1;
      r.k = 1;
      r.T = T;
      r.x = x;
      r.eta = cfg.eta;
      r.empirical = c.empirical;
      r.standard_error = std::hypot(c.stderr_re, c.stderr_im);
      r.finite_T_pred = c.finite_T_prediction;
      r.asymptotic_pred = c.asymptotic_prediction;
      r.seed = seed;
      r.extra = {{"coefficient", c.coefficient},
                 {"coefficient_prediction", c.coefficient_prediction},
                 {"mean_abs_log_zeta_sq", c.mean_abs_log_zeta_sq},
                 {"mean_n_centered_sq", c.mean_n_centered_sq},
                 {"quadrature", c.quadrature},
                 {"points", c.points}};
      rows.push_back(r);
      man.checks.push_back(
          detail::within_stderr("finite_T_within_3_stderr", c.empirical, c.finite_T_prediction, r.standard_error));
      break;
    }
    case Experiment::goldston: {
      const auto bank = make_bank({true, false, false, false});
      for (auto n : cfg.goldston_n) {
        const auto g = goldston_check(n, bank);
        for (int sign : {+1, -1}) {
          const auto& e = sign > 0 ? g.plus : g.minus;
          ReportRow r;
          r.experiment = name;
          r.label = "n=" + std::to_string(n) + (sign > 0 ? ",plus" : ",minus");
          r.h = 1;
          r.T = T;
          r.x = x;
          r.eta = cfg.eta;
          r.empirical = e.value;
          r.standard_error = e.standard_error();
          r.finite_T_pred = sign > 0 ? g.prediction : 0.0;
          r.asymptotic_pred = r.finite_T_pred;
          r.seed = seed;
          r.extra = {{"n", n}};
          rows.push_back(r);
          man.checks.push_back(detail::within_stderr(r.label, e.value, r.finite_T_pred, r.standard_error));
        }
      }
      break;
    }
    case Experiment::weighted_clt: {
      const auto bank = make_bank({true, true, false, false});
      const auto ws = weighted_sample(bank, cfg.k, cfg.resamples, seed);
      const std::vector<double> flat(bank.size(), 1.0);
      const double d0 = weighted_cdf_distance(bank, flat, cfg.statistic);
      const double dk = weighted_cdf_distance(bank, ws.weight, cfg.statistic);
      const std::string stat = cfg.statistic == CdfStatistic::im_log_norm ? "im_log_norm" : "complex_log_norm";
      const auto sums = relation_sums(x, T, tf, primes);
      for (auto [k, d] : {std::pair{0, d0}, {cfg.k, dk}}) {
        ReportRow r;
        r.experiment = name;
        r.label = "kolmogorov_distance," + stat;
        r.k = k;
        r.T = T;
        r.x = x;
        r.eta = cfg.eta;
        r.empirical = d;
        r.seed = seed;
        rows.push_back(r);
      }
      ReportRow c;
      c.experiment = name;
      c.label = "normalizer";
      c.k = cfg.k;
      c.T = T;
      c.x = x;
      c.eta = cfg.eta;
      c.empirical = ws.normalizer;
      c.finite_T_pred = gaussian_moment(cfg.k) * std::pow(2.0 * sums[4], cfg.k / 2.0);
      c.asymptotic_pred = gaussian_moment(cfg.k) * std::pow(tf.sigma_sq(), cfg.k / 2.0);
      c.seed = seed;
      // summary of the resampled ordinates, which are drawn from the weighted measure
      double mean_im = 0.0;
      const auto lz = bank.log_zeta();
      for (auto i : ws.resampled) mean_im += lz[i].imag();
      if (!ws.resampled.empty()) mean_im /= static_cast<double>(ws.resampled.size());
      c.extra = {{"resamples", ws.resampled.size()}, {"resampled_mean_im_log_zeta", mean_im}};
      rows.push_back(c);
      man.checks.push_back({"weighted_distance_at_most_0.2", dk <= 0.2, format("%.4f", dk)});
      man.checks.push_back(
          {"weighted_vs_unweighted_within_0.05", std::abs(dk - d0) <= 0.05, format("%.4f vs %.4f", dk, d0)});
      break;
    }
    case Experiment::diagonal_selftest: {
      AcceptanceSuite suite(AcceptanceOptions{cfg.cache_dir, threads, cfg.quadrature.points, seed});
      const auto a7 = suite.a7_diagonal();
      man.checks.push_back({"diagonal_invariants", a7.passed, a7.detail});
      const double dx = 50.0, dT = 1e5;
      const TestFunction dtf(Family::smooth_bump_hat, std::log(200.0) / std::log(dT) * (1.0 - 1e-12));
      const auto sums = relation_sums(dx, dT, dtf, suite.primes());
      for (int total = 0; total <= 5; ++total) {
        for (int h = 0; h <= total; ++h) {
          for (int l = 0; h + l <= total; ++l) {
            const int k = total - h - l;
            ReportRow r;
            r.experiment = name;
            r.label = "nested_vs_grouped";
            r.h = h;
            r.l = l;
            r.k = k;
            r.T = dT;
            r.x = dx;
            r.eta = dtf.eta();
            r.empirical = diagonal_bruteforce_nested(h, l, k, dx, dT, dtf, suite.primes()).value;
            r.finite_T_pred = diagonal_bruteforce_grouped(h, l, k, dx, dT, dtf, suite.primes()).value;
            r.asymptotic_pred = k % 2 ? 0.0 : diagonal_main_term(h, l, k, sums).value;
            r.seed = seed;
            rows.push_back(r);
          }
        }
      }
      break;
    }
  }

  write_reports(rows, cfg.out_dir, name);
  man.outputs = {cfg.out_dir / (name + ".jsonl"), cfg.out_dir / (name + ".csv"), cfg.out_dir / "manifest.json"};
  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomically(cfg.out_dir / "manifest.json", man.to_json().dump(2) + "\n");
  return out;
}

}  // namespace zetalab
