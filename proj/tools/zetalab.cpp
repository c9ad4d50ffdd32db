// zetalab: zero tables, experiments, the acceptance self-test and report
// printing from one binary.
//
//   zetalab zeros    --T 1e5 | --from 10 --to 100   [--cache-dir d] [--out f]
//   zetalab run      --config c.ini [--T --k --eta --seed --cache-dir --out --threads]
//   zetalab selftest [--cache-dir d] [--out f] [--threads n] [--seed s]
//   zetalab report   --out dir
//
// Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 zeros could not
// be certified, 4 any other runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zetalab/acceptance.hpp"
#include "zetalab/config.hpp"
#include "zetalab/runner.hpp"
#include "zetalab/zero_cache.hpp"

namespace fs = std::filesystem;
using namespace zetalab;

namespace {

struct Flags {
  std::string config;
  std::optional<double> T, eta, from, to;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir, out;
  std::optional<unsigned> threads;
};

int cmd_zeros(const Flags& f) {
  double a = 0.0, b = 0.0;
  if (f.T) {
    const TestFunction tf(Family::smooth_bump_hat, f.eta.value_or(0.4));
    std::tie(a, b) = analysis_window(*f.T, tf);
  } else if (f.from && f.to) {
    a = *f.from;
    b = *f.to;
  } else {
    throw ConfigError("zeros needs --T or both --from and --to");
  }
  std::optional<fs::path> cache;
  if (f.cache_dir) {
    cache = *f.cache_dir;
    fs::create_directories(*cache);
  }
  ZeroSearchOptions opt;
  opt.threads = f.threads.value_or(0);
  ZeroProvenance prov;
  const auto table = cached_zeros(a, b, cache, opt, &prov);
  std::printf("window      [%.3f, %.3f]\n", table.t_low, table.t_high);
  std::printf("zeros       %zu\n", table.size());
  std::printf("certified   %s\n", table.certified ? "yes" : "no");
  std::printf("N(t_low)    %lld\n", static_cast<long long>(table.count_below));
  if (table.size()) std::printf("first/last  %.9f / %.9f\n", table.gammas.front(), table.gammas.back());
  std::printf("source      %s%s%s\n", prov.source.c_str(), prov.path.empty() ? "" : " ", prov.path.c_str());
  if (!prov.note.empty()) std::printf("note        %s\n", prov.note.c_str());
  if (f.out) {
    ZeroTable copy = table;
    save_zero_table(copy, *f.out);
    std::printf("written     %s\n", f.out->c_str());
  }
  if (!table.certified) {
    std::fprintf(stderr, "zetalab: zeros on [%.3f, %.3f] could not be certified\n", a, b);
    return 3;
  }
  return 0;
}

int cmd_run(const Flags& f) {
  auto cfg = load_config(f.config);
  if (f.T) cfg.T = *f.T;
  if (f.k) cfg.k = *f.k;
  if (f.eta) cfg.eta = *f.eta;
  if (f.seed) cfg.quadrature.seed = *f.seed;
  if (f.cache_dir) cfg.cache_dir = fs::path(*f.cache_dir);
  if (f.out) cfg.out_dir = *f.out;
  if (f.threads) cfg.quadrature.threads = *f.threads;
  const auto result = run_experiment(cfg);
  const auto& man = result.manifest;
  for (const auto& z : man.zero_sources) std::printf("zeros: %s %s\n", z.source.c_str(), z.path.c_str());
  if (man.cache_spot_check) {
    std::printf("[%s] cache spot check: %s\n", man.cache_spot_check->passed ? "PASS" : "FAIL",
                man.cache_spot_check->detail.c_str());
  }
  for (const auto& c : man.checks) {
    const char* tag = c.informational ? (c.passed ? "info" : "info, outside") : (c.passed ? "PASS" : "FAIL");
    std::printf("[%s] %s: %s\n", tag, c.name.c_str(), c.detail.c_str());
  }
  for (const auto& p : man.outputs) std::printf("wrote %s\n", p.c_str());
  std::printf("%zu rows in %.1f s\n", result.rows.size(), man.wall_seconds);
  return man.all_passed() ? 0 : 1;
}

// Guard paths that need no heavy computation: an out-of-support config must be
// refused, and a damaged cache file must be replaced by a recomputed table.
std::vector<CriterionResult> guard_checks(const std::optional<fs::path>& cache_dir) {
  std::vector<CriterionResult> out;
  CriterionResult support{"support-guard", false, "", 0.0};
  try {
    ExperimentConfig bad;
    bad.experiment = Experiment::joint_moments;
    bad.eta = 1.5;
    bad.k = 2;
    bad.support = SupportMode::unconditional;
    validate(bad);
    support.detail = "eta = 1.5, k = 2 unconditional was accepted";
  } catch (const ConfigError& e) {
    support.passed = true;
    support.detail = std::string("refused: ") + e.what();
  }
  out.push_back(support);

  CriterionResult cache{"cache-guard", false, "", 0.0};
  const fs::path dir = (cache_dir ? *cache_dir : fs::temp_directory_path()) / "guard";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto first = cached_zeros(10.0, 100.0, dir);
  {
    // drop the last zero but keep the header: a count mismatch
    const auto path = zero_cache_path(dir, 10.0, 100.0);
    std::ifstream in(path);
    std::string text, line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    lines.pop_back();
    for (const auto& l : lines) text += l + "\n";
    std::ofstream(path, std::ios::trunc) << text;
  }
  ZeroProvenance prov;
  const auto again = cached_zeros(10.0, 100.0, dir, {}, &prov);
  cache.passed = prov.source == "computed" && !prov.note.empty() && again.gammas == first.gammas && again.certified;
  cache.detail = "source after corruption: " + prov.source + (prov.note.empty() ? "" : " (" + prov.note + ")");
  out.push_back(cache);
  fs::remove_all(dir);
  return out;
}

int cmd_selftest(const Flags& f) {
  AcceptanceOptions opt;
  opt.cache_dir = fs::path(f.cache_dir.value_or("zero_cache"));
  opt.threads = f.threads.value_or(0);
  if (f.seed) opt.seed = *f.seed;
  fs::create_directories(*opt.cache_dir);
  AcceptanceSuite suite(opt);
  auto results = suite.run_all();
  for (auto& g : guard_checks(opt.cache_dir)) results.push_back(g);
  int failed = 0;
  Json j = Json::array();
  for (const auto& r : results) {
    std::printf("%-13s %s  %6.1fs  %s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
    j.push_back({{"id", r.id}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
  }
  if (f.out) write_atomically(*f.out, j.dump(2) + "\n");
  if (failed) {
    std::string ids;
    for (const auto& r : results) {
      if (!r.passed) ids += (ids.empty() ? "" : ", ") + r.id;
    }
    std::fprintf(stderr, "zetalab: %d check(s) failed: %s\n", failed, ids.c_str());
    return 1;
  }
  return 0;
}

int cmd_report(const Flags& f) {
  if (!f.out) throw ConfigError("report needs --out <dir>");
  const fs::path dir = *f.out;
  if (!fs::is_directory(dir)) throw ConfigError("no such directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p);
    std::string line;
    std::printf("%s\n", p.filename().c_str());
    std::printf("  %-20s %-28s %3s %3s %3s %14s %11s %14s %14s\n", "experiment", "label", "h", "l", "k", "empirical",
                "stderr", "finite_T", "asymptotic");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto r = Json::parse(line);
      std::printf("  %-20s %-28s %3d %3d %3d %14.6g %11.3g %14.6g %14.6g\n",
                  r.at("experiment").get<std::string>().c_str(), r.at("label").get<std::string>().c_str(),
                  r.at("h").get<int>(), r.at("l").get<int>(), r.at("k").get<int>(), r.at("empirical_re").get<double>(),
                  r.at("stderr").get<double>(), r.at("finite_T_pred").get<double>(),
                  r.at("asymptotic_pred").get<double>());
    }
  }
  const auto manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    const auto m = Json::parse(in);
    std::printf("manifest: version %s, %.1f s, all checks %s\n", m.at("version").get<std::string>().c_str(),
                m.at("wall_seconds").get<double>(), m.at("all_passed").get<bool>() ? "passed" : "NOT passed");
    for (const auto& c : m.at("checks")) {
      const bool info = c.value("informational", false), ok = c.at("passed").get<bool>();
      std::printf("  [%s] %s: %s\n", info ? (ok ? "info" : "info, outside") : (ok ? "PASS" : "FAIL"),
                  c.at("name").get<std::string>().c_str(), c.at("detail").get<std::string>().c_str());
    }
  }
  if (files.empty()) throw ConfigError("no .jsonl reports in " + dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeros, log zeta and linear statistics of zeros on [T, 2T]"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--cache-dir", f.cache_dir, "directory for certified zero tables");
    sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  };

  auto* zeros = app.add_subcommand("zeros", "compute or load a certified zero table");
  zeros->add_option("--T", f.T, "window [T - pad, 2T + pad] used by experiments at height T");
  zeros->add_option("--eta", f.eta, "support of the bump that sets the pad (default 0.4)");
  zeros->add_option("--from", f.from, "explicit window start");
  zeros->add_option("--to", f.to, "explicit window end");
  zeros->add_option("--out", f.out, "also write the table to this file");
  common(zeros);

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", f.config, "INI config")->required()->check(CLI::ExistingFile);
  run->add_option("--T", f.T, "override experiment.T");
  run->add_option("--k", f.k, "override experiment.k");
  run->add_option("--eta", f.eta, "override test_function.eta");
  run->add_option("--seed", f.seed, "override experiment.seed");
  run->add_option("--out", f.out, "override output.dir");
  common(run);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--seed", f.seed, "sampling seed");
  selftest->add_option("--out", f.out, "write results as JSON to this file");
  common(selftest);

  auto* report = app.add_subcommand("report", "print the reports in an output directory");
  report->add_option("--out", f.out, "output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (zeros->parsed()) return cmd_zeros(f);
    if (run->parsed()) return cmd_run(f);
    if (selftest->parsed()) return cmd_selftest(f);
    if (report->parsed()) return cmd_report(f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "zetalab: invalid configuration: %s\n", e.what());
    return 2;
  } catch (const ParityError& e) {
    std::fprintf(stderr, "zetalab: invalid configuration: %s\n", e.what());
    return 2;
  } catch (const CoverageError& e) {
    std::fprintf(stderr, "zetalab: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zetalab: %s\n", e.what());
    return 4;
  }
  return 0;
}
