#pragma once

// Experiment configuration: a strict INI reader (unknown sections or keys are
// errors) plus validation of the support, parity and budget conditions.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "zetalab/error.hpp"
#include "zetalab/moments.hpp"
#include "zetalab/test_function.hpp"

namespace zetalab {

inline constexpr const char* kVersion = "1.0.0";

enum class Experiment {
  explicit_formula,
  hughes_rudnick,
  joint_moments,
  imaginary_moments,
  correlation,
  goldston,
  weighted_clt,
  diagonal_selftest
};

inline std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::explicit_formula: return "explicit_formula";
    case Experiment::hughes_rudnick: return "hughes_rudnick";
    case Experiment::joint_moments: return "joint_moments";
    case Experiment::imaginary_moments: return "imaginary_moments";
    case Experiment::correlation: return "correlation";
    case Experiment::goldston: return "goldston";
    case Experiment::weighted_clt: return "weighted_clt";
    case Experiment::diagonal_selftest: return "diagonal_selftest";
  }
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::explicit_formula, Experiment::hughes_rudnick, Experiment::joint_moments,
                 Experiment::imaginary_moments, Experiment::correlation, Experiment::goldston, Experiment::weighted_clt,
                 Experiment::diagonal_selftest}) {
    if (experiment_name(e) == s) return e;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

inline std::string support_mode_name(SupportMode m) {
  switch (m) {
    case SupportMode::unconditional: return "unconditional";
    case SupportMode::rh_imaginary: return "rh_imaginary";
    case SupportMode::correlation: return "correlation";
    case SupportMode::hughes_rudnick: return "hughes_rudnick";
  }
  return "?";
}

struct ExperimentConfig {
  Experiment experiment = Experiment::joint_moments;
  double T = 1e5;
  double x_exponent = 0.02;
  int h = 0, l = 0, k = 2;
  IntegrandMode integrand = IntegrandMode::zeta_nphi;
  std::optional<SupportMode> support;  // defaults per experiment
  double epsilon = 0.02;
  std::vector<std::uint64_t> goldston_n{2, 3, 4};
  std::size_t resamples = 10000;
  CdfStatistic statistic = CdfStatistic::im_log_norm;

  Family family = Family::smooth_bump_hat;
  double eta = 0.4;
  TestFunctionParams params;

  QuadratureSpec quadrature;  // quadrature.seed doubles as the run seed

  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir = "out";

  double x() const { return std::pow(T, x_exponent); }

  SupportMode effective_support() const {
    if (support) return *support;
    switch (experiment) {
      case Experiment::hughes_rudnick: return SupportMode::hughes_rudnick;
      case Experiment::imaginary_moments:
      case Experiment::weighted_clt: return SupportMode::rh_imaginary;
      case Experiment::correlation: return SupportMode::correlation;
      default: return SupportMode::unconditional;
    }
  }

  /// Largest integer the prime table must cover for this run.
  std::uint64_t prime_limit() const {
    double need = std::max(1000.0, std::ceil(std::pow(T, eta) * 1.001) + 2.0);
    need = std::max(need, std::ceil(x()) + 2.0);
    for (auto n : goldston_n) need = std::max(need, static_cast<double>(n) + 1.0);
    return static_cast<std::uint64_t>(need);
  }

  /// Ordered (section.key, value) pairs; this is the echo written to manifests.
  std::vector<std::pair<std::string, std::string>> echo() const {
    auto num = [](double v) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    };
    std::string ns;
    for (std::size_t i = 0; i < goldston_n.size(); ++i) ns += (i ? "," : "") + std::to_string(goldston_n[i]);
    return {
        {"experiment.name", experiment_name(experiment)},
        {"experiment.T", num(T)},
        {"experiment.x_exponent", num(x_exponent)},
        {"experiment.h", std::to_string(h)},
        {"experiment.l", std::to_string(l)},
        {"experiment.k", std::to_string(k)},
        {"experiment.integrand", integrand_name(integrand)},
        {"experiment.support", support_mode_name(effective_support())},
        {"experiment.seed", std::to_string(quadrature.seed)},
        {"experiment.epsilon", num(epsilon)},
        {"experiment.goldston_n", ns},
        {"experiment.resamples", std::to_string(resamples)},
        {"experiment.statistic", statistic == CdfStatistic::im_log_norm ? "im_log_norm" : "complex_log_norm"},
        {"test_function.family", std::string(family_name(family))},
        {"test_function.eta", num(eta)},
        {"test_function.amplitude", num(params.amplitude)},
        {"test_function.dip", num(params.dip)},
        {"quadrature.mode", quadrature_name(quadrature.mode)},
        {"quadrature.points", std::to_string(quadrature.points)},
        {"quadrature.samples_per_gap", num(quadrature.samples_per_gap)},
        {"quadrature.threads", std::to_string(quadrature.threads)},
        {"output.dir", out_dir.string()},
        {"output.cache_dir", cache_dir ? cache_dir->string() : ""},
    };
  }
};

namespace detail {

template <class V>
V parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  V v{};
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return v;
}

inline std::vector<std::uint64_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_value<std::uint64_t>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

}  // namespace detail

/// Checks the ranges, parity and support conditions; throws on the first
/// violation with a one-line reason.
inline void validate(const ExperimentConfig& c) {
  if (!(c.T >= 1000.0)) throw ConfigError("T must be >= 1000");
  if (!(c.x_exponent > 0.0 && c.x_exponent <= 0.1)) throw ConfigError("x_exponent must lie in (0, 0.1]");
  if (c.h < 0 || c.l < 0 || c.k < 0) throw ConfigError("h, l, k must be nonnegative");
  if (c.h + c.l + c.k > 8) throw ConfigError("h + l + k must be <= 8");
  if (c.k % 2 != 0) throw ParityError("k must be even, got " + std::to_string(c.k));
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (c.quadrature.points < 1000) throw ConfigError("quadrature.points must be >= 1000");
  if (!(c.eta > 0.0 && c.eta <= 2.0)) throw ConfigError("eta must lie in (0, 2]");
  for (auto n : c.goldston_n) {
    if (n < 2 || static_cast<double>(n) > c.T) throw ConfigError("goldston_n entries must lie in [2, T]");
  }
  // Support conditions need only eta, so a cheap family member stands in.
  const TestFunction probe(Family::triangle_hat, c.eta);
  int k = c.k;
  switch (c.experiment) {
    case Experiment::correlation: k = 0; break;
    case Experiment::explicit_formula:
    case Experiment::goldston:
    case Experiment::diagonal_selftest: return;
    default: break;
  }
  if (!validate_support(probe, k, c.effective_support())) {
    throw ConfigError("support condition fails: eta = " + std::to_string(c.eta) + ", k = " + std::to_string(k) +
                      ", mode " + support_mode_name(c.effective_support()));
  }
}

/// Parses an INI file. Recognised sections and keys:
///   [experiment]    name T x_exponent h l k integrand support seed epsilon
///                   goldston_n resamples statistic
///   [test_function] family eta amplitude dip
///   [quadrature]    mode points samples_per_gap threads
///   [output]        dir cache_dir
inline ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::map<std::string, std::set<std::string>> known{
      {"experiment",
       {"name", "T", "x_exponent", "h", "l", "k", "integrand", "support", "seed", "epsilon", "goldston_n", "resamples",
        "statistic"}},
      {"test_function", {"family", "eta", "amplitude", "dip"}},
      {"quadrature", {"mode", "points", "samples_per_gap", "threads"}},
      {"output", {"dir", "cache_dir"}},
  };
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key " + section + "." + key);
      const std::string name = section + "." + key;
      const std::string v = node.get_value<std::string>();
      if (name == "experiment.name") c.experiment = parse_experiment(v);
      else if (name == "experiment.T") c.T = detail::parse_value<double>(name, v);
      else if (name == "experiment.x_exponent") c.x_exponent = detail::parse_value<double>(name, v);
      else if (name == "experiment.h") c.h = detail::parse_value<int>(name, v);
      else if (name == "experiment.l") c.l = detail::parse_value<int>(name, v);
      else if (name == "experiment.k") c.k = detail::parse_value<int>(name, v);
      else if (name == "experiment.integrand") c.integrand = parse_integrand(v);
      else if (name == "experiment.support") c.support = parse_support_mode(v);
      else if (name == "experiment.seed") c.quadrature.seed = detail::parse_value<std::uint64_t>(name, v);
      else if (name == "experiment.epsilon") c.epsilon = detail::parse_value<double>(name, v);
      else if (name == "experiment.goldston_n") c.goldston_n = detail::parse_list(name, v);
      else if (name == "experiment.resamples") c.resamples = detail::parse_value<std::size_t>(name, v);
      else if (name == "experiment.statistic") {
        if (v == "im_log_norm") c.statistic = CdfStatistic::im_log_norm;
        else if (v == "complex_log_norm") c.statistic = CdfStatistic::complex_log_norm;
        else throw ConfigError("unknown statistic '" + v + "'");
      }
      else if (name == "test_function.family") c.family = parse_family(v);
      else if (name == "test_function.eta") c.eta = detail::parse_value<double>(name, v);
      else if (name == "test_function.amplitude") c.params.amplitude = detail::parse_value<double>(name, v);
      else if (name == "test_function.dip") c.params.dip = detail::parse_value<double>(name, v);
      else if (name == "quadrature.mode") c.quadrature.mode = parse_quadrature(v);
      else if (name == "quadrature.points") c.quadrature.points = detail::parse_value<std::int64_t>(name, v);
      else if (name == "quadrature.samples_per_gap") c.quadrature.samples_per_gap = detail::parse_value<double>(name, v);
      else if (name == "quadrature.threads") c.quadrature.threads = detail::parse_value<unsigned>(name, v);
      else if (name == "output.dir") c.out_dir = v;
      else if (name == "output.cache_dir") c.cache_dir = v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v);
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace zetalab
