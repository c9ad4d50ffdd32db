#pragma once

// On-disk zero tables. One header line
//   # zeros <t_low> <t_high> <count> <certified>
// followed by one ordinate per line with nine decimals.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <system_error>

#include "zetalab/error.hpp"
#include "zetalab/zeros.hpp"

namespace zetalab {

namespace detail {

inline std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

struct CacheHeader {
  double t_low = 0.0, t_high = 0.0;
  std::size_t count = 0;
  bool certified = false;
};

inline std::optional<CacheHeader> parse_cache_header(const std::string& line) {
  std::istringstream in(line);
  std::string hash, word;
  CacheHeader h;
  int cert = -1;
  if (!(in >> hash >> word >> h.t_low >> h.t_high >> h.count >> cert) || hash != "#" || word != "zeros") {
    return std::nullopt;
  }
  if (cert != 0 && cert != 1) return std::nullopt;
  std::string extra;
  if (in >> extra) return std::nullopt;
  h.certified = cert == 1;
  return h;
}

}  // namespace detail

/// Round every ordinate to the nine decimals the cache stores, so a table
/// read back from disk is bit-identical to the one that was written.
inline void normalize_for_cache(ZeroTable& table) {
  for (double& g : table.gammas) g = std::strtod(detail::fixed9(g).c_str(), nullptr);
}

inline std::filesystem::path zero_cache_path(const std::filesystem::path& dir, double t_low, double t_high) {
  char name[128];
  std::snprintf(name, sizeof name, "zeros_%.3f_%.3f.txt", t_low, t_high);
  return dir / name;
}

/// Writes to a temporary file in the same directory and renames it into place.
inline void save_zero_table(const ZeroTable& table, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp);
    if (!out) throw CacheError("cannot write zero cache " + tmp.string());
    out << "# zeros " << detail::fixed9(table.t_low) << ' ' << detail::fixed9(table.t_high) << ' '
        << table.gammas.size() << ' ' << (table.certified ? 1 : 0) << '\n';
    for (double g : table.gammas) out << detail::fixed9(g) << '\n';
    if (!out.flush()) throw CacheError("short write on zero cache " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw CacheError("cannot move zero cache into place at " + path.string());
  }
}

/// Reads and validates a cached table; any inconsistency raises CacheError.
///
/// Checks: header shape, entry count, ordering, range, |Z| at a few entries,
/// and N(t_low) recomputed from the zeros themselves.
inline ZeroTable load_zero_table(const std::filesystem::path& path, double spot_tolerance = 1e-6) {
  std::ifstream in(path);
  if (!in) throw CacheError("cannot open zero cache " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw CacheError("empty zero cache " + path.string());
  const auto header = detail::parse_cache_header(line);
  if (!header) throw CacheError("bad zero cache header in " + path.string());
  ZeroTable table;
  table.t_low = header->t_low;
  table.t_high = header->t_high;
  table.certified = header->certified;
  table.gammas.reserve(header->count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    char* end = nullptr;
    const double g = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') throw CacheError("unparsable ordinate in " + path.string());
    if (!table.gammas.empty() && !(g > table.gammas.back())) {
      throw CacheError("zero cache ordinates not increasing in " + path.string());
    }
    if (g < table.t_low || g > table.t_high) throw CacheError("ordinate outside window in " + path.string());
    table.gammas.push_back(g);
  }
  if (table.gammas.size() != header->count) {
    throw CacheError("zero cache count mismatch in " + path.string() + ": header " + std::to_string(header->count) +
                     ", found " + std::to_string(table.gammas.size()));
  }
  if (!table.certified) throw CacheError("zero cache " + path.string() + " is not certified");
  const std::size_t n = table.gammas.size();
  if (n > 0) {
    for (std::size_t i : {std::size_t{0}, n / 2, n - 1}) {
      if (std::abs(hardy_z(table.gammas[i])) > spot_tolerance) {
        throw CacheError("zero cache entry " + detail::fixed9(table.gammas[i]) + " is not a zero of Z");
      }
    }
  }
  const auto below = recount_below(table);
  if (!below) throw CacheError("cannot recount zeros below t_low for " + path.string());
  table.count_below = *below;
  return table;
}

/// Where a zero table came from, for run manifests.
struct ZeroProvenance {
  std::string source;  // "computed", "cache" or "cache-slice"
  std::string path;
  std::string note;
};

/// Certified zeros on [t_low, t_high], read from cache_dir when a cached
/// window covers the request, otherwise computed and written back.
inline ZeroTable cached_zeros(double t_low, double t_high, const std::optional<std::filesystem::path>& cache_dir,
                              const ZeroSearchOptions& options = {}, ZeroProvenance* provenance = nullptr) {
  namespace fs = std::filesystem;
  ZeroProvenance prov;
  // Windows are keyed on endpoints rounded outward to 1e-3, which survive the
  // nine-decimal header exactly.
  const double key_low = std::max(10.0, std::floor(t_low * 1000.0) / 1000.0);
  const double key_high = std::ceil(t_high * 1000.0) / 1000.0;
  if (cache_dir && fs::is_directory(*cache_dir)) {
    // Exact key first, then the narrowest covering window.
    std::optional<fs::path> best;
    double best_len = 0.0;
    for (const auto& entry : fs::directory_iterator(*cache_dir)) {
      const auto name = entry.path().filename().string();
      if (!entry.is_regular_file() || name.rfind("zeros_", 0) != 0 || entry.path().extension() != ".txt") continue;
      std::ifstream in(entry.path());
      std::string line;
      if (!std::getline(in, line)) continue;
      const auto h = detail::parse_cache_header(line);
      if (!h || !h->certified || h->t_low > t_low || h->t_high < t_high) continue;
      const double len = h->t_high - h->t_low;
      if (!best || len < best_len) {
        best = entry.path();
        best_len = len;
      }
    }
    if (best) {
      try {
        ZeroTable table = load_zero_table(*best);
        prov.path = best->string();
        if (table.t_low == t_low && table.t_high == t_high) {
          prov.source = "cache";
        } else {
          prov.source = "cache-slice";
          table = table.slice(t_low, t_high);
        }
        if (provenance) *provenance = prov;
        return table;
      } catch (const CacheError& e) {
        prov.note = std::string("rejected cache: ") + e.what();
      }
    }
  }
  ZeroTable table = find_zeros(key_low, key_high, options);
  normalize_for_cache(table);
  prov.source = "computed";
  if (cache_dir && table.certified) {
    const auto path = zero_cache_path(*cache_dir, key_low, key_high);
    save_zero_table(table, path);
    prov.path = path.string();
  }
  if (provenance) *provenance = prov;
  if (key_low != t_low || key_high != t_high) table = table.slice(t_low, t_high);
  return table;
}

}  // namespace zetalab
