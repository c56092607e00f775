#pragma once

// Critical-line zero ordinates in a window: sign changes of Hardy Z on a grid
// of one eighth of the mean spacing, bracketed refinement, local refinement
// around suspicious minima of |Z|, and an audit against the exact counting
// function N(T) = theta(T)/pi + 1 + S(T).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wld/errors.hpp"
#include "wld/special_functions.hpp"

namespace wld {

struct ZeroRecord {
  std::int64_t index = 0;  ///< 1-based global index
  double gamma = 0;
  double err = 0;
};

struct ZeroSet {
  double t_min = 0;
  double t_max = 0;
  std::vector<ZeroRecord> zeros;
  bool complete = false;
  std::int64_t expected = -1;  ///< N(t_max) - N(t_min) from the argument principle, -1 if not audited
  int passes = 0;              ///< scan passes used

  std::size_t size() const { return zeros.size(); }

  std::vector<double> gammas() const {
    std::vector<double> g;
    g.reserve(zeros.size());
    for (const auto& z : zeros) g.push_back(z.gamma);
    return g;
  }

  /// Zeros with gamma in [lo, hi].
  ZeroSet slice(double lo, double hi) const {
    ZeroSet out;
    out.t_min = std::max(lo, t_min);
    out.t_max = std::min(hi, t_max);
    out.complete = complete;
    for (const auto& z : zeros)
      if (z.gamma >= lo && z.gamma <= hi) out.zeros.push_back(z);
    out.expected = complete ? static_cast<std::int64_t>(out.zeros.size()) : -1;
    return out;
  }

  bool covers(double lo, double hi) const { return complete && t_min <= lo && t_max >= hi; }
};

/// Smooth Riemann-von Mangoldt count (T/2pi) log(T/2pi) - T/2pi + 7/8.
inline double rvm_count(double T) {
  if (!(T > kTwoPi) || !std::isfinite(T)) throw DomainError("rvm_count: requires T > 2 pi");
  const double x = T / kTwoPi;
  return x * std::log(x) - x + 0.875;
}

/// S(T) = arg zeta(1/2 + iT) / pi, the argument followed continuously along
/// the horizontal segment from 4 + iT (where |zeta - 1| < 0.1) to 1/2 + iT.
inline double s_of_t(double T) {
  if (!(T > 0)) throw DomainError("s_of_t: requires T > 0");
  auto zeta_at = [&](double sigma) { return zeta_em(cplx(sigma, T)).value; };
  double sigma = 4.0;
  cplx prev = zeta_at(sigma);
  double arg = std::arg(prev);
  double step = 0.05;
  while (sigma > 0.5) {
    const double next = std::max(0.5, sigma - step);
    const cplx cur = zeta_at(next);
    const double d = std::arg(cur / prev);
    if (std::fabs(d) > kPi / 8 && step > 1e-9) {
      step *= 0.5;
      continue;
    }
    arg += d;
    prev = cur;
    sigma = next;
    step = std::min(0.05, step * 1.5);
  }
  if (std::abs(prev) < 1e-12) throw DomainError("s_of_t: T is at a zero");
  return arg / kPi;
}

/// Exact zero count N(T) = theta(T)/pi + 1 + S(T), rounded to the nearest
/// integer. Returns nullopt if the value is not within 0.25 of an integer
/// (T too close to a zero for the argument to be reliable).
inline std::optional<std::int64_t> zero_count_exact(double T) {
  if (T < 14.0) return 0;
  const double n = riemann_siegel_theta(T) / kPi + 1.0 + s_of_t(T);
  const double r = std::round(n);
  if (std::fabs(n - r) > 0.25) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

struct ZeroFinderOptions {
  int grid_divisor = 8;    ///< grid step = mean spacing / grid_divisor
  int refine_passes = 3;   ///< local 4x refinement passes around suspicious minima
  int rescans = 2;         ///< whole-window rescans with a 4x finer grid if the audit fails
  unsigned threads = 0;    ///< 0 = hardware concurrency
  double tolerance = 1e-10;
};

namespace detail {

/// 15 significant digits, the cache precision; the stored value is the parsed
/// text so a CSV round trip is exact.
inline double quantize15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

inline double quantize_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return std::strtod(buf, nullptr);
}

struct Bracket {
  double a, za, b, zb;
};

/// Illinois false position on a sign-change bracket.
inline ZeroRecord refine_bracket(Bracket br, double tol) {
  double a = br.a, b = br.b, fa = br.za, fb = br.zb;
  int side = 0;
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double fc = hardy_z(c);
    if (fc == 0.0) {
      a = b = c;
      break;
    }
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    // bisect when false position stalls on one side
    if (it % 8 == 7) {
      const double m = 0.5 * (a + b);
      const double fm = hardy_z(m);
      if ((fm > 0) == (fb > 0)) {
        b = m;
        fb = fm;
      } else {
        a = m;
        fa = fm;
      }
    }
  }
  ZeroRecord r;
  r.gamma = quantize15(0.5 * (a + b));
  r.err = quantize_err(0.5 * (b - a) + std::fabs(r.gamma - 0.5 * (a + b)) + 1e-15 * r.gamma +
                       1e-12);
  return r;
}

struct ScanResult {
  std::vector<ZeroRecord> zeros;
};

/// Scan grid points i0..i1 of the global grid t_i = origin + i * step
/// (clamped to t_end) for sign changes; around interior minima of |Z|
/// without a sign change, refine the grid locally up to `passes` times by a
/// factor 4. Neighbouring chunks share their end points.
inline ScanResult scan_window(double origin, double step, std::size_t i0, std::size_t i1,
                              double t_end, int passes, double tol) {
  ScanResult out;
  const std::size_t n = i1 - i0;
  std::vector<double> t(n + 1), z(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i] = std::min(t_end, origin + step * static_cast<double>(i0 + i));
    z[i] = hardy_z(t[i]);
  }
  auto sign = [](double v) { return v >= 0 ? 1 : -1; };
  std::vector<Bracket> brackets;
  for (std::size_t i = 0; i < n; ++i)
    if (sign(z[i]) != sign(z[i + 1])) brackets.push_back({t[i], z[i], t[i + 1], z[i + 1]});

  for (std::size_t i = 1; i < n; ++i) {
    if (sign(z[i - 1]) != sign(z[i]) || sign(z[i]) != sign(z[i + 1])) continue;
    if (!(std::fabs(z[i]) < std::fabs(z[i - 1]) && std::fabs(z[i]) < std::fabs(z[i + 1]))) continue;
    // candidate for a missed close pair inside [t[i-1], t[i+1]]
    std::size_t m = 8;
    for (int p = 0; p < passes; ++p, m *= 4) {
      std::vector<double> tt(m + 1), zz(m + 1);
      const double a = t[i - 1], b = t[i + 1];
      for (std::size_t j = 0; j <= m; ++j) {
        tt[j] = j == 0 ? a : (j == m ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(m));
        zz[j] = j == 0 ? z[i - 1] : (j == m ? z[i + 1] : hardy_z(tt[j]));
      }
      std::vector<Bracket> found;
      for (std::size_t j = 0; j < m; ++j)
        if (sign(zz[j]) != sign(zz[j + 1])) found.push_back({tt[j], zz[j], tt[j + 1], zz[j + 1]});
      if (!found.empty()) {
        brackets.insert(brackets.end(), found.begin(), found.end());
        break;
      }
    }
  }
  for (const auto& br : brackets) out.zeros.push_back(refine_bracket(br, tol));
  std::sort(out.zeros.begin(), out.zeros.end(),
            [](const ZeroRecord& x, const ZeroRecord& y) { return x.gamma < y.gamma; });
  return out;
}

}  // namespace detail

/// All zero ordinates in [t_min, t_max], audited against N(T).
inline ZeroSet find_zeros(double t_min, double t_max, const ZeroFinderOptions& opt = {}) {
  if (!(t_min >= 0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw DomainError("find_zeros: requires 0 <= t_min < t_max");
  if (t_max > 1e6) throw DomainError("find_zeros: t_max above 1e6");
  ZeroSet out;
  out.t_min = t_min;
  out.t_max = t_max;

  // Audit points; moved inward if an end point sits on a zero. Zeros in the
  // thin strips between probe and edge are scanned but not audited.
  double lo_probe = t_min, hi_probe = t_max;
  std::optional<std::int64_t> n_lo = zero_count_exact(lo_probe);
  std::optional<std::int64_t> n_hi = zero_count_exact(hi_probe);
  for (int k = 1; k <= 4 && !n_lo; ++k) n_lo = zero_count_exact(lo_probe = t_min + 1e-6 * k);
  for (int k = 1; k <= 4 && !n_hi; ++k) n_hi = zero_count_exact(hi_probe = t_max - 1e-6 * k);
  if (n_lo && n_hi) out.expected = *n_hi - *n_lo;

  const double spacing = kTwoPi / std::log(std::max(t_max, 20.0));
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  int divisor = opt.grid_divisor;
  for (int pass = 0; pass <= opt.rescans; ++pass, divisor *= 4) {
    const double step = spacing / divisor;
    const auto n_grid = static_cast<std::size_t>(std::ceil((t_max - t_min) / step));
    // chunking depends only on the grid, so results do not depend on threads
    constexpr std::size_t kChunk = 512;
    const std::size_t chunks = (n_grid + kChunk - 1) / kChunk;
    std::vector<detail::ScanResult> parts(chunks);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < std::min<std::size_t>(threads, chunks); ++w)
      pool.emplace_back([&] {
        for (std::size_t c; (c = next++) < chunks;)
          parts[c] = detail::scan_window(t_min, step, c * kChunk, std::min(n_grid, (c + 1) * kChunk),
                                         t_max, opt.refine_passes, opt.tolerance);
      });
    for (auto& th : pool) th.join();
    out.zeros.clear();
    for (auto& p : parts) out.zeros.insert(out.zeros.end(), p.zeros.begin(), p.zeros.end());
    std::sort(out.zeros.begin(), out.zeros.end(),
              [](const ZeroRecord& x, const ZeroRecord& y) { return x.gamma < y.gamma; });
    out.zeros.erase(std::unique(out.zeros.begin(), out.zeros.end(),
                                [](const ZeroRecord& x, const ZeroRecord& y) {
                                  return std::fabs(x.gamma - y.gamma) <= x.err + y.err;
                                }),
                    out.zeros.end());
    out.zeros.erase(std::remove_if(out.zeros.begin(), out.zeros.end(),
                                   [&](const ZeroRecord& z) {
                                     return z.gamma < t_min || z.gamma > t_max;
                                   }),
                    out.zeros.end());
    out.passes = pass + 1;
    std::int64_t audited = 0;
    for (const auto& z : out.zeros)
      if (z.gamma > lo_probe && z.gamma <= hi_probe) ++audited;
    out.complete = out.expected >= 0 && audited == out.expected;
    if (out.complete || out.expected < 0) break;
  }
  std::int64_t base = n_lo ? *n_lo : 0;
  for (const auto& z : out.zeros)
    if (z.gamma <= lo_probe) --base;
  for (std::size_t i = 0; i < out.zeros.size(); ++i)
    out.zeros[i].index = base + static_cast<std::int64_t>(i) + 1;
  return out;
}

// ------------------------------------------------------------------ cache

inline std::filesystem::path cache_dir() {
  const char* env = std::getenv("WLD_CACHE_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("zero_cache");
}

inline std::string cache_file_name(double t_min, double t_max) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "zeros_%.10g_%.10g.csv", t_min, t_max);
  return buf;
}

inline void write_zero_cache(const ZeroSet& zs, const std::filesystem::path& file) {
  if (!file.parent_path().empty()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write zero cache: " + file.string());
    out << "index,gamma,err\n";
    char buf[96];
    for (const auto& z : zs.zeros) {
      std::snprintf(buf, sizeof buf, "%lld,%.15g,%.3e\n", static_cast<long long>(z.index), z.gamma,
                    z.err);
      out << buf;
    }
  }
  std::filesystem::rename(tmp, file);
}

/// Parses a cache file; the window is recovered from the file name.
inline ZeroSet read_zero_cache(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read zero cache: " + file.string());
  ZeroSet zs;
  const std::string stem = file.stem().string();
  if (std::sscanf(stem.c_str(), "zeros_%lf_%lf", &zs.t_min, &zs.t_max) != 2)
    throw Error("zero cache name does not encode a window: " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != "index,gamma,err") throw Error("zero cache header mismatch: " + file.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ZeroRecord r;
    long long idx = 0;
    char* end = nullptr;
    idx = std::strtoll(line.c_str(), &end, 10);
    r.index = idx;
    r.gamma = std::strtod(end + 1, &end);
    r.err = std::strtod(end + 1, &end);
    zs.zeros.push_back(r);
  }
  // only complete scans are written
  zs.complete = true;
  zs.expected = static_cast<std::int64_t>(zs.zeros.size());
  return zs;
}

/// A cached window covering [lo, hi], if any.
inline std::optional<ZeroSet> find_cached_zeros(double lo, double hi,
                                                const std::filesystem::path& dir = cache_dir()) {
  if (!std::filesystem::exists(dir)) return std::nullopt;
  std::optional<std::filesystem::path> best;
  double best_width = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    double a = 0, b = 0;
    if (std::sscanf(e.path().stem().string().c_str(), "zeros_%lf_%lf", &a, &b) != 2) continue;
    // names carry 10 significant digits
    const double slack = 1e-9 * std::max(std::fabs(lo), std::fabs(hi));
    if (a <= lo + slack && b >= hi - slack && (!best || b - a < best_width)) {
      best = e.path();
      best_width = b - a;
    }
  }
  if (!best) return std::nullopt;
  return read_zero_cache(*best);
}

/// Cached zeros covering [lo, hi], computing and caching a complete scan if
/// none exists. Throws CoverageError when the scan cannot be completed.
inline ZeroSet zeros_for_window(double lo, double hi, const ZeroFinderOptions& opt = {},
                                const std::filesystem::path& dir = cache_dir()) {
  if (auto z = find_cached_zeros(lo, hi, dir)) return *z;
  ZeroSet zs = find_zeros(lo, hi, opt);
  if (!zs.complete) {
    std::ostringstream msg;
    msg << "zero scan of [" << lo << ", " << hi << "] incomplete: found " << zs.size()
        << ", expected " << zs.expected;
    throw CoverageError(msg.str());
  }
  write_zero_cache(zs, dir / cache_file_name(lo, hi));
  return zs;
}

}  // namespace wld
