#pragma once

// The measured side: N_f(t) from computed zeros, the weighted integral
// int N_f |zeta|^{2k} phi(t/T) dt and its mass, moments over shifted zeros,
// and counts of zeros with a large value of |zeta| nearby.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "main_terms.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
#include "test_functions.hpp"
#include "zero_finder.hpp"

namespace wld {

/// Mean gap between zero ordinates near height T.
inline double mean_spacing(double T) {
  if (!(T > kTwoPi) || !std::isfinite(T)) throw DomainError("mean_spacing: requires T > 2 pi");
  return kTwoPi / std::log(T);
}

inline void check_moment_order(int k, int lo, int hi, const char* who) {
  if (k < lo || k > hi) throw DomainError(std::string(who) + ": k out of range");
}

/// |zeta(1/2 + i t)|^{2k}.
inline double zeta_power(double t, int k) {
  if (k == 0) return 1.0;
  const double z = zeta_critical(t).z;
  const double z2 = z * z;
  return k == 1 ? z2 : z2 * z2;
}

/// N_f(t) = sum_gamma f((gamma - t) / s) with s the mean spacing at T.
/// Smooth atoms are summed out to their 1e-12 decay radius. Fejer atoms have
/// a 1/x^2 tail, so they are cut at kFejerReach spacings and the tail
/// bound is reported as truncation error.
class NfEvaluator {
 public:
  static constexpr double kFejerReach = 400.0;

  NfEvaluator(const TestFunction& f, const ZeroSet& zeros, double T)
      : f_(f), spacing_(mean_spacing(T)), gammas_(zeros.gammas()) {
    if (!zeros.complete) throw CoverageError("N_f: zero set is not complete");
    radius_ = f_.has_slow_tail() ? std::max(f_.radius(), kFejerReach) : f_.radius();
    truncation_ = f_.tail_bound(radius_);
    t_min_ = zeros.t_min;
    t_max_ = zeros.t_max;
  }

  /// Distance in t on each side that must be covered by zeros.
  double reach() const { return radius_ * spacing_; }
  double radius() const { return radius_; }
  double spacing() const { return spacing_; }
  /// Bound on the part of N_f(t) dropped by the cut.
  double truncation() const { return truncation_; }

  void check_coverage(double lo, double hi) const {
    if (t_min_ > lo - reach() || t_max_ < hi + reach()) {
      std::ostringstream msg;
      msg << "N_f: zeros cover [" << t_min_ << ", " << t_max_ << "] but [" << lo - reach()
          << ", " << hi + reach() << "] is needed";
      throw CoverageError(msg.str());
    }
  }

  double operator()(double t) const {
    check_coverage(t, t);
    return sum(t);
  }

  /// No coverage check; callers check the whole range once.
  double sum(double t) const {
    const double r = reach();
    auto it = std::lower_bound(gammas_.begin(), gammas_.end(), t - r);
    double acc = 0;
    for (; it != gammas_.end() && *it <= t + r; ++it) acc += f_((*it - t) / spacing_);
    return acc;
  }

 private:
  TabulatedF f_;
  double spacing_;
  std::vector<double> gammas_;
  double radius_ = 0;
  double truncation_ = 0;
  double t_min_ = 0, t_max_ = 0;
};

inline double n_f(double t, const ZeroSet& zeros, const TestFunction& f, double T) {
  return NfEvaluator(f, zeros, T)(t);
}

struct DensityReport {
  int k = 0;
  double T = 0;
  double lhs = 0;
  double mass = 0;
  double ratio = 0;
  double prediction = 0;
  std::optional<double> rhs_k1;
  double quad_err = 0;
  std::size_t nodes = 0;   ///< integrand evaluations on the finer grid
  std::size_t zeros = 0;   ///< zeros inside the support window
};

struct DensityOptions {
  unsigned threads = 0;
  bool with_rhs = true;  ///< compute rhs_k1 when k = 1
};

namespace detail {

struct DensitySums {
  double lhs = 0, mass = 0;
};

/// Composite 8-point Gauss-Legendre over [lo, hi] with `panels` panels.
inline DensitySums density_grid(int k, const NfEvaluator& nf, const WeightFunction& phi, double T,
                                double lo, double hi, std::size_t panels, unsigned threads) {
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (panels + kChunk - 1) / kChunk;
  const auto& rule = gauss_legendre<8>();
  const double w = (hi - lo) / static_cast<double>(panels);
  std::vector<DensitySums> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    DensitySums s;
    for (std::size_t p = c * kChunk; p < std::min(panels, (c + 1) * kChunk); ++p) {
      const double mid = lo + w * (static_cast<double>(p) + 0.5);
      for (std::size_t i = 0; i < 8; ++i) {
        const double t = mid + 0.5 * w * rule.nodes[i];
        const double weight = 0.5 * w * rule.weights[i] * phi(t / T);
        if (weight == 0) continue;
        const double m = weight * zeta_power(t, k);
        s.mass += m;
        s.lhs += m * nf.sum(t);
      }
    }
    parts[c] = s;
  });
  DensitySums out;
  for (const auto& s : parts) {
    out.lhs += s.lhs;
    out.mass += s.mass;
  }
  return out;
}

}  // namespace detail

/// int N_f(t) |zeta(1/2+it)|^{2k} phi(t/T) dt together with its mass
/// int |zeta|^{2k} phi(t/T) dt. The coarse grid has at least six nodes per
/// mean spacing; the error estimate is the change on halving the panels plus
/// the N_f truncation bound times the mass.
inline DensityReport weighted_density(int k, const TestFunction& f, const WeightFunction& phi,
                                      double T, const ZeroSet& zeros,
                                      const DensityOptions& opt = {}) {
  check_moment_order(k, 0, 2, "weighted_density");
  if (!(T >= 100) || !std::isfinite(T)) throw DomainError("weighted_density: requires T >= 100");
  const NfEvaluator nf(f, zeros, T);
  const double lo = phi.a() * T, hi = phi.b() * T;
  nf.check_coverage(lo, hi);

  // the widest gap inside an 8-point Gauss-Legendre panel is 0.183 of its width
  const double max_gap = nf.spacing() / 6;
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) * 0.1834 / max_gap));
  const auto coarse = detail::density_grid(k, nf, phi, T, lo, hi, panels, opt.threads);
  const auto fine = detail::density_grid(k, nf, phi, T, lo, hi, 2 * panels, opt.threads);

  DensityReport r;
  r.k = k;
  r.T = T;
  r.lhs = fine.lhs;
  r.mass = fine.mass;
  if (!(r.mass > 0)) throw ConvergenceError("weighted_density: non-positive mass");
  r.ratio = r.lhs / r.mass;
  r.quad_err = std::fabs(fine.lhs - coarse.lhs) + nf.truncation() * r.mass;
  r.nodes = 16 * panels;
  r.zeros = zeros.slice(lo, hi).size();
  r.prediction = kernel_prediction(f, k);
  if (k == 1 && opt.with_rhs) {
    MainTermContext ctx;
    ctx.T = T;
    ctx.phi = phi;
    r.rhs_k1 = rhs_k1(f, ctx).value;
  }
  if (r.quad_err > 0.01 * std::fabs(r.lhs)) {
    std::ostringstream msg;
    msg << "weighted_density: quadrature error " << r.quad_err << " exceeds 1% of lhs " << r.lhs;
    throw ConvergenceError(msg.str());
  }
  return r;
}

/// Zeros padded by the N_f reach, from the cache or a fresh scan.
/// The zero window [lo, hi] a density run at height T reads: the support of
/// phi(t/T) padded by the reach of f.
inline std::pair<double, double> density_window(const TestFunction& f, const WeightFunction& phi,
                                                double T) {
  const TabulatedF tf(f);
  const double radius = tf.has_slow_tail() ? std::max(tf.radius(), NfEvaluator::kFejerReach)
                                           : tf.radius();
  const double pad = radius * mean_spacing(T) + 1.0;
  return {phi.a() * T - pad, phi.b() * T + pad};
}

inline ZeroSet zeros_for_density(const TestFunction& f, const WeightFunction& phi, double T) {
  const auto [lo, hi] = density_window(f, phi, T);
  return zeros_for_window(lo, hi);
}

inline DensityReport weighted_density(int k, const TestFunction& f, const WeightFunction& phi,
                                      double T, const DensityOptions& opt = {}) {
  return weighted_density(k, f, phi, T, zeros_for_density(f, phi, T), opt);
}

inline nlohmann::json to_json(const DensityReport& r) {
  nlohmann::json j{{"k", r.k},         {"T", r.T},
                   {"lhs", r.lhs},     {"mass", r.mass},
                   {"ratio", r.ratio}, {"prediction", r.prediction},
                   {"quad_err", r.quad_err}, {"nodes", r.nodes},
                   {"zeros", r.zeros}};
  j["rhs_k1"] = r.rhs_k1 ? nlohmann::json(*r.rhs_k1) : nlohmann::json(nullptr);
  return j;
}

/// M_k(alpha; T) = sum over T <= gamma <= 2T of |zeta(rho + 2 pi i alpha / log T)|^{2k}.
inline double m_k(double alpha, int k, const ZeroSet& zeros, double T, unsigned threads = 0) {
  check_moment_order(k, 1, 2, "m_k");
  if (!zeros.covers(T, 2 * T)) throw CoverageError("m_k: zeros must cover [T, 2T]");
  const double shift = alpha * mean_spacing(T);
  std::vector<double> g;
  for (const auto& z : zeros.zeros)
    if (z.gamma >= T && z.gamma <= 2 * T) g.push_back(z.gamma);
  constexpr std::size_t kChunk = 128;
  const std::size_t chunks = (g.size() + kChunk - 1) / kChunk;
  std::vector<double> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    double acc = 0;
    for (std::size_t i = c * kChunk; i < std::min(g.size(), (c + 1) * kChunk); ++i)
      acc += zeta_power(g[i] + shift, k);
    parts[c] = acc;
  });
  double acc = 0;
  for (double p : parts) acc += p;
  return acc;
}

/// The phi-weighted version sum_gamma |zeta(rho + i s alpha)|^{2k} phi((gamma + s alpha)/T),
/// s the mean spacing. Integrating it against f reproduces weighted_density's lhs exactly.
inline double m_k_smoothed(double alpha, int k, const ZeroSet& zeros, double T,
                           const WeightFunction& phi) {
  check_moment_order(k, 0, 2, "m_k_smoothed");
  const double shift = alpha * mean_spacing(T);
  if (!zeros.covers(phi.a() * T - shift, phi.b() * T - shift))
    throw CoverageError("m_k_smoothed: zeros do not cover the shifted support");
  double acc = 0;
  for (const auto& z : zeros.zeros) {
    const double t = z.gamma + shift;
    const double w = phi(t / T);
    if (w != 0) acc += w * zeta_power(t, k);
  }
  return acc;
}

struct LargeValueQuery {
  int k = 1;
  double T = 1000;
  double U = 1;
  double window = 0;  ///< 0 means 1/log T

  double resolved_window() const { return window > 0 ? window : 1.0 / std::log(T); }

  void validate() const {
    check_moment_order(k, 1, 4, "LargeValueQuery");
    if (!(T >= 100) || !std::isfinite(T)) throw DomainError("LargeValueQuery: requires T >= 100");
    if (!(U > 0)) throw DomainError("LargeValueQuery: requires U > 0");
    if (!(window >= 0) || !std::isfinite(window)) throw DomainError("LargeValueQuery: bad window");
  }
};

struct LargeValueRow {
  double gamma = 0;
  double max_abs_zeta = 0;
  double log_excess = 0;  ///< log M(gamma) - k log log T
};

/// max |zeta(1/2 + i(gamma + u))| over |u| <= w: a 64-point grid, then
/// golden-section search on the two cells around the best grid point.
inline double max_near(double gamma, double w) {
  constexpr int kGrid = 64;
  auto g = [](double t) { return std::fabs(zeta_critical(t).z); };
  const double h = 2 * w / (kGrid - 1);
  int best = 0;
  double best_v = -1;
  for (int i = 0; i < kGrid; ++i) {
    const double v = g(gamma - w + h * i);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = gamma - w + h * std::max(0, best - 1);
  double b = gamma - w + h * std::min(kGrid - 1, best + 1);
  const double r = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > 1e-7 * h) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = g(x1);
    }
  }
  return std::max({best_v, f1, f2});
}

/// M(gamma) for every zero in [T, 2T].
inline std::vector<LargeValueRow> large_value_table(const LargeValueQuery& q, const ZeroSet& zeros,
                                                    unsigned threads = 0) {
  q.validate();
  if (!zeros.covers(q.T, 2 * q.T)) throw CoverageError("large values: zeros must cover [T, 2T]");
  std::vector<double> g;
  for (const auto& z : zeros.zeros)
    if (z.gamma >= q.T && z.gamma <= 2 * q.T) g.push_back(z.gamma);
  const double w = q.resolved_window();
  const double center = q.k * std::log(std::log(q.T));
  std::vector<LargeValueRow> rows(g.size());
  constexpr std::size_t kChunk = 32;
  parallel_chunks((g.size() + kChunk - 1) / kChunk, threads, [&](std::size_t c) {
    for (std::size_t i = c * kChunk; i < std::min(g.size(), (c + 1) * kChunk); ++i) {
      const double m = max_near(g[i], w);
      rows[i] = {g[i], m, std::log(m) - center};
    }
  });
  return rows;
}

/// #{gamma : |log M(gamma) - k log log T| < U}.
inline std::size_t count_within(const std::vector<LargeValueRow>& rows, double U) {
  if (!(U > 0)) throw DomainError("count_within: requires U > 0");
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [U](const LargeValueRow& r) { return std::fabs(r.log_excess) < U; }));
}

inline std::size_t z_k_count(const LargeValueQuery& q, const ZeroSet& zeros, unsigned threads = 0) {
  return count_within(large_value_table(q, zeros, threads), q.U);
}

inline void write_large_value_csv(const std::vector<LargeValueRow>& rows, std::ostream& out) {
  out << "gamma,max_abs_zeta,log_excess\n";
  char line[96];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.15g,%.15g,%.15g\n", r.gamma, r.max_abs_zeta, r.log_excess);
    out << line;
  }
}

/// e^{-2kU} / C <= count / (T (log T)^{1-k^2}) <= C e^{2kU}.
inline bool within_large_value_envelope(std::size_t count, int k, double T, double U,
                                        double C = 10.0) {
  const double norm = static_cast<double>(count) / (T * std::pow(std::log(T), 1 - k * k));
  return norm >= std::exp(-2.0 * k * U) / C && norm <= C * std::exp(2.0 * k * U);
}

}  // namespace wld
