#pragma once

// Haar-random unitary eigenangles and the eigenvalue density tilted by
// |Lambda(1)|^{2k}, Lambda(z) = prod_j (1 - z e^{-i theta_j}).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>

#include "json.hpp"

#include "errors.hpp"
#include "kernels_identities.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace wld {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sample `index` in a run seeded by `seed`; independent of how
/// samples are split across threads.
inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline void check_dimension(int n) {
  if (n < 2 || n > 200) throw DomainError("CUE dimension must lie in [2, 200]");
}

/// Q from the QR factorization of a complex Gaussian matrix, with the
/// columns rephased so that R has a positive diagonal.
inline Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

/// Sorted eigenangles in [0, 2 pi) of a Haar unitary.
inline std::vector<double> cue_angles(int n, std::uint64_t seed) {
  check_dimension(n);
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXcd u = haar_unitary(n, rng);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("cue_angles: eigensolver failed");
  std::vector<double> th(n);
  for (int j = 0; j < n; ++j) {
    double a = std::arg(es.eigenvalues()(j));
    if (a < 0) a += kTwoPi;
    th[j] = a;
  }
  std::sort(th.begin(), th.end());
  return th;
}

/// log |Lambda(1)|^2 = sum_j log(4 sin^2(theta_j / 2)).
inline double log_abs_lambda_sq(const std::vector<double>& angles) {
  double acc = 0;
  for (double t : angles) {
    const double s = 2 * std::sin(0.5 * t);
    acc += std::log(s * s);
  }
  return acc;
}

/// E |Lambda(1)|^{2k} over U(n) = prod_{j=1}^{n} Gamma(j) Gamma(j + 2k) / Gamma(j + k)^2.
inline double cue_moment(int n, int k) {
  double acc = 0;
  for (int j = 1; j <= n; ++j)
    acc += std::lgamma(j) + std::lgamma(j + 2.0 * k) - 2 * std::lgamma(j + static_cast<double>(k));
  return std::exp(acc);
}

struct CueSample {
  int n = 0;
  int k = 0;
  std::vector<double> angles;
  double weight = 0;  ///< |Lambda(1)|^{2k}
};

inline CueSample sample_cue(int n, std::uint64_t seed, int k = 1) {
  if (k < 0 || k > 4) throw DomainError("sample_cue: k out of range");
  CueSample s;
  s.n = n;
  s.k = k;
  s.angles = cue_angles(n, seed);
  s.weight = std::exp(k * log_abs_lambda_sq(s.angles));
  return s;
}

/// The ensemble with density proportional to |Delta(theta)|^2 prod_j w(theta_j),
/// w = |1 - e^{i theta}|^{2k}: Haar measure tilted by |Lambda(1)|^{2k}. At
/// beta = 2 it is determinantal with the rank-n projection onto sqrt(w) times
/// polynomials of degree < n, so it is sampled exactly by the sequential
/// projection algorithm of Hough, Krishnapur, Peres and Virag: each point is
/// drawn from |P v(theta)|^2 / rank by rejection against sup_theta |v(theta)|^2,
/// then its direction is projected out.
class TiltedEnsemble {
 public:
  TiltedEnsemble(int n, int k) : n_(n), k_(k) {
    check_dimension(n);
    if (k < 0 || k > 4) throw DomainError("TiltedEnsemble: k out of range");
    // <z^a, z^b>_w = (-1)^{a-b} binom(2k, k + a - b) against d theta / 2 pi
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const int m = std::abs(a - b);
        if (m <= k) g(a, b) = (m % 2 ? -1.0 : 1.0) * static_cast<double>(binom(2 * k, k + m));
      }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw ConvergenceError("TiltedEnsemble: Gram matrix");
    const Eigen::MatrixXd c = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
    // Verblunsky coefficients alpha_j = -Phi_{j+1}(0) of the monic orthogonal
    // polynomials, and the norms of Phi_j
    alpha_.resize(n);
    norm_.resize(n);
    for (int j = 0; j < n; ++j) {
      norm_[j] = 1 / c(j, j);
      alpha_[j] = j + 1 < n ? -c(j + 1, 0) / c(j + 1, j + 1) : 0.0;
    }
    // a trigonometric polynomial of degree d sampled at N points is within a
    // factor 1 / cos(pi d / N) of its maximum
    constexpr int kGrid = 8192;
    double mx = 0;
    for (int i = 0; i < kGrid; ++i) mx = std::max(mx, features(kTwoPi * i / kGrid).squaredNorm());
    bound_ = mx / std::cos(kPi * 2 * (n + k) / kGrid) * 1.001;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<double>& verblunsky() const { return alpha_; }

  /// v(theta) with K(theta, phi) = v(phi)^* v(theta) against d theta / 2 pi,
  /// from the Szego recurrence Phi_{j+1} = z Phi_j - alpha_j Phi_j^*.
  Eigen::VectorXcd features(double th) const {
    Eigen::VectorXcd v(n_);
    fill_features(th, v);
    return v;
  }

  /// Sorted angles in [0, 2 pi).
  std::vector<double> sample(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = n_;
    // orthonormal basis of the directions not yet projected out, column j at
    // j * n, real and imaginary parts apart; the residual of v is |R^* v|^2,
    // cheap in the late steps where most tries happen
    std::vector<double> re(n * n, 0.0), im(n * n, 0.0);
    for (int j = 0; j < n; ++j) re[j * n + j] = 1;
    Eigen::VectorXcd v(n);
    std::vector<double> vr(n), vi(n), cr(n), ci(n), hr(n), hi(n);
    std::vector<double> th;
    th.reserve(n);
    for (int r = n; r > 0; --r) {
      double t = 0, norm2 = 0;
      for (int tries = 0;; ++tries) {
        if (tries > 1000000) throw ConvergenceError("TiltedEnsemble: rejection sampler stalled");
        t = kTwoPi * unif(rng);
        const double level = unif(rng) * bound_;
        fill_features(t, v);
        if (v.squaredNorm() <= level) continue;
        for (int i = 0; i < n; ++i) vr[i] = v(i).real(), vi[i] = v(i).imag();
        norm2 = 0;
        for (int j = 0; j < r; ++j) {
          const double* a = &re[j * n];
          const double* b = &im[j * n];
          double sr = 0, si = 0;
          for (int i = 0; i < n; ++i) {
            sr += a[i] * vr[i] + b[i] * vi[i];
            si += a[i] * vi[i] - b[i] * vr[i];
          }
          cr[j] = sr, ci[j] = si;
          norm2 += sr * sr + si * si;
        }
        if (level < norm2) break;
      }
      th.push_back(t);
      // Householder reflection sending the coefficients to the last axis; the
      // first r - 1 reflected columns span the complement of the accepted
      // direction
      const double inv = 1 / std::sqrt(norm2);
      for (int j = 0; j < r; ++j) hr[j] = cr[j] * inv, hi[j] = ci[j] * inv;
      const double a = std::hypot(hr[r - 1], hi[r - 1]);
      if (a > 0) {
        hr[r - 1] += hr[r - 1] / a, hi[r - 1] += hi[r - 1] / a;
      } else {
        hr[r - 1] += 1;
      }
      double h2 = 0;
      for (int j = 0; j < r; ++j) h2 += hr[j] * hr[j] + hi[j] * hi[j];
      // R <- R - (2 / |h|^2) (R h) h^*
      for (int i = 0; i < n; ++i) {
        double sr = 0, si = 0;
        for (int j = 0; j < r; ++j) {
          sr += re[j * n + i] * hr[j] - im[j * n + i] * hi[j];
          si += re[j * n + i] * hi[j] + im[j * n + i] * hr[j];
        }
        vr[i] = 2 * sr / h2, vi[i] = 2 * si / h2;
      }
      for (int j = 0; j < r - 1; ++j)
        for (int i = 0; i < n; ++i) {
          // (R h)_i conj(h_j)
          re[j * n + i] -= vr[i] * hr[j] + vi[i] * hi[j];
          im[j * n + i] -= vi[i] * hr[j] - vr[i] * hi[j];
        }
    }
    std::sort(th.begin(), th.end());
    return th;
  }

 private:
  void fill_features(double th, Eigen::VectorXcd& v) const {
    const cplx z = std::polar(1.0, th);
    const double s2 = 2 - 2 * z.real();  // |1 - z|^2
    double root_w = 1;
    for (int i = 0; i < k_; ++i) root_w *= s2;
    root_w = k_ ? std::sqrt(root_w) : 1.0;
    cplx p = 1, q = 1;  // Phi_j(z), Phi_j^*(z)
    for (int j = 0; j < n_; ++j) {
      v(j) = root_w * p / norm_[j];
      const cplx np = z * p - alpha_[j] * q;
      q = q - alpha_[j] * z * p;
      p = np;
    }
  }

  int n_, k_;
  std::vector<double> alpha_, norm_;
  double bound_ = 0;
};

/// Bin edges in rescaled units; uniform by default, arbitrary edges allowed
/// so that bins where the density vanishes can be widened.
struct BinSpec {
  std::vector<double> edges;

  static BinSpec uniform(double lo, double hi, int count) {
    if (!(hi > lo) || count < 1) throw DomainError("BinSpec: need hi > lo and count >= 1");
    BinSpec b;
    for (int i = 0; i <= count; ++i) b.edges.push_back(lo + (hi - lo) * i / count);
    return b;
  }

  std::size_t size() const { return edges.empty() ? 0 : edges.size() - 1; }
  double lo() const { return edges.front(); }
  double hi() const { return edges.back(); }

  void validate() const {
    if (edges.size() < 2) throw DomainError("BinSpec: need at least one bin");
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (!(edges[i] > edges[i - 1])) throw DomainError("BinSpec: edges must increase");
  }

  /// Index of the bin holding x, or size() when x is outside.
  std::size_t locate(double x) const {
    if (x < lo() || x >= hi()) return size();
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
  }
};

/// Weighted eigenvalue density in units x = theta (n + k) / 2 pi, theta in (-pi, pi].
struct WeightedHistogram {
  int k = 0;
  int n = 0;
  std::size_t samples = 0;
  double unfold = 0;  ///< n + k: the tilted ensemble behaves like n + k eigenvalues
  std::vector<double> edges;
  std::vector<double> density;
  std::vector<double> std_err;
  std::vector<double> effective;  ///< Kish effective sample count per bin
  double mean_weight = 0;         ///< mean of |Lambda|^{2k} / E|Lambda|^{2k}
  double mean_weight_err = 0;

  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
};

namespace detail {

struct HistSums {
  std::vector<double> y, yy, yw;
  double w = 0, ww = 0;

  explicit HistSums(std::size_t bins = 0) : y(bins), yy(bins), yw(bins) {}
};

}  // namespace detail

enum class TiltSampling {
  reweight,  ///< Haar samples carrying the weight |Lambda(1)|^{2k}
  direct,    ///< exact samples of the tilted ensemble, unit weight
};

struct HistOptions {
  unsigned threads = 0;
  TiltSampling sampling = TiltSampling::reweight;
  double min_effective = 100;  ///< per-bin floor on the Kish effective sample count
};

/// Monte Carlo over `samples` configurations. With reweighting each
/// eigenangle of a Haar unitary adds the normalized weight
/// |Lambda(1)|^{2k} / E|Lambda(1)|^{2k} to its bin and bins are divided by the
/// total weight; standard errors are those of a ratio estimator. Throws
/// SamplingError when a bin has fewer than 100 effective samples.
inline WeightedHistogram weighted_density_hist(int n, int k, std::size_t samples,
                                               const BinSpec& bins, std::uint64_t seed,
                                               const HistOptions& opt = {}) {
  check_dimension(n);
  if (k < 0 || k > 2) throw DomainError("weighted_density_hist: k must be 0, 1 or 2");
  if (samples < 10000) throw DomainError("weighted_density_hist: needs at least 1e4 samples");
  bins.validate();
  const std::size_t nb = bins.size();
  const double unfold = n + k;
  const double log_norm = std::log(cue_moment(n, k));
  const bool direct = opt.sampling == TiltSampling::direct;
  const std::optional<TiltedEnsemble> ens =
      direct ? std::optional<TiltedEnsemble>(TiltedEnsemble(n, k)) : std::nullopt;

  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<detail::HistSums> parts(chunks);
  parallel_chunks(chunks, opt.threads, [&](std::size_t c) {
    detail::HistSums s(nb);
    std::vector<int> hits(nb);
    for (std::size_t i = c * kChunk; i < std::min(samples, (c + 1) * kChunk); ++i) {
      const auto th = direct ? ens->sample(sample_seed(seed, i)) : cue_angles(n, sample_seed(seed, i));
      const double w = direct ? 1.0 : std::exp(k * log_abs_lambda_sq(th) - log_norm);
      std::fill(hits.begin(), hits.end(), 0);
      for (double t : th) {
        const std::size_t b = bins.locate((t > kPi ? t - kTwoPi : t) * unfold / kTwoPi);
        if (b < nb) hits[b]++;
      }
      s.w += w;
      s.ww += w * w;
      for (std::size_t b = 0; b < nb; ++b) {
        if (!hits[b]) continue;
        const double y = w * hits[b];
        s.y[b] += y;
        s.yy[b] += y * y;
        s.yw[b] += y * w;
      }
    }
    parts[c] = std::move(s);
  });
  detail::HistSums tot(nb);
  for (const auto& s : parts) {
    tot.w += s.w;
    tot.ww += s.ww;
    for (std::size_t b = 0; b < nb; ++b) {
      tot.y[b] += s.y[b];
      tot.yy[b] += s.yy[b];
      tot.yw[b] += s.yw[b];
    }
  }

  WeightedHistogram h;
  h.k = k;
  h.n = n;
  h.samples = samples;
  h.unfold = unfold;
  const double ns = static_cast<double>(samples);
  h.mean_weight = tot.w / ns;
  h.mean_weight_err = std::sqrt(std::max(0.0, tot.ww / ns - h.mean_weight * h.mean_weight) / ns);
  h.edges = bins.edges;
  for (std::size_t b = 0; b < nb; ++b) {
    const double bw = bins.edges[b + 1] - bins.edges[b];
    const double r = tot.y[b] / tot.w;
    // linearized variance of sum(y) / sum(w)
    const double dev = std::max(0.0, tot.yy[b] - 2 * r * tot.yw[b] + r * r * tot.ww);
    h.density.push_back(r / bw);
    h.std_err.push_back(std::sqrt(dev) / tot.w / bw);
    h.effective.push_back(tot.yy[b] > 0 ? tot.y[b] * tot.y[b] / tot.yy[b] : 0.0);
    if (h.effective.back() < opt.min_effective) {
      throw SamplingError("weighted_density_hist: bin [" + std::to_string(h.edges[b]) + ", " +
                          std::to_string(h.edges[b + 1]) + ") has " +
                          std::to_string(h.effective.back()) + " effective samples");
    }
  }
  return h;
}

struct KernelDeviation {
  double max_dev = 0;       ///< max |density - W| over the range
  double worst_stderr = 0;  ///< stderr of the bin attaining max_dev
  double max_sigma = 0;     ///< max |density - W| / stderr
  bool pass = false;        ///< every bin within max(abs_floor, sigmas * stderr)
};

/// Compares bins with |center| <= x_max to the bin average of W_U^k.
inline KernelDeviation compare_to_kernel(const WeightedHistogram& h, double x_max,
                                         double abs_floor = 0.02, double sigmas = 3) {
  KernelDeviation d;
  d.pass = true;
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    if (std::fabs(h.center(b)) > x_max) continue;
    const double lo = h.edges[b], hi = h.edges[b + 1];
    double target = 0;
    const auto& r = gauss_legendre<16>();
    for (std::size_t i = 0; i < 16; ++i)
      target += 0.5 * r.weights[i] * w_kernel(h.k, 0.5 * (lo + hi) + 0.5 * (hi - lo) * r.nodes[i]);
    const double dev = std::fabs(h.density[b] - target);
    if (dev > d.max_dev) {
      d.max_dev = dev;
      d.worst_stderr = h.std_err[b];
    }
    d.max_sigma = std::max(d.max_sigma, dev / h.std_err[b]);
    if (dev > std::max(abs_floor, sigmas * h.std_err[b])) d.pass = false;
  }
  return d;
}

struct PowerFit {
  double exponent = 0;
  double exponent_err = 0;
  double amplitude = 0;
  double chi2 = 0;
  std::size_t points = 0;
};

namespace detail {

/// Mean of |x|^p over [a, b].
inline double mean_abs_power(double a, double b, double p) {
  const auto prim = [p](double x) { return std::pow(std::fabs(x), p + 1) / (p + 1); };
  const double m = (a < 0 && b > 0) ? prim(a) + prim(b) : std::fabs(prim(b) - prim(a));
  return m / (b - a);
}

}  // namespace detail

/// Weighted least-squares fit of density = A |x|^p, each bin compared with the
/// bin average of A |x|^p. Uses bins that overlap [x_lo, x_hi] in |x| and do not
/// reach past x_hi; with whole_bins_only the bins must lie inside [x_lo, x_hi].
inline PowerFit fit_power_law(const WeightedHistogram& h, double x_lo, double x_hi,
                              bool whole_bins_only = false) {
  if (!(x_hi > x_lo) || x_lo < 0) throw DomainError("fit_power_law: need 0 <= x_lo < x_hi");
  std::vector<std::size_t> use;
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    const double a = h.edges[b], c = h.edges[b + 1];
    const double far = std::max(std::fabs(a), std::fabs(c));
    const double near = (a < 0 && c > 0) ? 0.0 : std::min(std::fabs(a), std::fabs(c));
    if (far > x_hi * (1 + 1e-12) || far <= x_lo) continue;
    if (whole_bins_only && near < x_lo * (1 - 1e-12)) continue;
    if (!(h.std_err[b] > 0)) continue;
    use.push_back(b);
  }
  PowerFit fit;
  fit.points = use.size();
  if (fit.points < 3) throw SamplingError("fit_power_law: too few usable bins");
  // chi^2 with the amplitude profiled out
  const auto chi2 = [&](double p, double* amp = nullptr) {
    double dm = 0, mm = 0;
    for (auto b : use) {
      const double m = detail::mean_abs_power(h.edges[b], h.edges[b + 1], p);
      const double w = 1 / (h.std_err[b] * h.std_err[b]);
      dm += w * h.density[b] * m;
      mm += w * m * m;
    }
    const double A = dm / mm;
    double c2 = 0;
    for (auto b : use) {
      const double r = (h.density[b] - A * detail::mean_abs_power(h.edges[b], h.edges[b + 1], p)) /
                       h.std_err[b];
      c2 += r * r;
    }
    if (amp) *amp = A;
    return c2;
  };
  const auto best = boost::math::tools::brent_find_minima([&](double p) { return chi2(p); }, 0.0,
                                                          12.0, 40);
  fit.exponent = best.first;
  fit.chi2 = chi2(fit.exponent, &fit.amplitude);
  const double e = 1e-3;
  const double curv = (chi2(fit.exponent + e) - 2 * fit.chi2 + chi2(fit.exponent - e)) / (e * e);
  fit.exponent_err = curv > 0 ? std::sqrt(2 / curv) : std::numeric_limits<double>::infinity();
  return fit;
}

/// Haar checks on plain samples: E|Tr U|^2 = 1 and a flat one-point density.
struct HaarDiagnostics {
  std::size_t samples = 0;
  double trace_sq = 0;
  double trace_sq_err = 0;
  std::vector<double> angle_density;  ///< per bin of [0, 2 pi), normalized to 1
  std::vector<double> angle_err;
};

inline HaarDiagnostics haar_diagnostics(int n, std::size_t samples, int bins, std::uint64_t seed,
                                        unsigned threads = 0) {
  check_dimension(n);
  if (samples < 100 || bins < 1) throw DomainError("haar_diagnostics: too few samples or bins");
  const auto nb = static_cast<std::size_t>(bins);
  struct Sums {
    double t = 0, tt = 0;
    std::vector<double> c, cc;
  };
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Sums> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    Sums s;
    s.c.assign(nb, 0);
    s.cc.assign(nb, 0);
    std::vector<int> hits(nb);
    for (std::size_t i = c * kChunk; i < std::min(samples, (c + 1) * kChunk); ++i) {
      const auto th = cue_angles(n, sample_seed(seed, i));
      cplx tr = 0;
      std::fill(hits.begin(), hits.end(), 0);
      for (double t : th) {
        tr += std::polar(1.0, t);
        hits[std::min(nb - 1, static_cast<std::size_t>(t / kTwoPi * bins))]++;
      }
      const double a = std::norm(tr);
      s.t += a;
      s.tt += a * a;
      for (std::size_t b = 0; b < nb; ++b) {
        s.c[b] += hits[b];
        s.cc[b] += static_cast<double>(hits[b]) * hits[b];
      }
    }
    parts[c] = std::move(s);
  });
  HaarDiagnostics d;
  d.samples = samples;
  std::vector<double> c(nb), cc(nb);
  double t = 0, tt = 0;
  for (const auto& s : parts) {
    t += s.t;
    tt += s.tt;
    for (std::size_t b = 0; b < nb; ++b) {
      c[b] += s.c[b];
      cc[b] += s.cc[b];
    }
  }
  const double ns = static_cast<double>(samples);
  d.trace_sq = t / ns;
  d.trace_sq_err = std::sqrt((tt / ns - d.trace_sq * d.trace_sq) / ns);
  const double expect = static_cast<double>(n) / bins;
  for (std::size_t b = 0; b < nb; ++b) {
    const double m = c[b] / ns;
    d.angle_density.push_back(m / expect);
    d.angle_err.push_back(std::sqrt((cc[b] / ns - m * m) / ns) / expect);
  }
  return d;
}

/// Pair correlation of eigenangles in units x = theta n / 2 pi, bins over
/// [lo, hi), normalized so the sine-kernel limit is 1 - sinc^2.
struct PairCorrelation {
  std::vector<double> edges, density, std_err;
};

inline PairCorrelation pair_correlation(int n, std::size_t samples, const BinSpec& bins,
                                        std::uint64_t seed, unsigned threads = 0) {
  check_dimension(n);
  bins.validate();
  const std::size_t nb = bins.size();
  struct Sums {
    std::vector<double> c, cc;
  };
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Sums> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    Sums s{std::vector<double>(nb), std::vector<double>(nb)};
    std::vector<int> hits(nb);
    for (std::size_t i = c * kChunk; i < std::min(samples, (c + 1) * kChunk); ++i) {
      const auto th = cue_angles(n, sample_seed(seed, i));
      std::fill(hits.begin(), hits.end(), 0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          double d = th[b] - th[a];
          if (d < 0) d += kTwoPi;
          const double x = d * n / kTwoPi;
          const std::size_t bin = bins.locate(x);
          if (bin < nb) hits[bin]++;
        }
      for (std::size_t b = 0; b < nb; ++b) {
        s.c[b] += hits[b];
        s.cc[b] += static_cast<double>(hits[b]) * hits[b];
      }
    }
    parts[c] = std::move(s);
  });
  PairCorrelation pc;
  const double ns = static_cast<double>(samples);
  pc.edges = bins.edges;
  for (std::size_t b = 0; b < nb; ++b) {
    // the expected number of ordered pairs per bin is n bw (1 - K^2)
    const double norm = n * (bins.edges[b + 1] - bins.edges[b]);
    double c = 0, cc = 0;
    for (const auto& s : parts) {
      c += s.c[b];
      cc += s.cc[b];
    }
    const double m = c / ns;
    pc.density.push_back(m / norm);
    pc.std_err.push_back(std::sqrt(std::max(0.0, cc / ns - m * m) / ns) / norm);
  }
  return pc;
}

/// Exact finite-n CUE pair correlation 1 - (sin(pi x) / (n sin(pi x / n)))^2.
inline double cue_pair_density(int n, double x) {
  const double s = std::sin(kPi * x / n);
  if (std::fabs(s) < 1e-300) return 0.0;
  const double r = std::sin(kPi * x) / (n * s);
  return 1 - r * r;
}

inline nlohmann::json to_json(const WeightedHistogram& h) {
  return {{"k", h.k},
          {"n", h.n},
          {"samples", h.samples},
          {"unfold", h.unfold},
          {"mean_weight", h.mean_weight},
          {"mean_weight_err", h.mean_weight_err},
          {"bins", h.density.size()}};
}

}  // namespace wld
