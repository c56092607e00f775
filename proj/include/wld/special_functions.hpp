#pragma once

// Zeta and gamma machinery: Euler-Maclaurin zeta with derivatives, the
// Stieltjes expansion at s = 1, Riemann-Siegel on the critical line, complex
// log-gamma / digamma, the archimedean density Omega(r), and a von Mangoldt
// table.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "wld/errors.hpp"

namespace wld {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Riemann-Siegel is used from this height up; Euler-Maclaurin below it.
/// With C0..C4 the Gabcke remainder bound 0.017 t^(-11/4) drops under 1e-10
/// only around t = 1000.
inline constexpr double kRiemannSiegelMin = 1000.0;

struct CriticalValue {
  double t = 0;
  cplx zeta;     ///< zeta(1/2 + i t)
  double z = 0;  ///< Hardy Z(t), real
  double err = 0;
};

namespace detail {

/// B_{2j} / (2j)! for j = 1..kBernoulliTerms.
inline constexpr int kBernoulliTerms = 40;

inline const std::array<double, kBernoulliTerms + 1>& bernoulli_over_factorial() {
  static const auto table = [] {
    std::array<double, kBernoulliTerms + 1> b{};
    for (int j = 1; j <= kBernoulliTerms; ++j)
      b[j] = boost::math::bernoulli_b2n<double>(j) /
             boost::math::factorial<double>(static_cast<unsigned>(2 * j));
    return b;
  }();
  return table;
}

inline double bernoulli_2j(int j) { return boost::math::bernoulli_b2n<double>(j); }

}  // namespace detail

/// log Gamma(z) on the branch continuous in Re z > 0 (sum of principal logs of
/// the shift factors plus Stirling).
inline cplx log_gamma(cplx z) {
  if (!(z.real() > 0)) throw DomainError("log_gamma: requires Re z > 0");
  cplx shift{0, 0};
  while (std::abs(z) < 18.0 || z.real() < 10.0) {
    shift += std::log(z);
    z += 1.0;
  }
  cplx acc = (z - 0.5) * std::log(z) - z + 0.5 * std::log(kTwoPi);
  const cplx inv = 1.0 / z, inv2 = inv * inv;
  cplx p = inv;
  for (int j = 1; j <= 12; ++j) {
    acc += detail::bernoulli_2j(j) / (2.0 * j * (2.0 * j - 1)) * p;
    p *= inv2;
  }
  return acc - shift;
}

/// Digamma Psi(z) = Gamma'/Gamma for Re z > 0.
inline cplx digamma(cplx z) {
  if (!(z.real() > 0)) throw DomainError("digamma: requires Re z > 0");
  cplx shift{0, 0};
  while (std::abs(z) < 18.0 || z.real() < 10.0) {
    shift += 1.0 / z;
    z += 1.0;
  }
  cplx acc = std::log(z) - 0.5 / z;
  const cplx inv2 = 1.0 / (z * z);
  cplx p = inv2;
  for (int j = 1; j <= 12; ++j) {
    acc -= detail::bernoulli_2j(j) / (2.0 * j) * p;
    p *= inv2;
  }
  return acc - shift;
}

namespace detail {

/// Stirling series for theta(t), t >= 10, in extended precision. The phase
/// reaches ~t log t so double rounding alone would cost ~1e-10 at t = 1e6.
inline long double theta_stirling(long double t) {
  const long double i1 = 1.0L / t, i2 = i1 * i1;
  return 0.5L * t * std::log(t / (2 * std::numbers::pi_v<long double>)) - 0.5L * t -
         std::numbers::pi_v<long double> / 8 +
         i1 * (1.0L / 48 +
               i2 * (7.0L / 5760 +
                     i2 * (31.0L / 80640 + i2 * (127.0L / 430080 + i2 * (511.0L / 1216512)))));
}

}  // namespace detail

/// Riemann-Siegel theta. Stirling asymptotic series (leading part plus five
/// correction terms) for t >= 10, log-gamma below.
inline double riemann_siegel_theta(double t) {
  const double at = std::fabs(t);
  double th;
  if (at >= 10.0)
    th = static_cast<double>(detail::theta_stirling(at));
  else
    th = log_gamma(cplx(0.25, 0.5 * at)).imag() - 0.5 * at * std::log(kPi);
  return t < 0 ? -th : th;
}

/// zeta and its first two derivatives at one point.
struct ZetaJet {
  cplx value;
  cplx d1;
  cplx d2;
  double err = 0;  ///< estimate for |value| error
};

/// Euler-Maclaurin evaluation of zeta(s) and derivatives up to `order` (<= 2),
/// valid for every s != 1 with Re s > -20.
inline ZetaJet zeta_em(cplx s, int order = 0) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw DomainError("zeta: non-finite argument");
  constexpr int kTerms = detail::kBernoulliTerms;
  const double as = std::abs(s);
  const int n_cut = std::max(12, static_cast<int>(std::ceil((as + 2.0 * kTerms) / kPi)) + 4);
  const auto& bf = detail::bernoulli_over_factorial();

  ZetaJet out;
  cplx s0{0, 0}, s1{0, 0}, s2{0, 0};
  for (int n = n_cut - 1; n >= 1; --n) {
    const double ln = std::log(static_cast<double>(n));
    const cplx term = std::exp(-s * ln);
    s0 += term;
    if (order >= 1) s1 -= ln * term;
    if (order >= 2) s2 += ln * ln * term;
  }
  const double nn = n_cut;
  const double lnn = std::log(nn);
  const cplx n1s = std::exp((1.0 - s) * lnn);  // N^{1-s}
  const cplx ns = std::exp(-s * lnn);           // N^{-s}
  const cplx inv = 1.0 / (s - 1.0);

  s0 += n1s * inv + 0.5 * ns;
  if (order >= 1) s1 += n1s * (-lnn * inv - inv * inv) - 0.5 * lnn * ns;
  if (order >= 2)
    s2 += n1s * (lnn * lnn * inv + 2.0 * lnn * inv * inv + 2.0 * inv * inv * inv) +
          0.5 * lnn * lnn * ns;

  // Tail: sum_j B_{2j}/(2j)! * P_j(s) * N^{-s-2j+1}, P_j = s(s+1)...(s+2j-2).
  cplx p0 = s, p1 = 1.0, p2 = 0.0;  // P_1 and its derivatives
  cplx npow = ns / nn;              // N^{-s-1}
  double last = 0;
  for (int j = 1; j <= kTerms; ++j) {
    const double c = bf[j];
    const cplx t0 = c * p0 * npow;
    s0 += t0;
    if (order >= 1) s1 += c * (p1 - lnn * p0) * npow;
    if (order >= 2) s2 += c * (p2 - 2.0 * lnn * p1 + lnn * lnn * p0) * npow;
    last = std::abs(t0);
    if (last < 1e-18 * std::abs(s0) && j > 2) break;
    // P_{j+1} = P_j (s + 2j - 1)(s + 2j)
    for (int i = 2 * j - 1; i <= 2 * j; ++i) {
      const cplx f = s + static_cast<double>(i);
      p2 = p2 * f + 2.0 * p1;
      p1 = p1 * f + p0;
      p0 = p0 * f;
    }
    npow /= nn * nn;
  }
  out.value = s0;
  out.d1 = s1;
  out.d2 = s2;
  out.err = last + 4e-16 * (static_cast<double>(n_cut) + std::abs(s0)) *
                       (1.0 + std::fabs(s.imag()) * lnn * 1e-2);
  return out;
}

inline cplx zeta(cplx s) { return zeta_em(s, 0).value; }

/// Euler-Maclaurin remainder zeta(s) - sum_{n<N} n^{-s} for a caller that
/// forms the partial sum itself. Needs N > (|s| + 2 kBernoulliTerms) / pi.
inline cplx zeta_em_tail(cplx s, int n_cut) {
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
  constexpr int kTerms = detail::kBernoulliTerms;
  if (n_cut < 2 || n_cut * kPi < std::abs(s) + 2.0 * kTerms)
    throw DomainError("zeta_em_tail: cut too small for this s");
  const auto& bf = detail::bernoulli_over_factorial();
  const double nn = n_cut, lnn = std::log(nn);
  const cplx ns = std::exp(-s * lnn);
  cplx acc = ns * nn / (s - 1.0) + 0.5 * ns;
  cplx p = s, npow = ns / nn;
  for (int j = 1; j <= kTerms; ++j) {
    const cplx t = bf[j] * p * npow;
    acc += t;
    if (std::abs(t) < 1e-18 * std::abs(acc) && j > 2) break;
    p *= (s + (2.0 * j - 1)) * (s + 2.0 * j);
    npow /= nn * nn;
  }
  return acc;
}

namespace detail {

/// Stieltjes constants gamma_0..gamma_11.
inline constexpr std::array<double, 12> kStieltjes = {
    0.577215664901532860607,    -0.0728158454836767248606,  -0.00969036319287231848453,
    0.00205383442030334586616,  0.00232537006546730005747,  0.000793323817301062701753,
    -0.000238769345430199609872, -0.000527289567057751046074, -0.000352123353803039509602,
    -0.0000343947744180880481779, 0.000205332814909064794684, 0.000270184439543903526672};

/// h(u) = u zeta(1+u) = 1 + u g(u) with g the regular part; returns h, h', h''.
inline std::array<cplx, 3> stieltjes_regular(cplx u) {
  // g(u) = sum_n c_n u^n with c_n = (-1)^n gamma_n / n!, by Horner.
  std::array<double, kStieltjes.size()> c{};
  double fact = 1;
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    c[n] = (n % 2 == 0 ? 1.0 : -1.0) * kStieltjes[n] / fact;
  }
  cplx g{0, 0}, g1{0, 0}, g2{0, 0};
  for (std::size_t i = c.size(); i-- > 0;) {
    g2 = g2 * u + 2.0 * g1;
    g1 = g1 * u + g;
    g = g * u + c[i];
  }
  return {1.0 + u * g, g + u * g1, 2.0 * g1 + u * g2};
}

}  // namespace detail

/// zeta(1+u), (zeta'/zeta)(1+u) or (zeta'/zeta)'(1+u) for order 0, 1, 2,
/// taking the offset u itself: for tiny shifts 1+u is not representable
/// and forming it first would perturb the 1/u pole term.
inline cplx zeta_one_plus(cplx u, int order) {
  if (order < 0 || order > 2) throw DomainError("zeta_one_plus: order must be 0, 1 or 2");
  if (u == cplx(0.0, 0.0)) throw PoleError("zeta_one_plus: pole at s = 1");
  if (std::abs(u) < 0.5) {
    const auto h = detail::stieltjes_regular(u);
    if (order == 0) return h[0] / u;
    if (std::abs(h[0]) < 1e-300) throw PoleError("zeta_one_plus: zeta vanishes");
    const cplx r = h[1] / h[0];
    if (order == 1) return -1.0 / u + r;
    return 1.0 / (u * u) + (h[2] * h[0] - h[1] * h[1]) / (h[0] * h[0]);
  }
  const cplx s = 1.0 + u;
  const ZetaJet j = zeta_em(s, order);
  if (order == 0) return j.value;
  if (std::abs(j.value) < 1e-14) throw PoleError("zeta_one_plus: zeta vanishes");
  const cplx r = j.d1 / j.value;
  if (order == 1) return r;
  return j.d2 / j.value - r * r;
}

/// Near the 1-line: order 0 -> zeta(s), 1 -> (zeta'/zeta)(s),
/// 2 -> (zeta'/zeta)'(s). Uses the Laurent/Stieltjes expansion for
/// |s - 1| < 1/2 and Euler-Maclaurin otherwise.
inline cplx zeta_near_one(cplx s, int order) {
  if (order < 0 || order > 2) throw DomainError("zeta_near_one: order must be 0, 1 or 2");
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta_near_one: pole at s = 1");
  return zeta_one_plus(s - 1.0, order);
}

namespace detail {

/// Taylor coefficients in w = p - 1/2 of the Riemann-Siegel correction terms
/// C_0..C_4, generated from Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
/// by a Cauchy integral on |w| = 1.
struct RiemannSiegelTables {
  static constexpr int kOrder = 4;
  static constexpr int kDegree = 44;
  std::array<std::array<double, kDegree + 1>, kOrder + 1> coeff{};

  RiemannSiegelTables() {
    constexpr int kMaxDeriv = 12;
    constexpr int kNeed = kDegree + kMaxDeriv + 1;
    constexpr int kPoints = 512;
    std::vector<std::complex<long double>> vals(kPoints);
    const long double pi = std::numbers::pi_v<long double>;
    for (int m = 0; m < kPoints; ++m) {
      const long double th = 2 * pi * m / kPoints;
      const std::complex<long double> w(std::cos(th), std::sin(th));
      const std::complex<long double> p = w + 0.5L;
      vals[m] = std::cos(2 * pi * (p * p - p - 1.0L / 16)) / std::cos(2 * pi * p);
    }
    // a[n] = Psi^{(n)}(1/2) / n!
    std::array<long double, kNeed + 1> a{};
    for (int n = 0; n <= kNeed; ++n) {
      std::complex<long double> acc = 0;
      for (int m = 0; m < kPoints; ++m) {
        const long double th = -2 * pi * n * m / kPoints;
        acc += vals[m] * std::complex<long double>(std::cos(th), std::sin(th));
      }
      a[n] = (n % 2 == 0) ? acc.real() / kPoints : 0.0L;  // Psi is even about 1/2
    }
    // Psi^{(m)}(1/2 + w) = sum_n a[n+m] (n+m)!/n! w^n
    auto deriv_coeff = [&](int m, int n) {
      long double f = 1;
      for (int i = n + 1; i <= n + m; ++i) f *= i;
      return a[n + m] * f;
    };
    const long double p2 = pi * pi, p4 = p2 * p2, p6 = p4 * p2, p8 = p4 * p4;
    struct Term {
      int k, m;
      long double c;
    };
    const Term terms[] = {
        {0, 0, 1.0L},
        {1, 3, -1.0L / (96 * p2)},
        {2, 2, 1.0L / (64 * p2)},
        {2, 6, 1.0L / (18432 * p4)},
        {3, 1, -1.0L / (64 * p2)},
        {3, 5, -1.0L / (3840 * p4)},
        {3, 9, -1.0L / (5308416 * p6)},
        {4, 0, 1.0L / (128 * p2)},
        {4, 4, 19.0L / (24576 * p4)},
        {4, 8, 11.0L / (5898240 * p6)},
        {4, 12, 1.0L / (2038431744.0L * p8)},
    };
    std::array<std::array<long double, kDegree + 1>, kOrder + 1> acc{};
    for (const auto& term : terms)
      for (int n = 0; n <= kDegree; ++n) acc[term.k][n] += term.c * deriv_coeff(term.m, n);
    for (int k = 0; k <= kOrder; ++k)
      for (int n = 0; n <= kDegree; ++n) coeff[k][n] = static_cast<double>(acc[k][n]);
  }

  double eval(int k, double w) const {
    double r = 0;
    for (int n = kDegree; n >= 0; --n) r = r * w + coeff[k][n];
    return r;
  }
};

inline const RiemannSiegelTables& rs_tables() {
  static const RiemannSiegelTables tables;
  return tables;
}

}  // namespace detail

/// Hardy Z(t) by the Riemann-Siegel formula with corrections C_0..C_4.
/// Returns {Z, error bound}. Requires t >= 2 pi.
inline std::pair<double, double> riemann_siegel_z(double t) {
  if (!(t >= kTwoPi)) throw DomainError("riemann_siegel_z: requires t >= 2 pi");
  const double a = std::sqrt(t / kTwoPi);
  const auto n_terms = static_cast<std::int64_t>(std::floor(a));
  const double p = a - static_cast<double>(n_terms);
  const long double tl = t;
  const long double th = detail::theta_stirling(tl);
  constexpr long double kTwoPiL = 2 * std::numbers::pi_v<long double>;
  double sum = 0;
  for (std::int64_t n = 1; n <= n_terms; ++n) {
    const long double ph = std::fmod(th - tl * std::log(static_cast<long double>(n)), kTwoPiL);
    sum += std::cos(static_cast<double>(ph)) / std::sqrt(static_cast<double>(n));
  }
  sum *= 2;
  const auto& tab = detail::rs_tables();
  const double q = std::sqrt(kTwoPi / t);  // (t/2pi)^{-1/2}
  double corr = 0, qk = 1;
  for (int k = 0; k <= detail::RiemannSiegelTables::kOrder; ++k) {
    corr += tab.eval(k, p - 0.5) * qk;
    qk *= q;
  }
  corr *= std::sqrt(q) * ((n_terms % 2 == 1) ? 1.0 : -1.0);
  const double bound = 0.017 * std::pow(t, -2.75) + 2e-16 * (1.0 + a) +
                       1e-19 * static_cast<double>(th) * a;
  return {sum + corr, bound};
}

/// zeta(1/2 + i t) together with Hardy's Z(t).
inline CriticalValue zeta_critical(double t) {
  if (!std::isfinite(t)) throw DomainError("zeta_critical: non-finite t");
  if (t < 0) throw DomainError("zeta_critical: requires t >= 0");
  CriticalValue out;
  out.t = t;
  const double th =
      t >= 10.0 ? static_cast<double>(std::fmod(detail::theta_stirling(t),
                                                 2 * std::numbers::pi_v<long double>))
                : riemann_siegel_theta(t);
  const cplx rot = std::polar(1.0, th);
  if (t >= kRiemannSiegelMin) {
    const auto [z, err] = riemann_siegel_z(t);
    out.z = z;
    out.zeta = z * std::conj(rot);
    out.err = err;
  } else {
    const ZetaJet j = zeta_em(cplx(0.5, t));
    const cplx zr = rot * j.value;
    out.zeta = j.value;
    out.z = zr.real();
    out.err = j.err + std::fabs(zr.imag()) + 1e-15;
  }
  return out;
}

inline double hardy_z(double t) { return zeta_critical(t).z; }

/// Omega(r) = 1/2 Psi(1/4 + i r/2) + 1/2 Psi(1/4 - i r/2) - log pi.
inline double omega_density(double r) {
  if (!std::isfinite(r)) throw DomainError("omega_density: non-finite r");
  return digamma(cplx(0.25, 0.5 * r)).real() - std::log(kPi);
}

/// Lambda(n) for n <= limit.
class PrimeTable {
 public:
  explicit PrimeTable(std::int64_t limit) : limit_(limit), lambda_(std::max<std::int64_t>(limit, 1) + 1, 0.0) {
    if (limit < 1) throw DomainError("PrimeTable: limit must be >= 1");
    std::vector<bool> composite(limit + 1, false);
    for (std::int64_t p = 2; p <= limit; ++p) {
      if (composite[p]) continue;
      for (std::int64_t m = p * p; m <= limit; m += p) composite[m] = true;
      const double lp = std::log(static_cast<double>(p));
      for (std::int64_t q = p; q <= limit; q *= p) {
        lambda_[q] = lp;
        if (q > limit / p) break;
      }
    }
  }

  std::int64_t limit() const { return limit_; }

  double lambda(std::int64_t n) const {
    if (n < 1 || n > limit_) throw DomainError("PrimeTable: n out of range");
    return lambda_[n];
  }

  /// (n, Lambda(n)) for every prime power n <= limit, sorted by n.
  std::vector<std::pair<std::int64_t, double>> entries() const {
    std::vector<std::pair<std::int64_t, double>> out;
    for (std::int64_t n = 2; n <= limit_; ++n)
      if (lambda_[n] != 0.0) out.emplace_back(n, lambda_[n]);
    return out;
  }

  /// Chebyshev psi(N) = sum_{n <= N} Lambda(n).
  double chebyshev_psi(std::int64_t n_max) const {
    double acc = 0;
    for (std::int64_t n = 2; n <= std::min(n_max, limit_); ++n) acc += lambda_[n];
    return acc;
  }

 private:
  std::int64_t limit_;
  std::vector<double> lambda_;
};

}  // namespace wld
