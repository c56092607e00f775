#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <vector>

#include "errors.hpp"
#include "kernels_identities.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"
#include "test_functions.hpp"

namespace wld {

/// Shifts of the twisted moments. gamma_s and delta_s only enter the k = 2
/// local factors; the names avoid a clash with zero ordinates.
struct ShiftSet {
  cplx alpha{0, 0};
  cplx beta{0, 0};
  cplx gamma_s{0, 0};
  cplx delta_s{0, 0};

  bool zero() const {
    return alpha == cplx{} && beta == cplx{} && gamma_s == cplx{} && delta_s == cplx{};
  }
};

struct MainTermContext {
  double T = 1000;
  WeightFunction phi = WeightFunction::canonical();
  ShiftSet shifts{};

  void validate() const {
    if (!(T >= 100)) throw DomainError("MainTermContext: T must be >= 100");
    const double cap = 10 / std::log(T);
    for (cplx z : {shifts.alpha, shifts.beta, shifts.gamma_s, shifts.delta_s})
      if (std::abs(z) > cap) throw DomainError("MainTermContext: shift exceeds 10/log T");
  }
  double L() const { return std::log(T / kTwoPi); }
};

/// phi~(1), phi~'(1), phi~''(1).
struct MellinJet {
  double m0, m1, m2;
};

inline MellinJet mellin_jet(const WeightFunction& phi) {
  return {phi.mellin(1.0, 0).real(), phi.mellin(1.0, 1).real(), phi.mellin(1.0, 2).real()};
}

// ---------------------------------------------------------------------------
// F_gamma on the line Re s = 2

namespace detail {

/// sum_{n<N} c_n n^{-i tau} along tau = tau0 + j h, advanced by rotating a
/// phasor per term instead of calling exp. Reseeded from exact phases
/// every block so rounding does not accumulate.
class PhasorSum {
 public:
  void seed(const std::vector<cplx>& coeff, const std::vector<long double>& freq, long double tau,
            double h) {
    cur_.resize(coeff.size());
    step_.resize(coeff.size());
    for (std::size_t n = 0; n < coeff.size(); ++n) {
      const long double ph = std::fmod(tau * freq[n], 2 * std::numbers::pi_v<long double>);
      cur_[n] = coeff[n] * std::polar(1.0, static_cast<double>(ph));
      step_[n] = std::polar(1.0, static_cast<double>(h * freq[n]));
    }
  }
  cplx value() const {
    cplx acc{0, 0};
    for (const auto& c : cur_) acc += c;
    return acc;
  }
  void advance() {
    for (std::size_t n = 0; n < cur_.size(); ++n) cur_[n] *= step_[n];
  }

 private:
  std::vector<cplx> cur_, step_;
};

/// Samples g(tau) = phi~(2-g+i tau) x^{1-g+i tau} zeta(2+g+i tau) zeta(2-g+i tau)
/// for tau = dir * j * h.
class FGammaSweep {
 public:
  static constexpr int kBlock = 256;

  FGammaSweep(const WeightFunction& phi, cplx g, double x, double h, int dir)
      : phi_(phi), g_(g), logx_(std::log(x)), h_(h), dir_(dir) {}

  cplx next() {
    if (j_ % kBlock == 0) reseed();
    const double tau = dir_ * j_ * h_;
    const cplx s(2.0, tau);
    const cplx z1 = d1_.value() + zeta_em_tail(s + g_, n_cut_);
    const cplx z2 = d2_.value() + zeta_em_tail(s - g_, n_cut_);
    const cplx ph = mellin_.value();
    const long double ang = std::fmod(static_cast<long double>(tau) * logx_,
                                      2 * std::numbers::pi_v<long double>);
    const cplx xp = std::exp((1.0 - g_) * static_cast<double>(logx_)) * std::polar(1.0, static_cast<double>(ang));
    d1_.advance();
    d2_.advance();
    mellin_.advance();
    ++j_;
    return ph * xp * z1 * z2;
  }
  double tau() const { return dir_ * j_ * h_; }

 private:
  void reseed() {
    const double tau0 = dir_ * j_ * h_;
    const double tau_end = std::fabs(tau0) + kBlock * h_ + 1;
    const double reach = tau_end + std::abs(g_) + 2;
    n_cut_ = static_cast<int>(std::ceil((reach + 2.0 * kBernoulliTerms) / kPi)) + 4;
    std::vector<cplx> c1(n_cut_ - 1), c2(n_cut_ - 1);
    std::vector<long double> fr(n_cut_ - 1);
    for (int n = 1; n < n_cut_; ++n) {
      const double ln = std::log(static_cast<double>(n));
      c1[n - 1] = std::exp(-(2.0 + g_) * ln);
      c2[n - 1] = std::exp(-(2.0 - g_) * ln);
      fr[n - 1] = -std::log(static_cast<long double>(n));
    }
    const double step = dir_ * h_;
    d1_.seed(c1, fr, tau0, step);
    d2_.seed(c2, fr, tau0, step);

    const auto& tab = phi_.table(phi_.nodes_for(tau_end + std::fabs(g_.imag())));
    std::vector<cplx> cm;
    std::vector<long double> fm;
    for (std::size_t k = 1; k + 1 < tab.u.size(); ++k) {
      if (tab.w[k] == 0) continue;
      cm.push_back(tab.h * tab.w[k] * std::exp((2.0 - g_) * tab.u[k]));
      fm.push_back(tab.u[k]);
    }
    mellin_.seed(cm, fm, tau0, step);
  }

  const WeightFunction& phi_;
  cplx g_;
  long double logx_;
  double h_;
  int dir_;
  long j_ = 0;
  int n_cut_ = 0;
  PhasorSum d1_, d2_, mellin_;
};

}  // namespace detail

struct FGammaResult {
  cplx value;
  double truncation_height = 0;  ///< largest |tau| sampled
  std::size_t nodes = 0;
  double tail_bound = 0;  ///< estimate of the discarded part
};

/// F_gamma(x) = (1/2 pi i) int_{(2)} phi~(s-g) x^{s-g-1} zeta(s+g) zeta(s-g) ds
/// by the trapezoid rule in tau. The step keeps the strip aliasing error
/// near e^-37; each direction stops once the phi~ decay envelope
/// exp(-c sqrt(tau)) puts the rest below tail_tol, or once the samples
/// have sunk into rounding noise (large x).
inline FGammaResult f_gamma(cplx g, double x, const WeightFunction& phi, double tail_tol = 1e-10) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("f_gamma: x must be positive");
  if (!(std::fabs(g.real()) < 1)) throw DomainError("f_gamma: need |Re gamma| < 1");
  const double d = 0.8 * (1 - std::fabs(g.real()));
  const double h = kTwoPi * d / (37 + d * (std::fabs(std::log(x)) + std::log(phi.b()) + 2));
  constexpr double kC = 0.5;        // conservative decay rate of phi~ on vertical lines
  constexpr double kWindow = 20;    // width in tau of the envelope window
  constexpr double kMaxTau = 2e5;

  // Rounding floor of one sample: the Mellin sum cancels terms of total size
  // about phi~(2 - Re g), scaled by x^{1 - Re g} and the two zeta factors.
  const double zmax = std::real(zeta(cplx(2.0 - std::fabs(g.real()), 0)));
  const double noise = 1e-14 * std::pow(x, 1 - g.real()) *
                       std::abs(phi.mellin(cplx(2.0 - g.real(), 0))) * zmax * zmax;

  FGammaResult out;
  cplx sum{0, 0};
  for (int dir : {1, -1}) {
    detail::FGammaSweep sweep(phi, g, x, h, dir);
    if (dir < 0) sweep.next();  // tau = 0 already counted
    std::deque<double> window;
    const std::size_t wlen = static_cast<std::size_t>(kWindow / h) + 1;
    double tail = 0;
    while (true) {
      const double tau = std::fabs(sweep.tau());
      const cplx v = sweep.next();
      sum += v;
      ++out.nodes;
      window.push_back(std::abs(v));
      if (window.size() > wlen) window.pop_front();
      if (tau > 50 && window.size() == wlen) {
        const double env = *std::max_element(window.begin(), window.end());
        tail = env * (2 / kC) * (std::sqrt(tau) + 1 / kC) / kTwoPi;
        if (tail < tail_tol || env < noise) {
          out.truncation_height = std::max(out.truncation_height, tau);
          break;
        }
      }
      if (tau > kMaxTau)
        throw ConvergenceError("f_gamma: phi~ decay not reached by tau = 2e5");
    }
    out.tail_bound += tail;
  }
  out.value = sum * h / kTwoPi;
  return out;
}

/// Large-x behaviour: phi~(1-2g) zeta(1-2g) x^{-2g} + phi~(1) zeta(1+2g),
/// or its limit phi~(1)(log x + 2 gamma_E) + phi~'(1) at g = 0.
inline cplx f_gamma_asymptotic(cplx g, double x, const WeightFunction& phi) {
  if (!(x > 0)) throw DomainError("f_gamma_asymptotic: x must be positive");
  if (g == cplx{}) {
    const auto m = mellin_jet(phi);
    return m.m0 * (std::log(x) + 2 * kEulerGamma) + m.m1;
  }
  return phi.mellin(1.0 - 2.0 * g) * zeta_one_plus(-2.0 * g, 0) * std::exp(-2.0 * g * std::log(x)) +
         phi.mellin(1.0) * zeta_one_plus(2.0 * g, 0);
}

/// Same function through the Dirichlet series: (1/x) sum_n phi(n/x) n^{-g} sum_{ab=n} a^{-g} b^g.
/// Exact up to rounding; cost O(x log x).
inline cplx f_gamma_divisor(cplx g, double x, const WeightFunction& phi) {
  if (!(x > 0) || x > 1e8) throw DomainError("f_gamma_divisor: need 0 < x <= 1e8");
  const long lo = static_cast<long>(std::floor(x * phi.a())) + 1;
  const long hi = static_cast<long>(std::ceil(x * phi.b()));
  if (hi < 1) return 0;
  std::vector<cplx> sig(hi + 1, 0.0);
  for (long a = 1; a <= hi; ++a) {
    const cplx pa = std::exp(-g * std::log(static_cast<double>(a)));
    for (long m = a; m <= hi; m += a)
      sig[m] += pa * std::exp(g * std::log(static_cast<double>(m / a)));
  }
  cplx total{0, 0};
  for (long n = std::max(1L, lo); n <= hi; ++n)
    total += phi(n / x) * std::exp(-g * std::log(static_cast<double>(n))) * sig[n];
  return total / x;
}

// ---------------------------------------------------------------------------
// psi and G of the k = 1 formula

/// Limit alpha, beta -> 0:
/// phi~(1) L^2 + (2 gamma_E phi~(1) + 2 phi~'(1)) L + phi~''(1) + 2 gamma_E phi~'(1),
/// L = log(T / 2 pi).
inline double psi_limit(double T, const WeightFunction& phi) {
  const auto m = mellin_jet(phi);
  const double L = std::log(T / kTwoPi);
  return m.m0 * L * L + (2 * kEulerGamma * m.m0 + 2 * m.m1) * L + m.m2 + 2 * kEulerGamma * m.m1;
}

/// (1/T) int log(t/2pi) (log(t/2pi) + 2 gamma_E) phi(t/T) dt.
inline double psi_integral(double T, const WeightFunction& phi) {
  const double L = std::log(T / kTwoPi);
  auto f = [&](double u) {
    const double l = L + std::log(u);
    return phi(u) * l * (l + 2 * kEulerGamma);
  };
  return gl_adaptive(f, phi.a(), phi.b(), 1e-14).value;
}

/// Shifted psi from the closed form; depends on alpha + beta only.
inline cplx psi_alpha_beta(const MainTermContext& ctx) {
  ctx.validate();
  const cplx u = ctx.shifts.alpha + ctx.shifts.beta;
  if (u == cplx{})
    throw PoleError("psi_alpha_beta: alpha + beta = 0 is a removable singularity; use psi_limit");
  const double L = ctx.L();
  const cplx e = std::exp(-u * L);
  const cplx zm = zeta_one_plus(-u, 0), zp = zeta_one_plus(u, 0);
  const cplx p0 = ctx.phi.mellin(1.0 - u, 0), p1 = ctx.phi.mellin(1.0 - u, 1);
  const double q0 = ctx.phi.mellin(1.0, 0).real(), q1 = ctx.phi.mellin(1.0, 1).real();
  return L * (p0 * zm * e + q0 * zp) + p1 * zm * e + q1 * zp;
}

/// Same quantity as a t-integral:
/// (1/T) int phi(t/T) log(t/2pi) (zeta(1-u) (t/2pi)^{-u} + zeta(1+u)) dt.
inline cplx psi_shifted_integral(const MainTermContext& ctx) {
  const cplx u = ctx.shifts.alpha + ctx.shifts.beta;
  if (u == cplx{}) return psi_integral(ctx.T, ctx.phi);
  const double L = ctx.L();
  const cplx zm = zeta_one_plus(-u, 0), zp = zeta_one_plus(u, 0);
  auto f = [&](double v) {
    const double l = L + std::log(v);
    return ctx.phi(v) * l * (zm * std::exp(-u * l) + zp);
  };
  return gl_adaptive(f, ctx.phi.a(), ctx.phi.b(), 1e-14).value;
}

namespace detail {
inline void check_pole(cplx z, const char* who) {
  if (std::abs(z) < 1e-12) throw PoleError(std::string(who) + ": argument at a zeta'/zeta pole");
}
}  // namespace detail

/// Four-term shifted G_{alpha,beta}(y, T).
inline cplx g_alpha_beta(cplx y, const MainTermContext& ctx) {
  ctx.validate();
  const cplx a = ctx.shifts.alpha, b = ctx.shifts.beta;
  const cplx u = a + b;
  for (cplx z : {y + a, y + b, y - a, y - b, u}) detail::check_pole(z, "g_alpha_beta");
  const double L = ctx.L();
  auto ld = [](cplx w) { return zeta_one_plus(w, 1); };
  auto z1 = [](cplx w) { return zeta_one_plus(w, 0); };
  const double q0 = ctx.phi.mellin(1.0, 0).real();
  return q0 * z1(u) * (ld(y + a) + ld(y + b)) +
         ctx.phi.mellin(1.0 - u) * std::exp(-u * L) * z1(-u) * (ld(y - b) + ld(y - a)) -
         ctx.phi.mellin(1.0 - y - a) * std::exp(-(y + a) * L) * z1(-y - a) * z1(-y + b) -
         ctx.phi.mellin(1.0 - y - b) * std::exp(-(y + b) * L) * z1(-y + a) * z1(-y - b);
}

/// G(y, T) at alpha = beta = 0:
/// 2 phi~(1) (l(1+y) L + l'(1+y) + 2 gamma_E l(1+y)) + 2 phi~'(1) l(1+y)
///   - 2 phi~(1-y) (T/2pi)^{-y} zeta(1-y)^2, with l = zeta'/zeta.
inline cplx g_limit(cplx y, double T, const WeightFunction& phi) {
  detail::check_pole(y, "g_limit");
  const auto m = mellin_jet(phi);
  const double L = std::log(T / kTwoPi);
  const cplx l1 = zeta_one_plus(y, 1), l2 = zeta_one_plus(y, 2);
  const cplx z = zeta_one_plus(-y, 0);
  return 2 * m.m0 * (l1 * L + l2 + 2 * kEulerGamma * l1) + 2 * m.m1 * l1 -
         2.0 * phi.mellin(1.0 - y) * std::exp(-y * L) * z * z;
}

struct RhsResult {
  double value = 0;
  double imag = 0;    ///< imaginary part of the integral, zero for even f
  double cutoff = 0;  ///< X in the integral over [-X, X]
};

/// (T / log T) int f(x) (psi(T) + G(2 pi i x / log T, T)) dx at zero shifts.
inline RhsResult rhs_k1(const TestFunction& f, const MainTermContext& ctx) {
  ctx.validate();
  if (!ctx.shifts.zero()) throw DomainError("rhs_k1: needs the unshifted context");
  const TabulatedF fx(f);
  double X = std::max(fx.radius(), 1.0);
  if (fx.has_slow_tail()) {
    while (fx.tail_bound(X) * 4 * std::log(ctx.T) * std::log(ctx.T) > 1e-9) {
      X *= 2;
      if (X > 1e6) throw ConvergenceError("rhs_k1: Fejer tail too slow for the cutoff");
    }
  }
  const double logT = std::log(ctx.T);
  const double psi = psi_limit(ctx.T, ctx.phi);
  auto integrand = [&](double x) -> cplx {
    const cplx y(0, kTwoPi * x / logT);
    const double fv = fx(x);
    if (fv == 0) return 0;
    return fv * (psi + g_limit(y, ctx.T, ctx.phi));
  };
  const std::size_t panels = static_cast<std::size_t>(std::ceil(X / 0.5));
  // split at 0 so no node sits on the removable singularity
  const cplx right = gl_composite<16>(integrand, 0.0, X, panels);
  const cplx left = gl_composite<16>(integrand, -X, 0.0, panels);
  const cplx total = (left + right) * (ctx.T / logT);
  return {total.real(), total.imag(), X};
}

// ---------------------------------------------------------------------------
// Local factors of the twisted fourth moment

/// sigma_{a,b}(n) = sum_{n1 n2 = n} n1^{-a} n2^{-b}.
inline cplx sigma_shift(long n, cplx a, cplx b) {
  if (n < 1) throw DomainError("sigma_shift: n >= 1");
  cplx acc{0, 0};
  for (long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    const long e = n / d;
    const double ld = std::log(static_cast<double>(d)), le = std::log(static_cast<double>(e));
    acc += std::exp(-a * ld - b * le);
    if (d != e) acc += std::exp(-a * le - b * ld);
  }
  return acc;
}

/// A = zeta(1+a+g) zeta(1+a+d) zeta(1+b+g) zeta(1+b+d) / zeta(2+a+b+g+d).
inline cplx a_factor(const ShiftSet& s) {
  const cplx sums[] = {s.alpha + s.gamma_s, s.alpha + s.delta_s, s.beta + s.gamma_s,
                       s.beta + s.delta_s};
  cplx num = 1;
  for (cplx z : sums) {
    if (std::abs(z) < 1e-14) throw PoleError("a_factor: a shift sum vanishes");
    num *= zeta_one_plus(z, 0);
  }
  return num / zeta(2.0 + s.alpha + s.beta + s.gamma_s + s.delta_s);
}

namespace detail {
/// sigma_{a,b}(p^j) = sum_{i=0}^j p^{-i a - (j-i) b}.
inline cplx sigma_prime_power(double logp, int j, cplx a, cplx b) {
  cplx acc{0, 0};
  for (int i = 0; i <= j; ++i) acc += std::exp(-(static_cast<double>(i) * a + static_cast<double>(j - i) * b) * logp);
  return acc;
}
}  // namespace detail

/// B_{alpha,beta,gamma,delta,a}: product over p^nu || a of
/// sum_j s_ab(p^j) s_gd(p^{j+nu}) p^-j / sum_j s_ab(p^j) s_gd(p^j) p^-j.
inline cplx b_local(long a, const ShiftSet& s) {
  if (a < 1) throw DomainError("b_local: a >= 1");
  cplx prod = 1;
  long rest = a;
  for (long p = 2; rest > 1; ++p) {
    if (p * p > rest) p = rest;
    if (rest % p) continue;
    int nu = 0;
    while (rest % p == 0) {
      rest /= p;
      ++nu;
    }
    const double lp = std::log(static_cast<double>(p));
    cplx num{0, 0}, den{0, 0};
    double pj = 1;
    for (int j = 0;; ++j) {
      const cplx sab = detail::sigma_prime_power(lp, j, s.alpha, s.beta);
      const cplx tn = sab * detail::sigma_prime_power(lp, j + nu, s.gamma_s, s.delta_s) * pj;
      const cplx td = sab * detail::sigma_prime_power(lp, j, s.gamma_s, s.delta_s) * pj;
      num += tn;
      den += td;
      if (std::abs(tn) < 1e-14 * std::abs(num) && std::abs(td) < 1e-14 * std::abs(den)) break;
      if (j > 2000) throw ConvergenceError("b_local: local series did not converge");
      pj /= static_cast<double>(p);
    }
    prod *= num / den;
  }
  return prod;
}

// ---------------------------------------------------------------------------

/// int f(x) W^k(x) dx in Fourier space: f^(0) + int f^(y) w^_ac(y) dy.
inline double kernel_prediction(const TestFunction& f, int k) {
  detail::check_kernel_order(k, "kernel_prediction");
  double total = f.fhat(0.0);
  if (k == 0) return total;
  std::vector<double> cuts{0.0};
  for (const auto& a : f.atoms()) cuts.push_back(std::min(a.delta, 1.0));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += 2 * gl_adaptive([&](double y) { return f.fhat(y) * w_hat(k, y).ac_value; }, cuts[i],
                             cuts[i + 1], 1e-13)
                     .value;
  return total;
}

}  // namespace wld
