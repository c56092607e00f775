#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "json.hpp"
#include "special_functions.hpp"

namespace wld {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Pair-correlation kernels W^k and their Fourier data

namespace detail {
inline void check_kernel_order(int k, const char* who) {
  if (k < 0 || k > 2) throw DomainError(std::string(who) + ": k must be 0, 1 or 2");
}
}  // namespace detail

namespace detail {
// Taylor coefficients of W^2 in powers of u^2, u = pi x, from u^4 on.
inline constexpr double kW2Series[] = {
    1.0 / 45,           -4.0 / 1575,          2.0 / 14175,         -16.0 / 3274425,
    1.0 / 8513505,      -4.0 / 1915538625,    2.0 / 69780335625,   -32.0 / 102088631019375.0};
}  // namespace detail

/// W^0 = 1, W^1 = 1 - sinc^2, W^2 the second-order kernel. Near 0 the
/// closed forms cancel, so a Taylor series takes over: below |x| = 1e-3 for
/// W^1, and below 0.1 for W^2, whose closed form cancels terms of size u^-4.
inline double w_kernel(int k, double x) {
  detail::check_kernel_order(k, "w_kernel");
  if (!std::isfinite(x)) throw DomainError("w_kernel: x must be finite");
  if (k == 0) return 1.0;
  const double u = kPi * x;
  const double u2 = u * u;
  if (k == 1) {
    if (std::fabs(x) < 1e-3) return u2 / 3 - 2 * u2 * u2 / 45 + u2 * u2 * u2 / 315;
    const double s = std::sin(u) / u;
    return 1 - s * s;
  }
  if (std::fabs(x) < 0.1) {
    double acc = 0;
    for (int i = std::size(detail::kW2Series) - 1; i >= 0; --i) acc = acc * u2 + detail::kW2Series[i];
    return acc * u2 * u2;
  }
  const double c = std::cos(2 * u), s = std::sin(2 * u);
  return 1 - (2 + c) / u2 + 3 * s / (u2 * u) + 1.5 * (c - 1) / (u2 * u2);
}

/// Fourier side of W^k: an atom of mass `delta_mass` at 0 plus a density
/// supported on [-1, 1].
struct KernelFourier {
  double delta_mass;
  double ac_value;
};

inline KernelFourier w_hat(int k, double y) {
  detail::check_kernel_order(k, "w_hat");
  const double a = std::fabs(y);
  if (k == 0 || a >= 1) return {1.0, 0.0};
  if (k == 1) return {1.0, a - 1};
  return {1.0, -2 * a * a * a + 4 * a - 2};
}

/// Same density in exact arithmetic, for 0 <= y.
inline Rational w_hat_exact(int k, const Rational& y) {
  detail::check_kernel_order(k, "w_hat_exact");
  if (y < 0) throw DomainError("w_hat_exact: y must be nonnegative");
  if (k == 0 || y >= 1) return 0;
  if (k == 1) return y - 1;
  return -2 * y * y * y + 4 * y - 2;
}

// ---------------------------------------------------------------------------
// Exact combinatorics

inline BigInt factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Binomial coefficient, zero outside 0 <= r <= n.
inline BigInt binom(int n, int r) {
  if (n < 0 || r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  BigInt v = 1;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

/// Rising factorial (a)_m.
inline Rational pochhammer(const Rational& a, int m) {
  Rational r = 1;
  for (int i = 0; i < m; ++i) r *= a + i;
  return r;
}

/// n! / m! for n >= m >= 0.
inline BigInt falling_ratio(int n, int m) {
  if (m < 0 || n < m) throw DomainError("falling_ratio: need n >= m >= 0");
  BigInt r = 1;
  for (int i = m + 1; i <= n; ++i) r *= i;
  return r;
}

inline int sign(int n) { return (n % 2 == 0) ? 1 : -1; }

inline std::string to_string(const Rational& r) { return r.str(); }

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

/// d_{j,k} = (1/j) C(k-1, j-1) C(k+j, j-1).
inline Rational d_coeff(int j, int k) {
  if (k < 1 || j < 1 || j > k) throw DomainError("d_coeff: need 1 <= j <= k");
  return Rational(binom(k - 1, j - 1) * binom(k + j, j - 1), BigInt(j));
}

/// b_{0,k} = -((2k-1)!/(k-1)!)^2 + (2k-2)!(2k)!/((k-1)!)^2.
inline Rational b0_coeff(int k) {
  if (k < 1) throw DomainError("b0_coeff: k >= 1");
  const BigInt a = falling_ratio(2 * k - 1, k - 1);
  const BigInt f = factorial(k - 1);
  return Rational(-a * a) + Rational(factorial(2 * k - 2) * factorial(2 * k), f * f);
}

inline bool b0_identity(int k) {
  return 2 * b0_coeff(k) / Rational(factorial(2 * k - 2)) ==
         Rational((k + 1) * binom(2 * k, k - 1));
}

/// sum_j (-1)^j (2k-j)!/(2k-j-n)! (n-j)/(j!(k-j)!); 0 below n = k-1, then 1, then k(k+1).
inline Rational s_identity(int k, int n) {
  if (k < 1) throw DomainError("s_identity: k >= 1");
  if (n < 0 || n > k) throw DomainError("s_identity: need 0 <= n <= k");
  Rational s = 0;
  for (int j = 0; j <= k; ++j)
    s += Rational(sign(j) * falling_ratio(2 * k - j, 2 * k - j - n) * (n - j),
                  factorial(j) * factorial(k - j));
  return s;
}

inline Rational s_identity_expected(int k, int n) {
  if (n < k - 1) return 0;
  return n == k - 1 ? Rational(1) : Rational(k * (k + 1));
}

/// Terminating 2F1(a, b; c; 1) by direct summation.
inline Rational gauss_2f1(int a, const Rational& b, const Rational& c) {
  if (a > 0) throw DomainError("gauss_2f1: a must be a non-positive integer");
  if (is_integer(c) && c <= 0 && c > a)
    throw DomainError("gauss_2f1: c hits a pole before the series terminates");
  Rational term = 1, sum = 1;
  for (int j = 0; j < -a; ++j) {
    term *= (a + j) * (b + j) / ((c + j) * (j + 1));
    sum += term;
  }
  return sum;
}

/// Chu-Vandermonde closed form (c-b)_{-a} / (c)_{-a}.
inline Rational chu_vandermonde(int a, const Rational& b, const Rational& c) {
  return pochhammer(c - b, -a) / pochhammer(c, -a);
}

inline Rational gauss_2f1_check(int a, const Rational& b, const Rational& c) {
  return gauss_2f1(a, b, c);
}

/// Terminating 3F2 at 1; stops when a numerator Pochhammer reaches zero.
inline Rational hyper_3f2(const std::array<Rational, 3>& num, const std::array<Rational, 2>& den) {
  Rational term = 1, sum = 1;
  for (int j = 0;; ++j) {
    Rational up = (num[0] + j) * (num[1] + j) * (num[2] + j);
    if (up == 0) break;
    Rational down = (den[0] + j) * (den[1] + j) * (j + 1);
    if (down == 0) throw DomainError("hyper_3f2: denominator vanishes before termination");
    term *= up / down;
    sum += term;
    if (j > 10000) throw ConvergenceError("hyper_3f2: series does not terminate");
  }
  return sum;
}

/// Pair of sums over n that must both vanish for 0 < i < k:
/// (i)  sum (-1)^n n/(2k-n) C(k,n) C(2k-n,2i) (-n-2i)_k
/// (ii) sum (-1)^n (2k-n-2i)/(2k-n) C(k,n) C(2k-n,2i) (-n-2i)_{k-1}
inline std::pair<Rational, Rational> even_coeff_identities(int k, int i) {
  if (i <= 0 || i >= k) throw DomainError("even_coeff_identities: need 0 < i < k");
  Rational lhs_i = 0, lhs_ii = 0;
  for (int n = 0; n <= k; ++n) {
    const Rational c = Rational(sign(n) * binom(k, n) * binom(2 * k - n, 2 * i), BigInt(2 * k - n));
    lhs_i += c * n * pochhammer(Rational(-n - 2 * i), k);
    lhs_ii += c * (2 * k - n - 2 * i) * pochhammer(Rational(-n - 2 * i), k - 1);
  }
  return {lhs_i, lhs_ii};
}

// The remaining identities come from matching coefficients of the kernel's
// Fourier polynomial term by term.

/// Inner sum of the y^{2k-1} coefficient comparison.
inline Rational top_coeff_inner(int k, int n) {
  Rational s = 0;
  for (int i = 0; i <= 2 * k - 1; ++i)
    s += Rational(sign(i) * falling_ratio(2 * k + n - i - 1, 2 * k - i - 1) *
                  binom(k, i + 1 - n) * (2 * n - i - 1));
  return s;
}

inline Rational top_coeff_expected(int k, int n) {
  if (n < k - 1) return 0;
  if (n == k - 1) return Rational(sign(k) * factorial(k));
  return Rational(-sign(k) * k * factorial(k + 1));
}

/// Constant term of the Fourier polynomial; must equal -k.
inline Rational constant_term(int k) {
  Rational tot = 0;
  for (int n = 0; n <= k; ++n)
    tot += Rational(factorial(2 * k - n - 1) * binom(k, n), factorial(k) * factorial(k - 1)) *
           top_coeff_inner(k, n);
  return sign(k) * tot;
}

/// Coefficient of y^{2i} (0 < i < k); must vanish.
inline Rational even_coeff(int k, int i) {
  Rational tot = 0;
  for (int n = 0; n <= k; ++n) {
    Rational inner = 0;
    for (int m = 0; m <= k; ++m)
      inner += Rational(sign(m) * falling_ratio(2 * k - m, 2 * k - m - n) *
                        binom(2 * k - m - n, 2 * i) * binom(k, m) * (n - m));
    tot += Rational(sign(n - 1) * factorial(2 * k - n - 1) * binom(k, n),
                    factorial(k) * factorial(k - 1)) *
           inner;
  }
  return tot;
}

inline Rational odd_coeff_prefactor(int k, int i) {
  return Rational(sign(k + i + 1) * i * factorial(k - i),
                  factorial(k) * factorial(k + i - 1) * binom(2 * i - 2, i - 1));
}

/// Normalized coefficient of y^{2i-1} (0 < i < k); must equal 1.
inline Rational odd_coeff(int k, int i) {
  Rational s = 0;
  for (int n = 0; n <= k; ++n)
    s += Rational(sign(n) * factorial(2 * k - n - 1) * factorial(n + 2 * i - 1),
                  factorial(n) * factorial(k - n)) *
         Rational(n * binom(k, n + 2 * i - k - 1) + k * binom(k, n + 2 * i - k));
  return odd_coeff_prefactor(k, i) * s;
}

/// Same coefficient through its two 3F2 pieces, for k <= 2i.
inline Rational odd_coeff_hypergeometric(int k, int i) {
  if (2 * i < k || i >= k) throw DomainError("odd_coeff_hypergeometric: need k <= 2i < 2k");
  const Rational c = Rational(binom(k, 2 * i - k));
  const Rational a = -Rational(factorial(2 * i) * factorial(2 * k - 2), factorial(k - 1)) * c *
                     hyper_3f2({Rational(1 + 2 * i), Rational(2 * i - 2 * k), Rational(1 - k)},
                               {Rational(2 - 2 * k), Rational(1 + 2 * i - k)});
  const Rational b = Rational(factorial(2 * i - 1) * factorial(2 * k - 1), factorial(k - 1)) * c *
                     hyper_3f2({Rational(2 * i), Rational(2 * i - 2 * k), Rational(-k)},
                               {Rational(1 - 2 * k), Rational(1 + 2 * i - k)});
  return odd_coeff_prefactor(k, i) * (a + b);
}

/// The two terminating 3F2 values that must vanish for k <= 2i.
inline std::pair<Rational, Rational> even_coeff_hypergeometric(int k, int i) {
  if (2 * i < k || i >= k) throw DomainError("even_coeff_hypergeometric: need k <= 2i < 2k");
  return {hyper_3f2({Rational(2 * i + 2), Rational(2 * i - 2 * k + 1), Rational(1 - k)},
                    {Rational(2 - 2 * k), Rational(2 * i - k + 2)}),
          hyper_3f2({Rational(2 * i + 1), Rational(2 * i - 2 * k + 1), Rational(-k)},
                    {Rational(1 - 2 * k), Rational(2 * i - k + 2)})};
}

/// Fourier density of W^k on (0,1) from the d_{j,k} expansion.
inline Rational kerneltesi_hat(int k, const Rational& y) {
  if (k < 1 || k > 2) throw DomainError("kerneltesi_hat: k must be 1 or 2");
  if (y <= 0 || y >= 1) throw DomainError("kerneltesi_hat: need 0 < y < 1");
  auto part = [&](int kk) {
    Rational s = 0, pw = y;
    for (int j = 1; j <= kk; ++j) {
      s += sign(j) * d_coeff(j, kk) * pw / (2 * j - 1);
      pw *= y * y;
    }
    return s;
  };
  Rational inner = (k + 1) * part(k);
  if (k > 1) inner += (k - 1) * part(k - 1);
  return -k - Rational(k, 2) * inner;
}

// ---------------------------------------------------------------------------
// Ledger

struct IdentityCheck {
  std::string name;
  nlohmann::json params;
  Rational value;
  Rational expected;
  bool pass;
};

struct IdentityTable {
  int k = 0;
  std::map<std::pair<int, int>, Rational> d;
  Rational b0;
  std::vector<IdentityCheck> results;

  void record(std::string name, nlohmann::json params, Rational value, Rational expected) {
    const bool ok = value == expected;
    results.push_back({std::move(name), std::move(params), std::move(value), std::move(expected), ok});
  }
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

/// Every finite-sum identity of the coefficient comparison for one k.
inline IdentityTable identity_table(int k) {
  if (k < 1) throw DomainError("identity_table: k >= 1");
  using nlohmann::json;
  IdentityTable t;
  t.k = k;
  for (int j = 1; j <= k; ++j) {
    t.d[{j, k}] = d_coeff(j, k);
    t.record("d_coeff_integral", json{{"j", j}, {"k", k}}, is_integer(t.d[{j, k}]) ? 1 : 0, 1);
  }
  t.b0 = b0_coeff(k);
  t.record("b0", json{{"k", k}}, 2 * t.b0 / Rational(factorial(2 * k - 2)),
           Rational((k + 1) * binom(2 * k, k - 1)));

  for (int n = 0; n <= k; ++n) {
    const json p{{"k", k}, {"n", n}};
    t.record("s_identity", p, s_identity(k, n), s_identity_expected(k, n));
    // S = n S1 - S2 with each piece summed by Gauss
    const Rational g1 = Rational(factorial(2 * k), factorial(k) * factorial(2 * k - n)) *
                        gauss_2f1(-k, n - 2 * k, -2 * k);
    const Rational g2 = -Rational(factorial(2 * k), 2 * factorial(k) * factorial(2 * k - n - 1)) *
                        gauss_2f1(1 - k, n - 2 * k + 1, 1 - 2 * k);
    t.record("s_identity_gauss", p, n * g1 - g2, s_identity_expected(k, n));
    t.record("gauss_2f1", json{{"a", -k}, {"b", n - 2 * k}, {"c", -2 * k}},
             gauss_2f1(-k, n - 2 * k, -2 * k), chu_vandermonde(-k, n - 2 * k, -2 * k));
    t.record("gauss_2f1", json{{"a", 1 - k}, {"b", n - 2 * k + 1}, {"c", 1 - 2 * k}},
             gauss_2f1(1 - k, n - 2 * k + 1, 1 - 2 * k),
             chu_vandermonde(1 - k, n - 2 * k + 1, 1 - 2 * k));
    t.record("top_coeff", p, top_coeff_inner(k, n), top_coeff_expected(k, n));
  }
  t.record("constant_term", json{{"k", k}}, constant_term(k), -k);

  for (int i = 1; i < k; ++i) {
    const json p{{"k", k}, {"i", i}};
    const auto [a, b] = even_coeff_identities(k, i);
    t.record("even_coeff_i", p, a, 0);
    t.record("even_coeff_ii", p, b, 0);
    t.record("even_coeff", p, even_coeff(k, i), 0);
    t.record("odd_coeff", p, odd_coeff(k, i), 1);
    if (2 * i >= k) {
      const auto [h1, h2] = even_coeff_hypergeometric(k, i);
      t.record("even_coeff_3f2_a", p, h1, 0);
      t.record("even_coeff_3f2_b", p, h2, 0);
      t.record("odd_coeff_3f2", p, odd_coeff_hypergeometric(k, i), 1);
    }
  }

  if (k <= 2) {
    for (const Rational& y : {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(3, 4)})
      t.record("kerneltesi_vs_w_hat", json{{"k", k}, {"y", to_string(y)}}, kerneltesi_hat(k, y),
               w_hat_exact(k, y));
  }
  return t;
}

/// Gauss 2F1 against Chu-Vandermonde on a small grid of rational parameters.
inline std::vector<IdentityCheck> gauss_grid(int a_min = -8) {
  std::vector<IdentityCheck> out;
  const Rational bs[] = {Rational(1), Rational(3), Rational(-5, 2), Rational(1, 3), Rational(7, 4)};
  const Rational cs[] = {Rational(2), Rational(5), Rational(1, 2), Rational(-17, 3), Rational(-20)};
  for (int a = 0; a >= a_min; --a)
    for (const auto& b : bs)
      for (const auto& c : cs) {
        const Rational v = gauss_2f1(a, b, c), e = chu_vandermonde(a, b, c);
        out.push_back({"gauss_2f1",
                       nlohmann::json{{"a", a}, {"b", to_string(b)}, {"c", to_string(c)}}, v, e,
                       v == e});
      }
  return out;
}

struct IdentityReport {
  std::vector<IdentityTable> tables;
  std::vector<IdentityCheck> extra;

  bool all_pass() const {
    for (const auto& t : tables)
      if (!t.all_pass()) return false;
    for (const auto& r : extra)
      if (!r.pass) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t n = extra.size();
    for (const auto& t : tables) n += t.results.size();
    return n;
  }
};

inline IdentityReport verify_identities(int k_max) {
  if (k_max < 1) throw DomainError("verify_identities: k_max >= 1");
  IdentityReport r;
  for (int k = 1; k <= k_max; ++k) r.tables.push_back(identity_table(k));
  r.extra = gauss_grid(-k_max);
  return r;
}

inline nlohmann::json to_json(const IdentityCheck& c) {
  return {{"name", c.name},
          {"params", c.params},
          {"value", to_string(c.value)},
          {"expected", to_string(c.expected)},
          {"pass", c.pass}};
}

inline nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [jk, v] : t.d) d[std::to_string(jk.first)] = to_string(v);
    coeffs.push_back({{"k", t.k}, {"d", d}, {"b0", to_string(t.b0)}});
    for (const auto& c : t.results) checks.push_back(to_json(c));
  }
  for (const auto& c : r.extra) checks.push_back(to_json(c));
  return {{"all_pass", r.all_pass()}, {"count", r.count()}, {"coefficients", coeffs},
          {"checks", checks}};
}

}  // namespace wld
