#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace wld {

/// Gauss-Legendre rule on [-1, 1] with N nodes, computed once by Newton
/// iteration on the Legendre recurrence.
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      long double x = std::cos(std::numbers::pi_v<long double> *
                               (static_cast<long double>(i) + 0.75L) /
                               (static_cast<long double>(N) + 0.5L));
      long double dp = 0;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          long double p2 = ((2.0L * k - 1) * x * p1 - (k - 1.0L) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1);
        long double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-19L) break;
      }
      long double p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= N; ++k) {
        long double p2 = ((2.0L * k - 1) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (x * p1 - p0) / (x * x - 1);
      const long double w = 2 / ((1 - x * x) * dp * dp);
      nodes[i] = -static_cast<double>(x);
      nodes[N - 1 - i] = static_cast<double>(x);
      weights[i] = weights[N - 1 - i] = static_cast<double>(w);
    }
  }
};

template <std::size_t N>
const GaussLegendre<N>& gauss_legendre() {
  static const GaussLegendre<N> rule;
  return rule;
}

template <class F>
using integrand_result_t = std::decay_t<std::invoke_result_t<F, double>>;

/// Fixed N-point Gauss-Legendre on [a, b].
template <std::size_t N, class F>
auto gl_fixed(F&& f, double a, double b) -> integrand_result_t<F> {
  const auto& r = gauss_legendre<N>();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  integrand_result_t<F> acc{};
  for (std::size_t i = 0; i < N; ++i) acc += r.weights[i] * f(c + h * r.nodes[i]);
  return acc * h;
}

/// Composite Gauss-Legendre over `panels` equal panels.
template <std::size_t N, class F>
auto gl_composite(F&& f, double a, double b, std::size_t panels)
    -> integrand_result_t<F> {
  integrand_result_t<F> acc{};
  const double w = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + w * static_cast<double>(p);
    acc += gl_fixed<N>(f, lo, p + 1 == panels ? b : lo + w);
  }
  return acc;
}

template <class V>
struct QuadResult {
  V value{};
  double error = 0;
};

namespace detail {

template <class V>
double magnitude(const V& v) {
  return std::abs(v);
}

template <class V>
struct Panel {
  V value{};
  double l1 = 0;  ///< same rule applied to |f|
};

template <std::size_t N, class F>
auto gl_panel(F& f, double a, double b) -> Panel<integrand_result_t<F>> {
  const auto& r = gauss_legendre<N>();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Panel<integrand_result_t<F>> p;
  for (std::size_t i = 0; i < N; ++i) {
    const auto v = f(c + h * r.nodes[i]);
    p.value += r.weights[i] * v;
    p.l1 += r.weights[i] * magnitude(v);
  }
  p.value *= h;
  p.l1 *= std::fabs(h);
  return p;
}

// Differences below kNoise * int|f| are rounding noise (including rounding of
// oscillatory phases), so refinement stops there whatever the tolerance.
inline constexpr double kNoise = 2e-14;

template <std::size_t N, class F, class V>
void adaptive_step(F& f, double a, double b, const V& whole, double tol, int depth,
                   QuadResult<V>& out) {
  const double m = 0.5 * (a + b);
  const auto left = gl_panel<N>(f, a, m);
  const auto right = gl_panel<N>(f, m, b);
  const double diff = magnitude(left.value + right.value - whole);
  if (diff <= tol || diff <= kNoise * (left.l1 + right.l1) || depth <= 0 ||
      (b - a) < 1e-14 * (std::fabs(a) + std::fabs(b))) {
    out.value += left.value + right.value;
    out.error += diff;
    return;
  }
  adaptive_step<N>(f, a, m, left.value, 0.5 * tol, depth - 1, out);
  adaptive_step<N>(f, m, b, right.value, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Legendre with bisection. The error estimate is the sum of
/// |coarse - refined| over accepted panels.
template <std::size_t N = 16, class F>
auto gl_adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 40,
                 std::size_t initial_panels = 1) -> QuadResult<integrand_result_t<F>> {
  using V = integrand_result_t<F>;
  QuadResult<V> out;
  if (!(b > a)) return out;
  const double w = (b - a) / static_cast<double>(initial_panels);
  for (std::size_t p = 0; p < initial_panels; ++p) {
    const double lo = a + w * static_cast<double>(p);
    const double hi = p + 1 == initial_panels ? b : lo + w;
    const V whole = gl_fixed<N>(f, lo, hi);
    detail::adaptive_step<N>(f, lo, hi, whole, abs_tol / static_cast<double>(initial_panels),
                             max_depth, out);
  }
  return out;
}

/// 2 * int_0^delta g(y) cos(2 pi x y) dy on panels no wider than a quarter
/// period of the cosine.
template <class G>
QuadResult<double> cosine_transform(G&& g, double delta, double x, double abs_tol) {
  const double freq = std::fabs(x);
  std::size_t panels = 1;
  if (freq > 0) {
    const double quarter = 0.25 / freq;
    panels = static_cast<std::size_t>(std::ceil(delta / quarter));
    if (panels < 1) panels = 1;
  }
  // The phase is formed in long double: at x ~ 100 a double phase already
  // carries ~1e-14 relative error, which would read as quadrature error.
  const long double two_pi_x = 2.0L * std::numbers::pi_v<long double> * x;
  auto integrand = [&](double y) {
    const long double ph = std::fmod(two_pi_x * y, 2.0L * std::numbers::pi_v<long double>);
    return 2.0 * g(y) * std::cos(static_cast<double>(ph));
  };
  return gl_adaptive<16>(integrand, 0.0, delta, abs_tol, 20, panels);
}

}  // namespace wld
