#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "golden_fixture.hpp"
#include "wld/empirical_statistics.hpp"

using namespace wld;

namespace {

const WeightFunction& phi() {
  static const WeightFunction w = WeightFunction::canonical();
  return w;
}

// zeros for T = 1000 padded by the reach of the delta = 0.45 bump
const ZeroSet& zeros1000() {
  static const ZeroSet zs = zeros_for_density(make_bump_pair(0.45), phi(), 1000);
  return zs;
}

}  // namespace

TEST(Nf, FejerAtAZero) {
  const auto f = make_bump_pair(1, Shape::fejer);
  const double T = 1000, s = mean_spacing(T);
  const auto& zs = zeros1000();
  const double g0 = zs.slice(1500, 1510).zeros.front().gamma;
  NfEvaluator nf(f, zs, T);
  double others = 0;
  for (const auto& z : zs.zeros)
    if (z.gamma != g0 && std::fabs(z.gamma - g0) <= nf.reach()) others += eval_f(f, (z.gamma - g0) / s);
  const double v = nf(g0);
  EXPECT_NEAR(v - others, 1.0, 1e-9);
  EXPECT_GE(v, 1.0);
  EXPECT_GT(nf.truncation(), 0.0);
}

TEST(Nf, WideGapAgainstOracle) {
  const double T = 1000;
  const double t = golden().real("n_f.gap_t|T=1000");
  char key[96];
  std::snprintf(key, sizeof key, "n_f|delta=0.45,T=1000,t=%.10g", t);
  // the gap sits just below T, under the padded density window
  const auto zs = zeros_for_window(t - 250, t + 250);
  const double v = n_f(t, zs, make_bump_pair(0.45), T);
  EXPECT_NEAR(v, golden().real(key), 1e-9);
  EXPECT_LT(v, 1.0);
}

TEST(Nf, LinearInF) {
  const double T = 1000, t = 1500;
  const auto f1 = make_bump_pair(0.45), f2 = make_bump_pair(0.3, Shape::fejer) * 0.7;
  const double a = n_f(t, zeros1000(), f1, T), b = n_f(t, zeros1000(), f2, T);
  EXPECT_NEAR(n_f(t, zeros1000(), f1 + f2, T), a + b, 1e-12);
}

TEST(Nf, SignalsMissingCoverage) {
  const auto f = make_bump_pair(0.45);
  const auto narrow = zeros1000().slice(1400, 1600);
  EXPECT_THROW(n_f(1500, narrow, f, 1000), CoverageError);
  ZeroSet partial = zeros1000();
  partial.complete = false;
  EXPECT_THROW(n_f(1500, partial, f, 1000), CoverageError);
}

TEST(WeightedDensity, UnweightedMassAndSelfNormalization) {
  const auto f = make_bump_pair(0.45);
  const auto r = weighted_density(0, f, phi(), 1000, zeros1000());
  EXPECT_NEAR(r.mass, 1000 * phi().mellin(1).real(), 1e-9 * r.mass);
  EXPECT_LT(r.quad_err, 1e-8 * r.lhs);
  EXPECT_EQ(r.prediction, f.fhat(0));
  EXPECT_FALSE(r.rhs_k1.has_value());
  // the mean spacing 2 pi / log T overstates the local spacing by log T / log(t / 2 pi),
  // so the unweighted ratio is the phi-average of log(t / 2 pi) / log T
  const double avg = gl_composite<16>(
                         [&](double x) { return phi()(x) * std::log(1000 * x / kTwoPi); }, 1.0, 2.0,
                         16) /
                     (phi().mellin(1).real() * std::log(1000.0));
  EXPECT_NEAR(r.ratio, avg, 0.01);
}

TEST(WeightedDensity, SecondMomentMatchesMainTerm) {
  const auto r = weighted_density(1, make_bump_pair(0.45), phi(), 1000, zeros1000());
  ASSERT_TRUE(r.rhs_k1.has_value());
  EXPECT_LT(std::fabs(r.lhs - *r.rhs_k1), 0.10 * *r.rhs_k1);
  EXPECT_LT(r.quad_err, 1e-6 * r.lhs);
  EXPECT_GT(r.zeros, 800u);
  EXPECT_GE(r.nodes, static_cast<std::size_t>(6 * 1000 / mean_spacing(1000)));
  const auto j = to_json(r);
  EXPECT_EQ(j["k"], 1);
  EXPECT_DOUBLE_EQ(j["rhs_k1"].get<double>(), *r.rhs_k1);
}

TEST(WeightedDensity, DeterministicAcrossThreads) {
  DensityOptions one, many;
  one.threads = 1;
  many.threads = 5;
  one.with_rhs = many.with_rhs = false;
  const auto f = make_bump_pair(0.45);
  const auto a = weighted_density(2, f, phi(), 1000, zeros1000(), one);
  const auto b = weighted_density(2, f, phi(), 1000, zeros1000(), many);
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.mass, b.mass);
}

TEST(WeightedDensity, RejectsBadInput) {
  const auto f = make_bump_pair(0.45);
  EXPECT_THROW(weighted_density(3, f, phi(), 1000, zeros1000()), DomainError);
  EXPECT_THROW(weighted_density(1, f, phi(), 50, zeros1000()), DomainError);
  EXPECT_THROW(weighted_density(0, f, phi(), 1000, zeros1000().slice(900, 2100)), CoverageError);
}

TEST(MomentsAtZeros, VanishAtTheZerosAndRiseWithAlpha) {
  const double T = 1000;
  const auto& zs = zeros1000();
  EXPECT_LT(m_k(0, 1, zs, T), 1e-12);
  EXPECT_LT(m_k(0, 2, zs, T), 1e-24);
  const double ref = m_k(2, 1, zs, T);
  double prev = 0;
  for (double a : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double r = m_k(a, 1, zs, T) / ref;
    EXPECT_GT(r, prev) << a;
    prev = r;
  }
  EXPECT_NEAR(m_k(-0.7, 1, zs, T) / m_k(0.7, 1, zs, T), 1.0, 0.02);
  EXPECT_THROW(m_k(0.5, 3, zs, T), DomainError);
  EXPECT_THROW(m_k(0.5, 1, zs.slice(1000, 1500), T), CoverageError);
}

// int N_f |zeta|^2 phi dt = s * int f(x) sum_gamma |zeta(rho + i s x)|^2 phi((gamma + s x)/T) dx
TEST(MomentsAtZeros, SmoothedMomentReproducesWeightedDensity) {
  const double T = 1000, s = mean_spacing(T);
  const auto f = make_bump_pair(0.45);
  const TabulatedF fx(f);
  DensityOptions opt;
  opt.with_rhs = false;
  for (int k : {0, 1}) {
    const auto r = weighted_density(k, f, phi(), T, zeros1000(), opt);
    const double via_zeros =
        s * gl_composite<8>(
                [&](double x) {
                  return fx(x) * (m_k_smoothed(x, k, zeros1000(), T, phi()) +
                                  m_k_smoothed(-x, k, zeros1000(), T, phi()));
                },
                0.0, fx.radius(), static_cast<std::size_t>(fx.radius()));
    EXPECT_NEAR(via_zeros, r.lhs, 1e-8 * r.lhs + r.quad_err) << k;
  }
}

TEST(LargeValues, MaxNearZeroBeatsDenseSampling) {
  const double g = zeros1000().slice(1200, 1210).zeros.front().gamma;
  const double w = 1 / std::log(1000.0);
  const double m = max_near(g, w);
  double dense = 0;
  for (int i = 0; i <= 4000; ++i)
    dense = std::max(dense, std::fabs(hardy_z(g - w + 2 * w * i / 4000)));
  EXPECT_GE(m, dense * (1 - 1e-9));
  EXPECT_LE(m, dense * (1 + 1e-4));
}

TEST(LargeValues, CountsAgainstOracleAndLimits) {
  const double T = 1000;
  LargeValueQuery q;
  q.T = T;
  const auto rows = large_value_table(q, zeros1000());
  const auto n = zeros1000().slice(T, 2 * T).size();
  EXPECT_EQ(rows.size(), n);
  EXPECT_EQ(count_within(rows, 1e6), n);
  EXPECT_EQ(count_within(rows, 1e-9), 0u);
  std::size_t prev = 0;
  for (double U : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    const auto c = count_within(rows, U);
    EXPECT_GE(c, prev) << U;
    prev = c;
  }
  if (golden().real("z_k_count.closest|k=1,T=1000") > 1e-6) {
    for (int U : {1, 2, 3}) {
      const std::string key = "z_k_count|k=1,T=1000,U=" + std::to_string(U);
      EXPECT_EQ(static_cast<double>(count_within(rows, U)), golden().real(key)) << key;
    }
  }
  q.U = 2;
  EXPECT_EQ(z_k_count(q, zeros1000()), count_within(rows, 2));
  std::ostringstream csv;
  write_large_value_csv(rows, csv);
  EXPECT_EQ(csv.str().rfind("gamma,max_abs_zeta,log_excess\n", 0), 0u);
  q.U = 0;
  EXPECT_THROW(z_k_count(q, zeros1000()), DomainError);
}

TEST(LargeValues, Envelope) {
  EXPECT_TRUE(within_large_value_envelope(500, 1, 1000, 1));
  EXPECT_FALSE(within_large_value_envelope(0, 1, 1000, 1));
  EXPECT_FALSE(within_large_value_envelope(100000, 1, 1000, 1));
}
