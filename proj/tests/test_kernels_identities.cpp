#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "wld/kernels_identities.hpp"
#include "wld/quadrature.hpp"

using namespace wld;

TEST(WKernel, ClosedFormValues) {
  EXPECT_EQ(w_kernel(1, 0.0), 0.0);
  EXPECT_EQ(w_kernel(2, 0.0), 0.0);
  EXPECT_EQ(w_kernel(0, 3.3), 1.0);
  EXPECT_NEAR(w_kernel(1, 0.5), 1 - 4 / (kPi * kPi), 1e-15);
  EXPECT_NEAR(w_kernel(1, 0.5), 0.594715, 1e-6);
  EXPECT_THROW(w_kernel(3, 0.1), DomainError);
  EXPECT_THROW(w_kernel(-1, 0.1), DomainError);
  for (double x : {0.3, 1.7, 12.25}) {
    EXPECT_DOUBLE_EQ(w_kernel(1, x), w_kernel(1, -x));
    EXPECT_DOUBLE_EQ(w_kernel(2, x), w_kernel(2, -x));
  }
  EXPECT_NEAR(w_kernel(1, 1e4), 1.0, 1e-8);
  EXPECT_NEAR(w_kernel(2, 1e4), 1.0, 1e-8);
}

// The series and closed forms must meet at the switchover, and the leading
// order is x^{2k}.
TEST(WKernel, TaylorBranch) {
  const double v = 2 * kPi * 0.01;
  const double series = v * v * v * v / 720 - std::pow(v, 6) / 25200 + std::pow(v, 8) / 1814400;
  EXPECT_NEAR(w_kernel(2, 0.01), series, 1e-19);
  EXPECT_NEAR(series, 2.1644e-8, 1e-12);
  for (int k : {1, 2}) {
    const double edge = k == 1 ? 1e-3 : 0.1;
    const double below = w_kernel(k, edge * (1 - 1e-9)), above = w_kernel(k, edge * (1 + 1e-9));
    EXPECT_NEAR(above / below, std::pow((1 + 1e-9) / (1 - 1e-9), 2 * k), 1e-9);
    for (double x : {1e-6, 1e-4, 5e-4}) {
      EXPECT_GE(w_kernel(k, x), 0.0);
      const double lead = k == 1 ? kPi * kPi * x * x / 3 : std::pow(2 * kPi * x, 4) / 720;
      EXPECT_NEAR(w_kernel(k, x) / lead, 1.0, 1e-5);
    }
  }
  // closed form just above the switchover stays close to the series
  const double x = 2e-3, u = kPi * x;
  EXPECT_NEAR(w_kernel(1, x), u * u / 3 - 2 * std::pow(u, 4) / 45, 1e-14);
  const double y = 0.12, w = kPi * y;
  double acc = 0;
  for (int i = 7; i >= 0; --i) acc = acc * w * w + detail::kW2Series[i];
  EXPECT_NEAR(w_kernel(2, y) / (acc * std::pow(w, 4)), 1.0, 1e-9);
}

TEST(WHat, Values) {
  EXPECT_DOUBLE_EQ(w_hat(2, 0.5).ac_value, -0.25);
  EXPECT_DOUBLE_EQ(w_hat(1, 0.5).ac_value, -0.5);
  EXPECT_DOUBLE_EQ(w_hat(2, 1.5).ac_value, 0.0);
  EXPECT_DOUBLE_EQ(w_hat(1, -0.25).ac_value, w_hat(1, 0.25).ac_value);
  for (int k : {0, 1, 2}) EXPECT_EQ(w_hat(k, 0.3).delta_mass, 1.0);
  EXPECT_THROW(w_hat(3, 0.0), DomainError);
}

TEST(WHat, FourierPairOfKernel) {
  const double R = 200;
  for (int k : {1, 2}) {
    double worst = 0;
    for (int j = 0; j < 50; ++j) {
      const double y = -0.98 + 0.04 * j;
      const double ft = 2 * gl_composite<16>(
                                [&](double x) {
                                  return (w_kernel(k, x) - 1) * std::cos(2 * kPi * x * y);
                                },
                                0.0, R, 1600);
      worst = std::max(worst, std::fabs(ft - w_hat(k, y).ac_value));
    }
    EXPECT_LE(worst, 3e-5) << "k=" << k;
  }
}

TEST(DCoeff, Values) {
  EXPECT_EQ(d_coeff(1, 1), 1);
  EXPECT_EQ(d_coeff(2, 3), 5);
  for (int k = 1; k <= 8; ++k) {
    EXPECT_EQ(d_coeff(1, k), 1);
    for (int j = 1; j <= k; ++j) EXPECT_TRUE(is_integer(d_coeff(j, k)));
  }
  EXPECT_THROW(d_coeff(0, 3), DomainError);
  EXPECT_THROW(d_coeff(4, 3), DomainError);
}

TEST(SIdentity, CaseAnalysis) {
  EXPECT_EQ(s_identity(2, 0), 0);
  EXPECT_EQ(s_identity(2, 1), 1);
  EXPECT_EQ(s_identity(2, 2), 6);
  for (int k = 1; k <= 8; ++k)
    for (int n = 0; n <= k; ++n) EXPECT_EQ(s_identity(k, n), s_identity_expected(k, n)) << k << n;
  EXPECT_THROW(s_identity(2, 3), DomainError);
}

TEST(EvenCoeff, BothSumsVanish) {
  for (auto [k, i] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    const auto [a, b] = even_coeff_identities(k, i);
    EXPECT_EQ(a, 0);
    EXPECT_EQ(b, 0);
  }
  EXPECT_THROW(even_coeff_identities(3, 0), DomainError);
  EXPECT_THROW(even_coeff_identities(3, 3), DomainError);
}

TEST(B0, Identity) {
  EXPECT_EQ(b0_coeff(1), 1);
  for (int k = 1; k <= 8; ++k) EXPECT_TRUE(b0_identity(k)) << k;
  // a perturbed b0 must fail
  EXPECT_NE(2 * (b0_coeff(5) + 1) / Rational(factorial(8)), Rational(6 * binom(10, 4)));
}

TEST(Kerneltesi, MatchesWHat) {
  EXPECT_EQ(kerneltesi_hat(1, Rational(1, 2)), Rational(-1, 2));
  EXPECT_EQ(kerneltesi_hat(2, Rational(1, 2)), Rational(-1, 4));
  for (int k : {1, 2})
    for (const Rational& y : {Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(3, 4)}) {
      EXPECT_EQ(kerneltesi_hat(k, y), w_hat_exact(k, y));
      EXPECT_DOUBLE_EQ(kerneltesi_hat(k, y).convert_to<double>(),
                       w_hat(k, y.convert_to<double>()).ac_value);
    }
  EXPECT_LT(abs(kerneltesi_hat(2, Rational(999999, 1000000))), Rational(1, 100000));
  EXPECT_THROW(kerneltesi_hat(2, Rational(1)), DomainError);
  EXPECT_THROW(kerneltesi_hat(3, Rational(1, 2)), DomainError);
}

TEST(Gauss2F1, ChuVandermonde) {
  EXPECT_EQ(gauss_2f1_check(-1, 1, 2), Rational(1, 2));
  EXPECT_EQ(chu_vandermonde(-1, 1, 2), Rational(1, 2));
  EXPECT_EQ(gauss_2f1_check(0, Rational(7, 3), 5), 1);
  EXPECT_EQ(gauss_2f1_check(-2, 3, 5), chu_vandermonde(-2, 3, 5));
  EXPECT_THROW(gauss_2f1_check(-3, 1, -1), DomainError);
  EXPECT_THROW(gauss_2f1_check(1, 1, 2), DomainError);
  for (const auto& c : gauss_grid()) EXPECT_TRUE(c.pass) << c.params.dump();
}

TEST(Hypergeometric, DixonWatsonForms) {
  for (int k = 2; k <= 8; ++k)
    for (int i = (k + 1) / 2; i < k; ++i) {
      const auto [a, b] = even_coeff_hypergeometric(k, i);
      EXPECT_EQ(a, 0) << k << " " << i;
      EXPECT_EQ(b, 0) << k << " " << i;
      EXPECT_EQ(odd_coeff_hypergeometric(k, i), 1) << k << " " << i;
      EXPECT_EQ(odd_coeff(k, i), 1) << k << " " << i;
    }
}

TEST(IdentitySuite, AllPassUpToEight) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_identities(8);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& t : r.tables)
    for (const auto& c : t.results) EXPECT_TRUE(c.pass) << c.name << " " << c.params.dump();
  EXPECT_TRUE(r.all_pass());
  EXPECT_GT(r.count(), 300u);
  EXPECT_LT(secs, 10.0);
  const auto j = to_json(r);
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_EQ(j["coefficients"][2]["d"]["2"], "5");
  EXPECT_EQ(j["coefficients"][0]["b0"], "1");
}

TEST(IdentitySuite, LedgerFlagsAFailure) {
  IdentityTable t;
  t.record("bogus", nlohmann::json::object(), Rational(1, 3), Rational(1, 2));
  EXPECT_FALSE(t.all_pass());
  EXPECT_EQ(to_json(t.results[0])["value"], "1/3");
}
