#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "golden_fixture.hpp"
#include "wld/zero_finder.hpp"

using namespace wld;

TEST(RvmCount, Formula) {
  EXPECT_NEAR(rvm_count(100), golden().real("rvm_count|T=100"), 1e-12);
  // the quoted figures 28.127 and 647.74 are the formula without its 7/8
  EXPECT_NEAR(rvm_count(100) - 0.875, 28.127, 1e-3);
  EXPECT_NEAR(rvm_count(1000), golden().real("rvm_count|T=1000"), 1e-11);
  EXPECT_NEAR(rvm_count(1000) - 0.875, 647.74, 0.01);
  EXPECT_NEAR(rvm_count(kTwoPi * std::exp(1.0)), 0.875, 1e-13);
  EXPECT_THROW(rvm_count(1.0), DomainError);
}

TEST(ZeroCount, ExactAgainstOracle) {
  EXPECT_EQ(*zero_count_exact(100), 29);
  EXPECT_EQ(*zero_count_exact(1000), static_cast<std::int64_t>(golden().real("zero_index|t=1000")));
  EXPECT_EQ(*zero_count_exact(2000) - *zero_count_exact(1000),
            static_cast<std::int64_t>(golden().real("zero_count|t_min=1000,t_max=2000")));
  EXPECT_EQ(*zero_count_exact(10.0), 0);
}

TEST(FindZeros, FirstHundred) {
  const auto zs = find_zeros(0, 100);
  ASSERT_TRUE(zs.complete);
  ASSERT_EQ(zs.size(), 29u);
  EXPECT_NEAR(zs.zeros[0].gamma, golden().real("first_zero|"), 1e-9);
  EXPECT_NEAR(zs.zeros[0].gamma, 14.1347251, 1e-7);
  EXPECT_EQ(zs.zeros[0].index, 1);
  EXPECT_EQ(zs.zeros[28].index, 29);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_LE(zs.zeros[i].err, 1e-8);
    EXPECT_LE(std::fabs(hardy_z(zs.zeros[i].gamma)), 1e-6);
    if (i) {
      EXPECT_LT(zs.zeros[i - 1].gamma, zs.zeros[i].gamma);
    }
  }
}

TEST(FindZeros, ShortWindows) {
  const auto empty = find_zeros(50.1, 50.2);
  EXPECT_TRUE(empty.complete);
  EXPECT_EQ(empty.size(), 0u);
  const auto w = find_zeros(1000, 1001);
  EXPECT_TRUE(w.complete);
  const double smooth = (riemann_siegel_theta(1001) - riemann_siegel_theta(1000)) / kPi;
  EXPECT_LE(std::fabs(static_cast<double>(w.size()) - smooth), 2.0);
  EXPECT_EQ(static_cast<double>(w.size()), golden().real("zero_count|t_min=1000,t_max=1001"));
}

TEST(FindZeros, WindowAgainstOracleOrdinates) {
  const auto zs = find_zeros(1000, 2000);
  ASSERT_TRUE(zs.complete);
  EXPECT_EQ(static_cast<double>(zs.size()), golden().real("zero_count|t_min=1000,t_max=2000"));
  EXPECT_LE(std::fabs(static_cast<double>(zs.size()) - (rvm_count(2000) - rvm_count(1000))),
            3 * std::log(1000.0));
  for (const auto& z : zs.zeros) {
    for (int n : {649, 650, 1000}) {
      if (z.index == n) {
        EXPECT_NEAR(z.gamma, golden().real("zero|n=" + std::to_string(n)), 1e-9) << n;
      }
    }
    EXPECT_LE(std::fabs(hardy_z(z.gamma)), 1e-6);
  }
  EXPECT_EQ(zs.zeros.front().index, 650);
}

TEST(FindZeros, SerialAndParallelAgree) {
  ZeroFinderOptions one;
  one.threads = 1;
  ZeroFinderOptions many;
  many.threads = 4;
  const auto a = find_zeros(3000, 3100, one), b = find_zeros(3000, 3100, many);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.zeros[i].gamma, b.zeros[i].gamma);
}

TEST(FindZeros, RejectsBadWindows) {
  EXPECT_THROW(find_zeros(10, 5), DomainError);
  EXPECT_THROW(find_zeros(-1, 5), DomainError);
  EXPECT_THROW(find_zeros(1, 2e6), DomainError);
}

TEST(ZeroCache, RoundTripIsBitIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "wld_cache_test";
  std::filesystem::remove_all(dir);
  const auto zs = find_zeros(200, 300);
  const auto file = dir / cache_file_name(200, 300);
  write_zero_cache(zs, file);
  const auto back = read_zero_cache(file);
  EXPECT_EQ(back.t_min, 200);
  EXPECT_EQ(back.t_max, 300);
  ASSERT_EQ(back.size(), zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_EQ(back.zeros[i].gamma, zs.zeros[i].gamma);
    EXPECT_EQ(back.zeros[i].index, zs.zeros[i].index);
    EXPECT_EQ(back.zeros[i].err, zs.zeros[i].err);
  }
  const auto hit = find_cached_zeros(210, 290, dir);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->size(), zs.size());
  EXPECT_FALSE(find_cached_zeros(100, 290, dir).has_value());
  std::filesystem::remove_all(dir);
}

TEST(FindZeros, CompletenessAtTenThousand) {
  const auto zs = find_zeros(10000, 20000);
  ASSERT_TRUE(zs.complete);
  EXPECT_EQ(static_cast<double>(zs.size()), golden().real("zero_count|t_min=10000,t_max=20000"));
  EXPECT_LE(std::fabs(static_cast<double>(zs.size()) - (rvm_count(20000) - rvm_count(10000))),
            3 * std::log(10000.0));
  // zero 10142 lies just below 10^4, so the window starts at 10143
  EXPECT_LT(golden().real("zero|n=10142"), 10000.0);
  ASSERT_FALSE(zs.zeros.empty());
  EXPECT_EQ(zs.zeros.front().index, 10143);
  EXPECT_NEAR(zs.zeros.front().gamma, golden().real("zero|n=10143"), 1e-9);
}
