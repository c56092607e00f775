// Weighted one-level density at T = 1000 for the delta = 0.45 bump, k = 0, 1, 2.
// Zeros come from the cache in $WLD_CACHE_DIR (computed on first use).

#include <cstdio>

#include "wld/empirical_statistics.hpp"

int main() {
  using namespace wld;
  const double T = 1000;
  const auto f = make_bump_pair(0.45);
  const auto phi = WeightFunction::canonical();
  const auto zeros = zeros_for_density(f, phi, T);
  std::printf("%zu zeros in [%.2f, %.2f]\n", zeros.size(), zeros.t_min, zeros.t_max);
  for (int k = 0; k <= 2; ++k) {
    const auto r = weighted_density(k, f, phi, T, zeros);
    std::printf("k=%d  lhs %.6g  ratio %.4f  prediction %.4f", k, r.lhs, r.ratio, r.prediction);
    if (r.rhs_k1) std::printf("  rhs_k1 %.6g", *r.rhs_k1);
    std::printf("\n");
  }
}
