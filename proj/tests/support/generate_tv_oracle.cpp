// Emits tv_oracle_frozen.hpp on stdout: oracle solutions for the fixed
// fixture set, frozen so the test suite never depends on oracle runtime.
#include <cmath>
#include <cstdio>
#include <vector>

#include "tv_oracle.hpp"

int main() {
  constexpr int kInstances = 20;
  constexpr int kSize = 8;
  constexpr double kMu[3] = {0.5, 1.0, 5.0};

  std::printf("// Generated by tv_oracle_gen (projected gradient on the ROF dual,\n");
  std::printf("// 1e6 steps per instance); do not edit by hand.\n");
  std::printf("#pragma once\n\nnamespace turbstab_test {\n\n");
  std::printf("inline constexpr int kTvOracleInstances = %d;\n", kInstances);
  std::printf("inline constexpr int kTvOracleSize = %d;\n", kSize);
  std::printf("inline constexpr double kTvOracleMu[3] = {0.5, 1.0, 5.0};\n\n");
  std::printf("inline constexpr double kTvOracleExpected[%d][3][%d] = {\n", kInstances,
              kSize * kSize);

  double worst_tail_change = 0.0;
  for (int inst = 0; inst < kInstances; ++inst) {
    const auto prob = turbstab_test::make_tv_oracle_instance(kSize, inst);
    std::printf("  {\n");
    for (int m = 0; m < 3; ++m) {
      const auto u = turbstab_test::tv_prox_oracle(prob, kMu[m], 1000000);
      // convergence probe: another 200k steps must not move the answer
      const auto u_more = turbstab_test::tv_prox_oracle(prob, kMu[m], 1200000);
      for (std::size_t i = 0; i < u.size(); ++i)
        worst_tail_change = std::max(worst_tail_change, std::fabs(u[i] - u_more[i]));
      std::printf("    {");
      for (std::size_t i = 0; i < u.size(); ++i)
        std::printf("%.17g%s", u[i], i + 1 < u.size() ? ", " : "");
      std::printf("}%s\n", m < 2 ? "," : "");
    }
    std::printf("  }%s\n", inst + 1 < kInstances ? "," : "");
    std::fprintf(stderr, "instance %d done\n", inst);
  }
  std::printf("};\n\n");
  std::printf("// max |change| when extending any run by 200k steps: %.3g\n", worst_tail_change);
  std::printf("}  // namespace turbstab_test\n");
  std::fprintf(stderr, "tail change: %.3g\n", worst_tail_change);
  return 0;
}
