// Entanglement depth certified along a white-noise W-state line.
#include <kpart/hierarchy.hpp>
#include <kpart/qstate.hpp>
#include <kpart/weights.hpp>

#include <cstdio>

int main() {
  using namespace kpart;
  const int n = 4;
  OptimizerConfig cfg;
  cfg.restarts = 8;
  for (double q = 0.5; q <= 1.0 + 1e-12; q += 0.1) {
    const auto rho = werner_mix(make_w_state(n), q);
    int depth = 1;
    for (int k = 2; k <= n; ++k) {
      if (tau_optimized(rho, w_state_weights(k, n), cfg).value > 1e-9) depth = k;
    }
    std::printf("q = %.1f  certified depth >= %d\n", q, depth);
  }
}
