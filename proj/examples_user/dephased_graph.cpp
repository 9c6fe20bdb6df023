// tau_{k,8} of the fully connected graph state under local dephasing.
#include <kpart/dynamics.hpp>

#include <cstdio>

int main() {
  using namespace kpart;
  const int n = 8;
  const auto g = make_graph_state(complete_graph(n), n);
  const std::vector<int> ks{2, 4, 8};
  std::printf("gamma_t   tau2       tau4       tau8\n");
  for (double gt = 0.0; gt <= 0.6 + 1e-12; gt += 0.1) {
    const auto v = dephased_tau(g, gt, ks, analytic_probe(n));
    std::printf("%.2f   % .6f  % .6f  % .6f\n", gt, v[0], v[1], v[2]);
  }
  for (const auto& [k, t] : lifetimes(g, ks)) std::printf("lifetime k=%d: %.4f\n", k, t);
}
