// Solve the mean-field stationary point for a uniform degree profile and
// print the first tail levels next to the closed-form sandwich bounds.

#include <cstdio>

#include "mfedge/meanfield.hpp"

int main() {
  using namespace mfedge;
  auto profile = DegreeProfile::uniform(6, 9);
  const double load = 0.7;  // x_c * lambda

  StationaryPoint sp = stationary_point(profile, load, 1.0, 1.0, 1e-9, 16);
  std::printf("collaboration load %.2f, residual %.2e, fixed-point/ODE gap %.2e\n", load,
              sp.residual, sp.ode_gap);
  std::printf("%4s %10s %10s %10s\n", "k", "s*_{k,1}", "s*_{k,2}", "s*_{k,3}");
  for (std::size_t kc = 0; kc < profile.size(); ++kc)
    std::printf("%4d %10.5f %10.5f %10.5f\n", profile.support()[kc], sp.s_star.at(kc, 1),
                sp.s_star.at(kc, 2), sp.s_star.at(kc, 3));

  for (int i = 1; i <= 3; ++i) {
    auto [lo, hi] = stationary_tail_bounds(profile, load, 1.0, 1.0, i);
    std::printf("level %d bounds: [%.5f, %.5f]\n", i, lo, hi);
  }
  std::printf("busy probability %.6f (load/mu = %.6f)\n", sp.busy, load);
  std::printf("mean workload %.4f vs M/M/1 %.4f\n", sp.mean_workload, load / (1.0 - load));
  return 0;
}
