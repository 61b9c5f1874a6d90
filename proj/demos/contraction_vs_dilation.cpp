// Decay laws of a Breit-Wigner state at rest, with definite velocity and with
// definite momentum, sampled side by side.

#include <cmath>
#include <cstdio>

#include "survival/amplitude.hpp"
#include "survival/analysis.hpp"

int main() {
  using namespace survival;
  const MassDensity d = make_breit_wigner(1.0, 0.01);
  const double v = 0.6;
  const double p = v * lorentz_gamma(v);  // m * gamma * v, so gamma_m equals gamma

  std::printf("gamma = %.6f\n", lorentz_gamma(v));
  std::printf("%8s %12s %12s %12s\n", "t", "F_rest", "F_velocity", "F_momentum");
  for (double t = 0.0; t <= 300.0; t += 25.0) {
    std::printf("%8.1f %12.6f %12.6f %12.6f\n", t, std::norm(survival_rest(d, t)),
                std::norm(survival_velocity(d, v, t)), std::norm(survival_momentum(d, p, t)));
  }

  const auto vel = dilation_report(d, DefiniteVelocity{v});
  const auto mom = dilation_report(d, DefiniteMomentum{p});
  std::printf("tau_v / tau_0 = %.6f (contraction, 1/gamma = %.6f)\n", vel.ratio_measured,
              vel.ratio_predicted);
  std::printf("tau_p / tau_0 = %.6f (dilation, gamma_m = %.6f)\n", mom.ratio_measured,
              mom.ratio_predicted);
}
