// Oscillation period of a two-mass clock in the three preparations.

#include <cmath>
#include <cstdio>

#include "survival/twomass.hpp"

int main() {
  using namespace survival;
  const TwoMassState clock(1.0, 2.0);
  const double p = 2.0;
  const double v = p / std::sqrt(p * p + 1.5 * 1.5);

  const double rest = oscillation_period(clock, Rest{});
  std::printf("rest period            %.12f\n", rest);
  std::printf("velocity v=%.4f period %.12f (ratio %.12f = 1/gamma)\n", v,
              oscillation_period(clock, DefiniteVelocity{v}),
              oscillation_period(clock, DefiniteVelocity{v}) / rest);
  std::printf("momentum p=%.1f period   %.12f (ratio %.12f)\n", p,
              oscillation_period(clock, DefiniteMomentum{p}),
              oscillation_period(clock, DefiniteMomentum{p}) / rest);
  std::printf("gamma_tilde            %.12f\n", effective_gamma_tilde(p, 1.0, 2.0));
  std::printf("gamma_m(p, m1), gamma_m(p, m2) = %.6f, %.6f\n", gamma_m(p, 1.0), gamma_m(p, 2.0));
}
