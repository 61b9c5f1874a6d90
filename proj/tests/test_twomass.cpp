#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "survival/analysis.hpp"
#include "survival/twomass.hpp"

namespace {

using namespace survival;
using std::numbers::pi;

TEST(TwoMassState, Validation) {
  EXPECT_THROW(TwoMassState(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TwoMassState(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TwoMassState(1.0, 2.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TwoMassState(1.0, 2.0, 0.6, 0.6), std::invalid_argument);
  EXPECT_NO_THROW(TwoMassState(0.0, 2.0));
  EXPECT_TRUE(TwoMassState(1.0, 2.0).equal_weights());
  EXPECT_FALSE(TwoMassState(1.0, 2.0, 0.3, 0.7).equal_weights());
}

TEST(OscAmplitude, UnitAtZeroForAllPreparations) {
  const TwoMassState s(1.0, 2.0, 0.3, 0.7);
  for (const KinematicPreparation& prep :
       {KinematicPreparation{Rest{}}, KinematicPreparation{DefiniteVelocity{0.4}},
        KinematicPreparation{DefiniteMomentum{3.0}}})
    EXPECT_EQ(osc_amplitude(s, prep, 0.0), Complex(1.0, 0.0));
}

TEST(OscAmplitude, RestNodeAtPi) {
  const TwoMassState s(1.0, 2.0);
  EXPECT_LE(std::norm(osc_amplitude(s, Rest{}, pi)), 1e-30);
  EXPECT_LE(osc_probability_equal_weights(s, Rest{}, pi), 1e-30);
}

TEST(OscAmplitude, ZeroMomentumIsRest) {
  const TwoMassState s(0.3, 1.7, 0.25, 0.75);
  for (double t : {0.5, 3.0, 40.0})
    EXPECT_EQ(osc_amplitude(s, DefiniteMomentum{0.0}, t), osc_amplitude(s, Rest{}, t));
}

TEST(OscAmplitude, MatchesGenericDiscretePath) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double w1 = 0.05 + 0.9 * u(rng);
    const TwoMassState s(3.0 * u(rng), 3.0 + 3.0 * u(rng), w1, 1.0 - w1);
    const MassDensity d = s.as_density();
    const double t = 50.0 * u(rng), v = 0.99 * u(rng), p = 5.0 * u(rng);
    EXPECT_LE(std::abs(osc_amplitude(s, Rest{}, t) - survival_rest(d, t)), 1e-12);
    EXPECT_LE(std::abs(osc_amplitude(s, DefiniteVelocity{v}, t) - survival_velocity(d, v, t)), 1e-12);
    EXPECT_LE(std::abs(osc_amplitude(s, DefiniteMomentum{p}, t) - survival_momentum(d, p, t)), 1e-12);
  }
}

TEST(ClosedForms, UnequalWeightsRejected) {
  const TwoMassState s(1.0, 2.0, 0.3, 0.7);
  EXPECT_THROW(osc_probability_equal_weights(s, Rest{}, 1.0), std::invalid_argument);
  EXPECT_THROW(oscillation_period(s, Rest{}), std::invalid_argument);
}

TEST(ClosedForms, VelocityIsRestAtDilatedTime) {
  const TwoMassState s(1.0, 2.0);
  EXPECT_EQ(osc_probability_equal_weights(s, DefiniteVelocity{0.6}, 0.0), 1.0);
  for (double t : {0.3, 1.7, 5.0, 20.0})
    EXPECT_NEAR(osc_probability_equal_weights(s, DefiniteVelocity{0.6}, t),
                osc_probability_equal_weights(s, Rest{}, 1.25 * t), 1e-14);
}

TEST(ClosedForms, MomentumIsRestAtGammaTildeTime) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const TwoMassState s(0.1 + u(rng), 1.2 + u(rng));
    const double p = 4.0 * u(rng), t = 30.0 * u(rng);
    const double gt = effective_gamma_tilde(p, s.m1(), s.m2());
    EXPECT_NEAR(osc_probability_equal_weights(s, DefiniteMomentum{p}, t),
                osc_probability_equal_weights(s, Rest{}, t / gt), 1e-12);
  }
}

TEST(ClosedForms, ProbabilityRangeAndPeriodicity) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const TwoMassState s(u(rng), 1.0 + u(rng));
    const KinematicPreparation prep =
        (i % 3 == 0)   ? KinematicPreparation{Rest{}}
        : (i % 3 == 1) ? KinematicPreparation{DefiniteVelocity{0.9 * u(rng)}}
                       : KinematicPreparation{DefiniteMomentum{3.0 * u(rng)}};
    const double period = oscillation_period(s, prep);
    for (int k = 0; k < 20; ++k) {
      const double t = 3.0 * period * u(rng);
      const double f = osc_probability_equal_weights(s, prep, t);
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      EXPECT_NEAR(osc_probability_equal_weights(s, prep, t + period), f, 1e-12);
    }
  }
}

TEST(GammaTilde, Values) {
  EXPECT_EQ(effective_gamma_tilde(0.0, 1.0, 2.0), 1.0);
  EXPECT_NEAR(effective_gamma_tilde(2.0, 1.0, 2.0), (std::sqrt(5.0) + std::sqrt(8.0)) / 3.0, 1e-15);
  EXPECT_NEAR(effective_gamma_tilde(2.0, 1.0, 2.0), 1.6881650340817, 1e-12);
  for (double m : {0.1, 1.0, 7.0})
    for (double p : {0.0, 0.5, 3.0}) EXPECT_EQ(effective_gamma_tilde(p, m, m), gamma_m(p, m));
}

TEST(GammaTilde, Sandwich) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double m1 = 0.05 + 2.0 * u(rng);
    const double m2 = m1 + 0.01 + 2.0 * u(rng);
    const double p = 0.01 + 5.0 * u(rng);
    const double gt = effective_gamma_tilde(p, m1, m2);
    EXPECT_LT(gamma_m(p, m2), gt);
    EXPECT_LT(gt, gamma_m(p, m1));
  }
}

TEST(GammaTilde, NotEinsteinianForDistinctMasses) {
  const double p = 2.0, m1 = 1.0, m2 = 2.0;
  const double gt = effective_gamma_tilde(p, m1, m2);
  for (double mbar : {m1, m2, 0.5 * (m1 + m2)}) {
    const double v = p / std::sqrt(p * p + mbar * mbar);
    EXPECT_GT(std::abs(gt - lorentz_gamma(v)), 1e-2) << "mbar=" << mbar;
  }
}

TEST(Period, ClosedFormValues) {
  const TwoMassState s(1.0, 2.0);
  EXPECT_NEAR(oscillation_period(s, Rest{}), 2.0 * pi, 1e-15);
  EXPECT_NEAR(oscillation_period(s, DefiniteVelocity{0.6}) / oscillation_period(s, Rest{}), 0.8, 1e-15);
  for (double p : {0.5, 2.0, 10.0})
    EXPECT_NEAR(oscillation_period(s, DefiniteMomentum{p}) / oscillation_period(s, Rest{}),
                effective_gamma_tilde(p, 1.0, 2.0), 1e-12);
}

TEST(Period, MeasuredFromGenericAmplitude) {
  const TwoMassState s(1.0, 2.0);
  const MassDensity d = s.as_density();
  const double p = 2.0;
  const double rest = measure_period([&](double t) { return std::norm(survival_rest(d, t)); }, 20.0);
  const double moving =
      measure_period([&](double t) { return std::norm(survival_momentum(d, p, t)); }, 30.0);
  EXPECT_NEAR(rest, 2.0 * pi, 1e-12);
  EXPECT_NEAR(moving / rest, (std::sqrt(5.0) + std::sqrt(8.0)) / 3.0, 1e-12);
}

TEST(Period, NearDegenerateSplittingIsStable) {
  const double m1 = 1.0, m2 = 1.0 + 1e-9, p = 3.0;
  const TwoMassState s(m1, m2);
  const double naive = std::sqrt(p * p + m2 * m2) - std::sqrt(p * p + m1 * m1);
  const double expected = (m2 - m1) * (m1 + m2) / (std::sqrt(p * p + m1 * m1) + std::sqrt(p * p + m2 * m2));
  EXPECT_NEAR(oscillation_frequency(s, DefiniteMomentum{p}), expected, 1e-24);
  EXPECT_GT(std::abs(naive - expected) / expected, 1e-9);
}

}  // namespace
