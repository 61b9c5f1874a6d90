#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <variant>

#include "survival/amplitude.hpp"
#include "survival/spectral.hpp"

namespace survival {

/// Superposition of two widthless mass eigenstates.
/// Weights are the squared moduli of the expansion coefficients.
class TwoMassState {
 public:
  TwoMassState(double m1, double m2, double w1 = 0.5, double w2 = 0.5)
      : m1_(m1), m2_(m2), w1_(w1), w2_(w2) {
    if (!(m1 >= 0.0) || !(m2 >= 0.0) || !std::isfinite(m1) || !std::isfinite(m2))
      throw std::invalid_argument("two-mass state needs non-negative finite masses");
    if (m1 == m2) throw std::invalid_argument("two-mass state needs m1 != m2");
    if (!(w1 > 0.0) || !(w2 > 0.0)) throw std::invalid_argument("two-mass weights must be positive");
    if (std::abs(w1 + w2 - 1.0) > 1e-12)
      throw std::invalid_argument("two-mass weights must sum to 1");
  }

  double m1() const noexcept { return m1_; }
  double m2() const noexcept { return m2_; }
  double w1() const noexcept { return w1_; }
  double w2() const noexcept { return w2_; }
  bool equal_weights() const noexcept { return w1_ == 0.5 && w2_ == 0.5; }

  DiscreteDensity as_density() const { return DiscreteDensity({{m1_, w1_}, {m2_, w2_}}); }

  friend bool operator==(const TwoMassState&, const TwoMassState&) = default;

 private:
  double m1_, m2_, w1_, w2_;
};

namespace detail {

inline void require_equal_weights(const TwoMassState& s) {
  if (!s.equal_weights())
    throw std::invalid_argument("closed-form oscillation laws need equal weights w1 = w2 = 1/2");
}

/// sqrt(p^2 + m1^2) - sqrt(p^2 + m2^2) without cancellation.
inline double energy_splitting(double p, double m1, double m2) {
  const double e1 = std::sqrt(p * p + m1 * m1);
  const double e2 = std::sqrt(p * p + m2 * m2);
  return (m1 - m2) * (m1 + m2) / (e1 + e2);
}

}  // namespace detail

inline Complex osc_amplitude(const TwoMassState& s, const KinematicPreparation& prep, double t) {
  validate(prep);
  detail::require_time(t);
  const auto term = [t](double weight, double energy) {
    const double ph = energy * t;
    return weight * Complex(std::cos(ph), -std::sin(ph));
  };
  return std::visit(
      [&](const auto& x) -> Complex {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) {
          return term(s.w1(), s.m1()) + term(s.w2(), s.m2());
        } else if constexpr (std::is_same_v<T, DefiniteVelocity>) {
          const double g = lorentz_gamma(x.v);
          return term(s.w1(), s.m1() * g) + term(s.w2(), s.m2() * g);
        } else {
          return term(s.w1(), std::sqrt(x.p * x.p + s.m1() * s.m1())) +
                 term(s.w2(), std::sqrt(x.p * x.p + s.m2() * s.m2()));
        }
      },
      prep);
}

/// (sqrt(p^2 + m1^2) + sqrt(p^2 + m2^2)) / (m1 + m2): the factor by which the
/// definite-momentum oscillation is slowed relative to rest.
inline double effective_gamma_tilde(double p, double m1, double m2) {
  if (!(p >= 0.0)) throw std::domain_error("momentum must be non-negative");
  if (!(m1 + m2 > 0.0)) throw std::domain_error("m1 + m2 must be positive");
  return (std::sqrt(p * p + m1 * m1) + std::sqrt(p * p + m2 * m2)) / (m1 + m2);
}

/// Angular frequency of the survival probability, |E1 - E2| for the given preparation.
inline double oscillation_frequency(const TwoMassState& s, const KinematicPreparation& prep) {
  validate(prep);
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return std::abs(s.m1() - s.m2());
        else if constexpr (std::is_same_v<T, DefiniteVelocity>)
          return std::abs(s.m1() - s.m2()) * lorentz_gamma(x.v);
        else return std::abs(detail::energy_splitting(x.p, s.m1(), s.m2()));
      },
      prep);
}

/// cos^2 closed forms of the equal-weight survival probability.
inline double osc_probability_equal_weights(const TwoMassState& s, const KinematicPreparation& prep,
                                            double t) {
  detail::require_equal_weights(s);
  detail::require_time(t);
  validate(prep);
  const double half_phase = std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return 0.5 * (s.m1() - s.m2()) * t;
        else if constexpr (std::is_same_v<T, DefiniteVelocity>)
          return 0.5 * (s.m1() - s.m2()) * t * lorentz_gamma(x.v);
        else return 0.5 * detail::energy_splitting(x.p, s.m1(), s.m2()) * t;
      },
      prep);
  const double c = std::cos(half_phase);
  return c * c;
}

/// Period of the equal-weight survival probability.
inline double oscillation_period(const TwoMassState& s, const KinematicPreparation& prep) {
  detail::require_equal_weights(s);
  return 2.0 * std::numbers::pi / oscillation_frequency(s, prep);
}

}  // namespace survival
