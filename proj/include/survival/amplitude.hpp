#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "survival/quadrature.hpp"
#include "survival/spectral.hpp"

namespace survival {

using Complex = std::complex<double>;

/// (1 - v^2)^(-1/2), c = 1.
inline double lorentz_gamma(double v) {
  if (!(v >= 0.0 && v < 1.0))
    throw std::domain_error("velocity must satisfy 0 <= v < 1, got " + std::to_string(v));
  return 1.0 / std::sqrt(1.0 - v * v);
}

/// Lorentz factor sqrt(p^2 + m^2) / m of a particle of mass m and momentum p.
inline double gamma_m(double p, double m) {
  if (!(m > 0.0)) throw std::domain_error("mass must be positive");
  if (!(p >= 0.0)) throw std::domain_error("momentum must be non-negative");
  return std::sqrt(p * p + m * m) / m;
}

// Kinematic preparations of the moving state.
struct Rest {
  friend bool operator==(const Rest&, const Rest&) = default;
};
struct DefiniteVelocity {
  double v = 0.0;
  friend bool operator==(const DefiniteVelocity&, const DefiniteVelocity&) = default;
};
struct DefiniteMomentum {
  double p = 0.0;
  friend bool operator==(const DefiniteMomentum&, const DefiniteMomentum&) = default;
};

using KinematicPreparation = std::variant<Rest, DefiniteVelocity, DefiniteMomentum>;

inline void validate(const KinematicPreparation& prep) {
  if (const auto* dv = std::get_if<DefiniteVelocity>(&prep)) {
    if (!(dv->v >= 0.0 && dv->v < 1.0))
      throw std::domain_error("velocity must satisfy 0 <= v < 1, got " + std::to_string(dv->v));
  } else if (const auto* dp = std::get_if<DefiniteMomentum>(&prep)) {
    if (!(dp->p >= 0.0) || !std::isfinite(dp->p))
      throw std::domain_error("momentum must satisfy p >= 0, got " + std::to_string(dp->p));
  }
}

inline std::string describe(const KinematicPreparation& prep) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return "rest";
        else if constexpr (std::is_same_v<T, DefiniteVelocity>) return "velocity";
        else return "momentum";
      },
      prep);
}

namespace detail {

inline void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("time must be finite and t >= 0");
}

// Phase functions mu -> phase for each preparation at fixed t.
struct LinearPhase {
  double rate;
  double operator()(double mu) const noexcept { return mu * rate; }
};
struct ScaledLinearPhase {
  double scale;
  double t;
  double operator()(double mu) const noexcept { return (mu * scale) * t; }
};
struct MomentumPhase {
  double p;
  double t;
  double operator()(double mu) const noexcept { return t * std::sqrt(p * p + mu * mu); }
};

template <class PhaseFn>
Complex integrate_density(const BreitWignerDensity& d, PhaseFn phase,
                          const QuadratureOptions& options) {
  return integrate_oscillatory(make_integral_spec(d, phase, options)).value;
}

template <class EnergyFn>
Complex sum_lines(const DiscreteDensity& d, double t, EnergyFn energy) {
  Complex acc;
  for (const auto& line : d.lines()) {
    const double ph = t * energy(line.mass);
    acc += line.weight * Complex(std::cos(ph), -std::sin(ph));
  }
  return acc;
}

}  // namespace detail

/// Survival amplitude of the state at rest: integral of |c(mu)|^2 exp(-i mu t).
inline Complex survival_rest(const MassDensity& d, double t, const QuadratureOptions& options = {}) {
  detail::require_time(t);
  if (const auto* bw = std::get_if<BreitWignerDensity>(&d))
    return detail::integrate_density(*bw, detail::LinearPhase{t}, options);
  return detail::sum_lines(std::get<DiscreteDensity>(d), t, [](double mu) { return mu; });
}

/// Survival amplitude of the definite-velocity state, A_v(t) = A_0(gamma t).
inline Complex survival_velocity(const MassDensity& d, double v, double t,
                                 const QuadratureOptions& options = {}) {
  detail::require_time(t);
  return survival_rest(d, lorentz_gamma(v) * t, options);
}

/// Same amplitude integrated directly with phase mu * gamma * t. Only used to
/// cross-check the rescaling identity against the quadrature engine.
inline Complex survival_velocity_direct(const MassDensity& d, double v, double t,
                                        const QuadratureOptions& options = {}) {
  detail::require_time(t);
  const double g = lorentz_gamma(v);
  if (const auto* bw = std::get_if<BreitWignerDensity>(&d))
    return detail::integrate_density(*bw, detail::ScaledLinearPhase{g, t}, options);
  return detail::sum_lines(std::get<DiscreteDensity>(d), t, [g](double mu) { return mu * g; });
}

/// Survival amplitude of the definite-momentum state: phases t * sqrt(p^2 + mu^2).
inline Complex survival_momentum(const MassDensity& d, double p, double t,
                                 const QuadratureOptions& options = {}) {
  detail::require_time(t);
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::domain_error("momentum must satisfy p >= 0");
  if (const auto* bw = std::get_if<BreitWignerDensity>(&d))
    return detail::integrate_density(*bw, detail::MomentumPhase{p, t}, options);
  return detail::sum_lines(std::get<DiscreteDensity>(d), t,
                           [p](double mu) { return std::sqrt(p * p + mu * mu); });
}

inline Complex survival(const MassDensity& d, const KinematicPreparation& prep, double t,
                        const QuadratureOptions& options = {}) {
  validate(prep);
  return std::visit(
      [&](const auto& x) -> Complex {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return survival_rest(d, t, options);
        else if constexpr (std::is_same_v<T, DefiniteVelocity>)
          return survival_velocity(d, x.v, t, options);
        else return survival_momentum(d, x.p, t, options);
      },
      prep);
}

// Exponential approximants, valid away from the short-time and long-time regimes.

inline Complex approx_rest(double m, double width, double t) {
  return std::exp(Complex(-0.5 * width * t, -m * t));
}

inline Complex approx_momentum(double m, double width, double p, double t) {
  const double g = gamma_m(p, m);
  return std::exp(Complex(-0.5 * width * t / g, -m * g * t));
}

inline Complex approx_velocity(double m, double width, double v, double t) {
  const double g = lorentz_gamma(v);
  return std::exp(Complex(-0.5 * width * t * g, -m * g * t));
}

inline Complex approximant(const BreitWignerDensity& d, const KinematicPreparation& prep, double t) {
  return std::visit(
      [&](const auto& x) -> Complex {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return approx_rest(d.mass(), d.width(), t);
        else if constexpr (std::is_same_v<T, DefiniteVelocity>)
          return approx_velocity(d.mass(), d.width(), x.v, t);
        else return approx_momentum(d.mass(), d.width(), x.p, t);
      },
      prep);
}

/// Exponents of the momentum and velocity approximants with gamma set equal to
/// gamma_m. Their imaginary parts coincide; only the decay terms differ.
struct ExponentComparison {
  Complex momentum_exponent;
  Complex velocity_exponent;
  /// Re(E_p) - Re(E_v) = width * t * (gamma_m - 1/gamma_m) / 2.
  double real_part_gap = 0.0;
};

inline ExponentComparison exponent_compare(double m, double width, double p, double t) {
  const double g = gamma_m(p, m);
  const double phase = -m * t * g;
  ExponentComparison out;
  out.momentum_exponent = Complex(-0.5 * width * t / g, phase);
  out.velocity_exponent = Complex(-0.5 * width * t * g, phase);
  out.real_part_gap = 0.5 * width * t * (g - 1.0 / g);
  return out;
}

struct AmplitudeSeries {
  std::vector<double> times;
  std::vector<Complex> amplitudes;
  std::vector<double> probabilities;
  /// Exponential approximant |A|^2, present for Breit-Wigner densities.
  std::optional<std::vector<double>> approx_probabilities;
  KinematicPreparation preparation;
  std::string density;
};

inline std::vector<double> linear_grid(double t_min, double t_max, std::size_t n) {
  if (n < 2) throw std::invalid_argument("time grid needs at least 2 points");
  if (!(t_min >= 0.0) || !(t_max > t_min))
    throw std::invalid_argument("time grid needs 0 <= t_min < t_max");
  std::vector<double> out(n);
  const double step = (t_max - t_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = t_min + step * static_cast<double>(i);
  out.back() = t_max;
  return out;
}

inline std::vector<double> log_grid(double t_min, double t_max, std::size_t n) {
  if (n < 2) throw std::invalid_argument("time grid needs at least 2 points");
  if (!(t_min > 0.0) || !(t_max > t_min))
    throw std::invalid_argument("log time grid needs 0 < t_min < t_max");
  std::vector<double> out(n);
  const double lo = std::log(t_min);
  const double step = (std::log(t_max) - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(lo + step * static_cast<double>(i));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

/// Evaluates the survival amplitude on every grid point. Points are split in
/// contiguous blocks across hardware threads; results are identical to a
/// serial evaluation.
inline AmplitudeSeries amplitude_series(const MassDensity& d, const KinematicPreparation& prep,
                                        std::vector<double> times,
                                        const QuadratureOptions& options = {}) {
  validate(prep);
  for (std::size_t i = 0; i < times.size(); ++i) {
    detail::require_time(times[i]);
    if (i > 0 && times[i] < times[i - 1])
      throw std::invalid_argument("time grid must be sorted");
  }

  AmplitudeSeries out;
  out.preparation = prep;
  out.density = describe(d);
  out.amplitudes.resize(times.size());

  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  const std::size_t block = (times.size() + workers - 1) / std::max<std::size_t>(workers, 1);
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < times.size(); begin += block) {
    const std::size_t end = std::min(times.size(), begin + block);
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i)
        out.amplitudes[i] = survival(d, prep, times[i], options);
    }));
  }
  for (auto& job : jobs) job.get();

  out.probabilities.reserve(times.size());
  for (const auto& a : out.amplitudes) out.probabilities.push_back(std::norm(a));

  if (const auto* bw = std::get_if<BreitWignerDensity>(&d)) {
    std::vector<double> approx;
    approx.reserve(times.size());
    for (double t : times) approx.push_back(std::norm(approximant(*bw, prep, t)));
    out.approx_probabilities = std::move(approx);
  }
  out.times = std::move(times);
  return out;
}

}  // namespace survival
