#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "survival/amplitude.hpp"
#include "survival/errors.hpp"
#include "survival/spectral.hpp"

namespace survival {

struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  bool contains(const TimeWindow& w) const noexcept { return lo <= w.lo && w.hi <= hi; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Log-linear least-squares lifetime estimate.
struct LifetimeFit {
  double tau = 0.0;
  double log_residual_rms = 0.0;
  TimeWindow window;
  std::size_t n_points = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;
inline constexpr double kMinFitProbability = 1e-3;

/// Fits ln|A(t)|^2 = c - t / tau over the grid points inside `window`.
inline LifetimeFit fit_lifetime(const std::vector<double>& times,
                                const std::vector<double>& probabilities, TimeWindow window) {
  if (times.size() != probabilities.size())
    throw std::invalid_argument("times and probabilities differ in length");
  if (!(window.lo < window.hi)) throw fit_error("fit window needs t_lo < t_hi");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!window.contains(times[i])) continue;
    if (!(probabilities[i] > kMinFitProbability))
      throw fit_error("probability " + std::to_string(probabilities[i]) + " at t=" +
                      std::to_string(times[i]) + " is below the fit floor of 1e-3");
    xs.push_back(times[i]);
    ys.push_back(std::log(probabilities[i]));
  }
  if (xs.size() < kMinFitPoints)
    throw fit_error("lifetime fit needs at least 8 points in the window, got " +
                    std::to_string(xs.size()));

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) throw fit_error("survival probability does not decay in the fit window");

  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  return {-1.0 / slope, std::sqrt(ss / n), window, xs.size()};
}

inline LifetimeFit fit_lifetime(const AmplitudeSeries& series, TimeWindow window) {
  return fit_lifetime(series.times, series.probabilities, window);
}

/// Decay rate that sets the exponential time scale of a preparation:
/// width for rest, width/gamma_m for momentum, width*gamma for velocity.
inline double effective_width(const BreitWignerDensity& d, const KinematicPreparation& prep) {
  validate(prep);
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rest>) return d.width();
        else if constexpr (std::is_same_v<T, DefiniteVelocity>) return d.width() * lorentz_gamma(x.v);
        else return d.width() / gamma_m(x.p, d.mass());
      },
      prep);
}

/// Default comparison window [0.2, 3] / width_eff.
inline TimeWindow default_window(const BreitWignerDensity& d, const KinematicPreparation& prep) {
  const double w = effective_width(d, prep);
  return {0.2 / w, 3.0 / w};
}

struct ComparisonReport {
  std::string preparation;
  /// v for velocity, p for momentum.
  double parameter = 0.0;
  /// tau_moving / tau_rest.
  double ratio_measured = 0.0;
  /// Einstein dilation factor (gamma or gamma_m).
  double ratio_einstein = 0.0;
  /// gamma_m for momentum (dilation), 1/gamma for velocity (contraction).
  double ratio_predicted = 0.0;
  /// max |F_moving(t) - F_rest(t * scale)| over the moving window.
  double max_pointwise_gap = 0.0;
  LifetimeFit rest_fit;
  LifetimeFit moving_fit;
};

struct DilationOptions {
  /// Rest-frame fit window; defaults to default_window(d, Rest{}). The moving
  /// window is this one stretched by the expected lifetime ratio.
  std::optional<TimeWindow> rest_window;
  std::size_t n_points = 64;
  /// Integrate the velocity series with phase mu*gamma*t instead of rescaling
  /// time, so the pointwise gap tests the quadrature rather than an identity.
  bool velocity_direct = true;
  QuadratureOptions quadrature{};
};

inline ComparisonReport dilation_report(const MassDensity& density, const KinematicPreparation& prep,
                                        const DilationOptions& options = {}) {
  validate(prep);
  const auto* bw = std::get_if<BreitWignerDensity>(&density);
  if (bw == nullptr)
    throw std::invalid_argument("dilation report needs a Breit-Wigner density (discrete lines do not decay)");
  if (std::holds_alternative<Rest>(prep))
    throw std::invalid_argument("dilation report needs a moving preparation");
  if (options.n_points < kMinFitPoints) throw std::invalid_argument("dilation report needs n_points >= 8");

  ComparisonReport report;
  report.preparation = describe(prep);

  // lifetime_scale: expected tau_moving / tau_rest. time_scale: F_moving(t) ~ F_rest(t * time_scale).
  double lifetime_scale = 1.0;
  double time_scale = 1.0;
  std::function<Complex(double)> moving;
  if (const auto* dv = std::get_if<DefiniteVelocity>(&prep)) {
    const double g = lorentz_gamma(dv->v);
    report.parameter = dv->v;
    report.ratio_einstein = g;
    report.ratio_predicted = 1.0 / g;
    lifetime_scale = 1.0 / g;
    time_scale = g;
    moving = [&, v = dv->v](double t) {
      return options.velocity_direct ? survival_velocity_direct(density, v, t, options.quadrature)
                                     : survival_velocity(density, v, t, options.quadrature);
    };
  } else {
    const double p = std::get<DefiniteMomentum>(prep).p;
    const double g = gamma_m(p, bw->mass());
    report.parameter = p;
    report.ratio_einstein = g;
    report.ratio_predicted = g;
    lifetime_scale = g;
    time_scale = 1.0 / g;
    moving = [&, p](double t) { return survival_momentum(density, p, t, options.quadrature); };
  }

  const TimeWindow rest_window = options.rest_window.value_or(default_window(*bw, Rest{}));
  const TimeWindow moving_window{rest_window.lo * lifetime_scale, rest_window.hi * lifetime_scale};

  const auto rest_series =
      amplitude_series(density, Rest{}, linear_grid(rest_window.lo, rest_window.hi, options.n_points),
                       options.quadrature);
  report.rest_fit = fit_lifetime(rest_series, rest_window);

  const auto grid = linear_grid(moving_window.lo, moving_window.hi, options.n_points);
  std::vector<double> moving_probs;
  moving_probs.reserve(grid.size());
  double gap = 0.0;
  for (double t : grid) {
    const double fm = std::norm(moving(t));
    const double fr = std::norm(survival_rest(density, t * time_scale, options.quadrature));
    moving_probs.push_back(fm);
    gap = std::max(gap, std::abs(fm - fr));
  }
  report.moving_fit = fit_lifetime(grid, moving_probs, moving_window);
  report.max_pointwise_gap = gap;
  report.ratio_measured = report.moving_fit.tau / report.rest_fit.tau;
  return report;
}

struct WindowScanOptions {
  /// Log-spaced scan grid from t_min_factor to t_max_factor in units of 1/width_eff.
  double t_min_factor = 1e-2;
  double t_max_factor = 40.0;
  std::size_t n_points = 100;
  QuadratureOptions quadrature{};
};

/// Largest contiguous stretch of the scan grid around t = 1/width_eff where
/// the computed |A|^2 stays within rel_dev (relative) of the exponential
/// approximant. Points are evaluated outward from the reference time, so the
/// window for a smaller rel_dev is always nested in the one for a larger value.
inline TimeWindow exponential_window_scan(const MassDensity& density, const KinematicPreparation& prep,
                                          double rel_dev, const WindowScanOptions& options = {}) {
  if (!(rel_dev > 0.0 && rel_dev < 1.0)) throw std::invalid_argument("rel_dev must lie in (0, 1)");
  const auto* bw = std::get_if<BreitWignerDensity>(&density);
  if (bw == nullptr)
    throw std::invalid_argument("exponential window scan needs a Breit-Wigner density");
  validate(prep);

  const double w = effective_width(*bw, prep);
  const auto grid = log_grid(options.t_min_factor / w, options.t_max_factor / w, options.n_points);
  const auto within = [&](double t) {
    const double exact = std::norm(survival(density, prep, t, options.quadrature));
    const double approx = std::norm(approximant(*bw, prep, t));
    return std::abs(exact - approx) / approx < rel_dev;
  };

  const auto ref_it = std::min_element(grid.begin(), grid.end(), [w](double a, double b) {
    return std::abs(std::log(a * w)) < std::abs(std::log(b * w));
  });
  const auto ref = static_cast<std::size_t>(ref_it - grid.begin());
  if (!within(grid[ref]))
    throw fit_error("no exponential window: deviation exceeds rel_dev already at t = 1/width");

  std::size_t lo = ref;
  while (lo > 0 && within(grid[lo - 1])) --lo;
  std::size_t hi = ref;
  while (hi + 1 < grid.size() && within(grid[hi + 1])) ++hi;
  return {grid[lo], grid[hi]};
}

/// Period of an oscillating probability, from three successive crossings of
/// `level` located on a uniform scan of [0, t_scan_max] and refined by TOMS 748.
inline double measure_period(const std::function<double(double)>& probability, double t_scan_max,
                             double level = 0.5, std::size_t n_scan = 4096) {
  if (!(t_scan_max > 0.0) || n_scan < 2) throw std::invalid_argument("invalid period scan range");
  const auto f = [&](double t) { return probability(t) - level; };

  std::vector<double> crossings;
  double t_prev = 0.0;
  double f_prev = f(0.0);
  for (std::size_t i = 1; i <= n_scan && crossings.size() < 3; ++i) {
    const double t = t_scan_max * static_cast<double>(i) / static_cast<double>(n_scan);
    const double ft = f(t);
    if (ft == 0.0) {
      crossings.push_back(t);
    } else if ((f_prev < 0.0) != (ft < 0.0) && f_prev != 0.0) {
      std::uintmax_t iterations = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          f, t_prev, t, f_prev, ft, boost::math::tools::eps_tolerance<double>(52), iterations);
      crossings.push_back(0.5 * (a + b));
    }
    t_prev = t;
    f_prev = ft;
  }
  if (crossings.size() < 3)
    throw fit_error("fewer than three level crossings found; widen the scan range");
  return crossings[2] - crossings[0];
}

}  // namespace survival
