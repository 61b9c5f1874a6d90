#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "survival/errors.hpp"
#include "survival/spectral.hpp"

namespace survival {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::size_t max_panels = std::size_t{1} << 18;
  /// Largest phase change a single panel may span.
  double max_phase_step = 2.0 * std::numbers::pi;
};

/// Integral of density(mu) * exp(-i phase(mu)) over [lower, upper].
/// `breakpoints` are forced panel boundaries (ignored when outside the domain).
template <class DensityFn, class PhaseFn>
struct OscillatoryIntegralSpec {
  DensityFn density;
  PhaseFn phase;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<double> breakpoints{};
  QuadratureOptions options{};
};

template <class DensityFn, class PhaseFn>
OscillatoryIntegralSpec(DensityFn, PhaseFn, double, double)
    -> OscillatoryIntegralSpec<DensityFn, PhaseFn>;
template <class DensityFn, class PhaseFn>
OscillatoryIntegralSpec(DensityFn, PhaseFn, double, double, std::vector<double>)
    -> OscillatoryIntegralSpec<DensityFn, PhaseFn>;
template <class DensityFn, class PhaseFn>
OscillatoryIntegralSpec(DensityFn, PhaseFn, double, double, std::vector<double>, QuadratureOptions)
    -> OscillatoryIntegralSpec<DensityFn, PhaseFn>;

struct IntegralResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t panels_used = 0;
};

namespace detail {

// Non-negative half of the 15-point Kronrod nodes on [-1, 1], with the embedded 7-point
// Gauss-Legendre rule on the odd-indexed nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  std::complex<double> value;
  double error = 0.0;
};

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
 public:
  void add(std::complex<double> z) noexcept {
    add_part(re_, re_c_, z.real());
    add_part(im_, im_c_, z.imag());
  }
  std::complex<double> value() const noexcept { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

template <class DensityFn, class PhaseFn>
std::complex<double> integrand(const DensityFn& density, const PhaseFn& phase, double mu) {
  const double rho = density(mu);
  const double ph = phase(mu);
  return {rho * std::cos(ph), -rho * std::sin(ph)};
}

template <class DensityFn, class PhaseFn>
Panel evaluate_panel(const DensityFn& density, const PhaseFn& phase, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const std::complex<double> f_center = integrand(density, phase, center);
  std::complex<double> kronrod = f_center * kKronrodWeights[7];
  std::complex<double> gauss = f_center * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const std::complex<double> pair =
        integrand(density, phase, center - dx) + integrand(density, phase, center + dx);
    kronrod += pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss += pair * kGaussWeights[j / 2];
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class PhaseFn>
double phase_variation(const PhaseFn& phase, double lo, double hi) {
  const double p0 = phase(lo);
  const double p1 = phase(0.5 * (lo + hi));
  const double p2 = phase(hi);
  return std::abs(p1 - p0) + std::abs(p2 - p1);
}

inline bool splittable(double lo, double hi) noexcept {
  const double mid = 0.5 * (lo + hi);
  return mid > lo && mid < hi;
}

template <class PhaseFn>
void partition_segment(const PhaseFn& phase, double lo, double hi, double step,
                       std::vector<std::pair<double, double>>& out) {
  if (phase_variation(phase, lo, hi) <= step || !splittable(lo, hi)) {
    out.emplace_back(lo, hi);
    return;
  }
  const double mid = 0.5 * (lo + hi);
  partition_segment(phase, lo, mid, step, out);
  partition_segment(phase, mid, hi, step, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of a complex oscillatory
/// integrand. The domain is first cut at the breakpoints and into panels each
/// spanning at most `max_phase_step` of phase; panels with the largest error
/// estimate are then bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |value|).
template <class DensityFn, class PhaseFn>
IntegralResult integrate_oscillatory(const OscillatoryIntegralSpec<DensityFn, PhaseFn>& spec) {
  const auto& opt = spec.options;
  if (!(spec.lower < spec.upper) || !std::isfinite(spec.lower) || !std::isfinite(spec.upper))
    throw std::invalid_argument("integration domain must satisfy lower < upper");
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
    throw std::invalid_argument("quadrature tolerances must be positive");
  if (!(opt.max_phase_step > 0.0) || opt.max_panels == 0)
    throw std::invalid_argument("quadrature panel limits must be positive");

  std::vector<double> cuts{spec.lower, spec.upper};
  for (double x : spec.breakpoints)
    if (x > spec.lower && x < spec.upper) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto over_budget = [&](std::size_t needed) {
    // Coarse estimate over the whole budget so the error still carries a value.
    detail::CompensatedSum coarse;
    double coarse_err = 0.0;
    const std::size_t n = opt.max_panels;
    const double span = spec.upper - spec.lower;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = spec.lower + span * static_cast<double>(i) / static_cast<double>(n);
      const double b = (i + 1 == n) ? spec.upper
                                    : spec.lower + span * static_cast<double>(i + 1) /
                                                       static_cast<double>(n);
      const auto panel = detail::evaluate_panel(spec.density, spec.phase, a, b);
      coarse.add(panel.value);
      coarse_err += panel.error;
    }
    return convergence_error("oscillatory integral needs " + std::to_string(needed) +
                                 " panels, more than the budget of " +
                                 std::to_string(opt.max_panels),
                             coarse.value(), coarse_err);
  };

  // Uniform split per segment sized from the phase change, then local
  // bisection where the phase is not linear enough for the uniform split.
  std::vector<std::size_t> pieces;
  double needed = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double var = detail::phase_variation(spec.phase, cuts[s], cuts[s + 1]);
    const double n = std::max(1.0, std::ceil(var / opt.max_phase_step));
    needed += n;
    if (needed > static_cast<double>(opt.max_panels))
      throw over_budget(static_cast<std::size_t>(std::min(needed, 1e18)));
    pieces.push_back(static_cast<std::size_t>(n));
  }

  std::vector<std::pair<double, double>> intervals;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s];
    const double hi = cuts[s + 1];
    const std::size_t n = pieces[s];
    for (std::size_t i = 0; i < n; ++i) {
      const double a = (i == 0) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
      const double b = (i + 1 == n) ? hi
                                    : lo + (hi - lo) * static_cast<double>(i + 1) /
                                               static_cast<double>(n);
      detail::partition_segment(spec.phase, a, b, opt.max_phase_step, intervals);
    }
    if (intervals.size() > opt.max_panels) throw over_budget(intervals.size());
  }

  std::vector<detail::Panel> panels;
  panels.reserve(intervals.size());
  std::priority_queue<std::pair<double, std::size_t>> worst;
  std::complex<double> total;
  double total_err = 0.0;
  for (const auto& [a, b] : intervals) {
    panels.push_back(detail::evaluate_panel(spec.density, spec.phase, a, b));
    total += panels.back().value;
    total_err += panels.back().error;
    worst.emplace(panels.back().error, panels.size() - 1);
  }

  const auto summed = [&] {
    detail::CompensatedSum value;
    double err = 0.0;
    for (const auto& p : panels) {
      value.add(p.value);
      err += p.error;
    }
    return std::pair{value.value(), err};
  };
  const auto converged = [&](std::complex<double> v, double e) {
    return e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(v));
  };

  while (true) {
    if (converged(total, total_err)) {
      auto [v, e] = summed();
      if (converged(v, e)) return {v, e, panels.size()};
      total = v;
      total_err = e;
    }
    if (worst.empty() || panels.size() >= opt.max_panels) {
      auto [v, e] = summed();
      throw convergence_error(
          "oscillatory integral did not converge within " + std::to_string(opt.max_panels) +
              " panels (error estimate " + std::to_string(e) + ")",
          v, e);
    }
    const std::size_t idx = worst.top().second;
    worst.pop();
    const auto parent = panels[idx];
    if (!detail::splittable(parent.lo, parent.hi)) continue;

    const double mid = 0.5 * (parent.lo + parent.hi);
    auto left = detail::evaluate_panel(spec.density, spec.phase, parent.lo, mid);
    auto right = detail::evaluate_panel(spec.density, spec.phase, mid, parent.hi);
    total += left.value + right.value - parent.value;
    total_err += left.error + right.error - parent.error;
    panels[idx] = left;
    panels.push_back(right);
    worst.emplace(left.error, idx);
    worst.emplace(right.error, panels.size() - 1);
  }
}

/// Midpoint Riemann sum on a uniform grid. Slow and simple; meant as ground
/// truth for tests at large n_points.
template <class DensityFn, class PhaseFn>
std::complex<double> integrate_oracle(const OscillatoryIntegralSpec<DensityFn, PhaseFn>& spec,
                                      std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("oracle needs at least 2 points");
  if (!(spec.lower < spec.upper))
    throw std::invalid_argument("integration domain must satisfy lower < upper");
  const double h = (spec.upper - spec.lower) / static_cast<double>(n_points);
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double mu = spec.lower + (static_cast<double>(i) + 0.5) * h;
    sum.add(detail::integrand(spec.density, spec.phase, mu));
  }
  return sum.value() * h;
}

/// Offsets, in widths, of the forced panel boundaries around a Breit-Wigner peak.
inline constexpr std::array<double, 4> kPeakBreakpoints = {1.0, 2.0, 5.0, 10.0};

/// Integration spec over the support of a Breit-Wigner density, with panel
/// boundaries at m +- k*width so the peak is always resolved.
template <class PhaseFn>
auto make_integral_spec(const BreitWignerDensity& d, PhaseFn phase, QuadratureOptions options = {}) {
  std::vector<double> breaks;
  for (double k : kPeakBreakpoints) {
    breaks.push_back(d.mass() - k * d.width());
    breaks.push_back(d.mass() + k * d.width());
  }
  return OscillatoryIntegralSpec<BreitWignerDensity, PhaseFn>{
      d, std::move(phase), 0.0, d.cutoff_hi(), std::move(breaks), options};
}

template <class PhaseFn>
std::complex<double> integrate_oracle(const MassDensity& d, PhaseFn phase, std::size_t n_points) {
  const auto* bw = std::get_if<BreitWignerDensity>(&d);
  if (bw == nullptr)
    throw std::invalid_argument("Riemann oracle applies to continuous densities only");
  return integrate_oracle(make_integral_spec(*bw, std::move(phase)), n_points);
}

}  // namespace survival
