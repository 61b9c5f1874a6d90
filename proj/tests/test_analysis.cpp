#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "survival/analysis.hpp"
#include "survival/twomass.hpp"

namespace {

using namespace survival;

const MassDensity kBw = make_breit_wigner(1.0, 0.01);

std::vector<double> exponential(const std::vector<double>& times, double rate) {
  std::vector<double> out;
  for (double t : times) out.push_back(std::exp(-rate * t));
  return out;
}

TEST(FitLifetime, ExactExponential) {
  const auto times = linear_grid(0.0, 300.0, 61);
  const auto fit = fit_lifetime(times, exponential(times, 0.01), {0.0, 300.0});
  EXPECT_NEAR(fit.tau, 100.0, 1e-9 * 100.0);
  EXPECT_LT(fit.log_residual_rms, 1e-12);
  EXPECT_EQ(fit.n_points, 61u);
}

TEST(FitLifetime, WindowInvariantForExactInput) {
  const auto times = linear_grid(0.0, 500.0, 501);
  const auto probs = exponential(times, 1.0 / 73.0);
  for (TimeWindow w : {TimeWindow{0.0, 50.0}, TimeWindow{100.0, 400.0}, TimeWindow{250.0, 500.0}})
    EXPECT_NEAR(fit_lifetime(times, probs, w).tau, 73.0, 73.0 * 1e-9);
}

TEST(FitLifetime, Failures) {
  const auto times = linear_grid(0.0, 10.0, 11);
  EXPECT_THROW(fit_lifetime(times, std::vector<double>(11, 1.0), {0.0, 10.0}), fit_error);
  EXPECT_THROW(fit_lifetime(times, exponential(times, 0.1), {0.0, 5.0}), fit_error);
  EXPECT_THROW(fit_lifetime(times, exponential(times, 1.0), {0.0, 10.0}), fit_error);
  EXPECT_THROW(fit_lifetime(times, exponential(times, 0.1), {5.0, 5.0}), fit_error);
  EXPECT_THROW(fit_lifetime(times, std::vector<double>(3, 1.0), {0.0, 10.0}), std::invalid_argument);
}

TEST(FitLifetime, RecoversApproximantLifetime) {
  const auto times = linear_grid(10.0, 300.0, 80);
  for (const KinematicPreparation& prep :
       {KinematicPreparation{Rest{}}, KinematicPreparation{DefiniteVelocity{0.6}},
        KinematicPreparation{DefiniteMomentum{1.0}}}) {
    std::vector<double> probs;
    for (double t : times) probs.push_back(std::norm(approximant(std::get<BreitWignerDensity>(kBw), prep, t)));
    const double expected = 1.0 / effective_width(std::get<BreitWignerDensity>(kBw), prep);
    EXPECT_NEAR(fit_lifetime(times, probs, {10.0, 300.0}).tau / expected, 1.0, 1e-9);
  }
}

TEST(FitLifetime, BreitWignerRestSeries) {
  const auto s = amplitude_series(kBw, Rest{}, linear_grid(20.0, 300.0, 57));
  EXPECT_NEAR(fit_lifetime(s, {20.0, 300.0}).tau, 100.0, 2.0);
}

TEST(DefaultWindow, ScalesPerPreparation) {
  const auto& bw = std::get<BreitWignerDensity>(kBw);
  EXPECT_EQ(default_window(bw, Rest{}), (TimeWindow{20.0, 300.0}));
  const auto w = default_window(bw, DefiniteVelocity{0.6});
  EXPECT_NEAR(w.lo, 16.0, 1e-12);
  EXPECT_NEAR(w.hi, 240.0, 1e-12);
  const auto wp = default_window(bw, DefiniteMomentum{1.0});
  EXPECT_NEAR(wp.hi, 300.0 * std::numbers::sqrt2, 1e-10);
}

TEST(DilationReport, MomentumDilatesBySqrtTwo) {
  const auto r = dilation_report(kBw, DefiniteMomentum{1.0});
  EXPECT_EQ(r.preparation, "momentum");
  EXPECT_NEAR(r.ratio_einstein, std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(r.ratio_predicted, std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(r.ratio_measured / std::numbers::sqrt2, 1.0, 0.01);
  EXPECT_GT(r.ratio_measured, 1.0);
}

TEST(DilationReport, VelocityContracts) {
  const auto r = dilation_report(kBw, DefiniteVelocity{0.6});
  EXPECT_EQ(r.ratio_einstein, 1.25);
  EXPECT_EQ(r.ratio_predicted, 0.8);
  EXPECT_NEAR(r.ratio_measured / 0.8, 1.0, 0.01);
  EXPECT_LE(r.max_pointwise_gap, 1e-9);
}

TEST(DilationReport, ZeroMomentumIsUnity) {
  const auto r = dilation_report(kBw, DefiniteMomentum{0.0});
  EXPECT_NEAR(r.ratio_measured, 1.0, 1e-12);
  EXPECT_LE(r.max_pointwise_gap, 1e-12);
}

TEST(DilationReport, HeadlineAsymmetry) {
  for (double width : {0.001, 0.01, 0.1}) {
    const MassDensity d = make_breit_wigner(1.0, width);
    DilationOptions opt;
    opt.n_points = 24;
    for (double v : {0.2, 0.8}) EXPECT_LT(dilation_report(d, DefiniteVelocity{v}, opt).ratio_measured, 1.0);
    for (double p : {0.3, 2.0}) EXPECT_GT(dilation_report(d, DefiniteMomentum{p}, opt).ratio_measured, 1.0);
  }
}

TEST(DilationReport, Preconditions) {
  EXPECT_THROW(dilation_report(kBw, Rest{}), std::invalid_argument);
  const MassDensity lines = DiscreteDensity({{1.0, 0.5}, {2.0, 0.5}});
  EXPECT_THROW(dilation_report(lines, DefiniteMomentum{1.0}), std::invalid_argument);
  DilationOptions few;
  few.n_points = 4;
  EXPECT_THROW(dilation_report(kBw, DefiniteMomentum{1.0}, few), std::invalid_argument);
}

TEST(WindowScan, HalfDeviationContainsDefaultWindow) {
  const auto w = exponential_window_scan(kBw, Rest{}, 0.5);
  EXPECT_TRUE(w.contains(TimeWindow{20.0, 300.0}));
}

TEST(WindowScan, NestedAsToleranceShrinks) {
  WindowScanOptions opt;
  opt.n_points = 60;
  TimeWindow previous{0.0, INFINITY};
  for (double rel : {0.5, 0.1, 0.02, 0.005}) {
    const auto w = exponential_window_scan(kBw, Rest{}, rel, opt);
    EXPECT_TRUE(previous.contains(w)) << "rel=" << rel;
    previous = w;
  }
}

TEST(WindowScan, Errors) {
  const MassDensity lines = DiscreteDensity({{1.0, 0.5}, {2.0, 0.5}});
  EXPECT_THROW(exponential_window_scan(lines, Rest{}, 0.5), std::invalid_argument);
  EXPECT_THROW(exponential_window_scan(kBw, Rest{}, 0.0), std::invalid_argument);
  EXPECT_THROW(exponential_window_scan(kBw, Rest{}, 1.0), std::invalid_argument);
}

TEST(MeasurePeriod, CosineSquared) {
  const double period = measure_period([](double t) { return std::pow(std::cos(0.5 * t), 2); }, 20.0);
  EXPECT_NEAR(period, 2.0 * std::numbers::pi, 1e-13);
  EXPECT_THROW(measure_period([](double) { return 1.0; }, 10.0), fit_error);
}

}  // namespace
