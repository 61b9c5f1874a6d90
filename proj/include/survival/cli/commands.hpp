#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "survival/amplitude.hpp"
#include "survival/analysis.hpp"
#include "survival/errors.hpp"
#include "survival/io/config.hpp"
#include "survival/io/format.hpp"
#include "survival/twomass.hpp"

namespace survival::cli {

using io::format_double;
using nlohmann::json;

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kConvergenceError = 3,
  kFitError = 4,
};

/// Result of a command: the full data stream is only meaningful on success.
struct CommandOutput {
  int exit_code = kSuccess;
  std::string data;
  std::string diagnostic;
};

/// Runs `body` and maps library exceptions onto exit codes. Output produced by
/// a failing command is discarded.
inline CommandOutput guarded(const std::function<std::string()>& body) {
  try {
    return {kSuccess, body(), {}};
  } catch (const convergence_error& e) {
    return {kConvergenceError, {}, std::string("numerical non-convergence: ") + e.what()};
  } catch (const fit_error& e) {
    return {kFitError, {}, std::string("fit failure: ") + e.what()};
  } catch (const config_error& e) {
    return {kConfigError, {}, std::string("config error: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    return {kConfigError, {}, std::string("config error: ") + e.what()};
  } catch (const std::domain_error& e) {
    return {kConfigError, {}, std::string("config error: ") + e.what()};
  }
}

namespace detail {

inline std::string csv_row(const std::vector<double>& values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  row += '\n';
  return row;
}

inline std::string csv_table(const std::vector<std::pair<std::string, std::string>>& meta,
                             const std::vector<std::string>& columns,
                             const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (const auto& [key, value] : meta) out += "# " + key + "=" + value + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) out += csv_row(row);
  return out;
}

inline std::string json_table(json meta, const std::vector<std::string>& columns,
                              const std::vector<std::vector<double>>& rows) {
  meta["columns"] = columns;
  meta["rows"] = rows;
  return meta.dump() + "\n";
}

}  // namespace detail

/// Survival amplitude table for one density and preparation.
/// Columns: t, re_A, im_A, prob, and approx_prob for Breit-Wigner densities.
inline std::string decay_table(const io::RunConfig& cfg) {
  const auto series = amplitude_series(cfg.density, cfg.preparation, cfg.grid.build(), cfg.quadrature);

  std::vector<std::string> columns = {"t", "re_A", "im_A", "prob"};
  if (series.approx_probabilities) columns.push_back("approx_prob");
  std::vector<std::vector<double>> rows;
  rows.reserve(series.times.size());
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::vector<double> row = {series.times[i], series.amplitudes[i].real(),
                               series.amplitudes[i].imag(), series.probabilities[i]};
    if (series.approx_probabilities) row.push_back((*series.approx_probabilities)[i]);
    rows.push_back(std::move(row));
  }

  const json density = io::to_json(cfg.density);
  const json prep = io::to_json(cfg.preparation);
  if (cfg.format == io::OutputFormat::json)
    return detail::json_table({{"command", "decay"}, {"density", density}, {"preparation", prep}},
                              columns, rows);
  return detail::csv_table(
      {{"command", "decay"}, {"density", density.dump()}, {"preparation", prep.dump()}}, columns, rows);
}

inline CommandOutput cmd_decay(const io::RunConfig& cfg) {
  return guarded([&] { return decay_table(cfg); });
}

struct OscillateConfig {
  TwoMassState state{1.0, 2.0};
  KinematicPreparation preparation = Rest{};
  io::GridSpec grid{io::GridSpec::Kind::linear, 0.0, 6.283185307179586, 101};
  /// Demand the cos^2 closed-form column; an error for unequal weights.
  bool require_closed_form = false;
  io::OutputFormat format = io::OutputFormat::csv;
  std::optional<std::string> out;
};

/// Two-mass survival table. Columns: t, re_A, im_A, prob, plus closed_form
/// when the weights are equal. Metadata carries the period and, for the
/// momentum preparation, the effective dilation factor.
inline std::string oscillate_table(const OscillateConfig& cfg) {
  validate(cfg.preparation);
  const auto& s = cfg.state;
  if (cfg.require_closed_form && !s.equal_weights())
    throw config_error("closed-form oscillation laws need equal weights w1 = w2 = 1/2");
  const bool closed = s.equal_weights();

  std::vector<std::string> columns = {"t", "re_A", "im_A", "prob"};
  if (closed) columns.push_back("closed_form");
  std::vector<std::vector<double>> rows;
  for (double t : cfg.grid.build()) {
    const Complex a = osc_amplitude(s, cfg.preparation, t);
    std::vector<double> row = {t, a.real(), a.imag(), std::norm(a)};
    if (closed) row.push_back(osc_probability_equal_weights(s, cfg.preparation, t));
    rows.push_back(std::move(row));
  }

  json meta = {{"command", "oscillate"},
               {"m1", s.m1()}, {"m2", s.m2()}, {"w1", s.w1()}, {"w2", s.w2()},
               {"preparation", io::to_json(cfg.preparation)}};
  if (closed) meta["period"] = oscillation_period(s, cfg.preparation);
  if (const auto* dp = std::get_if<DefiniteMomentum>(&cfg.preparation))
    meta["gamma_tilde"] = effective_gamma_tilde(dp->p, s.m1(), s.m2());

  if (cfg.format == io::OutputFormat::json) return detail::json_table(meta, columns, rows);

  std::vector<std::pair<std::string, std::string>> lines;
  for (const char* key : {"command", "m1", "m2", "w1", "w2", "preparation", "period", "gamma_tilde"}) {
    if (!meta.contains(key)) continue;
    const auto& v = meta.at(key);
    lines.emplace_back(key, v.is_number() ? format_double(v.get<double>())
                                          : (v.is_string() ? v.get<std::string>() : v.dump()));
  }
  return detail::csv_table(lines, columns, rows);
}

inline CommandOutput cmd_oscillate(const OscillateConfig& cfg) {
  return guarded([&] { return oscillate_table(cfg); });
}

inline DilationOptions dilation_options(const io::RunConfig& cfg) {
  DilationOptions opt;
  opt.rest_window = cfg.fit_window;
  opt.quadrature = cfg.quadrature;
  return opt;
}

/// ComparisonReport of a moving configuration against a rest configuration
/// over the same density.
inline json compare_report(const io::RunConfig& rest, const io::RunConfig& moving) {
  if (!std::holds_alternative<Rest>(rest.preparation))
    throw config_error("compare needs a rest configuration as its reference");
  if (std::holds_alternative<Rest>(moving.preparation))
    throw config_error("compare needs a moving (velocity or momentum) configuration");
  if (!(rest.density == moving.density))
    throw config_error("compare needs both configurations to use the same density");
  const auto report = dilation_report(moving.density, moving.preparation, dilation_options(moving));
  return io::to_json(report, moving.density);
}

inline CommandOutput cmd_compare(const io::RunConfig& rest, const io::RunConfig& moving) {
  return guarded([&] { return compare_report(rest, moving).dump() + "\n"; });
}

enum class ScanAxis { momentum, velocity, width, time };

inline ScanAxis parse_scan_axis(const std::string& s) {
  if (s == "p") return ScanAxis::momentum;
  if (s == "v") return ScanAxis::velocity;
  if (s == "width" || s == "gamma") return ScanAxis::width;
  if (s == "t") return ScanAxis::time;
  throw config_error("unknown scan axis '" + s + "' (expected p, v, width or t)");
}

inline std::string axis_name(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::momentum: return "p";
    case ScanAxis::velocity: return "v";
    case ScanAxis::width: return "width";
    default: return "t";
  }
}

struct ScanConfig {
  io::RunConfig base{};
  ScanAxis axis = ScanAxis::velocity;
  double from = 0.1;
  double to = 0.9;
  std::size_t steps = 9;
  bool log_spacing = false;
  /// Concurrent workers; 0 picks the hardware concurrency.
  std::size_t workers = 0;
};

inline std::vector<double> scan_values(const ScanConfig& cfg) {
  if (cfg.steps == 0) throw config_error("scan axis is empty (steps = 0)");
  if (!std::isfinite(cfg.from) || !std::isfinite(cfg.to)) throw config_error("scan bounds must be finite");
  std::vector<double> values;
  if (cfg.steps == 1 || cfg.from == cfg.to) {
    values.assign(1, cfg.from);
    return values;
  }
  const double lo = std::min(cfg.from, cfg.to);
  const double hi = std::max(cfg.from, cfg.to);
  if (cfg.log_spacing) {
    if (!(lo > 0.0)) throw config_error("log-spaced scan needs positive bounds");
    values = log_grid(lo, hi, cfg.steps);
  } else {
    values.resize(cfg.steps);
    for (std::size_t i = 0; i < cfg.steps; ++i)
      values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cfg.steps - 1);
    values.back() = hi;
  }
  return values;
}

/// One scan row as a JSON object: a ComparisonReport for p/v/width axes or an
/// amplitude summary for the t axis.
inline json scan_point(const ScanConfig& cfg, double value) {
  json row;
  if (cfg.axis == ScanAxis::time) {
    const Complex a = survival(cfg.base.density, cfg.base.preparation, value, cfg.base.quadrature);
    row = {{"re_A", a.real()}, {"im_A", a.imag()}, {"prob", std::norm(a)},
           {"preparation", io::to_json(cfg.base.preparation)}};
  } else {
    MassDensity density = cfg.base.density;
    KinematicPreparation prep = cfg.base.preparation;
    if (cfg.axis == ScanAxis::momentum) prep = DefiniteMomentum{value};
    if (cfg.axis == ScanAxis::velocity) prep = DefiniteVelocity{value};
    if (cfg.axis == ScanAxis::width) {
      const auto* bw = std::get_if<BreitWignerDensity>(&density);
      if (bw == nullptr) throw config_error("width scan needs a Breit-Wigner density");
      density = make_breit_wigner(bw->mass(), value, bw->tail_sigmas());
    }
    io::RunConfig moving = cfg.base;
    moving.density = density;
    moving.preparation = prep;
    row = io::to_json(dilation_report(density, prep, dilation_options(moving)), density);
  }
  row["axis"] = axis_name(cfg.axis);
  row["value"] = value;
  return row;
}

/// Scan rows are computed by a pool of workers and collected in scan-value order.
inline std::vector<json> scan_rows(const ScanConfig& cfg) {
  const auto values = scan_values(cfg);
  if (cfg.axis == ScanAxis::width && std::holds_alternative<Rest>(cfg.base.preparation))
    throw config_error("width scan needs a moving preparation (velocity or momentum)");

  std::vector<json> rows(values.size());
  std::size_t workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, values.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < values.size(); i += workers) rows[i] = scan_point(cfg, values[i]);
    }));
  }
  // Collect every worker before rethrowing so no task outlives `rows`.
  std::exception_ptr first;
  for (auto& job : jobs) {
    try {
      job.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return rows;
}

inline std::string scan_table(const ScanConfig& cfg) {
  const auto rows = scan_rows(cfg);
  if (cfg.base.format == io::OutputFormat::json) {
    std::string out;
    for (const auto& row : rows) out += row.dump() + "\n";
    return out;
  }
  const std::string axis = axis_name(cfg.axis);
  if (cfg.axis == ScanAxis::time) {
    std::vector<std::vector<double>> table;
    for (const auto& r : rows)
      table.push_back({r["value"].get<double>(), r["re_A"].get<double>(), r["im_A"].get<double>(),
                       r["prob"].get<double>()});
    return detail::csv_table({{"command", "scan"}, {"axis", axis}}, {"t", "re_A", "im_A", "prob"}, table);
  }
  std::vector<std::vector<double>> table;
  for (const auto& r : rows)
    table.push_back({r["value"].get<double>(), r["ratio_measured"].get<double>(),
                     r["ratio_einstein"].get<double>(), r["ratio_predicted"].get<double>(),
                     r["max_pointwise_gap"].get<double>(), r["rest_fit"]["tau"].get<double>(),
                     r["moving_fit"]["tau"].get<double>()});
  return detail::csv_table({{"command", "scan"}, {"axis", axis}},
                           {axis, "ratio_measured", "ratio_einstein", "ratio_predicted",
                            "max_pointwise_gap", "tau_rest", "tau_moving"},
                           table);
}

inline CommandOutput cmd_scan(const ScanConfig& cfg) {
  return guarded([&] { return scan_table(cfg); });
}

}  // namespace survival::cli
