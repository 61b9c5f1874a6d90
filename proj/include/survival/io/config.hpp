#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "survival/amplitude.hpp"
#include "survival/analysis.hpp"
#include "survival/errors.hpp"
#include "survival/spectral.hpp"
#include "survival/twomass.hpp"

namespace survival::io {

using nlohmann::json;

/// Named two-mass states. Lines carry no widths.
inline const std::map<std::string, TwoMassState>& two_mass_presets() {
  static const std::map<std::string, TwoMassState> presets = {
      {"two-mass-clock", TwoMassState(1.0, 2.0)},
      {"near-degenerate", TwoMassState(1.0, 1.001)},
      // Equal mixture of two widthless eigenstates, in the style of K0 = (K_S + K_L)/sqrt(2).
      {"k0-style", TwoMassState(0.4976, 0.5976)},
  };
  return presets;
}

inline TwoMassState two_mass_preset(const std::string& name) {
  const auto& presets = two_mass_presets();
  const auto it = presets.find(name);
  if (it == presets.end()) throw config_error("unknown two-mass preset '" + name + "'");
  return it->second;
}

namespace detail {

inline double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw config_error(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw config_error(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline double number_field(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number_field(j, key) : fallback;
}

template <class F>
auto rethrow_as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const config_error&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  } catch (const std::domain_error& e) {
    throw config_error(e.what());
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
}

}  // namespace detail

/// {kind: "breit-wigner", m, gamma, tail_sigmas?} | {kind: "discrete", lines: [[mu, w], ...]}
/// | {kind: "preset", name}.
inline MassDensity parse_density(const json& j) {
  return detail::rethrow_as_config([&]() -> MassDensity {
    if (!j.is_object()) throw config_error("density must be an object");
    const std::string kind = j.value("kind", "");
    if (kind == "breit-wigner") {
      return make_breit_wigner(detail::number_field(j, "m"), detail::number_field(j, "gamma"),
                               detail::number_field(j, "tail_sigmas", kDefaultTailSigmas));
    }
    if (kind == "discrete") {
      if (!j.contains("lines") || !j.at("lines").is_array())
        throw config_error("discrete density needs a 'lines' array");
      std::vector<SpectralLine> lines;
      for (const auto& line : j.at("lines")) {
        if (!line.is_array() || line.size() != 2 || !line[0].is_number() || !line[1].is_number())
          throw config_error("discrete density lines must be [mu, w] pairs");
        lines.push_back({line[0].get<double>(), line[1].get<double>()});
      }
      return DiscreteDensity(std::move(lines));
    }
    if (kind == "preset") return two_mass_preset(j.value("name", "")).as_density();
    throw config_error("unknown density kind '" + kind + "'");
  });
}

inline json to_json(const MassDensity& d) {
  if (const auto* bw = std::get_if<BreitWignerDensity>(&d))
    return {{"kind", "breit-wigner"}, {"m", bw->mass()}, {"gamma", bw->width()},
            {"tail_sigmas", bw->tail_sigmas()}};
  json lines = json::array();
  for (const auto& line : std::get<DiscreteDensity>(d).lines()) lines.push_back({line.mass, line.weight});
  return {{"kind", "discrete"}, {"lines", lines}};
}

/// {kind: "rest"} | {kind: "velocity", v} | {kind: "momentum", p}
inline KinematicPreparation parse_preparation(const json& j) {
  return detail::rethrow_as_config([&]() -> KinematicPreparation {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", "");
    KinematicPreparation prep;
    if (kind == "rest") prep = Rest{};
    else if (kind == "velocity") prep = DefiniteVelocity{detail::number_field(j, "v")};
    else if (kind == "momentum") prep = DefiniteMomentum{detail::number_field(j, "p")};
    else throw config_error("unknown preparation '" + kind + "' (expected rest, velocity or momentum)");
    validate(prep);
    return prep;
  });
}

inline json to_json(const KinematicPreparation& prep) {
  json j = {{"kind", describe(prep)}};
  if (const auto* dv = std::get_if<DefiniteVelocity>(&prep)) j["v"] = dv->v;
  if (const auto* dp = std::get_if<DefiniteMomentum>(&prep)) j["p"] = dp->p;
  return j;
}

struct GridSpec {
  enum class Kind { linear, log };
  Kind kind = Kind::linear;
  double t_min = 0.0;
  double t_max = 300.0;
  std::size_t n = 301;

  void validate() const {
    if (n < 2) throw config_error("time grid needs n >= 2");
    if (!(t_min >= 0.0) || !(t_max > t_min)) throw config_error("time grid needs t_max > t_min >= 0");
    if (kind == Kind::log && !(t_min > 0.0)) throw config_error("log time grid needs t_min > 0");
  }

  std::vector<double> build() const {
    validate();
    return kind == Kind::linear ? linear_grid(t_min, t_max, n) : log_grid(t_min, t_max, n);
  }
};

enum class OutputFormat { csv, json };

struct RunConfig {
  MassDensity density = make_breit_wigner(1.0, 0.01);
  KinematicPreparation preparation = Rest{};
  GridSpec grid{};
  QuadratureOptions quadrature{};
  std::optional<TimeWindow> fit_window;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::string> out;
};

inline GridSpec::Kind parse_grid_kind(const std::string& s) {
  if (s == "lin" || s == "linear") return GridSpec::Kind::linear;
  if (s == "log") return GridSpec::Kind::log;
  throw config_error("unknown grid kind '" + s + "' (expected lin or log)");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw config_error("unknown output format '" + s + "' (expected csv or json)");
}

/// Overlays the fields present in `j` onto `base`.
inline RunConfig parse_run_config(const json& j, RunConfig base = {}) {
  return detail::rethrow_as_config([&]() -> RunConfig {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    RunConfig cfg = std::move(base);
    if (j.contains("density")) cfg.density = parse_density(j.at("density"));
    if (j.contains("preparation")) cfg.preparation = parse_preparation(j.at("preparation"));
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("kind")) cfg.grid.kind = parse_grid_kind(g.at("kind").get<std::string>());
      cfg.grid.t_min = detail::number_field(g, "t_min", cfg.grid.t_min);
      cfg.grid.t_max = detail::number_field(g, "t_max", cfg.grid.t_max);
      if (g.contains("n")) {
        if (!g.at("n").is_number_integer() || g.at("n").get<long long>() < 2)
          throw config_error("grid n must be an integer >= 2");
        cfg.grid.n = g.at("n").get<std::size_t>();
      }
      cfg.grid.validate();
    }
    if (j.contains("tolerance")) {
      const auto& t = j.at("tolerance");
      cfg.quadrature.rel_tol = detail::number_field(t, "rel", cfg.quadrature.rel_tol);
      cfg.quadrature.abs_tol = detail::number_field(t, "abs", cfg.quadrature.abs_tol);
      if (!(cfg.quadrature.rel_tol > 0.0) || !(cfg.quadrature.abs_tol > 0.0))
        throw config_error("tolerances must be positive");
    }
    if (j.contains("fit_window")) {
      const auto& w = j.at("fit_window");
      if (!w.is_array() || w.size() != 2) throw config_error("fit_window must be [t_lo, t_hi]");
      const TimeWindow win{w[0].get<double>(), w[1].get<double>()};
      if (!(win.lo >= 0.0) || !(win.hi > win.lo)) throw config_error("fit_window needs 0 <= t_lo < t_hi");
      cfg.fit_window = win;
    }
    if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    return cfg;
  });
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

inline json to_json(const LifetimeFit& fit) {
  return {{"tau", fit.tau},
          {"log_residual_rms", fit.log_residual_rms},
          {"window", {fit.window.lo, fit.window.hi}},
          {"n_points", fit.n_points}};
}

/// Serialized form of a ComparisonReport; see schemas/comparison_report.schema.json.
inline json to_json(const ComparisonReport& r, const MassDensity& density) {
  json j = {{"preparation", r.preparation},
            {"ratio_measured", r.ratio_measured},
            {"ratio_einstein", r.ratio_einstein},
            {"ratio_predicted", r.ratio_predicted},
            {"max_pointwise_gap", r.max_pointwise_gap},
            {"rest_fit", to_json(r.rest_fit)},
            {"moving_fit", to_json(r.moving_fit)},
            {"density", to_json(density)}};
  j[r.preparation == "velocity" ? "v" : "p"] = r.parameter;
  return j;
}

}  // namespace survival::io
