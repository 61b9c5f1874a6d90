// survival: command-line driver for survival amplitudes of moving unstable states.
//
//   survival decay     --m 1 --width 0.01 --prep velocity --v 0.6 --t-max 300 --n 301
//   survival oscillate --preset two-mass-clock --prep momentum --p 2
//   survival compare   --m 1 --width 0.01 --prep momentum --p 1
//   survival scan      --axis v --from 0.1 --to 0.9 --steps 9

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "survival/cli/commands.hpp"

namespace {

using namespace survival;
namespace scli = survival::cli;

struct CommonFlags {
  std::string config;
  std::string density;
  std::string lines;
  double m = 1.0;
  double width = 0.01;
  double tail_sigmas = kDefaultTailSigmas;
  std::string prep;
  double v = 0.0;
  double p = 0.0;
  double t_min = 0.0;
  double t_max = 300.0;
  std::size_t n = 301;
  std::string grid;
  double tol = 1e-9;
  double abs_tol = 1e-12;
  std::string format;
  std::string out;

  CLI::Option* m_opt = nullptr;
  CLI::Option* width_opt = nullptr;
  CLI::Option* tail_opt = nullptr;
  CLI::Option* v_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* t_min_opt = nullptr;
  CLI::Option* t_max_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* abs_tol_opt = nullptr;
};

void add_grid_flags(CLI::App* cmd, CommonFlags& f) {
  f.t_min_opt = cmd->add_option("--t-min", f.t_min, "first time on the grid");
  f.t_max_opt = cmd->add_option("--t-max", f.t_max, "last time on the grid");
  f.n_opt = cmd->add_option("--n", f.n, "number of grid points");
  cmd->add_option("--grid", f.grid, "grid spacing")->check(CLI::IsMember({"lin", "log"}));
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", f.out, "output file (default: stdout)");
}

void add_prep_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--prep", f.prep, "kinematic preparation: rest, velocity or momentum");
  f.v_opt = cmd->add_option("--v", f.v, "velocity, 0 <= v < 1");
  f.p_opt = cmd->add_option("--p", f.p, "momentum, p >= 0");
}

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration; flags override its fields");
  cmd->add_option("--density", f.density, "breit-wigner, discrete, or a two-mass preset name");
  cmd->add_option("--lines", f.lines, "discrete lines as mu:w,mu:w,...");
  f.m_opt = cmd->add_option("--m", f.m, "Breit-Wigner center mass");
  f.width_opt = cmd->add_option("--width", f.width, "Breit-Wigner width");
  f.tail_opt = cmd->add_option("--tail-sigmas", f.tail_sigmas, "upper cutoff in widths above m");
  f.tol_opt = cmd->add_option("--tol", f.tol, "relative quadrature tolerance");
  f.abs_tol_opt = cmd->add_option("--abs-tol", f.abs_tol, "absolute quadrature tolerance");
  add_prep_flags(cmd, f);
  add_grid_flags(cmd, f);
}

std::vector<SpectralLine> parse_lines(const std::string& text) {
  std::vector<SpectralLine> lines;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw config_error("--lines entries must look like mu:w");
    try {
      lines.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw config_error("--lines entry '" + item + "' is not numeric");
    }
  }
  return lines;
}

KinematicPreparation preparation_from_flags(const CommonFlags& f, KinematicPreparation current) {
  std::string kind = f.prep;
  if (kind.empty()) {
    if (f.v_opt && f.v_opt->count()) kind = "velocity";
    else if (f.p_opt && f.p_opt->count()) kind = "momentum";
    else return current;
  }
  nlohmann::json j = {{"kind", kind}};
  if (kind == "velocity") {
    if (f.v_opt->count()) j["v"] = f.v;
    else if (const auto* dv = std::get_if<DefiniteVelocity>(&current)) j["v"] = dv->v;
  }
  if (kind == "momentum") {
    if (f.p_opt->count()) j["p"] = f.p;
    else if (const auto* dp = std::get_if<DefiniteMomentum>(&current)) j["p"] = dp->p;
  }
  return io::parse_preparation(j);
}

void apply_grid_flags(const CommonFlags& f, io::GridSpec& grid) {
  if (!f.grid.empty()) grid.kind = io::parse_grid_kind(f.grid);
  if (f.t_min_opt->count()) grid.t_min = f.t_min;
  if (f.t_max_opt->count()) grid.t_max = f.t_max;
  if (f.n_opt->count()) grid.n = f.n;
  grid.validate();
}

io::RunConfig run_config_from_flags(const CommonFlags& f, const std::string& config_path) {
  io::RunConfig cfg;
  if (!config_path.empty()) cfg = io::parse_run_config(io::read_json_file(config_path));

  const bool bw_flags = f.m_opt->count() || f.width_opt->count() || f.tail_opt->count();
  if (f.density == "discrete" || (!f.lines.empty() && f.density.empty())) {
    if (f.lines.empty()) throw config_error("--density discrete needs --lines");
    cfg.density = DiscreteDensity(parse_lines(f.lines));
  } else if (!f.density.empty() && f.density != "breit-wigner") {
    cfg.density = io::two_mass_preset(f.density).as_density();
  } else if (f.density == "breit-wigner" || bw_flags) {
    double m = 1.0, width = 0.01, tail = kDefaultTailSigmas;
    if (const auto* bw = std::get_if<BreitWignerDensity>(&cfg.density)) {
      m = bw->mass();
      width = bw->width();
      tail = bw->tail_sigmas();
    }
    if (f.m_opt->count()) m = f.m;
    if (f.width_opt->count()) width = f.width;
    if (f.tail_opt->count()) tail = f.tail_sigmas;
    cfg.density = make_breit_wigner(m, width, tail);
  }

  cfg.preparation = preparation_from_flags(f, cfg.preparation);
  apply_grid_flags(f, cfg.grid);
  if (f.tol_opt->count()) cfg.quadrature.rel_tol = f.tol;
  if (f.abs_tol_opt->count()) cfg.quadrature.abs_tol = f.abs_tol;
  if (!(cfg.quadrature.rel_tol > 0.0) || !(cfg.quadrature.abs_tol > 0.0))
    throw config_error("tolerances must be positive");
  if (!f.format.empty()) cfg.format = io::parse_format(f.format);
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

int emit(const scli::CommandOutput& result, const std::optional<std::string>& out_path) {
  if (result.exit_code != scli::kSuccess) {
    std::cerr << "survival: " << result.diagnostic << "\n";
    return result.exit_code;
  }
  if (out_path && !out_path->empty()) {
    std::ofstream out(*out_path, std::ios::binary);
    if (!out) {
      std::cerr << "survival: cannot write '" << *out_path << "'\n";
      return scli::kConfigError;
    }
    out << result.data;
  } else {
    std::cout << result.data;
  }
  return scli::kSuccess;
}

// Config construction errors are reported like command errors.
template <class Build>
int run(Build&& build) {
  std::optional<std::string> out;
  const auto result = scli::guarded([&] {
    auto [data, path] = build();
    out = path;
    return data;
  });
  return emit(result, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival amplitudes and decay laws of moving unstable states"};
  app.require_subcommand(1);

  CommonFlags decay_flags;
  auto* decay = app.add_subcommand("decay", "survival amplitude series for one preparation");
  add_common_flags(decay, decay_flags);

  CommonFlags osc_flags;
  std::string preset;
  double m1 = 1.0, m2 = 2.0, w1 = 0.5, w2 = 0.5;
  bool closed_form = false;
  auto* osc = app.add_subcommand("oscillate", "two-mass oscillation series");
  osc->add_option("--config", osc_flags.config, "JSON config with a two-line density");
  osc->add_option("--preset", preset, "named two-mass state");
  auto* m1_opt = osc->add_option("--m1", m1, "first mass");
  auto* m2_opt = osc->add_option("--m2", m2, "second mass");
  auto* w1_opt = osc->add_option("--w1", w1, "weight of the first mass");
  auto* w2_opt = osc->add_option("--w2", w2, "weight of the second mass");
  osc->add_flag("--closed-form", closed_form, "require the cos^2 closed-form column");
  add_prep_flags(osc, osc_flags);
  add_grid_flags(osc, osc_flags);

  CommonFlags cmp_flags;
  std::string rest_config, moving_config;
  auto* cmp = app.add_subcommand("compare", "lifetime comparison of a moving preparation against rest");
  add_common_flags(cmp, cmp_flags);
  cmp->add_option("--rest-config", rest_config, "rest-frame run configuration");
  cmp->add_option("--moving-config", moving_config, "moving run configuration");

  CommonFlags scan_flags;
  std::string axis = "v", spacing = "lin";
  double from = 0.1, to = 0.9;
  std::size_t steps = 9, workers = 0;
  auto* scan = app.add_subcommand("scan", "comparison reports or amplitudes along a parameter axis");
  add_common_flags(scan, scan_flags);
  scan->add_option("--axis", axis, "scan axis: p, v, width or t");
  scan->add_option("--from", from, "first scan value");
  scan->add_option("--to", to, "last scan value");
  scan->add_option("--steps", steps, "number of scan points");
  scan->add_option("--spacing", spacing, "scan spacing")->check(CLI::IsMember({"lin", "log"}));
  scan->add_option("--workers", workers, "worker threads (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return scli::kConfigError;
  }

  if (*decay) {
    return run([&] {
      const auto cfg = run_config_from_flags(decay_flags, decay_flags.config);
      return std::pair{scli::decay_table(cfg), cfg.out};
    });
  }
  if (*osc) {
    return run([&] {
      scli::OscillateConfig cfg;
      if (!osc_flags.config.empty()) {
        const auto j = io::read_json_file(osc_flags.config);
        if (j.contains("density")) {
          const auto density = io::parse_density(j.at("density"));
          const auto* lines = std::get_if<DiscreteDensity>(&density);
          if (lines == nullptr || lines->lines().size() != 2)
            throw config_error("oscillate needs a two-line discrete density");
          const auto& l = lines->lines();
          cfg.state = TwoMassState(l[0].mass, l[1].mass, l[0].weight, l[1].weight);
        }
        if (j.contains("preparation")) cfg.preparation = io::parse_preparation(j.at("preparation"));
        if (j.contains("format")) cfg.format = io::parse_format(j.at("format").get<std::string>());
      }
      if (!preset.empty()) cfg.state = io::two_mass_preset(preset);
      if (m1_opt->count() || m2_opt->count() || w1_opt->count() || w2_opt->count()) {
        cfg.state = TwoMassState(m1_opt->count() ? m1 : cfg.state.m1(), m2_opt->count() ? m2 : cfg.state.m2(),
                                 w1_opt->count() ? w1 : cfg.state.w1(), w2_opt->count() ? w2 : cfg.state.w2());
      }
      cfg.preparation = preparation_from_flags(osc_flags, cfg.preparation);
      apply_grid_flags(osc_flags, cfg.grid);
      cfg.require_closed_form = closed_form;
      if (!osc_flags.format.empty()) cfg.format = io::parse_format(osc_flags.format);
      if (!osc_flags.out.empty()) cfg.out = osc_flags.out;
      return std::pair{scli::oscillate_table(cfg), cfg.out};
    });
  }
  if (*cmp) {
    return run([&] {
      io::RunConfig moving = run_config_from_flags(cmp_flags, moving_config.empty() ? cmp_flags.config : moving_config);
      io::RunConfig rest = moving;
      rest.preparation = Rest{};
      if (!rest_config.empty()) rest = io::parse_run_config(io::read_json_file(rest_config));
      return std::pair{scli::compare_report(rest, moving).dump() + "\n", moving.out};
    });
  }
  return run([&] {
    scli::ScanConfig cfg;
    cfg.base = run_config_from_flags(scan_flags, scan_flags.config);
    cfg.axis = scli::parse_scan_axis(axis);
    cfg.from = from;
    cfg.to = to;
    cfg.steps = steps;
    cfg.log_spacing = spacing == "log";
    cfg.workers = workers;
    return std::pair{scli::scan_table(cfg), cfg.base.out};
  });
}
