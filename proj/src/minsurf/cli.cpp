#include "minsurf/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minsurf/config.hpp"
#include "minsurf/evolution.hpp"
#include "minsurf/scenario.hpp"
#include "minsurf/vtk_io.hpp"

namespace minsurf {

namespace {

std::filesystem::path frame_path(const std::filesystem::path& dir, int frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "surface_%06d.vtk", frame);
  return dir / name;
}

int do_run(const RunConfig& rc) {
  if (!rc.scenario) {
    throw UsageError("run: a scenario is required (--scenario or config file)");
  }
  const Scenario& scenario = find_scenario(*rc.scenario);
  const std::array<int, 3> divisions =
      rc.divisions.value_or(scenario.domain.divisions);
  const int cadence = rc.cadence.value_or(1);
  if (cadence < 1) throw UsageError("run: cadence must be at least 1");
  const std::filesystem::path out_dir = rc.out_dir.value_or("out");

  ScenarioSetup setup = prepare_scenario(scenario, divisions);
  overlay(rc, setup.config);
  std::filesystem::create_directories(out_dir);

  int last_written_frame = -1;
  // Kept so the final state can be written even when the cadence skips it.
  SurfaceMesh last_surface;
  std::vector<double> last_curvature;
  std::vector<Vec3> last_velocity;
  int last_frame = -1;

  const StepCallback observer = [&](const StepState& state) {
    const int frame = state.report.step - 1;
    last_surface = state.surface;
    last_curvature = interpolate_vertex_scalar(state.surface, state.dofs,
                                               state.curvature);
    last_velocity = interpolate_vertex_vector(state.surface,
                                              state.velocity.node_values);
    last_frame = frame;
    if (frame % cadence == 0) {
      write_surface_vtk(last_surface, last_curvature, last_velocity,
                        frame_path(out_dir, frame));
      last_written_frame = frame;
    }
  };

  const EvolutionResult result =
      run(*setup.mesh, std::move(setup.level_set), setup.config, observer);

  if (last_frame >= 0 && last_frame != last_written_frame) {
    write_surface_vtk(last_surface, last_curvature, last_velocity,
                      frame_path(out_dir, last_frame));
  }
  write_history_csv(result.reports, out_dir / "history.csv");

  const char* status = result.status == RunStatus::kConverged ? "converged"
                       : result.status == RunStatus::kVanished
                           ? "vanished"
                           : "step limit reached";
  const double time =
      result.reports.empty()
          ? 0.0
          : result.reports.back().time + result.reports.back().dt;
  std::cout << scenario.name << ": " << status << " after "
            << result.reports.size() << " step(s), t = " << time << "\n";
  return result.status == RunStatus::kMaxSteps ? 2 : 0;
}

int do_list() {
  for (const Scenario& s : scenario_registry()) {
    std::printf("%-20s %s%s\n", s.name.c_str(), s.description.c_str(),
                s.experimental ? " [experimental]" : "");
  }
  return 0;
}

std::vector<int> parse_division_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string part = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      out.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw UsageError("converge: bad division count '" + part + "'");
    }
    if (out.back() < 4) {
      throw UsageError("converge: division counts must be >= 4");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int do_converge(const std::string& divisions_text,
                const std::filesystem::path& out_dir) {
  const std::vector<int> divisions = parse_division_list(divisions_text);
  if (divisions.size() < 2) {
    throw UsageError("converge: needs at least two division counts");
  }
  const std::vector<CurvatureStudyRow> rows = sphere_curvature_study(divisions);

  std::string csv = "divisions,h,l2_error\n";
  for (const CurvatureStudyRow& r : rows) {
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", r.divisions, r.h,
                  r.l2_error);
    csv += line;
    std::printf("divisions %3d  h %.6g  l2 error %.6g\n", r.divisions, r.h,
                r.l2_error);
  }
  const double order = fitted_order(rows);
  std::printf("fitted order: %.3f\n", order);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path = out_dir / "convergence.csv";
  const std::filesystem::path tmp = csv_path.string() + ".tmp";
  {
    std::FILE* f = std::fopen(tmp.string().c_str(), "wb");
    if (!f) throw Error("cannot open '" + tmp.string() + "'");
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }
  std::filesystem::rename(tmp, csv_path);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"evolves level-set surfaces by mean curvature flow toward "
               "minimal surfaces"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "evolve a scenario");
  std::optional<std::string> scenario;
  std::optional<std::string> divisions_text;
  std::optional<double> epsilon, alpha, k_max, c_j;
  std::optional<int> max_steps, h_power, ring_count, cadence;
  std::optional<std::string> reinit_text, norm_text, out_dir;
  std::optional<std::string> config_path;
  run_cmd->add_option("--scenario", scenario, "scenario name (see 'list')");
  run_cmd->add_option("--divisions", divisions_text,
                      "mesh divisions nx,ny,nz (or one count for all axes)");
  run_cmd->add_option("--epsilon", epsilon, "curvature-norm stop threshold");
  run_cmd->add_option("--max-steps", max_steps, "step limit");
  run_cmd->add_option("--alpha", alpha, "CFL factor for the timestep");
  run_cmd->add_option("--k-max", k_max, "upper bound on the timestep");
  run_cmd->add_option("--cj", c_j, "stabilization strength");
  run_cmd->add_option("--h-power", h_power, "mesh-size power in the penalty");
  run_cmd->add_option("--ring-count", ring_count, "halo rings in the band");
  run_cmd->add_option("--reinit", reinit_text,
                      "distance source: triangle|vertex");
  run_cmd->add_option("--norm", norm_text, "stopping norm: nodal|l2");
  run_cmd->add_option("--out", out_dir, "output directory (default 'out')");
  run_cmd->add_option("--cadence", cadence, "write every Nth surface frame");
  run_cmd->add_option("--config", config_path,
                      "config file with key = value lines; flags win");

  app.add_subcommand("list", "print the scenario registry");

  auto* converge_cmd =
      app.add_subcommand("converge", "sphere curvature convergence study");
  std::string study_divisions = "12,24,48";
  std::string study_out = "out";
  converge_cmd->add_option("--divisions", study_divisions,
                           "comma-separated division counts");
  converge_cmd->add_option("--out", study_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (run_cmd->parsed()) {
      RunConfig rc;
      if (config_path) load_config_file(*config_path, rc);
      if (scenario) rc.scenario = scenario;
      if (divisions_text) rc.divisions = parse_divisions(*divisions_text);
      if (epsilon) rc.epsilon = epsilon;
      if (max_steps) rc.max_steps = max_steps;
      if (alpha) rc.alpha = alpha;
      if (k_max) rc.k_max = k_max;
      if (c_j) rc.c_j = c_j;
      if (h_power) rc.h_power = h_power;
      if (ring_count) rc.ring_count = ring_count;
      if (reinit_text) rc.reinit = parse_reinit_mode(*reinit_text);
      if (norm_text) rc.norm = parse_norm_mode(*norm_text);
      if (out_dir) rc.out_dir = out_dir;
      if (cadence) rc.cadence = cadence;
      return do_run(rc);
    }
    if (converge_cmd->parsed()) {
      return do_converge(study_divisions, study_out);
    }
    return do_list();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace minsurf
