#pragma once

#include "tvd/diagnostics.hpp"
#include "tvd/stepper.hpp"

#include <string>
#include <vector>

namespace tvd {

enum class Experiment { SingleRun, TauRefinement, DeltaSweep, ContinuousDependence };

/// Full run description, loaded from a flat `section.key = value` text file.
/// Data and initial conditions are named analytic presets:
///   zero | constant:V | ramp:V (V*t) | bump:A (A*sin(pi x/Lx)[*sin(pi y/Ly)])
struct RunConfig {
  int dim = 1;
  double extent_x = 1.0, extent_y = 1.0;
  int nx = 16, ny = 16;

  double T = 1.0, tau = 0.05;
  Scheme scheme = Scheme::Reversible;
  Experiment experiment = Experiment::SingleRun;

  MaterialModel material;

  std::string g_preset = "zero";
  std::string f_preset = "zero";
  std::string theta_star_preset = "zero";

  std::string chi0_preset = "constant:1";
  std::string theta0_preset;  // empty: use w0_preset
  std::string w0_preset = "zero";
  std::string u0_preset = "zero";
  std::string v0_preset = "zero";
  bool smooth_w0 = true;
  bool positivity_clamp = false;
  double w_floor = 0.0;

  StepperOptions opts;
  int snapshot_every = 0;  // 0: no field snapshots

  std::vector<double> deltas = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4};
  int tau_levels = 3;

  Mesh make_mesh() const;
  RunData make_data() const;
  InitialData make_initial(const Mesh& mesh) const;
  Scenario make_scenario(const Mesh& mesh) const;  // mesh must outlive the scenario
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Apply one `section.key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace tvd
