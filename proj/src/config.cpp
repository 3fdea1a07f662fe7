#include "tvd/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvd {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("config: " + key + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw std::invalid_argument("config: " + key + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw std::invalid_argument("config: " + key + ": expected 0/1/true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Reversible: return "reversible";
    case Scheme::ReversibleExpansion: return "reversible_expansion";
    case Scheme::Irreversible: return "irreversible";
    case Scheme::IsothermalIrreversible: return "isothermal_irreversible";
    case Scheme::IsothermalReversible: return "isothermal_reversible";
  }
  return "?";
}

Scheme parse_scheme(const std::string& v) {
  if (v == "reversible") return Scheme::Reversible;
  if (v == "reversible_expansion") return Scheme::ReversibleExpansion;
  if (v == "irreversible") return Scheme::Irreversible;
  if (v == "isothermal_irreversible") return Scheme::IsothermalIrreversible;
  if (v == "isothermal_reversible") return Scheme::IsothermalReversible;
  throw std::invalid_argument("config: unknown scheme '" + v + "'");
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::SingleRun: return "single_run";
    case Experiment::TauRefinement: return "tau_refinement";
    case Experiment::DeltaSweep: return "delta_sweep";
    case Experiment::ContinuousDependence: return "continuous_dependence";
  }
  return "?";
}

Experiment parse_experiment(const std::string& v) {
  if (v == "single_run") return Experiment::SingleRun;
  if (v == "tau_refinement") return Experiment::TauRefinement;
  if (v == "delta_sweep") return Experiment::DeltaSweep;
  if (v == "continuous_dependence") return Experiment::ContinuousDependence;
  throw std::invalid_argument("config: unknown experiment '" + v + "'");
}

const char* coeff_name(CoeffSpec c) {
  switch (c) {
    case CoeffSpec::Chi: return "chi";
    case CoeffSpec::OneMinusChi: return "one_minus_chi";
    case CoeffSpec::Constant: return "constant";
  }
  return "?";
}

CoeffSpec parse_coeff(const std::string& v) {
  if (v == "chi") return CoeffSpec::Chi;
  if (v == "one_minus_chi") return CoeffSpec::OneMinusChi;
  if (v == "constant") return CoeffSpec::Constant;
  throw std::invalid_argument("config: unknown coefficient '" + v + "'");
}

void set_key(RunConfig& c, const std::string& key, const std::string& v) {
  MaterialModel& m = c.material;
  if (key == "mesh.dim") c.dim = to_int(key, v);
  else if (key == "mesh.extent_x") c.extent_x = to_double(key, v);
  else if (key == "mesh.extent_y") c.extent_y = to_double(key, v);
  else if (key == "mesh.nx") c.nx = to_int(key, v);
  else if (key == "mesh.ny") c.ny = to_int(key, v);
  else if (key == "schedule.T") c.T = to_double(key, v);
  else if (key == "schedule.tau") c.tau = to_double(key, v);
  else if (key == "scheme") c.scheme = parse_scheme(v);
  else if (key == "experiment") c.experiment = parse_experiment(v);
  else if (key == "material.c0") m.c0 = to_double(key, v);
  else if (key == "material.c1") m.c1 = to_double(key, v);
  else if (key == "material.sigma") m.sigma = to_double(key, v);
  else if (key == "material.sigma1") m.sigma1 = to_double(key, v);
  else if (key == "material.conductivity") {
    if (v == "ratio_bounded") m.conductivity_spec = ConductivitySpec::RatioBounded;
    else if (v == "power") m.conductivity_spec = ConductivitySpec::Power;
    else throw std::invalid_argument("config: unknown conductivity '" + v + "'");
  } else if (key == "material.c2") m.c2 = to_double(key, v);
  else if (key == "material.c3") m.c3 = to_double(key, v);
  else if (key == "material.c10") m.c10 = to_double(key, v);
  else if (key == "material.q") m.q = to_double(key, v);
  else if (key == "material.lambda1") m.lambda1 = to_double(key, v);
  else if (key == "material.lambda2") m.lambda2 = to_double(key, v);
  else if (key == "material.ell1") m.ell1 = to_double(key, v);
  else if (key == "material.ell2") m.ell2 = to_double(key, v);
  else if (key == "material.rho") m.rho = to_double(key, v);
  else if (key == "material.mu") m.mu = to_int(key, v);
  else if (key == "material.delta") m.delta = to_double(key, v);
  else if (key == "material.degenerate_mode") m.degenerate_mode = to_bool(key, v);
  else if (key == "material.p") m.p = to_double(key, v);
  else if (key == "material.phi") {
    if (v == "power") m.phi_spec = PhiSpec::Power;
    else if (v == "regularized") m.phi_spec = PhiSpec::Regularized;
    else throw std::invalid_argument("config: unknown phi '" + v + "'");
  } else if (key == "material.a") m.a_spec = parse_coeff(v);
  else if (key == "material.b") m.b_spec = parse_coeff(v);
  else if (key == "material.a_const") m.a_const = to_double(key, v);
  else if (key == "material.b_const") m.b_const = to_double(key, v);
  else if (key == "material.potential") {
    if (v == "indicator_unit") m.w_spec = WSpec::IndicatorUnit;
    else if (v == "logarithmic") m.w_spec = WSpec::Logarithmic;
    else if (v == "indicator_half_line") m.w_spec = WSpec::IndicatorHalfLine;
    else throw std::invalid_argument("config: unknown potential '" + v + "'");
  } else if (key == "material.logw_c1") m.logw_c1 = to_double(key, v);
  else if (key == "material.logw_c2") m.logw_c2 = to_double(key, v);
  else if (key == "material.logw_c3") m.logw_c3 = to_double(key, v);
  else if (key == "material.gamma_poly") m.gamma_poly = to_list(key, v);
  else if (key == "material.M") m.M = to_double(key, v);
  else if (key == "data.g") c.g_preset = v;
  else if (key == "data.f") c.f_preset = v;
  else if (key == "data.theta_star") c.theta_star_preset = v;
  else if (key == "initial.chi0") c.chi0_preset = v;
  else if (key == "initial.theta0") c.theta0_preset = v;
  else if (key == "initial.w0") c.w0_preset = v;
  else if (key == "initial.u0") c.u0_preset = v;
  else if (key == "initial.v0") c.v0_preset = v;
  else if (key == "initial.smooth_w0") c.smooth_w0 = to_bool(key, v);
  else if (key == "initial.positivity_clamp") c.positivity_clamp = to_bool(key, v);
  else if (key == "initial.w_floor") c.w_floor = to_double(key, v);
  else if (key == "tolerances.outer_tol") c.opts.outer_tol = to_double(key, v);
  else if (key == "tolerances.max_outer") c.opts.max_outer = to_int(key, v);
  else if (key == "tolerances.damping") c.opts.damping = to_double(key, v);
  else if (key == "tolerances.cg_tol") c.opts.cg_tol = to_double(key, v);
  else if (key == "tolerances.chi_tol") c.opts.chi_tol = to_double(key, v);
  else if (key == "tolerances.chi_max_iter") c.opts.chi_max_iter = to_int(key, v);
  else if (key == "output.snapshot_every") c.snapshot_every = to_int(key, v);
  else if (key == "sweep.deltas") c.deltas = to_list(key, v);
  else if (key == "contdep.eps") c.eps_list = to_list(key, v);
  else if (key == "refine.tau_levels") c.tau_levels = to_int(key, v);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

SpaceTimeFn make_fn(const std::string& key, const std::string& preset, int dim, double ex,
                    double ey);

void validate_config(const RunConfig& c) {
  // Exercise every preset string up front so typos fail at parse time, not
  // when the scenario is assembled.
  for (const auto& [key, preset] :
       std::initializer_list<std::pair<const char*, const std::string&>>{
           {"data.g", c.g_preset},
           {"data.f", c.f_preset},
           {"data.theta_star", c.theta_star_preset},
           {"initial.chi0", c.chi0_preset},
           {"initial.theta0", c.theta0_preset},
           {"initial.w0", c.w0_preset},
           {"initial.u0", c.u0_preset},
           {"initial.v0", c.v0_preset}})
    make_fn(key, preset, c.dim, c.extent_x, c.extent_y);

  if (c.dim != 1 && c.dim != 2)
    throw std::invalid_argument("config: mesh.dim must be 1 or 2");
  c.material.validate(c.dim);
  Schedule::make(c.T, c.tau);

  const bool irrev = c.scheme == Scheme::Irreversible ||
                     c.scheme == Scheme::IsothermalIrreversible;
  if (irrev && c.material.mu != 1)
    throw std::invalid_argument(
        "config: the irreversible schemes require material.mu = 1");
  if (!irrev && c.material.mu != 0)
    throw std::invalid_argument(
        "config: the reversible schemes require material.mu = 0");
  if (irrev && c.material.w_spec != WSpec::IndicatorHalfLine)
    throw std::invalid_argument(
        "config: irreversible runs require the half-line indicator potential "
        "(set material.potential = indicator_half_line; the logarithmic and "
        "unit-interval potentials are reversible-only)");
  if (c.scheme == Scheme::ReversibleExpansion &&
      c.material.conductivity_spec != ConductivitySpec::Power)
    throw std::invalid_argument(
        "config: the thermal-expansion scheme requires the power-growth "
        "conductivity (set material.conductivity = power)");
  if (c.scheme == Scheme::Reversible && c.material.rho != 0.0)
    throw std::invalid_argument(
        "config: the plain reversible scheme requires material.rho = 0 "
        "(use scheme = reversible_expansion for rho != 0)");
  if (c.experiment == Experiment::DeltaSweep &&
      (c.scheme != Scheme::Irreversible || !c.material.degenerate_mode ||
       c.material.rho != 0.0))
    throw std::invalid_argument(
        "config: the delta sweep requires scheme = irreversible with "
        "material.degenerate_mode = 1 and material.rho = 0");
  if (c.experiment == Experiment::ContinuousDependence &&
      (c.scheme != Scheme::IsothermalReversible ||
       c.material.a_spec != CoeffSpec::Constant ||
       c.material.phi_spec != PhiSpec::Regularized))
    throw std::invalid_argument(
        "config: continuous dependence requires scheme = isothermal_reversible "
        "with material.a = constant and material.phi = regularized");
}

struct Preset {
  std::string name;
  std::vector<double> args;
};

Preset parse_preset(const std::string& key, const std::string& s) {
  Preset p;
  const auto colon = s.find(':');
  p.name = s.substr(0, colon);
  if (colon != std::string::npos) p.args = to_list(key, s.substr(colon + 1));
  return p;
}

SpaceTimeFn make_fn(const std::string& key, const std::string& preset, int dim, double ex,
                    double ey) {
  const Preset p = parse_preset(key, preset);
  const double pi = 3.14159265358979323846;
  if (p.name.empty() || p.name == "zero") return nullptr;
  if (p.name == "constant" && p.args.size() == 1) {
    const double a = p.args[0];
    return [a](double, double, double) { return a; };
  }
  if (p.name == "ramp" && p.args.size() == 1) {
    const double a = p.args[0];
    return [a](double t, double, double) { return a * t; };
  }
  if (p.name == "bump" && p.args.size() == 1) {
    const double a = p.args[0];
    return [a, dim, ex, ey, pi](double, double x, double y) {
      double v = a * std::sin(pi * x / ex);
      if (dim == 2) v *= std::sin(pi * y / ey);
      return v;
    };
  }
  throw std::invalid_argument("config: " + key + ": unknown preset '" + preset + "'");
}

ScalarField make_field(const std::string& key, const std::string& preset, const RunConfig& c,
                       const Mesh& mesh) {
  ScalarField out(mesh.num_nodes(), 0.0);
  const auto fn = make_fn(key, preset, c.dim, c.extent_x, c.extent_y);
  if (!fn) return out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    out[i] = fn(0.0, mesh.coord(i, 0), mesh.dim == 2 ? mesh.coord(i, 1) : 0.0);
  return out;
}

}  // namespace

Mesh RunConfig::make_mesh() const {
  if (dim == 1) return build_mesh_1d(extent_x, nx);
  return build_mesh_2d(extent_x, extent_y, nx, ny);
}

RunData RunConfig::make_data() const {
  RunData d;
  d.g = make_fn("data.g", g_preset, dim, extent_x, extent_y);
  d.fx = make_fn("data.f", f_preset, dim, extent_x, extent_y);
  d.fy = nullptr;  // presets drive the x-component; 2D forcing stays uniaxial
  d.theta_star = make_fn("data.theta_star", theta_star_preset, dim, extent_x, extent_y);
  return d;
}

InitialData RunConfig::make_initial(const Mesh& mesh) const {
  InitialData init;
  init.chi0 = make_field("initial.chi0", chi0_preset, *this, mesh);
  const bool isothermal = scheme == Scheme::IsothermalIrreversible ||
                          scheme == Scheme::IsothermalReversible;
  if (!isothermal) {
    if (!theta0_preset.empty())
      init.theta0 = make_field("initial.theta0", theta0_preset, *this, mesh);
    else
      init.w0 = make_field("initial.w0", w0_preset, *this, mesh);
  }
  const ScalarField u0s = make_field("initial.u0", u0_preset, *this, mesh);
  const ScalarField v0s = make_field("initial.v0", v0_preset, *this, mesh);
  init.u0.assign(mesh.dim * mesh.num_nodes(), 0.0);
  init.v0.assign(mesh.dim * mesh.num_nodes(), 0.0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    init.u0[mesh.dim * i] = u0s[i];
    init.v0[mesh.dim * i] = v0s[i];
  }
  init.smooth_w0 = smooth_w0;
  init.positivity_clamp = positivity_clamp;
  init.w_floor = w_floor;
  return init;
}

Scenario RunConfig::make_scenario(const Mesh& mesh) const {
  Scenario sc;
  sc.mesh = &mesh;
  sc.model = material;
  sc.sched = Schedule::make(T, tau);
  sc.data = make_data();
  sc.init = make_initial(mesh);
  sc.scheme = scheme;
  sc.opts = opts;
  return sc;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    set_key(c, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override: expected key=value, got '" + assignment + "'");
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  validate_config(cfg);
}

std::string serialize_config(const RunConfig& c) {
  const MaterialModel& m = c.material;
  std::stringstream out;
  out << "mesh.dim = " << c.dim << "\n";
  out << "mesh.extent_x = " << fmt(c.extent_x) << "\n";
  out << "mesh.extent_y = " << fmt(c.extent_y) << "\n";
  out << "mesh.nx = " << c.nx << "\n";
  out << "mesh.ny = " << c.ny << "\n";
  out << "schedule.T = " << fmt(c.T) << "\n";
  out << "schedule.tau = " << fmt(c.tau) << "\n";
  out << "scheme = " << scheme_name(c.scheme) << "\n";
  out << "experiment = " << experiment_name(c.experiment) << "\n";
  out << "material.c0 = " << fmt(m.c0) << "\n";
  out << "material.c1 = " << fmt(m.c1) << "\n";
  out << "material.sigma = " << fmt(m.sigma) << "\n";
  out << "material.sigma1 = " << fmt(m.sigma1) << "\n";
  out << "material.conductivity = "
      << (m.conductivity_spec == ConductivitySpec::Power ? "power" : "ratio_bounded") << "\n";
  out << "material.c2 = " << fmt(m.c2) << "\n";
  out << "material.c3 = " << fmt(m.c3) << "\n";
  out << "material.c10 = " << fmt(m.c10) << "\n";
  out << "material.q = " << fmt(m.q) << "\n";
  out << "material.lambda1 = " << fmt(m.lambda1) << "\n";
  out << "material.lambda2 = " << fmt(m.lambda2) << "\n";
  out << "material.ell1 = " << fmt(m.ell1) << "\n";
  out << "material.ell2 = " << fmt(m.ell2) << "\n";
  out << "material.rho = " << fmt(m.rho) << "\n";
  out << "material.mu = " << m.mu << "\n";
  out << "material.delta = " << fmt(m.delta) << "\n";
  out << "material.degenerate_mode = " << (m.degenerate_mode ? 1 : 0) << "\n";
  out << "material.p = " << fmt(m.p) << "\n";
  out << "material.phi = " << (m.phi_spec == PhiSpec::Power ? "power" : "regularized") << "\n";
  out << "material.a = " << coeff_name(m.a_spec) << "\n";
  out << "material.b = " << coeff_name(m.b_spec) << "\n";
  out << "material.a_const = " << fmt(m.a_const) << "\n";
  out << "material.b_const = " << fmt(m.b_const) << "\n";
  out << "material.potential = "
      << (m.w_spec == WSpec::IndicatorUnit
              ? "indicator_unit"
              : m.w_spec == WSpec::Logarithmic ? "logarithmic" : "indicator_half_line")
      << "\n";
  out << "material.logw_c1 = " << fmt(m.logw_c1) << "\n";
  out << "material.logw_c2 = " << fmt(m.logw_c2) << "\n";
  out << "material.logw_c3 = " << fmt(m.logw_c3) << "\n";
  if (!m.gamma_poly.empty()) out << "material.gamma_poly = " << list_str(m.gamma_poly) << "\n";
  out << "material.M = " << fmt(m.M) << "\n";
  out << "data.g = " << c.g_preset << "\n";
  out << "data.f = " << c.f_preset << "\n";
  out << "data.theta_star = " << c.theta_star_preset << "\n";
  out << "initial.chi0 = " << c.chi0_preset << "\n";
  if (!c.theta0_preset.empty()) out << "initial.theta0 = " << c.theta0_preset << "\n";
  out << "initial.w0 = " << c.w0_preset << "\n";
  out << "initial.u0 = " << c.u0_preset << "\n";
  out << "initial.v0 = " << c.v0_preset << "\n";
  out << "initial.smooth_w0 = " << (c.smooth_w0 ? 1 : 0) << "\n";
  out << "initial.positivity_clamp = " << (c.positivity_clamp ? 1 : 0) << "\n";
  out << "initial.w_floor = " << fmt(c.w_floor) << "\n";
  out << "tolerances.outer_tol = " << fmt(c.opts.outer_tol) << "\n";
  out << "tolerances.max_outer = " << c.opts.max_outer << "\n";
  out << "tolerances.damping = " << fmt(c.opts.damping) << "\n";
  out << "tolerances.cg_tol = " << fmt(c.opts.cg_tol) << "\n";
  out << "tolerances.chi_tol = " << fmt(c.opts.chi_tol) << "\n";
  out << "tolerances.chi_max_iter = " << c.opts.chi_max_iter << "\n";
  out << "output.snapshot_every = " << c.snapshot_every << "\n";
  out << "sweep.deltas = " << list_str(c.deltas) << "\n";
  out << "contdep.eps = " << list_str(c.eps_list) << "\n";
  out << "refine.tau_levels = " << c.tau_levels << "\n";
  return out.str();
}

}  // namespace tvd
