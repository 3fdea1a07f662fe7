#pragma once

#include "tvd/chi_solver.hpp"
#include "tvd/grid.hpp"
#include "tvd/linsolve.hpp"
#include "tvd/material.hpp"

#include <functional>
#include <vector>

namespace tvd {

enum class Scheme {
  Reversible,              // mu=0, rho=0, fully coupled implicit step
  ReversibleExpansion,     // mu=0, rho!=0, truncated K_M / Theta_M
  Irreversible,            // mu=1, rho=0, sequential chi -> u -> w
  IsothermalIrreversible,  // mu=1, no w-equation, Yosida-penalized rate constraint
  IsothermalReversible     // mu=0, no w-equation, prescribed temperature (cont. dependence)
};

struct State {
  int k = 0;
  ScalarField w;       // empty in isothermal schemes
  VectorField u;       // u^k
  VectorField u_prev;  // u^{k-1} (u^{-1} = u0 - tau v0 at start)
  ScalarField chi;
};

struct Schedule {
  double T = 1.0;
  double tau = 0.1;
  int K_tau = 10;
  static Schedule make(double T, double tau);  // requires K_tau * tau = T to 1e-12
  double time(int k) const { return k * tau; }
};

using TimeFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double t, double x, double y)>;  // y ignored in 1D

/// Problem data; null entries mean identically zero.
struct RunData {
  SpaceTimeFn g;           // heat source
  SpaceTimeFn fx, fy;      // body force components
  SpaceTimeFn theta_star;  // prescribed temperature for the isothermal schemes
};

/// Step values f^k = (1/tau) int_{t^{k-1}}^{t^k} f, 4-point Gauss per step.
std::vector<double> local_means(const TimeFn& data, const Schedule& sched);
/// Same, nodal: fn evaluated at each node, time-averaged over step k (1-based).
ScalarField local_mean_field(const SpaceTimeFn& fn, int k, const Schedule& sched,
                             const Mesh& mesh);

struct InitialData {
  ScalarField theta0;  // if nonempty, converted through the enthalpy; else w0 is used
  ScalarField w0;
  VectorField u0, v0;
  ScalarField chi0;
  bool smooth_w0 = true;         // one H1-smoothing step with weight tau^{2/rbar}
  bool positivity_clamp = false; // node-wise max with w_floor afterwards
  double w_floor = 0.0;
};

State prepare_initial(const InitialData& init, const Mesh& mesh, const MaterialModel& model,
                      const Schedule& sched);

struct StepReport {
  int k = 0;
  double t = 0.0;
  bool converged = true;
  int outer_iterations = 0;   // Gauss-Seidel sweeps (coupled schemes)
  int theta_inner_iterations = 0;
  SolveStats u_stats, w_stats;
  ChiSolveReport chi_report;
  double min_w = 0.0, max_abs_w = 0.0;
  double vi_violation = 0.0;  // one-sided VI check (irreversible chi-steps)
  ScalarField xi;             // multiplier from the semilinear step (reversible)
  ScalarField zeta;           // rate-constraint multiplier (isothermal irreversible)

  // Energy ledger: state energies after the step, this step's dissipation and
  // work inputs, and the convexity/quadrature defects of the backward-Euler
  // telescoping, each with its sign.
  double enthalpy_mass = 0.0;  // int w^k
  double kinetic = 0.0;        // (1/2)||(u^k-u^{k-1})/tau||_m^2
  double elastic = 0.0;        // (1/2) e(b(chi^k); u^k, u^k)
  double phi_chi = 0.0;        // Phi(chi^k)
  double w_pot = 0.0;          // int pot(chi^k), lumped
  double viscous_dissip = 0.0; // tau * v(a+delta; Du^k, Du^k)
  double chi_dissip = 0.0;     // ||chi^k-chi^{k-1}||_m^2 / tau
  double work_f = 0.0;         // tau * int f^k . Du^k
  double work_g = 0.0;         // tau * int g^k
  double theta_work = 0.0;     // sum m Theta_used dchi (external input if no w-equation)
  double def_kinetic = 0.0, def_elastic = 0.0, def_phi = 0.0, def_beta = 0.0;
  double remainder = 0.0;      // gamma convexity defect (the O(tau^(1/2)) term)
  double def_b_quad = 0.0;     // drive-vs-assembly quadrature gap (0 for linear b)
  double theta_gap = 0.0;      // w-equation vs chi-equation coupling mismatch
  double energy_slack = 0.0;   // ledger residual after subtracting all of the above
  double bg_functional = 0.0;  // Boccardo-Gallouet integrand at w^k (varsigma = 1)
};

struct StepperOptions {
  double outer_tol = 1e-9;  // Gauss-Seidel successive-iterate inf-norm
  int max_outer = 200;
  double damping = 0.5;
  double cg_tol = 1e-12;
  double theta_inner_tol = 1e-13;  // implicit Theta(w^k) relaxation
  int max_theta_inner = 200;
  double chi_tol = 1e-8;
  int chi_max_iter = 5000;
};

struct Trajectory {
  const Mesh* mesh = nullptr;       // mesh the run was produced on
  std::vector<State> states;        // states[0] = initial, states[k] after step k
  std::vector<StepReport> reports;  // reports[k-1] for step k
};

class Stepper {
 public:
  Stepper(const Mesh& mesh, const MaterialModel& model, const Schedule& sched,
          const RunData& data, StepperOptions opts = {});

  /// Advance one step in place; scheme preconditions checked on first use.
  StepReport step(State& state, Scheme scheme) const;

  Trajectory run(const State& initial, Scheme scheme) const;

 private:
  StepReport step_coupled(State& state, bool truncated) const;      // Problems 3.1 / 3.2
  StepReport step_sequential(State& state, Scheme scheme) const;    // Problems 3.3 / 3.4 / twin

  const Mesh& mesh_;
  const MaterialModel& model_;
  Schedule sched_;
  RunData data_;
  StepperOptions opts_;
};

}  // namespace tvd
