#pragma once

#include "tvd/stepper.hpp"

#include <string>
#include <vector>

namespace tvd {

// --- norms ------------------------------------------------------------------

/// Lumped L2 norm of a scalar nodal field.
double l2_norm_nodal(const ScalarField& f, const Mesh& mesh);
/// Lumped L2 norm of an interleaved vector field.
double l2_norm_vector(const VectorField& u, const Mesh& mesh);
/// (int |grad f|^p)^(1/p) from element gradients.
double lp_gradient_norm(const ScalarField& f, const Mesh& mesh, double p);
/// L2 norm of an element-wise symmetric tensor field (Frobenius density).
double l2_norm_tensor(const SymTensorField& t, const Mesh& mesh);

// --- energy ledger ----------------------------------------------------------

struct LedgerCheck {
  std::vector<double> slack;       // per-step residual after defect reconciliation
  std::vector<double> defect_sum;  // logged defects (kinetic+elastic+phi+beta+gamma+quad)
  std::vector<double> remainder;   // gamma convexity defect, the O(tau^(1/2)) term
  std::vector<double> ineq_slack;  // energy-inequality slack with the remainder dropped
  double energy_scale = 1.0;
  bool reconciled = true;      // mu=0: |slack| <= tol_eq * scale at every step
  bool inequality_ok = true;   // mu=1: ineq_slack >= -tol_ineq * scale at every step
};

LedgerCheck energy_ledger_check(const Trajectory& traj, const MaterialModel& model,
                                double tol_eq = 1e-8, double tol_ineq = 1e-9);

// --- quasi-stresses and the delta sweep -------------------------------------

struct QuasiStresses {
  SymTensorField mu;   // sqrt(chi+delta) eps((u^k - u^{k-1})/tau)
  SymTensorField eta;  // sqrt(chi+delta) eps(u^k)
};

QuasiStresses quasi_stresses(const State& state, const Mesh& mesh, const MaterialModel& model,
                             double tau);

/// A complete run description, reused by the sweep/refinement experiments.
struct Scenario {
  const Mesh* mesh = nullptr;
  MaterialModel model;
  Schedule sched;
  RunData data;
  InitialData init;
  Scheme scheme = Scheme::Irreversible;
  StepperOptions opts;

  Trajectory run() const;
};

struct DeltaSweepEntry {
  double delta = 0.0;
  double mu_norm_l2l2 = 0.0;    // ||mu_delta||_{L2(L2)}
  double eta_norm_linfl2 = 0.0; // ||eta_delta||_{Linf(L2)}
  double momentum_residual_factored = 0.0;  // sqrt(chi+delta)-weighted, = solver residual
  double momentum_residual_chi = 0.0;       // sqrt(chi)-weighted on {chi > thresh}
};

struct DeltaSweepReport {
  std::vector<DeltaSweepEntry> entries;
  // Linf-in-time L2 differences between consecutive delta levels.
  std::vector<double> pairwise_w, pairwise_u, pairwise_chi;
  double mu_norm_ratio = 1.0, eta_norm_ratio = 1.0;  // max/min across the sweep
  bool chi_monotone = true;  // chi never increases in any sweep member
};

DeltaSweepReport delta_sweep(const Scenario& scenario, const std::vector<double>& deltas,
                             double chi_thresh = 0.1);

// --- Boccardo-Gallouet functional -------------------------------------------

/// int |grad w|^2 / (1 + wbar)^(varsigma+1), wbar element-averaged.
double boccardo_gallouet(const ScalarField& w, double varsigma, const Mesh& mesh);

// --- continuous dependence ---------------------------------------------------

struct ContDepEntry {
  double eps = 0.0;
  double lhs = 0.0;    // solution distance in the estimate's norms
  double rhs = 0.0;    // data distance
  double ratio = 0.0;  // lhs / rhs
};

struct ContDepReport {
  std::vector<ContDepEntry> entries;
  double slope = 0.0;  // log-log slope of lhs vs eps
};

/// Twin isothermal reversible runs with all data perturbed by eps times fixed
/// smooth profiles; base scenario must use constant a and the regularized phi.
ContDepReport continuous_dependence_experiment(const Scenario& base,
                                               const std::vector<double>& eps_list);

// --- per-step residual series -----------------------------------------------

struct ResidualSeries {
  std::vector<double> vi_violation;
  std::vector<double> ineq_slack;
};

ResidualSeries vi_and_energy_residuals(const Trajectory& traj, const MaterialModel& model);

// --- empirical Korn constant -------------------------------------------------

struct KornCheck {
  double c1_emp = 0.0;        // min e(1;u,u)/|u|^2_{H1_0} over the sample
  bool weighted_bound_ok = true;  // e(eta;u,u) >= eta_min * c1_emp * |u|^2 on the sample
};

KornCheck korn_check(const Mesh& mesh, const MaterialModel& model, int samples,
                     unsigned seed, double eta_min = 0.3);

}  // namespace tvd
