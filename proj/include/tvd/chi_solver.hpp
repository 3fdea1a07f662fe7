#pragma once

#include "tvd/grid.hpp"
#include "tvd/material.hpp"

#include <vector>

namespace tvd {

/// One time-step phase/damage problem: minimize over the nodal box
///   F(chi) = sum_i m_i [ (chi_i - chi_prev_i)^2/(2 tau) + pot(chi_i) + h_i chi_i ]
///            + Phi(chi),
/// where pot is the smooth part of W (gamma_hat; plus the logarithmic barrier
/// or the Yosida penalty when active) and Phi(chi) = int phi(grad chi). The
/// indicator parts of W and of the rate constraint are encoded in the box.
struct ChiStepProblem {
  const Mesh* mesh = nullptr;
  const MaterialModel* model = nullptr;
  ScalarField chi_prev;
  double tau = 0.0;
  ScalarField h_field;          // nodal driving term, heat source already folded in
  ScalarField box_lo, box_hi;   // per-node feasible interval
  double yosida_tau = 0.0;      // > 0: add beta_tau penalty instead of the lower box

  /// Reversible box from the potential ([0,1] or [0,inf)); irreversible mode
  /// additionally caps at chi_prev; Yosida mode drops the lower bound.
  void set_default_box(bool irreversible);
  void validate() const;
};

struct ChiSolveReport {
  int iterations = 0;
  double proj_grad_inf = 0.0;  // ||chi - Proj_box(chi - grad F)||_inf
  double energy = 0.0;
  bool converged = false;
};

/// Lumped-quadrature energy; +inf sentinel outside the box.
double chi_energy(const ScalarField& chi, const ChiStepProblem& prob);

/// Smooth nodal potential entering chi_energy (gamma_hat plus, when active,
/// the logarithmic entropy or the Yosida penalty), and its derivative.
/// Exposed so the energy ledger can reconcile the same terms the solver used.
double chi_pot_value(double x, const ChiStepProblem& prob);
double chi_pot_derivative(double x, const ChiStepProblem& prob);

/// Gradient of the smooth part of chi_energy (everything but the box).
std::vector<double> chi_energy_gradient(const ScalarField& chi, const ChiStepProblem& prob);

/// Projected proximal-gradient descent with Barzilai-Borwein steps and
/// monotone backtracking. Feasibility is exact (bit-level clamp).
ScalarField minimize_chi(const ChiStepProblem& prob, ChiSolveReport& report,
                         double tol = 1e-8, int max_iter = 5000);

/// Reversible semilinear chi-update: folds -Theta(w) into the drive, runs the
/// minimizer, and recovers the multiplier xi_i = (grad F)_i / m_i, which
/// vanishes at interior nodes, is >= 0 only where chi_i = 0 and <= 0 only
/// where chi_i = 1.
ScalarField chi_semilinear_step(const ChiStepProblem& prob, const ScalarField& theta,
                                ScalarField& xi, ChiSolveReport& report,
                                double tol = 1e-8, int max_iter = 5000);

/// Worst violation of the discrete one-sided variational inequality, tested
/// with the nonpositive nodal directions phi = -e_i. The admissible multiplier
/// on {chi = 0} is chosen as -max(grad F, 0)/m_i; a converged minimizer gives
/// a violation at solver-tolerance level.
struct ViReport {
  double worst_violation = 0.0;
  std::vector<double> xi;  // recovered multiplier, paper sign (<= 0 on {chi=0})
};
ViReport one_sided_vi_residual(const ScalarField& chi, const ChiStepProblem& prob);

/// Brute-force reference minimizer for 1D chain meshes: exhaustive search
/// over a product grid of `levels` values per node (exact dynamic program
/// along the chain), refined `refinements` times around the incumbent.
ScalarField chi_brute_force_1d(const ChiStepProblem& prob, int levels = 31,
                               int refinements = 2);

}  // namespace tvd
