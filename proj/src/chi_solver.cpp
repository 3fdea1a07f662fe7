#include "tvd/chi_solver.hpp"

#include "tvd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvd {

namespace {

constexpr double kLogBoxEps = 1e-12;  // keeps the logarithmic barrier differentiable

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Smooth nodal potential: gamma_hat plus, when active, the logarithmic
// entropy of W or the Yosida penalty.
double pot_value(double x, const ChiStepProblem& prob) {
  const MaterialModel& m = *prob.model;
  double v = m.gamma_hat(x);
  if (m.w_spec == WSpec::Logarithmic) {
    double ent = 0.0;
    if (x > 0.0) ent += x * std::log(x);
    if (x < 1.0) ent += (1.0 - x) * std::log(1.0 - x);
    v += ent - m.logw_c1 * x * x - m.logw_c2 * x - m.logw_c3;
  }
  if (prob.yosida_tau > 0.0) v += yosida_beta_hat(x, prob.yosida_tau);
  return v;
}

double pot_derivative(double x, const ChiStepProblem& prob) {
  const MaterialModel& m = *prob.model;
  double v = m.gamma(x);  // includes the smooth log-potential terms in log mode
  if (m.w_spec == WSpec::Logarithmic) v += std::log(x) - std::log(1.0 - x);
  if (prob.yosida_tau > 0.0) v += yosida_beta(x, prob.yosida_tau);
  return v;
}

}  // namespace

double chi_pot_value(double x, const ChiStepProblem& prob) { return pot_value(x, prob); }
double chi_pot_derivative(double x, const ChiStepProblem& prob) {
  return pot_derivative(x, prob);
}

void ChiStepProblem::set_default_box(bool irreversible) {
  double lo, up;
  model->beta_feasible_interval(lo, up);
  if (model->w_spec == WSpec::Logarithmic) {
    lo = kLogBoxEps;
    up = 1.0 - kLogBoxEps;
  }
  const int n = static_cast<int>(chi_prev.size());
  box_lo.assign(n, lo);
  box_hi.assign(n, up);
  if (irreversible)
    for (int i = 0; i < n; ++i) box_hi[i] = std::min(up, chi_prev[i]);
  if (yosida_tau > 0.0)
    for (int i = 0; i < n; ++i) box_lo[i] = -MaterialModel::kInf;
}

void ChiStepProblem::validate() const {
  if (!mesh || !model) throw std::invalid_argument("chi step: mesh/model missing");
  const std::size_t n = static_cast<std::size_t>(mesh->num_nodes());
  if (chi_prev.size() != n || h_field.size() != n || box_lo.size() != n || box_hi.size() != n)
    throw std::invalid_argument("chi step: field sizes do not match mesh");
  if (!(tau > 0.0)) throw std::invalid_argument("chi step: tau must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (box_lo[i] > box_hi[i]) throw std::invalid_argument("chi step: empty feasible box");
}

double chi_energy(const ScalarField& chi, const ChiStepProblem& prob) {
  const auto mass = lumped_mass(*prob.mesh);
  double s = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i] < prob.box_lo[i] || chi[i] > prob.box_hi[i]) return MaterialModel::kInf;
    const double d = chi[i] - prob.chi_prev[i];
    s += mass[i] * (d * d / (2.0 * prob.tau) + pot_value(chi[i], prob) +
                    prob.h_field[i] * chi[i]);
  }
  return s + phi_functional(chi, *prob.mesh, *prob.model);
}

std::vector<double> chi_energy_gradient(const ScalarField& chi, const ChiStepProblem& prob) {
  const auto mass = lumped_mass(*prob.mesh);
  auto g = p_laplacian_residual(chi, *prob.mesh, *prob.model);
  for (std::size_t i = 0; i < chi.size(); ++i)
    g[i] += mass[i] * ((chi[i] - prob.chi_prev[i]) / prob.tau +
                       pot_derivative(chi[i], prob) + prob.h_field[i]);
  return g;
}

ScalarField minimize_chi(const ChiStepProblem& prob, ChiSolveReport& report,
                         double tol, int max_iter) {
  prob.validate();
  const int n = static_cast<int>(prob.chi_prev.size());
  const auto mass = lumped_mass(*prob.mesh);

  ScalarField chi(n);
  for (int i = 0; i < n; ++i) chi[i] = clamp(prob.chi_prev[i], prob.box_lo[i], prob.box_hi[i]);
  double F = chi_energy(chi, prob);
  auto g = chi_energy_gradient(chi, prob);

  double step = prob.tau;  // natural scale of the mass-preconditioned proximal term
  report = ChiSolveReport{};
  for (int it = 0; it < max_iter; ++it) {
    double res = 0.0;
    for (int i = 0; i < n; ++i)
      res = std::max(res, std::abs(chi[i] - clamp(chi[i] - g[i], prob.box_lo[i], prob.box_hi[i])));
    report.iterations = it;
    report.proj_grad_inf = res;
    report.energy = F;
    if (res <= tol) {
      report.converged = true;
      return chi;
    }

    // Monotone backtracking along the mass-preconditioned projected step.
    ScalarField trial(n);
    double Ft = 0.0, t = step;
    for (int bt = 0;; ++bt) {
      for (int i = 0; i < n; ++i)
        trial[i] = clamp(chi[i] - t * g[i] / mass[i], prob.box_lo[i], prob.box_hi[i]);
      Ft = chi_energy(trial, prob);
      double model_decr = 0.0;
      for (int i = 0; i < n; ++i) model_decr += g[i] * (chi[i] - trial[i]);
      if (Ft <= F - 1e-4 * model_decr || bt >= 60) break;
      t *= 0.5;
    }

    auto g_new = chi_energy_gradient(trial, prob);
    // Barzilai-Borwein step for the next iteration, in the mass metric.
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = trial[i] - chi[i];
      ss += mass[i] * s * s;
      sy += s * (g_new[i] - g[i]);
    }
    step = (sy > 0.0) ? clamp(ss / sy, 1e-14, 1e6 * prob.tau) : prob.tau;

    chi.swap(trial);
    g.swap(g_new);
    F = Ft;
  }
  report.energy = F;
  return chi;  // best iterate; converged stays false
}

ScalarField chi_semilinear_step(const ChiStepProblem& prob, const ScalarField& theta,
                                ScalarField& xi, ChiSolveReport& report,
                                double tol, int max_iter) {
  if (theta.size() != prob.chi_prev.size())
    throw std::invalid_argument("chi step: theta size mismatch");
  ChiStepProblem p = prob;
  for (std::size_t i = 0; i < theta.size(); ++i) p.h_field[i] -= theta[i];
  ScalarField chi = minimize_chi(p, report, tol, max_iter);
  const auto g = chi_energy_gradient(chi, p);
  const auto mass = lumped_mass(*p.mesh);
  xi.assign(chi.size(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) xi[i] = g[i] / mass[i];
  return chi;
}

ViReport one_sided_vi_residual(const ScalarField& chi, const ChiStepProblem& prob) {
  const auto g = chi_energy_gradient(chi, prob);
  const auto mass = lumped_mass(*prob.mesh);
  ViReport rep;
  rep.xi.assign(chi.size(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    double L = g[i];
    if (prob.box_lo[i] > -MaterialModel::kInf && chi[i] <= prob.box_lo[i]) {
      rep.xi[i] = -std::max(g[i], 0.0) / mass[i];  // admissible selection on {chi = 0}
      L += mass[i] * rep.xi[i];
    }
    rep.worst_violation = std::max(rep.worst_violation, L);
  }
  rep.worst_violation = std::max(rep.worst_violation, 0.0);
  return rep;
}

ScalarField chi_brute_force_1d(const ChiStepProblem& prob, int levels, int refinements) {
  prob.validate();
  if (prob.mesh->dim != 1)
    throw std::invalid_argument("brute force: 1D chain meshes only");
  if (levels < 2) throw std::invalid_argument("brute force: need at least 2 levels");
  const Mesh& mesh = *prob.mesh;
  const int n = mesh.num_nodes();
  const auto mass = lumped_mass(mesh);

  auto node_cost = [&](int i, double x) {
    const double d = x - prob.chi_prev[i];
    return mass[i] * (d * d / (2.0 * prob.tau) + pot_value(x, prob) + prob.h_field[i] * x);
  };
  auto edge_cost = [&](int e, double xa, double xb) {
    const double h = mesh.element_measures[e];
    const std::array<double, 2> z = {(xb - xa) / h, 0.0};
    return h * prob.model->phi(z, 1);
  };

  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = std::max(prob.box_lo[i], prob.chi_prev[i] - 2.0);
    hi[i] = std::min(prob.box_hi[i], prob.chi_prev[i] + 2.0);
    if (lo[i] > hi[i]) lo[i] = hi[i] = clamp(prob.chi_prev[i], prob.box_lo[i], prob.box_hi[i]);
  }

  ScalarField best;
  for (int pass = 0; pass <= refinements; ++pass) {
    std::vector<std::vector<double>> grid(n);
    for (int i = 0; i < n; ++i) {
      grid[i].resize(levels);
      for (int l = 0; l < levels; ++l)
        grid[i][l] = lo[i] + (hi[i] - lo[i]) * l / (levels - 1.0);
    }
    // Exact minimization over the product grid: dynamic program along the chain.
    std::vector<double> cost(levels);
    std::vector<std::vector<int>> back(n, std::vector<int>(levels, 0));
    for (int l = 0; l < levels; ++l) cost[l] = node_cost(0, grid[0][l]);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const int i = mesh.elements[e][0], j = mesh.elements[e][1];
      std::vector<double> next(levels);
      for (int l2 = 0; l2 < levels; ++l2) {
        double bestc = MaterialModel::kInf;
        int arg = 0;
        for (int l1 = 0; l1 < levels; ++l1) {
          const double c = cost[l1] + edge_cost(e, grid[i][l1], grid[j][l2]);
          if (c < bestc) {
            bestc = c;
            arg = l1;
          }
        }
        next[l2] = bestc + node_cost(j, grid[j][l2]);
        back[j][l2] = arg;
      }
      cost.swap(next);
    }
    int arg = 0;
    for (int l = 1; l < levels; ++l)
      if (cost[l] < cost[arg]) arg = l;
    best.assign(n, 0.0);
    best[n - 1] = grid[n - 1][arg];
    for (int e = mesh.num_elements() - 1; e >= 0; --e) {
      const int i = mesh.elements[e][0], j = mesh.elements[e][1];
      arg = back[j][arg];
      best[i] = grid[i][arg];
    }
    // Refine the search window around the incumbent by one grid spacing.
    for (int i = 0; i < n; ++i) {
      const double d = (hi[i] - lo[i]) / (levels - 1.0);
      lo[i] = std::max(prob.box_lo[i], best[i] - d);
      hi[i] = std::min(prob.box_hi[i], best[i] + d);
    }
  }
  return best;
}

}  // namespace tvd
