#include "tvd/stepper.hpp"

#include "tvd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvd {

namespace {

const double kGaussNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
const double kGaussWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};

double inf_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void blend(std::vector<double>& cur, const std::vector<double>& next, double damping) {
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i] += damping * (next[i] - cur[i]);
}

}  // namespace

Schedule Schedule::make(double T, double tau) {
  if (!(T > 0.0) || !(tau > 0.0)) throw std::invalid_argument("schedule: need T, tau > 0");
  const int K = static_cast<int>(std::llround(T / tau));
  if (K < 1 || std::abs(K * tau - T) > 1e-12 * std::max(1.0, T))
    throw std::invalid_argument("schedule: tau must divide T (K_tau * tau = T to 1e-12)");
  Schedule s;
  s.T = T;
  s.tau = tau;
  s.K_tau = K;
  return s;
}

std::vector<double> local_means(const TimeFn& data, const Schedule& sched) {
  std::vector<double> out(sched.K_tau, 0.0);
  for (int k = 1; k <= sched.K_tau; ++k) {
    const double t0 = sched.time(k - 1), t1 = sched.time(k);
    double s = 0.0;
    for (int q = 0; q < 4; ++q)
      s += kGaussWeights[q] * data(0.5 * (t0 + t1) + 0.5 * (t1 - t0) * kGaussNodes[q]);
    out[k - 1] = 0.5 * s;  // mean, not integral
  }
  return out;
}

ScalarField local_mean_field(const SpaceTimeFn& fn, int k, const Schedule& sched,
                             const Mesh& mesh) {
  ScalarField out(mesh.num_nodes(), 0.0);
  if (!fn) return out;
  const double t0 = sched.time(k - 1), t1 = sched.time(k);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double x = mesh.coord(i, 0);
    const double y = mesh.dim == 2 ? mesh.coord(i, 1) : 0.0;
    double s = 0.0;
    for (int q = 0; q < 4; ++q)
      s += kGaussWeights[q] * fn(0.5 * (t0 + t1) + 0.5 * (t1 - t0) * kGaussNodes[q], x, y);
    out[i] = 0.5 * s;
  }
  return out;
}

State prepare_initial(const InitialData& init, const Mesh& mesh, const MaterialModel& model,
                      const Schedule& sched) {
  model.validate(mesh.dim);
  const int n = mesh.num_nodes();
  State st;
  st.k = 0;

  double lo, up;
  model.beta_feasible_interval(lo, up);
  if (static_cast<int>(init.chi0.size()) != n)
    throw std::invalid_argument("initial data: chi0 size mismatch");
  for (double c : init.chi0)
    if (c < lo || c > up)
      throw std::invalid_argument("initial data: chi0 outside the potential's domain");
  st.chi = init.chi0;

  ScalarField w0;
  if (!init.theta0.empty()) {
    if (static_cast<int>(init.theta0.size()) != n)
      throw std::invalid_argument("initial data: theta0 size mismatch");
    w0.resize(n);
    for (int i = 0; i < n; ++i) {
      if (init.theta0[i] < 0.0)
        throw std::invalid_argument("initial data: negative initial temperature");
      w0[i] = model.enthalpy(init.theta0[i]);
    }
  } else {
    w0 = init.w0;
  }
  if (!w0.empty()) {
    if (static_cast<int>(w0.size()) != n)
      throw std::invalid_argument("initial data: w0 size mismatch");
    if (init.smooth_w0) {
      // One step of H1 smoothing: (M + tau^(2/rbar) A) w = M w0, rbar = (d+2)/(d+1).
      const double rbar = (mesh.dim + 2.0) / (mesh.dim + 1.0);
      const double eps = std::pow(sched.tau, 2.0 / rbar);
      const ScalarField ones(n, 1.0);
      const auto A = assemble_w_diffusion(ones, mesh);
      const auto m = lumped_mass(mesh);
      auto B = matrix_sum(A, eps, A, 0.0, &m);
      std::vector<double> rhs(n);
      for (int i = 0; i < n; ++i) rhs[i] = m[i] * w0[i];
      ScalarField w = w0;
      SolveOptions so;
      so.tol = 1e-13;
      const auto stats = cg_solve(B, rhs, w, so);
      if (!stats.converged) throw std::runtime_error("initial data: smoothing solve failed");
      w0 = w;
    }
    if (init.positivity_clamp)
      for (double& v : w0) v = std::max(v, init.w_floor);
  }
  st.w = w0;

  const int nd = mesh.dim * n;
  VectorField u0 = init.u0.empty() ? VectorField(nd, 0.0) : init.u0;
  VectorField v0 = init.v0.empty() ? VectorField(nd, 0.0) : init.v0;
  if (static_cast<int>(u0.size()) != nd || static_cast<int>(v0.size()) != nd)
    throw std::invalid_argument("initial data: u0/v0 size mismatch");
  for (int i = 0; i < n; ++i)
    if (mesh.is_boundary[i])
      for (int d = 0; d < mesh.dim; ++d) u0[mesh.dim * i + d] = v0[mesh.dim * i + d] = 0.0;
  st.u = u0;
  st.u_prev.resize(nd);
  for (int i = 0; i < nd; ++i) st.u_prev[i] = u0[i] - sched.tau * v0[i];
  return st;
}

Stepper::Stepper(const Mesh& mesh, const MaterialModel& model, const Schedule& sched,
                 const RunData& data, StepperOptions opts)
    : mesh_(mesh), model_(model), sched_(sched), data_(data), opts_(opts) {
  model.validate(mesh.dim);
}

namespace {

struct USolve {
  VectorField u;
  SolveStats stats;
  SparseSpdMatrix V, E;
};

// Nodal drive b'(chi_prev) * (lumped lift of eps(u) : R_e eps(u) / 2).
ScalarField elastic_drive(const VectorField& u, const ScalarField& chi_prev, const Mesh& mesh,
                          const MaterialModel& model, bool positive_part) {
  const auto dens = elastic_energy_density(symmetric_gradient(u, mesh), model);
  auto q = nodal_lift(dens, mesh);
  ScalarField h(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = positive_part ? std::max(chi_prev[i], 0.0) : chi_prev[i];
    h[i] = model.b_prime(c) * q[i] / 2.0;
  }
  return h;
}

std::vector<double> vector_lumped_mass(const Mesh& mesh) {
  const auto m = lumped_mass(mesh);
  std::vector<double> mv(mesh.dim * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    for (int d = 0; d < mesh.dim; ++d) mv[mesh.dim * i + d] = m[i];
  return mv;
}

}  // namespace

namespace {

struct StepContext {
  const Mesh* mesh;
  const MaterialModel* model;
  const StepperOptions* opts;
  double tau;
  std::vector<double> m, mvec;
};

USolve solve_momentum(const StepContext& cx, const ScalarField& visc_weight,
                      const ScalarField& elast_weight, const VectorField& u_old,
                      const VectorField& u_prev, const VectorField& f_nodal,
                      const ScalarField* theta_for_rho) {
  const Mesh& mesh = *cx.mesh;
  const double tau = cx.tau;
  USolve out;
  out.V = assemble_viscous(visc_weight, mesh, *cx.model);
  out.E = assemble_elastic(elast_weight, mesh, *cx.model);
  std::vector<double> diag(cx.mvec.size());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = cx.mvec[i] / (tau * tau);
  const auto A = matrix_sum(out.E, 1.0, out.V, 1.0 / tau, &diag);

  std::vector<double> rhs(cx.mvec.size(), 0.0);
  const auto Vu = out.V.apply(u_old);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (int d = 0; d < mesh.dim; ++d) {
      const int I = mesh.dim * i + d;
      if (mesh.is_boundary[i]) continue;  // homogeneous Dirichlet
      rhs[I] = cx.mvec[I] * (2.0 * u_old[I] - u_prev[I]) / (tau * tau) + Vu[I] / tau +
               cx.mvec[I] * f_nodal[I];
    }
  }
  if (theta_for_rho) {
    const auto t = thermal_coupling_vector(*theta_for_rho, mesh, *cx.model);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= t[i];
  }
  out.u = u_old;
  SolveOptions so;
  so.tol = cx.opts->cg_tol;
  out.stats = cg_solve(A, rhs, out.u, so);
  return out;
}

// rho-coupling source: nodal lift of rho * mean(Theta) * div(Du) per element.
ScalarField expansion_source(const StepContext& cx, const ScalarField& theta,
                             const VectorField& du) {
  const Mesh& mesh = *cx.mesh;
  const auto th_avg = element_average(theta, mesh);
  const auto eps = symmetric_gradient(du, mesh);
  std::vector<double> per_elem(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double div = mesh.dim == 1 ? eps.values[e][0] : eps.values[e][0] + eps.values[e][1];
    per_elem[e] = cx.model->rho * th_avg[e] * div;
  }
  return nodal_lift(per_elem, mesh);
}

}  // namespace

namespace {

// Per-step energy bookkeeping: exact backward-Euler telescoping of the tested
// equations, with every convexity/quadrature defect logged by sign.
void fill_ledger(StepReport& rep, const StepContext& cx, const State& before,
                 const ScalarField& chi_new, const VectorField& u_new, const ScalarField& w_new,
                 const ChiStepProblem& prob_drive,  // h = elastic drive only
                 const ScalarField& theta_used, const ScalarField& theta_in_w_eq,
                 const ScalarField& g_k, const VectorField& f_nodal, const USolve& usol,
                 const ScalarField& elast_weight_old) {
  const Mesh& mesh = *cx.mesh;
  const MaterialModel& model = *cx.model;
  const double tau = cx.tau;
  const int n = mesh.num_nodes();
  const int nd = mesh.dim * n;

  std::vector<double> du_new(nd), du_old(nd), delta_u(nd);
  for (int i = 0; i < nd; ++i) {
    du_new[i] = (u_new[i] - before.u[i]) / tau;
    du_old[i] = (before.u[i] - before.u_prev[i]) / tau;
    delta_u[i] = u_new[i] - before.u[i];
  }
  double kin_new = 0.0, kin_old = 0.0, def_kin = 0.0, work_f = 0.0;
  for (int i = 0; i < nd; ++i) {
    kin_new += 0.5 * cx.mvec[i] * du_new[i] * du_new[i];
    kin_old += 0.5 * cx.mvec[i] * du_old[i] * du_old[i];
    const double d = du_new[i] - du_old[i];
    def_kin += 0.5 * cx.mvec[i] * d * d;
    work_f += tau * cx.mvec[i] * f_nodal[i] * du_new[i];
  }

  const auto E_old = assemble_elastic(elast_weight_old, mesh, model);
  const double elastic_new = 0.5 * usol.E.quadratic_form(u_new);
  const double elastic_old = 0.5 * E_old.quadratic_form(before.u);
  const double elast_old_neww = 0.5 * usol.E.quadratic_form(before.u);
  const double def_el = 0.5 * usol.E.quadratic_form(delta_u);
  const double viscous = tau * usol.V.quadratic_form(du_new);

  const double phi_new = phi_functional(chi_new, mesh, model);
  const double phi_old = phi_functional(before.chi, mesh, model);
  const auto r = p_laplacian_residual(chi_new, mesh, model);

  double pot_new = 0.0, pot_old = 0.0, def_gamma = 0.0, chi_dissip = 0.0;
  double drive = 0.0, term_chi = 0.0, term_w = 0.0, r_dot_dchi = 0.0;
  ChiStepProblem prob_theta = prob_drive;
  for (int i = 0; i < n; ++i) prob_theta.h_field[i] -= theta_used[i];
  const auto gradF = chi_energy_gradient(chi_new, prob_theta);
  double def_beta = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dchi = chi_new[i] - before.chi[i];
    const double pn = chi_pot_value(chi_new[i], prob_drive);
    const double po = chi_pot_value(before.chi[i], prob_drive);
    pot_new += cx.m[i] * pn;
    pot_old += cx.m[i] * po;
    def_gamma += cx.m[i] * (chi_pot_derivative(chi_new[i], prob_drive) * dchi - (pn - po));
    chi_dissip += cx.m[i] * dchi * dchi / tau;
    drive += cx.m[i] * prob_drive.h_field[i] * dchi;
    term_chi += cx.m[i] * theta_used[i] * dchi;
    if (!theta_in_w_eq.empty()) term_w += cx.m[i] * theta_in_w_eq[i] * dchi;
    r_dot_dchi += r[i] * dchi;
    def_beta -= gradF[i] * dchi;
  }
  const double def_phi = r_dot_dchi - (phi_new - phi_old);
  const double def_b = drive - (elast_old_neww - elastic_old);

  double enth_new = 0.0, enth_old = 0.0, work_g = 0.0, min_w = 0.0, max_abs_w = 0.0;
  if (!w_new.empty()) {
    min_w = w_new[0];
    for (int i = 0; i < n; ++i) {
      enth_new += cx.m[i] * w_new[i];
      enth_old += cx.m[i] * before.w[i];
      work_g += tau * cx.m[i] * g_k[i];
      min_w = std::min(min_w, w_new[i]);
      max_abs_w = std::max(max_abs_w, std::abs(w_new[i]));
    }
    // Boccardo-Gallouet integrand at varsigma = 1.
    const auto gw = gradient(w_new, mesh);
    const auto wavg = element_average(w_new, mesh);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      double g2 = gw[e][0] * gw[e][0];
      if (mesh.dim == 2) g2 += gw[e][1] * gw[e][1];
      const double den = std::max(1.0 + wavg[e], 1e-10);
      rep.bg_functional += mesh.element_measures[e] * g2 / (den * den);
    }
  }

  rep.enthalpy_mass = enth_new;
  rep.kinetic = kin_new;
  rep.elastic = elastic_new;
  rep.phi_chi = phi_new;
  rep.w_pot = pot_new;
  rep.viscous_dissip = viscous;
  rep.chi_dissip = chi_dissip;
  rep.work_f = work_f;
  rep.work_g = work_g;
  rep.theta_work = term_chi;
  rep.def_kinetic = def_kin;
  rep.def_elastic = def_el;
  rep.def_phi = def_phi;
  rep.def_beta = def_beta;
  rep.remainder = def_gamma;
  rep.def_b_quad = def_b;
  rep.theta_gap = term_w - term_chi;
  rep.min_w = min_w;
  rep.max_abs_w = max_abs_w;

  const double dE = (enth_new - enth_old) + (kin_new - kin_old) +
                    (elastic_new - elastic_old) + (phi_new - phi_old) + (pot_new - pot_old);
  rep.energy_slack = work_f + work_g - dE - viscous - chi_dissip -
                     (def_kin + def_el + def_phi + def_gamma + def_beta) - def_b -
                     rep.theta_gap;
}

}  // namespace

StepReport Stepper::step_sequential(State& state, Scheme scheme) const {
  const int k1 = state.k + 1;
  const double tau = sched_.tau;
  StepContext cx{&mesh_, &model_, &opts_, tau, lumped_mass(mesh_), vector_lumped_mass(mesh_)};
  const int n = mesh_.num_nodes();

  StepReport rep;
  rep.k = k1;
  rep.t = sched_.time(k1);

  const bool has_w = scheme == Scheme::Irreversible;
  const bool yosida = scheme == Scheme::IsothermalIrreversible;
  const bool irrev = scheme != Scheme::IsothermalReversible;

  ScalarField g_k(n, 0.0);
  if (has_w) g_k = local_mean_field(data_.g, k1, sched_, mesh_);
  VectorField f_nodal(mesh_.dim * n, 0.0);
  {
    const auto fx = local_mean_field(data_.fx, k1, sched_, mesh_);
    for (int i = 0; i < n; ++i) f_nodal[mesh_.dim * i] = fx[i];
    if (mesh_.dim == 2) {
      const auto fy = local_mean_field(data_.fy, k1, sched_, mesh_);
      for (int i = 0; i < n; ++i) f_nodal[2 * i + 1] = fy[i];
    }
  }

  // chi-step: explicit drive from (u^{k-1}, w^{k-1}) or the prescribed Theta*.
  ChiStepProblem prob;
  prob.mesh = &mesh_;
  prob.model = &model_;
  prob.chi_prev = state.chi;
  prob.tau = tau;
  prob.h_field = elastic_drive(state.u, state.chi, mesh_, model_, yosida);
  if (yosida) prob.yosida_tau = tau;
  prob.set_default_box(irrev);

  ScalarField theta_used(n, 0.0);
  if (has_w) {
    for (int i = 0; i < n; ++i) theta_used[i] = model_.theta_of_w(state.w[i]);
  } else {
    theta_used = local_mean_field(data_.theta_star, k1, sched_, mesh_);
  }

  ChiStepProblem prob_theta = prob;
  for (int i = 0; i < n; ++i) prob_theta.h_field[i] -= theta_used[i];
  ScalarField chi_new = minimize_chi(prob_theta, rep.chi_report, opts_.chi_tol,
                                     opts_.chi_max_iter);
  rep.converged = rep.chi_report.converged;

  if (irrev) {
    const auto vi = one_sided_vi_residual(chi_new, prob_theta);
    rep.vi_violation = vi.worst_violation;
    rep.xi = vi.xi;
  }
  if (yosida) {
    // Rate-constraint multiplier from the stationarity residual on the active
    // upper box chi = chi_prev.
    const auto g = chi_energy_gradient(chi_new, prob_theta);
    rep.zeta.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (chi_new[i] >= prob_theta.box_hi[i]) rep.zeta[i] = -g[i] / cx.m[i];
  }

  // Momentum step with the updated coefficients.
  ScalarField visc_w(n), elast_w(n), elast_w_old(n);
  for (int i = 0; i < n; ++i) {
    const double c = yosida ? std::max(chi_new[i], 0.0) : chi_new[i];
    const double co = yosida ? std::max(state.chi[i], 0.0) : state.chi[i];
    const double shift = model_.degenerate_mode ? model_.delta : 0.0;
    visc_w[i] = std::max(model_.a(c), 0.0) + model_.delta;
    elast_w[i] = model_.b(c) + shift;
    elast_w_old[i] = model_.b(co) + shift;
  }
  const auto usol = solve_momentum(cx, visc_w, elast_w, state.u, state.u_prev, f_nodal, nullptr);
  rep.u_stats = usol.stats;
  rep.converged = rep.converged && usol.stats.converged;

  // Enthalpy step, explicit Theta(w^{k-1}).
  ScalarField w_new;
  ScalarField theta_in_w;
  if (has_w) {
    ScalarField K_nodal(n);
    for (int i = 0; i < n; ++i) K_nodal[i] = model_.conductivity_ratio(state.w[i]);
    const auto A = assemble_w_diffusion(K_nodal, mesh_);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = cx.m[i] / tau;
    const auto B = matrix_sum(A, 1.0, A, 0.0, &diag);
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      const double dchi = (chi_new[i] - state.chi[i]) / tau;
      rhs[i] = cx.m[i] * (state.w[i] / tau + g_k[i] - dchi * theta_used[i]);
    }
    w_new = state.w;
    SolveOptions so;
    so.tol = opts_.cg_tol;
    rep.w_stats = cg_solve(B, rhs, w_new, so);
    rep.converged = rep.converged && rep.w_stats.converged;
    theta_in_w = theta_used;  // the same explicit value: coupling gap is exactly zero
  }

  fill_ledger(rep, cx, state, chi_new, usol.u, w_new, prob, theta_used, theta_in_w, g_k,
              f_nodal, usol, elast_w_old);

  state.k = k1;
  state.u_prev = state.u;
  state.u = usol.u;
  state.chi = chi_new;
  state.w = w_new;
  return rep;
}

StepReport Stepper::step_coupled(State& state, bool truncated) const {
  const int k1 = state.k + 1;
  const double tau = sched_.tau;
  StepContext cx{&mesh_, &model_, &opts_, tau, lumped_mass(mesh_), vector_lumped_mass(mesh_)};
  const int n = mesh_.num_nodes();

  StepReport rep;
  rep.k = k1;
  rep.t = sched_.time(k1);

  const auto g_k = local_mean_field(data_.g, k1, sched_, mesh_);
  VectorField f_nodal(mesh_.dim * n, 0.0);
  {
    const auto fx = local_mean_field(data_.fx, k1, sched_, mesh_);
    for (int i = 0; i < n; ++i) f_nodal[mesh_.dim * i] = fx[i];
    if (mesh_.dim == 2) {
      const auto fy = local_mean_field(data_.fy, k1, sched_, mesh_);
      for (int i = 0; i < n; ++i) f_nodal[2 * i + 1] = fy[i];
    }
  }

  auto theta_of = [&](const ScalarField& w) {
    ScalarField th(n);
    for (int i = 0; i < n; ++i)
      th[i] = truncated ? model_.Theta_M(w[i]) : model_.theta_of_w(w[i]);
    return th;
  };

  // Conductivity is evaluated at w^{k-1} (explicit) and fixed over the step.
  ScalarField K_nodal(n);
  for (int i = 0; i < n; ++i)
    K_nodal[i] = truncated ? model_.K_M(state.w[i]) : model_.conductivity_ratio(state.w[i]);
  const auto A_w = assemble_w_diffusion(K_nodal, mesh_);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = cx.m[i] / tau;
  const auto B_w = matrix_sum(A_w, 1.0, A_w, 0.0, &diag);

  ChiStepProblem prob;
  prob.mesh = &mesh_;
  prob.model = &model_;
  prob.chi_prev = state.chi;
  prob.tau = tau;
  prob.h_field = elastic_drive(state.u, state.chi, mesh_, model_, false);
  prob.set_default_box(false);

  const bool rho_on = truncated && model_.rho != 0.0;

  auto solve_w_once = [&](const ScalarField& chi_c, const ScalarField& theta_lag,
                          const ScalarField* rho_src, ScalarField& w_out) {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      const double dchi = (chi_c[i] - state.chi[i]) / tau;
      rhs[i] = cx.m[i] * (state.w[i] / tau + g_k[i] - dchi * theta_lag[i]);
      if (rho_src) rhs[i] -= cx.m[i] * (*rho_src)[i];
    }
    SolveOptions so;
    so.tol = opts_.cg_tol;
    return cg_solve(B_w, rhs, w_out, so);
  };

  ScalarField chi_c = state.chi;
  VectorField u_c = state.u;
  ScalarField w_c = state.w;
  ScalarField xi;
  ChiSolveReport crep;

  rep.converged = false;
  for (int sweep = 1; sweep <= opts_.max_outer; ++sweep) {
    const auto theta_c = theta_of(w_c);
    auto chi_t = chi_semilinear_step(prob, theta_c, xi, crep, opts_.chi_tol,
                                     opts_.chi_max_iter);
    auto usol = solve_momentum(cx, [&] {
          ScalarField vw(n);
          for (int i = 0; i < n; ++i) vw[i] = model_.a(chi_t[i]) + model_.delta;
          return vw;
        }(),
        [&] {
          const double shift = model_.degenerate_mode ? model_.delta : 0.0;
          ScalarField ew(n);
          for (int i = 0; i < n; ++i) ew[i] = model_.b(chi_t[i]) + shift;
          return ew;
        }(),
        state.u, state.u_prev, f_nodal, rho_on ? &theta_c : nullptr);
    ScalarField w_t = w_c;
    ScalarField rho_src;
    if (rho_on) {
      VectorField du(u_c.size());
      for (std::size_t i = 0; i < du.size(); ++i) du[i] = (usol.u[i] - state.u[i]) / tau;
      rho_src = expansion_source(cx, theta_c, du);
    }
    solve_w_once(chi_t, theta_of(w_c), rho_on ? &rho_src : nullptr, w_t);

    const double diff = std::max({inf_diff(chi_t, chi_c), inf_diff(usol.u, u_c),
                                  inf_diff(w_t, w_c)});
    blend(chi_c, chi_t, opts_.damping);
    blend(u_c, usol.u, opts_.damping);
    blend(w_c, w_t, opts_.damping);
    rep.outer_iterations = sweep;
    if (diff <= opts_.outer_tol) {
      rep.converged = true;
      break;
    }
  }

  // Final undamped pass: the returned state satisfies the three equations with
  // the converged coupling values; the w-equation's Theta(w^k) is iterated to
  // a tight inner tolerance so the discrete positivity argument applies.
  const auto theta_f = theta_of(w_c);
  ScalarField chi_k = chi_semilinear_step(prob, theta_f, xi, crep, opts_.chi_tol,
                                          opts_.chi_max_iter);
  rep.chi_report = crep;
  rep.xi = xi;
  ScalarField visc_w(n), elast_w(n), elast_w_old(n);
  const double shift = model_.degenerate_mode ? model_.delta : 0.0;
  for (int i = 0; i < n; ++i) {
    visc_w[i] = model_.a(chi_k[i]) + model_.delta;
    elast_w[i] = model_.b(chi_k[i]) + shift;
    elast_w_old[i] = model_.b(state.chi[i]) + shift;
  }
  const auto usol = solve_momentum(cx, visc_w, elast_w, state.u, state.u_prev, f_nodal,
                                   rho_on ? &theta_f : nullptr);
  rep.u_stats = usol.stats;
  rep.converged = rep.converged && usol.stats.converged && crep.converged;

  ScalarField rho_src;
  if (rho_on) {
    VectorField du(usol.u.size());
    for (std::size_t i = 0; i < du.size(); ++i) du[i] = (usol.u[i] - state.u[i]) / tau;
    rho_src = expansion_source(cx, theta_f, du);
  }
  ScalarField w_k = w_c;
  for (int inner = 1; inner <= opts_.max_theta_inner; ++inner) {
    ScalarField w_prev = w_k;
    rep.w_stats = solve_w_once(chi_k, theta_of(w_prev), rho_on ? &rho_src : nullptr, w_k);
    rep.theta_inner_iterations = inner;
    if (inf_diff(w_k, w_prev) <= opts_.theta_inner_tol * (1.0 + rep.max_abs_w)) break;
  }
  rep.converged = rep.converged && rep.w_stats.converged;

  fill_ledger(rep, cx, state, chi_k, usol.u, w_k, prob, theta_f, theta_of(w_k), g_k, f_nodal,
              usol, elast_w_old);

  state.k = k1;
  state.u_prev = state.u;
  state.u = usol.u;
  state.chi = chi_k;
  state.w = w_k;
  return rep;
}

StepReport Stepper::step(State& state, Scheme scheme) const {
  switch (scheme) {
    case Scheme::Reversible:
      if (model_.mu != 0 || model_.rho != 0.0)
        throw std::invalid_argument("stepper: reversible scheme requires mu=0, rho=0");
      return step_coupled(state, false);
    case Scheme::ReversibleExpansion:
      if (model_.mu != 0)
        throw std::invalid_argument("stepper: expansion scheme requires mu=0");
      if (model_.conductivity_spec != ConductivitySpec::Power)
        throw std::invalid_argument("stepper: expansion scheme requires power conductivity");
      return step_coupled(state, true);
    case Scheme::Irreversible:
      if (model_.mu != 1)
        throw std::invalid_argument("stepper: irreversible scheme requires mu=1");
      return step_sequential(state, scheme);
    case Scheme::IsothermalIrreversible:
      if (model_.mu != 1)
        throw std::invalid_argument("stepper: irreversible scheme requires mu=1");
      return step_sequential(state, scheme);
    case Scheme::IsothermalReversible:
      if (model_.mu != 0)
        throw std::invalid_argument("stepper: reversible scheme requires mu=0");
      return step_sequential(state, scheme);
  }
  throw std::invalid_argument("stepper: unknown scheme");
}

Trajectory Stepper::run(const State& initial, Scheme scheme) const {
  Trajectory traj;
  traj.mesh = &mesh_;
  traj.states.push_back(initial);
  State cur = initial;
  for (int k = 1; k <= sched_.K_tau; ++k) {
    traj.reports.push_back(step(cur, scheme));
    traj.states.push_back(cur);
  }
  return traj;
}

}  // namespace tvd
