#include "tvd/diagnostics.hpp"

#include "tvd/linsolve.hpp"
#include "tvd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tvd {

double l2_norm_nodal(const ScalarField& f, const Mesh& mesh) {
  const auto m = lumped_mass(mesh);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += m[i] * f[i] * f[i];
  return std::sqrt(s);
}

double l2_norm_vector(const VectorField& u, const Mesh& mesh) {
  const auto m = lumped_mass(mesh);
  double s = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    for (int d = 0; d < mesh.dim; ++d) {
      const double v = u[mesh.dim * i + d];
      s += m[i] * v * v;
    }
  return std::sqrt(s);
}

double lp_gradient_norm(const ScalarField& f, const Mesh& mesh, double p) {
  const auto g = gradient(f, mesh);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double g2 = g[e][0] * g[e][0];
    if (mesh.dim == 2) g2 += g[e][1] * g[e][1];
    s += mesh.element_measures[e] * std::pow(g2, 0.5 * p);
  }
  return std::pow(s, 1.0 / p);
}

double l2_norm_tensor(const SymTensorField& t, const Mesh& mesh) {
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    s += mesh.element_measures[e] * SymTensorField::contract(t.values[e], t.values[e], t.dim);
  return std::sqrt(s);
}

LedgerCheck energy_ledger_check(const Trajectory& traj, const MaterialModel& model,
                                double tol_eq, double tol_ineq) {
  LedgerCheck out;
  double scale = 1.0;
  for (const auto& r : traj.reports)
    scale = std::max(scale, 1.0 + std::abs(r.enthalpy_mass) + r.kinetic + r.elastic +
                                std::abs(r.phi_chi) + std::abs(r.w_pot));
  out.energy_scale = scale;
  for (const auto& r : traj.reports) {
    out.slack.push_back(r.energy_slack);
    out.defect_sum.push_back(r.def_kinetic + r.def_elastic + r.def_phi + r.def_beta +
                             r.remainder + r.def_b_quad);
    out.remainder.push_back(r.remainder);
    const double ineq =
        r.energy_slack + r.def_kinetic + r.def_elastic + r.def_phi + r.def_beta;
    out.ineq_slack.push_back(ineq);
    if (std::abs(r.energy_slack) > tol_eq * scale) out.reconciled = false;
    if (ineq < -tol_ineq * scale) out.inequality_ok = false;
  }

  // Cross-check the logged energies against the stored states, so a trajectory
  // that was tampered with after the run fails reconciliation.
  if (traj.mesh != nullptr && traj.states.size() == traj.reports.size() + 1) {
    const Mesh& mesh = *traj.mesh;
    const auto m = lumped_mass(mesh);
    for (std::size_t j = 0; j < traj.reports.size(); ++j) {
      const StepReport& r = traj.reports[j];
      const State& cur = traj.states[j + 1];
      const double tau = r.k > 0 ? r.t / r.k : 1.0;
      double enth = 0.0, kin = 0.0;
      if (!cur.w.empty())
        for (int i = 0; i < mesh.num_nodes(); ++i) enth += m[i] * cur.w[i];
      for (int i = 0; i < mesh.num_nodes(); ++i)
        for (int d = 0; d < mesh.dim; ++d) {
          const double du = (cur.u[mesh.dim * i + d] - cur.u_prev[mesh.dim * i + d]) / tau;
          kin += 0.5 * m[i] * du * du;
        }
      const double phi = phi_functional(cur.chi, mesh, model);
      const bool ok = std::abs(enth - r.enthalpy_mass) <= tol_eq * scale &&
                      std::abs(kin - r.kinetic) <= tol_eq * scale &&
                      std::abs(phi - r.phi_chi) <= tol_eq * scale;
      if (!ok) {
        out.reconciled = false;
        out.inequality_ok = false;
      }
    }
  }
  return out;
}

QuasiStresses quasi_stresses(const State& state, const Mesh& mesh, const MaterialModel& model,
                             double tau) {
  VectorField du(state.u.size());
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = (state.u[i] - state.u_prev[i]) / tau;
  QuasiStresses qs;
  qs.mu = symmetric_gradient(du, mesh);
  qs.eta = symmetric_gradient(state.u, mesh);
  const auto chibar = element_average(state.chi, mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double s = std::sqrt(std::max(chibar[e], 0.0) + model.delta);
    for (int c = 0; c < 3; ++c) {
      qs.mu.values[e][c] *= s;
      qs.eta.values[e][c] *= s;
    }
  }
  return qs;
}

Trajectory Scenario::run() const {
  const State initial = prepare_initial(init, *mesh, model, sched);
  Stepper st(*mesh, model, sched, data, opts);
  return st.run(initial, scheme);
}

namespace {

// Residual of the momentum equation at step k, assembled through the
// quasi-stress factorization. weight_chi=false tests with sqrt(chi+delta)
// (algebraically the linear-solve residual); weight_chi=true tests with
// sqrt(chi) on elements where the element-average of chi exceeds thresh.
// Both are normalized by the 2-norm of the step's right-hand side.
double momentum_residual(const Trajectory& traj, int k, const Scenario& sc, bool weight_chi,
                         double thresh) {
  const Mesh& mesh = *sc.mesh;
  const MaterialModel& model = sc.model;
  const double tau = sc.sched.tau;
  const int dim = mesh.dim, n = mesh.num_nodes();
  const auto m = lumped_mass(mesh);

  const State& cur = traj.states[k];
  const State& prev = traj.states[k - 1];
  VectorField du(cur.u.size()), du_old(cur.u.size());
  for (std::size_t i = 0; i < du.size(); ++i) {
    du[i] = (cur.u[i] - prev.u[i]) / tau;
    du_old[i] = prev.u[i] / tau;  // viscous part of the rhs scale
  }
  const auto eps_du = symmetric_gradient(du, mesh);
  const auto eps_u = symmetric_gradient(cur.u, mesh);
  const auto eps_vold = symmetric_gradient(du_old, mesh);
  const auto chibar = element_average(cur.chi, mesh);

  // Element-marker for the chi-weighted reading; nodes count only if all their
  // elements are inside the region (test functions supported in {chi > thresh}).
  std::vector<char> elem_in(mesh.num_elements(), 1);
  std::vector<char> node_in(n, 1);
  if (weight_chi) {
    for (int e = 0; e < mesh.num_elements(); ++e) elem_in[e] = chibar[e] > thresh;
    for (int e = 0; e < mesh.num_elements(); ++e)
      if (!elem_in[e])
        for (int a = 0; a < mesh.nodes_per_element(); ++a) node_in[mesh.elements[e][a]] = 0;
  }

  std::vector<double> r(dim * n, 0.0), b(dim * n, 0.0);
  auto add_stress = [&](std::vector<double>& out, int e, double s_test,
                        const std::array<double, 3>& mu, const std::array<double, 3>& eta,
                        double sign) {
    const double meas = mesh.element_measures[e];
    const double trmu = dim == 1 ? mu[0] : mu[0] + mu[1];
    const double treta = dim == 1 ? eta[0] : eta[0] + eta[1];
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      const int na = mesh.elements[e][a];
      const double* g = &mesh.basis_grads[e][a * dim];
      for (int i = 0; i < dim; ++i) {
        // (tensor * grad)_i for the symmetric storage (xx, yy, xy)
        double mg = dim == 1 ? mu[0] * g[0]
                             : (i == 0 ? mu[0] * g[0] + mu[2] * g[1]
                                       : mu[2] * g[0] + mu[1] * g[1]);
        double eg = dim == 1 ? eta[0] * g[0]
                             : (i == 0 ? eta[0] * g[0] + eta[2] * g[1]
                                       : eta[2] * g[0] + eta[1] * g[1]);
        out[dim * na + i] += sign * meas * s_test *
                             (model.ell1 * trmu * g[i] + 2.0 * model.ell2 * mg +
                              model.lambda1 * treta * g[i] + 2.0 * model.lambda2 * eg);
      }
    }
  };

  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (weight_chi && !elem_in[e]) continue;
    const double s_quasi = std::sqrt(std::max(chibar[e], 0.0) + model.delta);
    const double s_test =
        weight_chi ? std::sqrt(std::max(chibar[e], 0.0)) : s_quasi;
    std::array<double, 3> mu{}, eta{}, vold{};
    for (int c = 0; c < 3; ++c) {
      mu[c] = s_quasi * eps_du.values[e][c];
      eta[c] = s_quasi * eps_u.values[e][c];
      vold[c] = s_quasi * eps_vold.values[e][c];
    }
    add_stress(r, e, s_test, mu, eta, 1.0);
    add_stress(b, e, s_test, vold, {0.0, 0.0, 0.0}, 1.0);
  }

  const auto f_nodal_x = local_mean_field(sc.data.fx, k, sc.sched, mesh);
  const auto f_nodal_y =
      dim == 2 ? local_mean_field(sc.data.fy, k, sc.sched, mesh) : ScalarField();
  double rn = 0.0, bn = 0.0;
  for (int i = 0; i < n; ++i) {
    if (mesh.is_boundary[i] || !node_in[i]) continue;
    for (int d = 0; d < dim; ++d) {
      const int I = dim * i + d;
      const double f = d == 0 ? f_nodal_x[i] : f_nodal_y[i];
      const double inert = m[i] * (cur.u[I] - 2.0 * prev.u[I] + prev.u_prev[I]) / (tau * tau);
      const double res = r[I] + inert - m[i] * f;
      const double rhs = b[I] + m[i] * (2.0 * prev.u[I] - prev.u_prev[I]) / (tau * tau) +
                         m[i] * f;
      rn += res * res;
      bn += rhs * rhs;
    }
  }
  return std::sqrt(rn) / std::max(std::sqrt(bn), 1e-300);
}

}  // namespace

DeltaSweepReport delta_sweep(const Scenario& scenario, const std::vector<double>& deltas,
                             double chi_thresh) {
  if (scenario.model.mu != 1 || scenario.model.rho != 0.0 ||
      scenario.model.a_spec != CoeffSpec::Chi || scenario.model.b_spec != CoeffSpec::Chi ||
      !scenario.model.degenerate_mode)
    throw std::invalid_argument(
        "delta sweep: requires mu=1, rho=0, a=b=chi in degenerate mode");
  DeltaSweepReport rep;
  std::vector<Trajectory> trajs;
  for (double d : deltas) {
    Scenario sc = scenario;
    sc.model.delta = d;
    const auto traj = sc.run();
    DeltaSweepEntry e;
    e.delta = d;
    double mu_acc = 0.0;
    for (int k = 1; k <= sc.sched.K_tau; ++k) {
      const auto qs = quasi_stresses(traj.states[k], *sc.mesh, sc.model, sc.sched.tau);
      const double mu_l2 = l2_norm_tensor(qs.mu, *sc.mesh);
      mu_acc += sc.sched.tau * mu_l2 * mu_l2;
      e.eta_norm_linfl2 = std::max(e.eta_norm_linfl2, l2_norm_tensor(qs.eta, *sc.mesh));
      e.momentum_residual_factored = std::max(
          e.momentum_residual_factored, momentum_residual(traj, k, sc, false, chi_thresh));
      e.momentum_residual_chi = std::max(e.momentum_residual_chi,
                                         momentum_residual(traj, k, sc, true, chi_thresh));
      for (int i = 0; i < sc.mesh->num_nodes(); ++i)
        if (traj.states[k].chi[i] > traj.states[k - 1].chi[i] + 1e-15)
          rep.chi_monotone = false;
    }
    e.mu_norm_l2l2 = std::sqrt(mu_acc);
    rep.entries.push_back(e);
    trajs.push_back(traj);
  }
  double mu_min = 1e300, mu_max = 0.0, eta_min = 1e300, eta_max = 0.0;
  for (const auto& e : rep.entries) {
    mu_min = std::min(mu_min, e.mu_norm_l2l2);
    mu_max = std::max(mu_max, e.mu_norm_l2l2);
    eta_min = std::min(eta_min, e.eta_norm_linfl2);
    eta_max = std::max(eta_max, e.eta_norm_linfl2);
  }
  rep.mu_norm_ratio = mu_max / std::max(mu_min, 1e-300);
  rep.eta_norm_ratio = eta_max / std::max(eta_min, 1e-300);
  for (std::size_t j = 0; j + 1 < trajs.size(); ++j) {
    double dw = 0.0, dui = 0.0, dchi = 0.0;
    for (int k = 0; k <= scenario.sched.K_tau; ++k) {
      const auto& a = trajs[j].states[k];
      const auto& b = trajs[j + 1].states[k];
      if (!a.w.empty()) {
        ScalarField d(a.w.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.w[i] - b.w[i];
        dw = std::max(dw, l2_norm_nodal(d, *scenario.mesh));
      }
      VectorField duv(a.u.size());
      for (std::size_t i = 0; i < duv.size(); ++i) duv[i] = a.u[i] - b.u[i];
      dui = std::max(dui, l2_norm_vector(duv, *scenario.mesh));
      ScalarField dc(a.chi.size());
      for (std::size_t i = 0; i < dc.size(); ++i) dc[i] = a.chi[i] - b.chi[i];
      dchi = std::max(dchi, l2_norm_nodal(dc, *scenario.mesh));
    }
    rep.pairwise_w.push_back(dw);
    rep.pairwise_u.push_back(dui);
    rep.pairwise_chi.push_back(dchi);
  }
  return rep;
}

double boccardo_gallouet(const ScalarField& w, double varsigma, const Mesh& mesh) {
  if (!(varsigma > 0.0)) throw std::invalid_argument("boccardo_gallouet: varsigma must be > 0");
  for (double v : w)
    if (v < -1e-12) throw std::invalid_argument("boccardo_gallouet: w must be nonnegative");
  const auto g = gradient(w, mesh);
  const auto wavg = element_average(w, mesh);
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double g2 = g[e][0] * g[e][0];
    if (mesh.dim == 2) g2 += g[e][1] * g[e][1];
    s += mesh.element_measures[e] * g2 / std::pow(1.0 + std::max(wavg[e], 0.0), varsigma + 1.0);
  }
  return s;
}

ContDepReport continuous_dependence_experiment(const Scenario& base,
                                               const std::vector<double>& eps_list) {
  if (base.scheme != Scheme::IsothermalReversible || base.model.mu != 0)
    throw std::invalid_argument("continuous dependence: isothermal reversible scheme required");
  if (base.model.a_spec != CoeffSpec::Constant)
    throw std::invalid_argument("continuous dependence: requires constant a");
  if (base.model.phi_spec != PhiSpec::Regularized)
    throw std::invalid_argument("continuous dependence: requires the regularized phi");

  const Mesh& mesh = *base.mesh;
  const int n = mesh.num_nodes();
  double Lx = 0.0, Ly = 0.0;
  for (int i = 0; i < n; ++i) {
    Lx = std::max(Lx, mesh.coord(i, 0));
    if (mesh.dim == 2) Ly = std::max(Ly, mesh.coord(i, 1));
  }
  const double pi = 3.14159265358979323846;
  auto profile = [&](int i) {
    double v = std::sin(pi * mesh.coord(i, 0) / Lx);
    if (mesh.dim == 2) v *= std::sin(pi * mesh.coord(i, 1) / Ly);
    return v;
  };

  const auto H1 = assemble_vector_h1(mesh);
  const double p = base.model.p;

  auto run_pert = [&](double eps) {
    Scenario sc = base;
    if (sc.init.u0.empty()) sc.init.u0.assign(mesh.dim * n, 0.0);
    if (sc.init.v0.empty()) sc.init.v0.assign(mesh.dim * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double pr = profile(i);
      sc.init.u0[mesh.dim * i] += eps * pr;
      sc.init.v0[mesh.dim * i] += eps * pr;
      sc.init.chi0[i] += 0.25 * eps * pr;
    }
    const SpaceTimeFn base_f = base.data.fx;
    sc.data.fx = [base_f, eps](double t, double x, double y) {
      return (base_f ? base_f(t, x, y) : 0.0) + eps;
    };
    const SpaceTimeFn base_th = base.data.theta_star;
    sc.data.theta_star = [base_th, eps](double t, double x, double y) {
      return (base_th ? base_th(t, x, y) : 0.0) + eps;
    };
    return sc.run();
  };

  const Trajectory t0 = base.run();
  ContDepReport rep;
  // Fixed data-distance scale per unit eps: profile norms plus the constant
  // shifts of f and theta over the space-time cylinder.
  double c_data;
  {
    VectorField pu(mesh.dim * n, 0.0);
    ScalarField pc(n, 0.0);
    for (int i = 0; i < n; ++i) {
      pu[mesh.dim * i] = profile(i);
      pc[i] = 0.25 * profile(i);
    }
    c_data = std::sqrt(H1.quadratic_form(pu)) + 2.0 * l2_norm_vector(pu, mesh) +
             l2_norm_nodal(pc, mesh) + lp_gradient_norm(pc, mesh, p) +
             2.0 * std::sqrt(mesh.domain_measure() * base.sched.T);
  }

  for (double eps : eps_list) {
    const Trajectory t1 = run_pert(eps);
    double u_linf_h1 = 0.0, dudt_l2 = 0.0, chi_linf_l2 = 0.0, chi_lp = 0.0;
    for (int k = 1; k <= base.sched.K_tau; ++k) {
      VectorField duv(mesh.dim * n), dvel(mesh.dim * n);
      for (int i = 0; i < mesh.dim * n; ++i) {
        duv[i] = t0.states[k].u[i] - t1.states[k].u[i];
        const double prev = t0.states[k - 1].u[i] - t1.states[k - 1].u[i];
        dvel[i] = (duv[i] - prev) / base.sched.tau;
      }
      u_linf_h1 = std::max(u_linf_h1, std::sqrt(H1.quadratic_form(duv)) +
                                          l2_norm_vector(duv, mesh));
      const double dv = l2_norm_vector(dvel, mesh);
      dudt_l2 += base.sched.tau * dv * dv;
      ScalarField dc(n);
      for (int i = 0; i < n; ++i) dc[i] = t0.states[k].chi[i] - t1.states[k].chi[i];
      chi_linf_l2 = std::max(chi_linf_l2, l2_norm_nodal(dc, mesh));
      const double wg = lp_gradient_norm(dc, mesh, p) + l2_norm_nodal(dc, mesh);
      chi_lp += base.sched.tau * std::pow(wg, p);
    }
    ContDepEntry e;
    e.eps = eps;
    e.lhs = u_linf_h1 + std::sqrt(dudt_l2) + chi_linf_l2 + std::pow(chi_lp, 1.0 / p);
    e.rhs = eps * c_data;
    e.ratio = e.lhs / std::max(e.rhs, 1e-300);
    rep.entries.push_back(e);
  }

  // Log-log slope of lhs vs eps by least squares.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (const auto& e : rep.entries) {
    if (!(e.lhs > 0.0)) continue;
    const double x = std::log(e.eps), y = std::log(e.lhs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

ResidualSeries vi_and_energy_residuals(const Trajectory& traj, const MaterialModel& model) {
  (void)model;
  ResidualSeries out;
  for (const auto& r : traj.reports) {
    out.vi_violation.push_back(r.vi_violation);
    out.ineq_slack.push_back(r.energy_slack + r.def_kinetic + r.def_elastic + r.def_phi +
                             r.def_beta);
  }
  return out;
}

KornCheck korn_check(const Mesh& mesh, const MaterialModel& model, int samples, unsigned seed,
                     double eta_min) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(eta_min, 1.0);
  const int n = mesh.num_nodes(), nd = mesh.dim * n;
  const ScalarField ones(n, 1.0);
  const auto E1 = assemble_elastic(ones, mesh, model);
  const auto H1 = assemble_vector_h1(mesh);
  KornCheck out;
  out.c1_emp = 1e300;
  for (int s = 0; s < samples; ++s) {
    VectorField u(nd, 0.0);
    for (int i = 0; i < n; ++i)
      if (!mesh.is_boundary[i])
        for (int d = 0; d < mesh.dim; ++d) u[mesh.dim * i + d] = unit(rng);
    const double h1 = H1.quadratic_form(u);
    if (!(h1 > 0.0)) continue;
    const double ratio = E1.quadratic_form(u) / h1;
    out.c1_emp = std::min(out.c1_emp, ratio);
    ScalarField eta(n);
    for (int i = 0; i < n; ++i) eta[i] = weight(rng);
    const auto Ew = assemble_elastic(eta, mesh, model);
    if (Ew.quadratic_form(u) < eta_min * ratio * h1 - 1e-10 * (1.0 + h1))
      out.weighted_bound_ok = false;
  }
  return out;
}

}  // namespace tvd
