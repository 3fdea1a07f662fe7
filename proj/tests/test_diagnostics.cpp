#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tvd/diagnostics.hpp"

#include <cmath>
#include <random>

using namespace tvd;

namespace {

const double kPi = 3.14159265358979323846;

Scenario forced_reversible(const Mesh& mesh) {
  Scenario sc;
  sc.mesh = &mesh;
  sc.model.mu = 0;
  sc.model.w_spec = WSpec::IndicatorUnit;
  sc.model.c2 = 0.5;
  sc.model.c3 = 1.0;
  sc.model.p = 4.0;
  sc.model.gamma_poly = {0.0, -0.1, 0.0, 0.1};
  sc.sched = Schedule::make(0.3, 0.05);
  sc.data.g = [](double, double x, double) { return 0.5 * std::sin(kPi * x); };
  sc.data.fx = [](double, double x, double) { return std::sin(kPi * x); };
  sc.init.chi0.assign(mesh.num_nodes(), 0.8);
  sc.init.w0.assign(mesh.num_nodes(), 0.2);
  sc.init.u0.assign(mesh.num_nodes(), 0.0);
  sc.init.v0.assign(mesh.num_nodes(), 0.0);
  sc.scheme = Scheme::Reversible;
  return sc;
}

}  // namespace

TEST_CASE("norms") {
  Mesh mesh = build_mesh_1d(2.0, 8);
  ScalarField c(mesh.num_nodes(), 3.0);
  CHECK(l2_norm_nodal(c, mesh) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));

  VectorField u(mesh.num_nodes(), 2.0);
  CHECK(l2_norm_vector(u, mesh) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

  ScalarField lin(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) lin[i] = 1.5 * mesh.coord(i, 0);
  // (int |1.5|^p)^(1/p) on [0,2]
  CHECK(lp_gradient_norm(lin, mesh, 4.0) ==
        doctest::Approx(1.5 * std::pow(2.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("energy ledger: stationary, forced, corrupted") {
  Mesh mesh = build_mesh_1d(1.0, 16);

  Scenario sc = forced_reversible(mesh);
  Trajectory traj = sc.run();
  LedgerCheck lc = energy_ledger_check(traj, sc.model);
  CHECK(lc.reconciled);
  for (double s : lc.slack) CHECK(std::abs(s) <= 1e-8 * lc.energy_scale);

  // stationary run: slack identically at roundoff level
  Scenario still = forced_reversible(mesh);
  still.data = RunData{};
  still.init.w0.assign(mesh.num_nodes(), 0.0);
  still.init.chi0.assign(mesh.num_nodes(), 0.5);
  still.init.smooth_w0 = false;
  still.model.gamma_poly.clear();
  Trajectory quiet = still.run();
  LedgerCheck qc = energy_ledger_check(quiet, still.model);
  CHECK(qc.reconciled);
  for (double s : qc.slack) CHECK(std::abs(s) < 1e-12 * qc.energy_scale);

  // corrupting a state breaks the reconciliation
  Trajectory bad = traj;
  bad.states[3].w[mesh.num_nodes() / 2] += 0.1;
  LedgerCheck bc = energy_ledger_check(bad, sc.model);
  CHECK_FALSE(bc.reconciled);
}

TEST_CASE("quasi-stresses") {
  Mesh mesh = build_mesh_1d(1.0, 8);
  MaterialModel model;
  model.a_spec = CoeffSpec::Chi;
  model.b_spec = CoeffSpec::Chi;
  model.delta = 0.0;

  State st;
  st.chi.assign(mesh.num_nodes(), 1.0);
  st.u.assign(mesh.num_nodes(), 0.0);
  st.u_prev.assign(mesh.num_nodes(), 0.0);
  const double tau = 0.1;

  QuasiStresses qs = quasi_stresses(st, mesh, model, tau);
  for (const auto& v : qs.mu.values) CHECK(v[0] == 0.0);
  for (const auto& v : qs.eta.values) CHECK(v[0] == 0.0);

  // chi = 1, delta = 0: mu = eps(Du), eta = eps(u)
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    st.u[i] = std::sin(kPi * mesh.coord(i, 0));
    st.u_prev[i] = 0.5 * st.u[i];
  }
  qs = quasi_stresses(st, mesh, model, tau);
  SymTensorField eps_u = symmetric_gradient(st.u, mesh);
  VectorField du(st.u.size());
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = (st.u[i] - st.u_prev[i]) / tau;
  SymTensorField eps_du = symmetric_gradient(du, mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    CHECK(qs.eta.values[e][0] == doctest::Approx(eps_u.values[e][0]).epsilon(1e-12));
    CHECK(qs.mu.values[e][0] == doctest::Approx(eps_du.values[e][0]).epsilon(1e-12));
  }

  // L2 norm of eta matches direct quadrature with sqrt(chi + delta) weights
  model.delta = 0.05;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double& v : st.chi) v = U(rng);
  qs = quasi_stresses(st, mesh, model, tau);
  const auto chibar = element_average(st.chi, mesh);
  double oracle = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    oracle += mesh.element_measures[e] * (chibar[e] + model.delta) * eps_u.values[e][0] *
              eps_u.values[e][0];
  CHECK(l2_norm_tensor(qs.eta, mesh) == doctest::Approx(std::sqrt(oracle)).epsilon(1e-12));
}

TEST_CASE("Boccardo-Gallouet functional") {
  Mesh mesh = build_mesh_1d(1.0, 64);
  ScalarField c(mesh.num_nodes(), 0.7);
  CHECK(boccardo_gallouet(c, 1.0, mesh) == doctest::Approx(0.0));

  ScalarField lin(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) lin[i] = mesh.coord(i, 0);
  // int_0^1 1/(1+x)^2 = 1/2, up to the element-midpoint quadrature error
  CHECK(boccardo_gallouet(lin, 1.0, mesh) == doctest::Approx(0.5).epsilon(1e-3));

  // steeper gradients dominate the denominator growth
  ScalarField lin2(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) lin2[i] = 2.0 * mesh.coord(i, 0);
  CHECK(boccardo_gallouet(lin2, 1.0, mesh) > boccardo_gallouet(lin, 1.0, mesh));

  CHECK_THROWS(boccardo_gallouet(lin, 0.0, mesh));
  ScalarField neg(mesh.num_nodes(), -0.5);
  CHECK_THROWS(boccardo_gallouet(neg, 1.0, mesh));
}

TEST_CASE("delta sweep preconditions") {
  Mesh mesh = build_mesh_1d(1.0, 8);
  Scenario sc = forced_reversible(mesh);  // mu = 0: not a degenerate-damage run
  CHECK_THROWS(delta_sweep(sc, {1e-1, 1e-2}));
}

TEST_CASE("per-step VI and energy residual series") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  Scenario sc;
  sc.mesh = &mesh;
  sc.model.mu = 1;
  sc.model.w_spec = WSpec::IndicatorHalfLine;
  sc.model.c2 = 0.5;
  sc.model.c3 = 1.0;
  sc.model.p = 4.0;
  sc.sched = Schedule::make(0.3, 0.05);
  sc.data.fx = [](double, double x, double) { return 15.0 * std::sin(kPi * x); };
  sc.init.chi0.assign(mesh.num_nodes(), 1.0);
  sc.init.theta0.assign(mesh.num_nodes(), 0.05);
  sc.init.u0.assign(mesh.num_nodes(), 0.0);
  sc.init.v0.assign(mesh.num_nodes(), 0.0);
  sc.scheme = Scheme::Irreversible;
  Trajectory traj = sc.run();

  ResidualSeries rs = vi_and_energy_residuals(traj, sc.model);
  REQUIRE(rs.vi_violation.size() == traj.reports.size());
  for (double v : rs.vi_violation) CHECK(v <= 1e-7);
  LedgerCheck lc = energy_ledger_check(traj, sc.model);
  CHECK(lc.inequality_ok);
}

TEST_CASE("empirical Korn constant") {
  MaterialModel model;
  Mesh m1 = build_mesh_1d(1.0, 16);
  KornCheck k1 = korn_check(m1, model, 100, 5);
  CHECK(k1.c1_emp > 0.0);
  CHECK(k1.weighted_bound_ok);

  Mesh m2 = build_mesh_2d(1.0, 1.0, 6, 6);
  KornCheck k2 = korn_check(m2, model, 100, 5);
  CHECK(k2.c1_emp > 0.0);
  CHECK(k2.weighted_bound_ok);

  // deterministic for a fixed seed
  KornCheck again = korn_check(m2, model, 100, 5);
  CHECK(again.c1_emp == k2.c1_emp);
}

TEST_CASE("continuous dependence experiment basics") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  Scenario sc;
  sc.mesh = &mesh;
  sc.model.mu = 0;
  sc.model.w_spec = WSpec::IndicatorUnit;
  sc.model.p = 4.0;
  sc.model.a_spec = CoeffSpec::Constant;
  sc.model.a_const = 1.0;
  sc.model.phi_spec = PhiSpec::Regularized;
  sc.sched = Schedule::make(0.3, 0.05);
  sc.data.fx = [](double, double x, double) { return std::sin(kPi * x); };
  sc.data.theta_star = [](double, double, double) { return 0.5; };
  sc.init.chi0.assign(mesh.num_nodes(), 0.8);
  sc.init.u0.assign(mesh.num_nodes(), 0.0);
  sc.init.v0.assign(mesh.num_nodes(), 0.0);
  sc.scheme = Scheme::IsothermalReversible;

  // unperturbed twin runs coincide
  Trajectory a = sc.run(), b = sc.run();
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k].u == b.states[k].u);
    CHECK(a.states[k].chi == b.states[k].chi);
  }

  ContDepReport rep = continuous_dependence_experiment(sc, {1e-1, 1e-2});
  REQUIRE(rep.entries.size() == 2);
  for (const ContDepEntry& e : rep.entries) {
    CHECK(e.lhs > 0.0);
    CHECK(e.rhs > 0.0);
    CHECK(std::isfinite(e.ratio));
  }
  CHECK(std::isfinite(rep.slope));
}
