#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tvd/linsolve.hpp"
#include "tvd/operators.hpp"
#include "tvd/stepper.hpp"

#include <cmath>
#include <random>

using namespace tvd;

namespace {

const double kPi = 3.14159265358979323846;

MaterialModel reversible_model() {
  MaterialModel m;
  m.mu = 0;
  m.w_spec = WSpec::IndicatorUnit;
  m.c2 = 0.5;
  m.c3 = 0.5;  // constant conductivity ratio
  m.p = 4.0;
  return m;
}

InitialData zero_initial(const Mesh& mesh, double chi0, double w0) {
  InitialData init;
  init.chi0.assign(mesh.num_nodes(), chi0);
  init.w0.assign(mesh.num_nodes(), w0);
  init.u0.assign(mesh.dim * mesh.num_nodes(), 0.0);
  init.v0.assign(mesh.dim * mesh.num_nodes(), 0.0);
  return init;
}

}  // namespace

TEST_CASE("schedule") {
  Schedule s = Schedule::make(1.0, 0.125);
  CHECK(s.K_tau == 8);
  CHECK(s.time(3) == doctest::Approx(0.375));
  CHECK_THROWS(Schedule::make(1.0, 0.3));  // K tau != T
  CHECK_THROWS(Schedule::make(1.0, -0.1));
}

TEST_CASE("local means") {
  Schedule s = Schedule::make(1.0, 0.1);
  auto c = local_means([](double) { return 2.5; }, s);
  REQUIRE(c.size() == 10);
  for (double v : c) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

  auto lin = local_means([](double t) { return t; }, s);
  CHECK(lin[0] == doctest::Approx(0.05).epsilon(1e-13));  // mean of t on [0, 0.1]
  CHECK(lin[9] == doctest::Approx(0.95).epsilon(1e-13));

  // dense Riemann oracle on a smooth function
  auto f = [](double t) { return std::exp(-t) * std::sin(5.0 * t); };
  auto means = local_means(f, s);
  for (int k = 1; k <= s.K_tau; ++k) {
    const int nr = 20000;
    double sum = 0.0;
    for (int j = 0; j < nr; ++j) sum += f(s.time(k - 1) + (j + 0.5) * s.tau / nr);
    CHECK(std::abs(means[k - 1] - sum / nr) < 1e-8);
  }
}

TEST_CASE("initial data preparation") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  Schedule sched = Schedule::make(0.5, 0.05);

  InitialData init = zero_initial(mesh, 0.5, 0.2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (!mesh.is_boundary[i]) init.u0[i] = U(rng);

  State st = prepare_initial(init, mesh, model, sched);
  CHECK(st.k == 0);
  for (std::size_t i = 0; i < st.u.size(); ++i) CHECK(st.u_prev[i] == st.u[i]);  // v0 = 0

  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (!mesh.is_boundary[i]) init.v0[i] = U(rng);
  st = prepare_initial(init, mesh, model, sched);
  for (std::size_t i = 0; i < st.u.size(); ++i)
    CHECK(st.u_prev[i] == doctest::Approx(st.u[i] - sched.tau * init.v0[i]).epsilon(1e-14));

  // positivity clamp
  init.w0.assign(mesh.num_nodes(), 0.1);
  init.positivity_clamp = true;
  init.w_floor = 0.3;
  st = prepare_initial(init, mesh, model, sched);
  for (double v : st.w) CHECK(v >= 0.3);

  // rejections
  InitialData bad = zero_initial(mesh, -0.2, 0.0);
  CHECK_THROWS(prepare_initial(bad, mesh, model, sched));
  bad = zero_initial(mesh, 0.5, 0.0);
  bad.theta0.assign(mesh.num_nodes(), -1.0);
  CHECK_THROWS(prepare_initial(bad, mesh, model, sched));

  // H1 smoothing converges to the datum in L1 as tau shrinks
  InitialData kink = zero_initial(mesh, 0.5, 0.0);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    kink.w0[i] = std::abs(mesh.coord(i, 0) - 0.5);
  const auto mass = lumped_mass(mesh);
  double prev_err = 1e300;
  for (double tau : {0.25, 0.05, 0.01}) {
    State sm = prepare_initial(kink, mesh, model, Schedule::make(0.5, tau));
    double err = 0.0;
    for (int i = 0; i < mesh.num_nodes(); ++i) err += mass[i] * std::abs(sm.w[i] - kink.w0[i]);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("reversible scheme: equilibrium is a fixed point") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  Schedule sched = Schedule::make(0.3, 0.1);
  RunData data;
  Stepper stepper(mesh, model, sched, data);

  // w0 = 0 so Theta(w) = 0 and the chi drive vanishes at interior chi0
  InitialData init = zero_initial(mesh, 0.5, 0.0);
  init.smooth_w0 = false;
  Trajectory traj = stepper.run(prepare_initial(init, mesh, model, sched), Scheme::Reversible);
  for (const State& s : traj.states) {
    for (double v : s.chi) CHECK(std::abs(v - 0.5) < 1e-10);
    for (double v : s.w) CHECK(std::abs(v) < 1e-10);
    for (double v : s.u) CHECK(std::abs(v) < 1e-12);
  }

  // chi pinned at the box top stays there for any constant w
  InitialData hot = zero_initial(mesh, 1.0, 0.7);
  hot.smooth_w0 = false;
  traj = stepper.run(prepare_initial(hot, mesh, model, sched), Scheme::Reversible);
  for (const State& s : traj.states) {
    for (double v : s.chi) CHECK(std::abs(v - 1.0) < 1e-10);
    for (double v : s.w) CHECK(std::abs(v - 0.7) < 1e-10);
  }
}

TEST_CASE("reversible scheme: decoupled heat step matches a hand-built solve") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  Schedule sched = Schedule::make(0.2, 0.05);
  RunData data;
  data.g = [](double, double x, double) { return std::sin(kPi * x); };
  Stepper stepper(mesh, model, sched, data);

  InitialData init = zero_initial(mesh, 1.0, 0.4);  // chi stays pinned at 1
  init.smooth_w0 = false;
  Trajectory traj = stepper.run(prepare_initial(init, mesh, model, sched), Scheme::Reversible);

  // oracle: (M/tau + c2 A) w^k = M w^{k-1}/tau + M g^k
  const auto mass = lumped_mass(mesh);
  ScalarField Kfield(mesh.num_nodes(), model.c2);
  SparseSpdMatrix A = assemble_w_diffusion(Kfield, mesh);
  std::vector<double> mass_over_tau(mass);
  for (double& v : mass_over_tau) v /= sched.tau;
  SparseSpdMatrix lhs = matrix_sum(A, 1.0, A, 0.0, &mass_over_tau);

  ScalarField w(mesh.num_nodes(), 0.4);
  for (int k = 1; k <= sched.K_tau; ++k) {
    const ScalarField gk = local_mean_field(data.g, k, sched, mesh);
    std::vector<double> rhs(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i)
      rhs[i] = mass[i] * (w[i] / sched.tau + gk[i]);
    SolveOptions opts;
    opts.tol = 1e-14;
    cg_solve(lhs, rhs, w, opts);
    for (int i = 0; i < mesh.num_nodes(); ++i)
      CHECK(std::abs(traj.states[k].w[i] - w[i]) < 1e-10);
  }
}

TEST_CASE("expansion scheme reductions") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  model.conductivity_spec = ConductivitySpec::Power;
  model.c10 = 0.5;
  model.q = 1.5;
  model.rho = 0.0;
  model.M = 1e6;  // truncation inactive at these field sizes
  Schedule sched = Schedule::make(0.3, 0.05);
  RunData data;
  data.g = [](double, double x, double) { return 0.5 * std::sin(kPi * x); };
  data.fx = [](double, double x, double) { return std::sin(kPi * x); };
  Stepper stepper(mesh, model, sched, data);

  InitialData init = zero_initial(mesh, 0.8, 0.2);
  const State s0 = prepare_initial(init, mesh, model, sched);
  Trajectory plain = stepper.run(s0, Scheme::Reversible);
  Trajectory trunc = stepper.run(s0, Scheme::ReversibleExpansion);
  for (std::size_t k = 0; k < plain.states.size(); ++k) {
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      CHECK(std::abs(plain.states[k].w[i] - trunc.states[k].w[i]) < 1e-9);
      CHECK(std::abs(plain.states[k].chi[i] - trunc.states[k].chi[i]) < 1e-9);
      CHECK(std::abs(plain.states[k].u[i] - trunc.states[k].u[i]) < 1e-9);
    }
  }

  // M-saturation: raising an already-inactive M changes nothing
  MaterialModel m2 = model;
  m2.M = 50.0;
  double wmax = 0.0;
  for (const State& s : trunc.states)
    for (double v : s.w) wmax = std::max(wmax, std::abs(v));
  REQUIRE(wmax < m2.M);
  Stepper stepper2(mesh, m2, sched, data);
  Trajectory sat = stepper2.run(s0, Scheme::ReversibleExpansion);
  for (std::size_t k = 0; k < sat.states.size(); ++k)
    for (int i = 0; i < mesh.num_nodes(); ++i)
      CHECK(sat.states[k].w[i] == trunc.states[k].w[i]);
}

TEST_CASE("expansion scheme: coupling cross-terms cancel in the ledger") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  model.conductivity_spec = ConductivitySpec::Power;
  model.c10 = 0.5;
  model.q = 1.5;
  model.rho = 0.5;
  model.M = 10.0;
  Schedule sched = Schedule::make(0.3, 0.05);
  RunData data;
  data.fx = [](double, double x, double) { return 2.0 * std::sin(kPi * x); };
  data.g = [](double, double x, double) { return 0.3 * std::sin(kPi * x); };
  Stepper stepper(mesh, model, sched, data);
  InitialData init = zero_initial(mesh, 0.8, 0.2);
  Trajectory traj = stepper.run(prepare_initial(init, mesh, model, sched),
                                Scheme::ReversibleExpansion);
  for (const StepReport& r : traj.reports) {
    CHECK(r.converged);
    CHECK(std::abs(r.energy_slack) < 1e-10);
  }
}

TEST_CASE("irreversible scheme: stationarity and driven damage") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model;
  model.mu = 1;
  model.w_spec = WSpec::IndicatorHalfLine;
  model.c2 = 0.5;
  model.c3 = 1.0;
  model.p = 4.0;
  Schedule sched = Schedule::make(0.25, 0.05);
  RunData data;
  Stepper stepper(mesh, model, sched, data);

  InitialData init = zero_initial(mesh, 1.0, 0.3);
  init.smooth_w0 = false;
  Trajectory traj = stepper.run(prepare_initial(init, mesh, model, sched), Scheme::Irreversible);
  for (const State& s : traj.states) {
    for (double v : s.chi) CHECK(std::abs(v - 1.0) < 1e-10);
    for (double v : s.u) CHECK(std::abs(v) < 1e-12);
    for (double v : s.w) CHECK(std::abs(v - 0.3) < 1e-10);
  }

  // large stored elastic energy drives chi strictly down within 5 steps
  InitialData prestrain = zero_initial(mesh, 1.0, 0.0);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (!mesh.is_boundary[i]) prestrain.u0[i] = 2.0 * std::sin(kPi * mesh.coord(i, 0));
  prestrain.smooth_w0 = false;
  traj = stepper.run(prepare_initial(prestrain, mesh, model, sched), Scheme::Irreversible);
  double chi_min = 1e300;
  for (double v : traj.states.back().chi) chi_min = std::min(chi_min, v);
  CHECK(chi_min < 1.0 - 1e-3);
  // node-wise monotone
  for (std::size_t k = 1; k < traj.states.size(); ++k)
    for (int i = 0; i < mesh.num_nodes(); ++i)
      CHECK(traj.states[k].chi[i] <= traj.states[k - 1].chi[i]);
}

TEST_CASE("isothermal irreversible scheme: relaxation and multiplier signs") {
  Mesh mesh = build_mesh_1d(1.0, 8);
  MaterialModel model;
  model.mu = 1;
  model.w_spec = WSpec::IndicatorHalfLine;
  model.p = 4.0;
  model.b_spec = CoeffSpec::Constant;  // no elastic drive on chi
  model.b_const = 1.0;
  model.gamma_poly = {0.0, 1.0};  // gamma(chi) = chi
  Schedule sched = Schedule::make(2.0, 0.1);
  RunData data;
  data.theta_star = [](double, double, double) { return 0.3; };
  Stepper stepper(mesh, model, sched, data);

  InitialData init;
  init.chi0.assign(mesh.num_nodes(), 1.0);
  init.u0.assign(mesh.num_nodes(), 0.0);
  init.v0.assign(mesh.num_nodes(), 0.0);
  Trajectory traj = stepper.run(prepare_initial(init, mesh, model, sched),
                                Scheme::IsothermalIrreversible);

  // first step matches the constant-field backward-Euler closed form
  const double expected1 = (1.0 + sched.tau * 0.3) / (1.0 + sched.tau);
  for (double v : traj.states[1].chi) CHECK(v == doctest::Approx(expected1).epsilon(1e-6));
  // geometric relaxation toward argmin of gamma_hat - theta* . chi (chi = 0.3):
  // each backward-Euler step contracts the gap by 1/(1 + tau)
  const double expectedK =
      0.3 + 0.7 * std::pow(1.0 / (1.0 + sched.tau), sched.K_tau);
  for (double v : traj.states.back().chi)
    CHECK(v == doctest::Approx(expectedK).epsilon(1e-6));

  // zeta may be nonzero only where the rate constraint chi = chi_prev is active
  for (std::size_t k = 0; k < traj.reports.size(); ++k) {
    const StepReport& r = traj.reports[k];
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const bool active =
          traj.states[k + 1].chi[i] >= traj.states[k].chi[i] - 1e-12;
      if (!active) CHECK(std::abs(r.zeta[i]) < 1e-6);
    }
  }

  // an upward drive pins chi at chi_prev with a nonnegative multiplier
  RunData hot;
  hot.theta_star = [](double, double, double) { return 5.0; };
  Stepper shot(mesh, model, sched, hot);
  InitialData half = init;
  half.chi0.assign(mesh.num_nodes(), 0.5);
  Trajectory pinned = shot.run(prepare_initial(half, mesh, model, sched),
                               Scheme::IsothermalIrreversible);
  for (const State& s : pinned.states)
    for (double v : s.chi) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
  for (const StepReport& r : pinned.reports)
    for (double z : r.zeta) CHECK(z >= -1e-9);
}

TEST_CASE("runs are reproducible bit-exact") {
  Mesh mesh = build_mesh_1d(1.0, 16);
  MaterialModel model = reversible_model();
  Schedule sched = Schedule::make(0.2, 0.05);
  RunData data;
  data.g = [](double, double x, double) { return std::sin(kPi * x); };
  data.fx = [](double t, double x, double) { return t * std::sin(kPi * x); };
  Stepper stepper(mesh, model, sched, data);
  InitialData init = zero_initial(mesh, 0.8, 0.2);
  const State s0 = prepare_initial(init, mesh, model, sched);
  Trajectory a = stepper.run(s0, Scheme::Reversible);
  Trajectory b = stepper.run(s0, Scheme::Reversible);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k].w == b.states[k].w);
    CHECK(a.states[k].u == b.states[k].u);
    CHECK(a.states[k].chi == b.states[k].chi);
  }
}
