#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tvd/material.hpp"

#include <cmath>
#include <random>

using namespace tvd;

TEST_CASE("heat capacity") {
  MaterialModel m;
  m.c0 = 1.0;
  m.c1 = 1.0;
  m.sigma = 2.0;
  m.sigma1 = 2.0;
  CHECK(m.heat_capacity(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.heat_capacity(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  m.c0 = 0.5;
  m.sigma = 1.5;
  CHECK(m.heat_capacity(3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(m.heat_capacity(-0.1));
}

TEST_CASE("enthalpy") {
  MaterialModel m;
  m.c0 = 1.0;
  m.sigma = 2.0;
  CHECK(m.enthalpy(0.0) == 0.0);
  CHECK(m.enthalpy(1.0) == doctest::Approx(1.5).epsilon(1e-14));  // (4-1)/2
  CHECK(m.enthalpy(2.0) > m.enthalpy(1.0));
  CHECK_THROWS(m.enthalpy(-1.0));
}

TEST_CASE("enthalpy inverse") {
  MaterialModel m;
  m.c0 = 1.0;
  m.sigma = 2.0;
  CHECK(m.theta_of_w(-5.0) == 0.0);
  CHECK(m.theta_of_w(m.enthalpy(1.7)) == doctest::Approx(1.7).epsilon(1e-12));
  // closed form (1 + 2*1.5)^(1/2) - 1 = 1
  CHECK(m.theta_of_w(1.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(m.theta_of_w(1.5) - m.theta_of_w_bisect(1.5)) < 1e-10);

  m.c0 = 0.8;
  m.c1 = 0.8;
  m.sigma = 2.7;
  m.sigma1 = 2.7;
  for (int j = 0; j < 100; ++j) {
    const double theta = 10.0 * j / 99.0;
    const double w = m.enthalpy(theta);
    CHECK(std::abs(m.theta_of_w(w) - theta) < 1e-10);
    CHECK(std::abs(m.theta_of_w(w) - m.theta_of_w_bisect(w)) < 1e-10);
  }
}

TEST_CASE("conductivity ratio") {
  MaterialModel m;
  m.conductivity_spec = ConductivitySpec::RatioBounded;
  m.c2 = 0.5;
  m.c3 = 0.5;  // constant ratio: K = c2 everywhere
  for (double w : {-1.0, 0.0, 0.3, 2.0, 50.0})
    CHECK(m.conductivity_ratio(w) == doctest::Approx(0.5).epsilon(1e-13));

  m.c3 = 2.0;
  for (double w : {-1.0, 0.0, 0.3, 2.0, 50.0}) {
    const double K = m.conductivity_ratio(w);
    CHECK(K >= m.c2 - 1e-13);
    CHECK(K <= m.c3 + 1e-13);
  }

  m.conductivity_spec = ConductivitySpec::Power;
  m.c10 = 1.0;
  m.q = 1.0;
  CHECK(m.conductivity_ratio(2.0) == doctest::Approx(5.0).epsilon(1e-13));  // 2^2 + 1
  CHECK(m.conductivity_ratio(-3.0) == doctest::Approx(1.0).epsilon(1e-13));  // constant below 0
}

TEST_CASE("truncations") {
  MaterialModel m;
  m.M = 4.0;
  m.conductivity_spec = ConductivitySpec::Power;
  m.c10 = 0.7;
  m.q = 1.5;
  for (double r : {-3.0, -0.5, 0.0, 2.0, 4.0})
    CHECK(MaterialModel::T_M(r, 4.0) == doctest::Approx(r).epsilon(1e-14));
  CHECK(MaterialModel::T_M(9.0, 4.0) == 4.0);
  CHECK(MaterialModel::T_M(-9.0, 4.0) == -4.0);

  CHECK(m.Theta_M(2.0 * m.M) == doctest::Approx(m.theta_of_w(m.M)).epsilon(1e-13));
  // continuity of K_M at the clamp levels
  CHECK(m.K_M(m.M - 1e-9) == doctest::Approx(m.K_M(m.M + 1e-9)).epsilon(1e-6));
  CHECK(m.K_M(-m.M - 1e-9) == doctest::Approx(m.K_M(-m.M + 1e-9)).epsilon(1e-6));
  for (double r : {-10.0, -1.0, 0.0, 3.0, 10.0}) CHECK(m.K_M(r) >= m.c10 - 1e-13);
}

TEST_CASE("gradient potential flux") {
  MaterialModel m;
  m.p = 4.0;
  m.phi_spec = PhiSpec::Power;
  CHECK(m.phi({0.0, 0.0}, 2) == 0.0);
  auto d0 = m.flux_d({0.0, 0.0}, 2);
  CHECK(d0[0] == 0.0);
  CHECK(d0[1] == 0.0);

  auto d = m.flux_d({2.0, 0.0}, 2);
  CHECK(d[0] == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(d[1] == 0.0);
  CHECK(m.phi({2.0, 0.0}, 2) == doctest::Approx(4.0).epsilon(1e-13));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int spec = 0; spec < 2; ++spec) {
    m.phi_spec = spec == 0 ? PhiSpec::Power : PhiSpec::Regularized;
    // d = grad(phi) by central differences
    for (int trial = 0; trial < 100; ++trial) {
      const std::array<double, 2> z{U(rng), U(rng)};
      const auto dz = m.flux_d(z, 2);
      const double h = 1e-5;
      for (int c = 0; c < 2; ++c) {
        auto zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        const double fd = (m.phi(zp, 2) - m.phi(zm, 2)) / (2.0 * h);
        CHECK(std::abs(fd - dz[c]) / std::max(1.0, std::abs(dz[c])) < 1e-6);
      }
    }
    // monotonicity of the flux
    for (int trial = 0; trial < 1000; ++trial) {
      const std::array<double, 2> z{U(rng), U(rng)}, y{U(rng), U(rng)};
      const auto dz = m.flux_d(z, 2), dy = m.flux_d(y, 2);
      const double inner = (dz[0] - dy[0]) * (z[0] - y[0]) + (dz[1] - dy[1]) * (z[1] - y[1]);
      CHECK(inner >= -1e-12);
    }
  }

  // empirical p-coercivity of the power flux
  m.phi_spec = PhiSpec::Power;
  double c7 = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::array<double, 2> z{U(rng), U(rng)}, y{U(rng), U(rng)};
    const double dist =
        std::sqrt((z[0] - y[0]) * (z[0] - y[0]) + (z[1] - y[1]) * (z[1] - y[1]));
    if (dist < 1e-8) continue;
    const auto dz = m.flux_d(z, 2), dy = m.flux_d(y, 2);
    const double inner = (dz[0] - dy[0]) * (z[0] - y[0]) + (dz[1] - dy[1]) * (z[1] - y[1]);
    c7 = std::min(c7, inner / std::pow(dist, m.p));
  }
  CHECK(c7 > 0.0);
}

TEST_CASE("double-well potential") {
  MaterialModel m;
  m.w_spec = WSpec::Logarithmic;
  m.logw_c1 = 0.0;
  m.logw_c2 = 0.0;
  m.logw_c3 = 0.0;
  CHECK(m.W_value(0.5) == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
  CHECK(m.W_value(0.0) == doctest::Approx(0.0).epsilon(1e-12));  // 0*log(0) := 0 limit

  m.w_spec = WSpec::IndicatorUnit;
  CHECK(m.W_value(1.2) == MaterialModel::kInf);
  CHECK(m.W_value(-0.1) == MaterialModel::kInf);
  double lo, up;
  m.beta_feasible_interval(lo, up);
  CHECK(lo == 0.0);
  CHECK(up == 1.0);

  m.w_spec = WSpec::IndicatorHalfLine;
  m.beta_feasible_interval(lo, up);
  CHECK(lo == 0.0);
  CHECK(up == MaterialModel::kInf);

  m.gamma_poly = {0.0, -1.0};  // gamma(chi) = -chi, gamma_hat = -chi^2/2
  CHECK(m.gamma(0.0) == 0.0);
  CHECK(m.gamma(0.7) == doctest::Approx(-0.7).epsilon(1e-13));
  CHECK(m.gamma_hat(0.7) == doctest::Approx(-0.245).epsilon(1e-12));
}

TEST_CASE("Yosida regularization of the half-line indicator") {
  CHECK(yosida_beta(0.3, 0.1) == 0.0);
  CHECK(yosida_beta(0.0, 0.1) == 0.0);
  CHECK(yosida_beta(-0.2, 0.1) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(yosida_beta_hat(-0.2, 0.1) == doctest::Approx(0.2).epsilon(1e-13));
  // Lipschitz constant exactly 1/tau
  const double tau = 0.25;
  for (double x : {-2.0, -1.0, -0.01})
    CHECK(std::abs(yosida_beta(x, tau) - yosida_beta(x - 0.1, tau)) ==
          doctest::Approx(0.1 / tau).epsilon(1e-12));
}

TEST_CASE("model validation") {
  MaterialModel m;
  CHECK_NOTHROW(m.validate(1));
  CHECK_NOTHROW(m.validate(2));

  MaterialModel bad = m;
  bad.sigma = 0.5;  // below 2d/(d+2) in both dimensions
  CHECK_THROWS(bad.validate(1));

  bad = m;
  bad.p = 1.5;
  CHECK_THROWS(bad.validate(2));

  bad = m;
  bad.conductivity_spec = ConductivitySpec::Power;
  bad.q = 0.2;  // below (d+2)/(2d)
  CHECK_THROWS(bad.validate(1));

  bad = m;
  bad.mu = 1;
  bad.w_spec = WSpec::Logarithmic;  // irreversible flow needs the half-line indicator
  CHECK_THROWS(bad.validate(1));

  bad = m;
  bad.c2 = 2.0;
  bad.c3 = 1.0;  // ratio-bounded family needs c3 >= c2
  CHECK_THROWS(bad.validate(1));

  bad = m;
  bad.degenerate_mode = true;
  bad.a_spec = CoeffSpec::Constant;  // degenerate runs require a = b = chi
  CHECK_THROWS(bad.validate(1));
}
