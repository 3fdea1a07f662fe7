#include "tvd/material.hpp"

#include <cmath>
#include <stdexcept>

namespace tvd {

void MaterialModel::validate(int dim) const {
  const double sigma_floor = 2.0 * dim / (dim + 2.0);
  if (!(c0 > 0.0) || c1 < c0) throw std::invalid_argument("material: need c1 >= c0 > 0");
  if (!(sigma > sigma_floor) || sigma1 < sigma)
    throw std::invalid_argument("material: need sigma1 >= sigma > 2*dim/(dim+2)");
  if (!(p > dim)) throw std::invalid_argument("material: need p > dim");
  if (conductivity_spec == ConductivitySpec::Power) {
    if (q < (dim + 2.0) / (2.0 * dim))
      throw std::invalid_argument("material: power conductivity needs q >= (dim+2)/(2*dim)");
    if (!(c10 > 0.0)) throw std::invalid_argument("material: need c10 > 0");
  } else {
    if (!(c2 > 0.0) || c3 < c2) throw std::invalid_argument("material: need c3 >= c2 > 0");
  }
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(ell1 > 0.0) || !(ell2 > 0.0))
    throw std::invalid_argument("material: Lame and viscosity constants must be positive");
  if (delta < 0.0) throw std::invalid_argument("material: delta must be >= 0");
  // a, b >= 0 on [0,1] holds for all supported coefficient choices with
  // nonnegative constants.
  if (a_spec == CoeffSpec::Constant && a_const < 0.0)
    throw std::invalid_argument("material: constant a must be >= 0");
  if (b_spec == CoeffSpec::Constant && b_const < 0.0)
    throw std::invalid_argument("material: constant b must be >= 0");
  if (mu == 1 && w_spec != WSpec::IndicatorHalfLine)
    throw std::invalid_argument(
        "material: irreversible runs (mu=1) require the half-line indicator potential");
  if (degenerate_mode && (a_spec != CoeffSpec::Chi || b_spec != CoeffSpec::Chi))
    throw std::invalid_argument("material: degenerate mode requires a(chi)=chi, b(chi)=chi");
}

double MaterialModel::heat_capacity(double theta) const {
  if (theta < 0.0) throw std::invalid_argument("heat_capacity: negative temperature");
  return c0 * std::pow(1.0 + theta, sigma - 1.0);
}

double MaterialModel::enthalpy(double theta) const {
  if (theta < 0.0) throw std::invalid_argument("enthalpy: negative temperature");
  return c0 * (std::pow(1.0 + theta, sigma) - 1.0) / sigma;
}

double MaterialModel::theta_of_w(double w) const {
  if (w < 0.0) return 0.0;
  return std::pow(1.0 + sigma * w / c0, 1.0 / sigma) - 1.0;
}

double MaterialModel::theta_of_w_bisect(double w) const {
  if (w < 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (enthalpy(hi) < w) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (enthalpy(mid) < w)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double MaterialModel::conductivity_ratio(double w) const {
  if (conductivity_spec == ConductivitySpec::Power) {
    // Extended below w=0 by the constant c10, consistent with Theta(w<0)=0.
    const double wp = std::max(w, 0.0);
    return c10 * (std::pow(wp, 2.0 * q) + 1.0);
  }
  // Ratio-bounded family: K = c2 + (c3 - c2) / (1 + theta), i.e. the ratio of
  // a conductivity c2*c + (c3-c2)*c0*(1+theta)^(sigma-2) ... realized directly
  // as a continuous function with values in [min(c2,c3), max(c2,c3)].
  const double theta = theta_of_w(w);
  return c2 + (c3 - c2) / (1.0 + theta);
}

double MaterialModel::K_M(double r) const {
  const double rc = T_M(r, M);
  return conductivity_ratio(rc);
}

double MaterialModel::Theta_M(double r) const { return theta_of_w(T_M(r, M)); }

double MaterialModel::T_M(double r, double M) {
  if (r > M) return M;
  if (r < -M) return -M;
  return r;
}

double MaterialModel::phi(const std::array<double, 2>& zeta, int dim) const {
  double n2 = zeta[0] * zeta[0];
  if (dim == 2) n2 += zeta[1] * zeta[1];
  if (phi_spec == PhiSpec::Power) return std::pow(n2, 0.5 * p) / p;
  return std::pow(1.0 + n2, 0.5 * p) / p;
}

std::array<double, 2> MaterialModel::flux_d(const std::array<double, 2>& zeta, int dim) const {
  double n2 = zeta[0] * zeta[0];
  if (dim == 2) n2 += zeta[1] * zeta[1];
  double factor;
  if (phi_spec == PhiSpec::Power)
    factor = (n2 == 0.0) ? 0.0 : std::pow(n2, 0.5 * (p - 2.0));
  else
    factor = std::pow(1.0 + n2, 0.5 * (p - 2.0));
  return {factor * zeta[0], dim == 2 ? factor * zeta[1] : 0.0};
}

static double coeff_eval(CoeffSpec s, double chi, double cst) {
  switch (s) {
    case CoeffSpec::Chi: return chi;
    case CoeffSpec::OneMinusChi: return 1.0 - chi;
    case CoeffSpec::Constant: return cst;
  }
  return 0.0;
}

double MaterialModel::a(double chi) const { return coeff_eval(a_spec, chi, a_const); }
double MaterialModel::b(double chi) const { return coeff_eval(b_spec, chi, b_const); }

double MaterialModel::b_prime(double chi) const {
  (void)chi;
  switch (b_spec) {
    case CoeffSpec::Chi: return 1.0;
    case CoeffSpec::OneMinusChi: return -1.0;
    case CoeffSpec::Constant: return 0.0;
  }
  return 0.0;
}

double MaterialModel::W_value(double chi) const {
  switch (w_spec) {
    case WSpec::IndicatorUnit:
      if (chi < 0.0 || chi > 1.0) return kInf;
      return gamma_hat(chi);
    case WSpec::IndicatorHalfLine:
      if (chi < 0.0) return kInf;
      return gamma_hat(chi);
    case WSpec::Logarithmic: {
      if (chi < 0.0 || chi > 1.0) return kInf;
      double ent = 0.0;  // r ln r + (1-r) ln(1-r), endpoint limits 0
      if (chi > 0.0) ent += chi * std::log(chi);
      if (chi < 1.0) ent += (1.0 - chi) * std::log(1.0 - chi);
      return ent - logw_c1 * chi * chi - logw_c2 * chi - logw_c3;
    }
  }
  return kInf;
}

double MaterialModel::gamma(double chi) const {
  double v = 0.0, x = 1.0;
  for (double c : gamma_poly) {
    v += c * x;
    x *= chi;
  }
  if (w_spec == WSpec::Logarithmic) {
    // smooth part of the logarithmic potential folded into gamma
    v += -2.0 * logw_c1 * chi - logw_c2;
  }
  return v;
}

double MaterialModel::gamma_hat(double chi) const {
  double v = 0.0, x = chi;
  for (std::size_t k = 0; k < gamma_poly.size(); ++k) {
    v += gamma_poly[k] * x / static_cast<double>(k + 1);
    x *= chi;
  }
  return v;
}

double MaterialModel::gamma_lipschitz(double lo, double up) const {
  // bound |gamma'| = |sum k c_k x^{k-1}| on [lo, up]
  const double m = std::max(std::abs(lo), std::abs(up));
  double L = 0.0, x = 1.0;
  for (std::size_t k = 1; k < gamma_poly.size(); ++k) {
    L += static_cast<double>(k) * std::abs(gamma_poly[k]) * x;
    x *= m;
  }
  if (w_spec == WSpec::Logarithmic) L += 2.0 * std::abs(logw_c1);
  return L;
}

void MaterialModel::beta_feasible_interval(double& lo, double& up) const {
  lo = 0.0;
  up = (w_spec == WSpec::IndicatorHalfLine) ? kInf : 1.0;
}

double yosida_beta(double x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("yosida_beta: tau must be positive");
  return std::min(x, 0.0) / tau;
}

double yosida_beta_hat(double x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("yosida_beta: tau must be positive");
  const double n = std::min(x, 0.0);
  return n * n / (2.0 * tau);
}

}  // namespace tvd
