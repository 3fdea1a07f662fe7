#pragma once

#include <array>
#include <limits>
#include <vector>

namespace tvd {

enum class ConductivitySpec { RatioBounded, Power };
enum class PhiSpec { Power, Regularized };
enum class CoeffSpec { Chi, OneMinusChi, Constant };
enum class WSpec { IndicatorUnit, Logarithmic, IndicatorHalfLine };

/// All constitutive data of the model: heat capacity family, conductivity
/// ratio, Lame and viscosity constants, damage coefficients a,b, gradient
/// potential phi, double-well W, thermal expansion, truncation level.
struct MaterialModel {
  // heat capacity c(theta) = c0 (1+theta)^(sigma-1); bounds c0<=c1, sigma<=sigma1
  double c0 = 1.0, c1 = 1.0;
  double sigma = 2.0, sigma1 = 2.0;

  ConductivitySpec conductivity_spec = ConductivitySpec::RatioBounded;
  double c2 = 1.0, c3 = 1.0;    // ratio-bounded mode: K in [c2, cbar]
  double c10 = 1.0, q = 1.0;    // power mode: K(w) = c10 (w^{2q} + 1)

  double lambda1 = 1.0, lambda2 = 1.0;  // R_e eps = lambda1 tr(eps) I + 2 lambda2 eps
  double ell1 = 1.0, ell2 = 1.0;        // R_v eps = ell1 tr(eps) I + 2 ell2 eps

  double rho = 0.0;    // thermal expansion coefficient
  int mu = 0;          // 0 reversible, 1 irreversible
  double delta = 0.1;  // elliptic truncation
  bool degenerate_mode = false;  // a=b=chi with both coefficients replaced by chi+delta

  double p = 4.0;  // gradient exponent, p > dim
  PhiSpec phi_spec = PhiSpec::Power;

  CoeffSpec a_spec = CoeffSpec::Chi;
  CoeffSpec b_spec = CoeffSpec::Chi;
  double a_const = 1.0, b_const = 1.0;

  WSpec w_spec = WSpec::IndicatorUnit;
  double logw_c1 = 0.0, logw_c2 = 0.0, logw_c3 = 0.0;
  std::vector<double> gamma_poly;  // coefficients of gamma = hat{gamma}', low order first

  double M = 10.0;  // truncation level for the thermal-expansion scheme

  void validate(int dim) const;

  // --- heat capacity / enthalpy -------------------------------------------
  double heat_capacity(double theta) const;
  double enthalpy(double theta) const;          // h(theta), closed form
  double theta_of_w(double w) const;            // Theta(w), closed-form inverse
  double theta_of_w_bisect(double w) const;     // independent bisection oracle

  // --- conductivity ratio and truncations ---------------------------------
  double conductivity_ratio(double w) const;    // K(w)
  double K_M(double r) const;
  double Theta_M(double r) const;
  static double T_M(double r, double M);

  // --- gradient potential phi and its flux d = grad phi -------------------
  double phi(const std::array<double, 2>& zeta, int dim) const;
  std::array<double, 2> flux_d(const std::array<double, 2>& zeta, int dim) const;

  // --- damage coefficients -------------------------------------------------
  double a(double chi) const;
  double b(double chi) const;
  double b_prime(double chi) const;

  // --- potential W = hat{beta} + hat{gamma} --------------------------------
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double W_value(double chi) const;     // +inf outside dom(hat beta)
  double gamma(double chi) const;       // hat{gamma}'
  double gamma_hat(double chi) const;
  double gamma_lipschitz(double lo, double up) const;  // bound for gamma' on [lo,up]
  /// Feasible box encoded by hat{beta}: [0,1], open (0,1), or [0,inf).
  void beta_feasible_interval(double& lo, double& up) const;
};

/// Yosida regularization of the half-line indicator I_[0,inf):
/// beta_tau(x) = min(x,0)/tau, with primitive min(x,0)^2 / (2 tau).
double yosida_beta(double x, double tau);
double yosida_beta_hat(double x, double tau);

}  // namespace tvd
