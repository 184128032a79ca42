#pragma once

// Error certificate for the pencil estimate of a truncated Dirichlet series.
//
// With a priori bounds ||u0||_{L2} <= M0 and alpha >= alpha0, the discarded
// tail sum_{n>=M} Cn exp(-lambda_n t) is a deterministic perturbation of the
// Hankel data. Its Frobenius size, the pseudo-inverse perturbation and the
// Bauer-Fike theorem combine into a bound on |z~ - z| and from there on the
// eigenvalue and diffusivity errors.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatpencil/linalg.hpp"

namespace heatpencil::bounds {

inline constexpr double kGoldenRatio = 1.6180339887498948482;  // (1 + sqrt 5) / 2

struct BoundInputs {
  double m0 = 0.0;      // ||u0||_{L2} <= m0
  double alpha0 = 0.0;  // alpha >= alpha0
  int m = 0;            // retained model order
  int n = 0;            // sample count
  int l = 0;            // pencil parameter
  double t1 = 0.0;      // window start
  double ts = 0.0;      // sampling period
  double sigma_m = 0.0;
  double y1_norm = 0.0;
  double y0_trunc_gap = 0.0;
  double kappa_xm = 1.0;

  void validate() const;
};

// (sqrt 2 + 1/(4 M pi^2 alpha0 t)) M0 exp(-alpha0 M^2 pi^2 t)
double tail_bound(double m0, double alpha0, int m, double t);

// theta = 2 alpha0 M^2 pi^2 Ts
double theta(double alpha0, int m, double ts);

// Piecewise M_{theta,L}, implemented verbatim (it jumps at theta = 1/(L-1)).
double m_theta_l(double theta, int l);

// True within 1% of either breakpoint theta = 1 or theta = 1/(L-1).
bool m_theta_l_near_breakpoint(double theta, int l);

struct FrobeniusBounds {
  double y0 = 0.0;  // bound on ||Y0 - X0||_F
  double y1 = 0.0;  // bound on ||Y1 - X1||_F
};

FrobeniusBounds frobenius_bounds(const BoundInputs& in);

double rho(const BoundInputs& in);

struct PoleBound {
  double general = 0.0;          // valid for every theta
  std::optional<double> special; // only when theta > 1/(L-1)
  double value = 0.0;            // special when available, else general
};

// Throws CertificateUnavailable when rho >= 1.
PoleBound pole_error_bound(const BoundInputs& in);

struct AlphaBound {
  double eigenvalue_bound = 0.0;
  double alpha_bound = 0.0;
  bool substitution_justified = true;  // pole_bound <= 0.1 z~
};

// Mean-value bound with z-bar replaced by z~; mode_index 0 carries no
// information about alpha and is rejected.
AlphaBound alpha_error_bound(double pole_bound, double z_tilde, double ts, int mode_index);

// sigma_max / sigma_min; throws Defective when the matrix is numerically singular.
double kappa(const linalg::ComplexMatrix& x);
double kappa(const linalg::Matrix& x);

struct ModeInput {
  int index = 0;
  double pole = 0.0;
};

struct ModeBound {
  int index = 0;
  double pole = 0.0;
  double eigenvalue_bound = 0.0;
  std::optional<double> alpha_bound;
  bool substitution_justified = true;
};

struct ErrorCertificate {
  BoundInputs inputs;
  double theta = 0.0;
  double m_theta_l = 0.0;
  double m_theta_l1 = 0.0;  // M_{theta,L+1}
  bool special_branch = false;  // theta > 1/(L-1)
  bool near_breakpoint = false;
  double tail_bound = 0.0;  // at t = T1
  double frob_y0 = 0.0;
  double frob_y1 = 0.0;
  double rho = 0.0;
  PoleBound pole;
  std::vector<ModeBound> modes;
  std::optional<double> alpha_hat;
  std::optional<double> alpha_bound;  // tightest over modes with index != 0
  std::optional<int> alpha_bound_mode;
  std::vector<std::string> warnings;

  std::optional<std::pair<double, double>> alpha_interval() const;
};

ErrorCertificate certify(const BoundInputs& in, std::optional<double> alpha_hat, std::span<const ModeInput> modes);

}  // namespace heatpencil::bounds
