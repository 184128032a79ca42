#pragma once

// Forward model of the 1-D heat equation on [0,1] with insulated right end,
// Neumann flux control at x = 0 and boundary observation y(t) = u(0,t).
//
// The initial state is carried by its cosine coefficients
//   u0(x) = C0 + sum_{n>=1} Cn cos(n pi x),
// so the observation is an exact Dirichlet series
//   y(t) = sum_n Cn exp(-alpha n^2 pi^2 t) - int_0^t G(t-s,0,0) f(s) ds.

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace heatpencil::model {

struct HeatProblem {
  double alpha = 1.0;
  std::map<int, double> u0_coeffs;  // mode index n -> Cn
  double t1 = 0.0;                  // free-response window [t1, t2)
  double t2 = 0.0;                  // control switched on at t2
  double t3 = 0.0;                  // controlled window [t2, t3)
  double control_amplitude = 1.0;
  // Number of terms kept in the kernel series sum 2/lambda_n exp(-lambda_n s).
  // 0 sums to convergence; a positive value truncates the series (the
  // reference experiment was generated with 200).
  int kernel_terms = 0;

  // Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

struct SampleTrace {
  double t_start = 0.0;
  double period = 0.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t i) const noexcept { return t_start + static_cast<double>(i) * period; }
  std::vector<double> times() const;
  void validate() const;
};

// Finite Dirichlet sum  sum_k amplitude_k exp(-rate_k t).
struct ExponentialModel {
  struct Term {
    double amplitude = 0.0;
    double rate = 0.0;
  };
  std::vector<Term> terms;  // rates strictly increasing

  double evaluate(double t) const;
  void validate() const;
};

double eigenvalue(double alpha, int n);

// Cosine coefficients of u0 on [0,1]: C0 = int u0, Cn = 2 int u0 cos(n pi x).
// Adaptive Simpson with Richardson correction, absolute error <= 1e-10 per
// coefficient; throws ErrorCode::Quadrature if 2^20 panels do not suffice.
std::vector<double> cosine_coefficients(const std::function<double(double)>& u0, int n_max);

// Builds a problem from a tabulated or symbolic initial state.
HeatProblem problem_from_function(double alpha, const std::function<double(double)>& u0, int n_max,
                                  double t1, double t2, double t3, double control_amplitude = 1.0);

// Squared L2(0,1) norm of the cosine sum (Parseval).
double l2_norm_squared(const std::map<int, double>& coeffs);

// Evaluates sum_n Cn cos(n pi x).
double evaluate_cosine_series(const std::map<int, double>& coeffs, double x);
double evaluate_cosine_series(const std::vector<double>& coeffs, double x);

// Control-free observation sum_n Cn exp(-lambda_n t); requires t > 0.
double free_response(const HeatProblem& problem, double t);

// -int_0^delta G(s,0,0) ds for a unit step applied delta time units ago,
// i.e. -1/(3 alpha) - delta + sum_{n>=1} 2/lambda_n exp(-lambda_n delta).
double unit_step_kernel_response(double alpha, double delta, int kernel_terms = 0);

// Observation after the control is switched on; requires t >= t2.
double step_response(const HeatProblem& problem, double t);

// Observation under the piecewise control schedule (zero before t2).
double observe(const HeatProblem& problem, double t);

SampleTrace sample(const HeatProblem& problem, double t_start, double period, std::size_t count);

}  // namespace heatpencil::model
