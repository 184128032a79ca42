#pragma once

// Matrix pencil estimation of a real exponential sum
//   y_k = sum_{i=1}^{M} R_i z_i^k + n_k,   k = 0..N-1,
// from uniformly spaced samples. Order from the singular spectrum of the
// (N-L) x (L+1) Hankel matrix Y, poles from the rank-M truncated pencil
// (Y0, Y1), amplitudes from an orthogonal least-squares fit.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatpencil/linalg.hpp"
#include "heatpencil/model.hpp"

namespace heatpencil::pencil {

using linalg::ComplexMatrix;
using linalg::Matrix;
using linalg::Vector;

// Poles with |Im z| / |z| above this are treated as a spurious conjugate pair.
inline constexpr double kRealnessTolerance = 1e-6;
// Poles in (1, 1 + kUnitPoleSlack] are clamped to 1.
inline constexpr double kUnitPoleSlack = 1e-9;
// |rate| < kZeroRateScale / period is clamped to 0.
inline constexpr double kZeroRateScale = 1e-12;

// L = N/3, or floor(N/3) + 1 when 3 does not divide N.
int third_of_n(std::size_t n);

struct PencilConfig {
  enum class Rule { ThirdOfN, Explicit };

  Rule rule = Rule::ThirdOfN;
  int explicit_parameter = 0;
  double singular_threshold = 1e-10;
  std::optional<int> max_order;

  static PencilConfig with_parameter(int pencil_parameter);
  int resolve(std::size_t n) const;
  void validate() const;
};

struct HankelSet {
  Matrix y0;  // columns y_{L-1}, ..., y_0
  Matrix y1;  // columns y_L, ..., y_1
  Matrix y;   // columns y_0, ..., y_L
  int pencil_parameter = 0;
};

HankelSet build_hankel(std::span<const double> samples, int pencil_parameter);
HankelSet build_hankel(const model::SampleTrace& trace, const PencilConfig& config);

struct OrderDetection {
  int order = 0;
  Vector singular_values;
  bool signal_absent = false;  // Y == 0
};

// M = #{sigma_i : sigma_i / sigma_max >= epsilon}, optionally capped.
OrderDetection detect_order(const Matrix& y, double epsilon, std::optional<int> max_order = std::nullopt);

struct PoleEstimate {
  std::vector<double> poles;  // real, descending
  std::vector<std::complex<double>> eigenvalues;  // raw eigenvalues of Z_E
  double sigma_m = 0.0;       // M-th singular value of Y0
  double sigma_next = 0.0;    // (M+1)-th singular value of Y0, 0 if absent
  double y1_norm = 0.0;       // ||Y1||_2
  double y0_trunc_gap = 0.0;  // ||Y_{0,M} - Y0||_2 of the formed reconstruction
  // Unit-column eigenvectors of the L x L matrix Y_{0,M}^+ Y1, ordered by
  // descending eigenvalue magnitude.
  ComplexMatrix eigenvectors;
  std::vector<std::string> warnings;
};

// Eigenvalues of Z_E = A^{-1} U_{0,M}^* Y1 V_{0,M}; complex pairs and
// non-physical poles are dropped with a warning.
PoleEstimate estimate_poles(const HankelSet& hankel, int order);

// lambda_i = -ln(z_i) / period.
std::vector<double> poles_to_rates(std::span<const double> poles, double period);

// Least-squares amplitudes on the trace's own clock (k = 0 at t_start).
std::vector<double> fit_amplitudes(const model::SampleTrace& trace, std::span<const double> rates);

// R_i exp(lambda_i t_start): amplitudes referred to absolute time.
std::vector<double> to_absolute_time(std::span<const double> amplitudes, std::span<const double> rates,
                                     double t_start);

struct PencilEstimate {
  int order = 0;
  int pencil_parameter = 0;
  std::size_t sample_count = 0;
  double period = 0.0;
  double t_start = 0.0;
  std::vector<double> poles;
  std::vector<double> rates;
  std::vector<double> amplitudes;  // local clock
  Vector singular_values;          // of Y
  double sigma_m = 0.0;
  double sigma_next = 0.0;
  double y1_norm = 0.0;
  double y0_trunc_gap = 0.0;
  ComplexMatrix eigenvectors;
  std::vector<std::string> warnings;

  model::ExponentialModel local_model() const;
};

PencilEstimate analyze(const model::SampleTrace& trace, const PencilConfig& config = {});

}  // namespace heatpencil::pencil
