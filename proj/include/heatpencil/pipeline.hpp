#pragma once

// Simultaneous identification of the diffusivity and the initial state from
// one boundary trace under a step Neumann control:
//   step 1  pencil on the control-free window -> free modes (lambda~, C~)
//   step 3  subtract the free part, pencil on the controlled window -> alpha
//   step 4  mode indices n_k, refined alpha, TSVD/GCV reconstruction of u0

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatpencil/bounds.hpp"
#include "heatpencil/linalg.hpp"
#include "heatpencil/model.hpp"
#include "heatpencil/pencil.hpp"

namespace heatpencil::pipeline {

using linalg::Matrix;
using linalg::Vector;

struct PipelineConfig {
  int n1 = 50;      // samples on [T1, T2)
  int n2 = 50;      // samples on [T2, T3)
  double epsilon = 1e-10;
  double t0 = 0.01;  // reconstruction window [T0, T2)
  int m_tilde = 20;
  int n_rec = 79;
  // |C'_n lambda'_n / (2 T'_s) - 1| <= credibility_tol marks a credible pair.
  double credibility_tol = 1e-3;
  std::optional<int> max_order;

  void validate() const;
  pencil::PencilConfig pencil() const;
};

struct Priors {
  double m0 = 0.0;
  double alpha0 = 0.0;
};

struct Traces {
  model::SampleTrace free;  // [T1, T2)
  model::SampleTrace step;  // [T2, T3)
  model::SampleTrace rec;   // [T0, T2)
};

// Samples the three windows using t_i = Ta + i (Tb - Ta) / N.
Traces simulate(const model::HeatProblem& problem, const PipelineConfig& config);

struct FreeMode {
  double rate = 0.0;
  double coefficient = 0.0;  // absolute time: y(t) ~ sum C exp(-rate t)
  double pole = 0.0;
};

struct FreeSpectrum {
  std::vector<FreeMode> modes;  // ascending rate
  pencil::PencilEstimate estimate;
};

FreeSpectrum step1_free_spectrum(const model::SampleTrace& free_trace, const PipelineConfig& config);

// y'_i = y(t_i) - sum C~ exp(-lambda~ t_i) + T'_s i
model::SampleTrace step3_transform(const model::SampleTrace& step_trace, std::span<const FreeMode> modes, double t2);

struct ControlledPair {
  int index = 0;             // 0 for the constant mode
  double coefficient = 0.0;  // C'_n
  double rate = 0.0;         // lambda'_n, per sample
  double credibility = 0.0;  // C'_n lambda'_n / (2 T'_s)
  bool credible = false;
  std::optional<double> alpha;  // lambda'_n / (n^2 pi^2 T'_s) for credible pairs
};

struct Step3Result {
  pencil::PencilEstimate estimate;
  std::vector<ControlledPair> pairs;  // ascending rate
  std::optional<double> alpha_constant;  // -1/(3 C'_0)
  double alpha = 0.0;                    // median of credible estimates
};

Step3Result step3_alpha(const model::SampleTrace& step_trace, std::span<const FreeMode> modes,
                        const PipelineConfig& config);

struct IndexAssignment {
  std::vector<int> indices;
  std::vector<std::optional<double>> alpha_k;
  double alpha_hat = 0.0;
};

IndexAssignment step4_assign_indices(std::span<const double> free_rates, double alpha_step3);

// C(i, j) = exp(-alpha j^2 pi^2 t_i), zero-based j.
Matrix build_design_matrix(double alpha, std::span<const double> times, int m_tilde);

class TruncatedSvd {
 public:
  explicit TruncatedSvd(const Matrix& c);

  int rank() const noexcept { return rank_; }
  const Vector& singular_values() const noexcept { return svd_.singularValues(); }
  // sum_{i<k} (u_i^T b / sigma_i) v_i
  Vector solve(const Vector& b, int k) const;

 private:
  Eigen::JacobiSVD<Matrix> svd_;
  int rank_ = 0;
};

Vector tsvd_solve(const Matrix& c, const Vector& b, int k);

struct GcvSelection {
  int k = 0;
  int rank = 0;
  std::vector<double> curve;      // curve[k-1] = G(k), k = 1..rank
  std::vector<double> residuals;  // ||C A_reg(k) - b||^2
};

GcvSelection gcv_select(const Matrix& c, const Vector& b);

struct CertificateInputs {
  int m = 0;
  int n = 0;
  int l = 0;
  double t1 = 0.0;
  double ts = 0.0;
  double sigma_m = 0.0;
  double sigma_next = 0.0;
  double y1_norm = 0.0;
  double y0_trunc_gap = 0.0;
  std::optional<double> kappa_xm;
  std::vector<bounds::ModeInput> modes;

  bounds::BoundInputs with_priors(const Priors& priors) const;
};

struct IdentificationResult {
  double alpha_hat = 0.0;
  FreeSpectrum step1;
  Step3Result step3;
  IndexAssignment step4;
  std::vector<double> u0_coeffs_hat;
  GcvSelection gcv;
  CertificateInputs certificate_inputs;
  std::optional<Priors> priors;
  std::optional<bounds::ErrorCertificate> certificate;
  std::string certificate_error;
  std::vector<std::string> warnings;
};

IdentificationResult identify(const model::SampleTrace& free_trace, const model::SampleTrace& step_trace,
                              const model::SampleTrace& rec_trace, const PipelineConfig& config,
                              std::optional<Priors> priors = std::nullopt);

// Certificate from stored diagnostics; rethrows CertificateUnavailable / Defective.
bounds::ErrorCertificate certify(const CertificateInputs& inputs, const Priors& priors,
                                 std::optional<double> alpha_hat);

double median(std::vector<double> values);

}  // namespace heatpencil::pipeline
