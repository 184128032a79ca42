#include "heatpencil/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "heatpencil/error.hpp"

namespace heatpencil::pipeline {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWindowTolerance = 1e-12;
constexpr double kConstantModeRate = 1e-8;

template <typename F>
auto with_step(const char* step, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(step) + ": " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  require(n1 >= 9 && n2 >= 9, "n1 and n2 must be at least 9");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
  require(t0 > 0.0, "t0 must be positive");
  require(m_tilde >= 1, "m_tilde must be at least 1");
  require(n_rec >= 1, "n_rec must be at least 1");
  require(credibility_tol > 0.0, "credibility_tol must be positive");
  if (max_order) require(*max_order >= 1, "max_order must be at least 1");
}

pencil::PencilConfig PipelineConfig::pencil() const {
  pencil::PencilConfig c;
  c.singular_threshold = epsilon;
  c.max_order = max_order;
  return c;
}

Traces simulate(const model::HeatProblem& problem, const PipelineConfig& config) {
  problem.validate();
  config.validate();
  require(config.t0 < problem.t2, "t0 must precede t2");
  Traces out;
  out.free = model::sample(problem, problem.t1, (problem.t2 - problem.t1) / config.n1, config.n1);
  out.step = model::sample(problem, problem.t2, (problem.t3 - problem.t2) / config.n2, config.n2);
  out.rec = model::sample(problem, config.t0, (problem.t2 - config.t0) / config.n_rec, config.n_rec);
  return out;
}

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

FreeSpectrum step1_free_spectrum(const model::SampleTrace& free_trace, const PipelineConfig& config) {
  config.validate();
  FreeSpectrum out;
  out.estimate = pencil::analyze(free_trace, config.pencil());
  if (out.estimate.order == 0) fail(ErrorCode::NoModes, "no detectable modes in the free-response window");
  const std::vector<double> absolute =
      pencil::to_absolute_time(out.estimate.amplitudes, out.estimate.rates, free_trace.t_start);
  for (std::size_t i = 0; i < absolute.size(); ++i) {
    out.modes.push_back({out.estimate.rates[i], absolute[i], out.estimate.poles[i]});
  }
  return out;
}

model::SampleTrace step3_transform(const model::SampleTrace& step_trace, std::span<const FreeMode> modes, double t2) {
  step_trace.validate();
  if (std::abs(step_trace.t_start - t2) > kWindowTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "controlled trace starts at " << step_trace.t_start << ", expected t2 = " << t2;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  model::SampleTrace out = step_trace;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = step_trace.time(i);
    double free = 0.0;
    for (const FreeMode& m : modes) free += m.coefficient * std::exp(-m.rate * t);
    out.values[i] = step_trace.values[i] - free + step_trace.period * static_cast<double>(i);
  }
  return out;
}

Step3Result step3_alpha(const model::SampleTrace& step_trace, std::span<const FreeMode> modes,
                        const PipelineConfig& config) {
  config.validate();
  const model::SampleTrace transformed = step3_transform(step_trace, modes, step_trace.t_start);
  const double ts = step_trace.period;

  Step3Result out;
  out.estimate = pencil::analyze(transformed, config.pencil());

  std::vector<double> pool;
  int ordinal = 0;
  for (std::size_t i = 0; i < out.estimate.rates.size(); ++i) {
    ControlledPair p;
    p.coefficient = out.estimate.amplitudes[i];
    p.rate = out.estimate.rates[i] * ts;
    if (p.rate <= kConstantModeRate) {
      p.index = 0;
      if (p.coefficient < 0.0) {
        out.alpha_constant = -1.0 / (3.0 * p.coefficient);
        pool.push_back(*out.alpha_constant);
      } else {
        out.estimate.warnings.push_back("constant mode has a nonnegative coefficient; -1/(3 C'0) skipped");
      }
    } else {
      p.index = ++ordinal;
      p.credibility = p.coefficient * p.rate / (2.0 * ts);
      p.credible = std::abs(p.credibility - 1.0) <= config.credibility_tol;
      if (p.credible) {
        const double nn = static_cast<double>(p.index);
        p.alpha = p.rate / (nn * nn * kPi * kPi * ts);
        pool.push_back(*p.alpha);
      }
    }
    out.pairs.push_back(p);
  }
  if (pool.empty()) {
    fail(ErrorCode::AlphaUnrecoverable, "alpha unrecoverable from controlled window (no credible pair, no constant mode)");
  }
  out.alpha = median(std::move(pool));
  return out;
}

IndexAssignment step4_assign_indices(std::span<const double> free_rates, double alpha_step3) {
  require(alpha_step3 > 0.0 && std::isfinite(alpha_step3), "alpha estimate must be positive");
  IndexAssignment out;
  std::set<int> seen;
  std::vector<double> pool{alpha_step3};
  for (const double rate : free_rates) {
    require(rate >= 0.0, "free rates must be nonnegative");
    const int n = rate == 0.0 ? 0 : static_cast<int>(std::llround(std::sqrt(rate / (alpha_step3 * kPi * kPi))));
    if (!seen.insert(n).second) {
      std::ostringstream msg;
      msg << "two free rates map to mode index " << n << "; change the window or threshold";
      fail(ErrorCode::AmbiguousIndex, msg.str());
    }
    out.indices.push_back(n);
    if (n == 0) {
      out.alpha_k.push_back(std::nullopt);
    } else {
      const double nn = static_cast<double>(n);
      out.alpha_k.push_back(rate / (nn * nn * kPi * kPi));
      pool.push_back(*out.alpha_k.back());
    }
  }
  out.alpha_hat = median(std::move(pool));
  return out;
}

Matrix build_design_matrix(double alpha, std::span<const double> times, int m_tilde) {
  require(alpha > 0.0, "alpha must be positive");
  require(m_tilde >= 1, "m_tilde must be at least 1");
  require(!times.empty(), "design matrix needs at least one time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] > 0.0, "design times must be positive");
    if (i > 0) require(times[i] > times[i - 1], "design times must be strictly increasing");
  }
  Matrix c(static_cast<linalg::Index>(times.size()), m_tilde);
  for (linalg::Index i = 0; i < c.rows(); ++i) {
    for (int j = 0; j < m_tilde; ++j) c(i, j) = std::exp(-model::eigenvalue(alpha, j) * times[static_cast<std::size_t>(i)]);
  }
  return c;
}

TruncatedSvd::TruncatedSvd(const Matrix& c) : svd_(c, Eigen::ComputeThinU | Eigen::ComputeThinV) {
  rank_ = linalg::numerical_rank(svd_.singularValues(), c.rows(), c.cols());
}

Vector TruncatedSvd::solve(const Vector& b, int k) const {
  require(b.size() == svd_.matrixU().rows(), "right-hand side length must match the row count");
  if (k < 1 || k > rank_) {
    std::ostringstream msg;
    msg << "truncation rank k = " << k << " must satisfy 1 <= k <= rank(C) = " << rank_;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  Vector x = Vector::Zero(svd_.matrixV().rows());
  for (int i = 0; i < k; ++i) {
    x += (svd_.matrixU().col(i).dot(b) / svd_.singularValues()(i)) * svd_.matrixV().col(i);
  }
  return x;
}

Vector tsvd_solve(const Matrix& c, const Vector& b, int k) { return TruncatedSvd(c).solve(b, k); }

GcvSelection gcv_select(const Matrix& c, const Vector& b) {
  const TruncatedSvd tsvd(c);
  require(tsvd.rank() >= 1, "GCV needs a nonzero design matrix");
  const auto n = static_cast<double>(c.rows());
  // Residuals at the rounding level of forming C x - b count as exact fits.
  const double floor = static_cast<double>(std::max(c.rows(), c.cols())) * std::numeric_limits<double>::epsilon() * b.norm();

  GcvSelection out;
  out.rank = tsvd.rank();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= out.rank; ++k) {
    const Vector x = tsvd.solve(b, k);
    const double r = (c * x - b).squaredNorm();
    out.residuals.push_back(r);
    const double r_eff = std::sqrt(r) <= floor ? 0.0 : r;
    const double dof = n - static_cast<double>(k);
    const double g = dof > 0.0 ? r_eff / (dof * dof) : (r_eff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    out.curve.push_back(g);
    if (g < best) {
      best = g;
      out.k = k;
    }
  }
  return out;
}

bounds::BoundInputs CertificateInputs::with_priors(const Priors& priors) const {
  if (!kappa_xm) fail(ErrorCode::Defective, "kappa(X_M) unavailable: eigenvector matrix is singular");
  bounds::BoundInputs in;
  in.m0 = priors.m0;
  in.alpha0 = priors.alpha0;
  in.m = m;
  in.n = n;
  in.l = l;
  in.t1 = t1;
  in.ts = ts;
  in.sigma_m = sigma_m;
  in.y1_norm = y1_norm;
  in.y0_trunc_gap = y0_trunc_gap;
  in.kappa_xm = *kappa_xm;
  return in;
}

bounds::ErrorCertificate certify(const CertificateInputs& inputs, const Priors& priors,
                                 std::optional<double> alpha_hat) {
  return bounds::certify(inputs.with_priors(priors), alpha_hat, inputs.modes);
}

IdentificationResult identify(const model::SampleTrace& free_trace, const model::SampleTrace& step_trace,
                              const model::SampleTrace& rec_trace, const PipelineConfig& config,
                              std::optional<Priors> priors) {
  config.validate();
  free_trace.validate();
  step_trace.validate();
  rec_trace.validate();
  const double t2 = step_trace.t_start;
  const double slack = 1e-9 * std::max(1.0, std::abs(t2));
  require(free_trace.t_start + static_cast<double>(free_trace.size() - 1) * free_trace.period < t2 + slack,
          "free-response trace must end before the control switches on");
  require(rec_trace.t_start + static_cast<double>(rec_trace.size() - 1) * rec_trace.period < t2 + slack,
          "reconstruction trace must end before the control switches on");

  IdentificationResult out;
  out.step1 = with_step("step 1", [&] { return step1_free_spectrum(free_trace, config); });
  out.step3 = with_step("step 3", [&] { return step3_alpha(step_trace, out.step1.modes, config); });

  std::vector<double> rates;
  for (const FreeMode& m : out.step1.modes) rates.push_back(m.rate);
  out.step4 = with_step("step 4", [&] { return step4_assign_indices(rates, out.step3.alpha); });
  out.alpha_hat = out.step4.alpha_hat;

  with_step("step 4 reconstruction", [&] {
    const std::vector<double> times = rec_trace.times();
    const Matrix c = build_design_matrix(out.alpha_hat, times, config.m_tilde);
    const Vector b = Eigen::Map<const Vector>(rec_trace.values.data(), static_cast<linalg::Index>(rec_trace.size()));
    out.gcv = gcv_select(c, b);
    const Vector a = tsvd_solve(c, b, out.gcv.k);
    out.u0_coeffs_hat.assign(a.data(), a.data() + a.size());
  });

  const pencil::PencilEstimate& est = out.step1.estimate;
  CertificateInputs& ci = out.certificate_inputs;
  ci.m = est.order;
  ci.n = static_cast<int>(est.sample_count);
  ci.l = est.pencil_parameter;
  ci.t1 = est.t_start;
  ci.ts = est.period;
  ci.sigma_m = est.sigma_m;
  ci.sigma_next = est.sigma_next;
  ci.y1_norm = est.y1_norm;
  ci.y0_trunc_gap = est.y0_trunc_gap;
  for (std::size_t i = 0; i < out.step1.modes.size(); ++i) {
    ci.modes.push_back({out.step4.indices[i], out.step1.modes[i].pole});
  }
  try {
    ci.kappa_xm = bounds::kappa(est.eigenvectors);
  } catch (const Error& e) {
    out.certificate_error = e.what();
  }

  out.priors = priors;
  if (priors) {
    try {
      out.certificate = certify(ci, *priors, out.alpha_hat);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CertificateUnavailable && e.code() != ErrorCode::Defective &&
          e.code() != ErrorCode::HypothesisViolated) {
        throw;
      }
      out.certificate_error = e.what();
    }
  }

  for (const auto* list : {&out.step1.estimate.warnings, &out.step3.estimate.warnings}) {
    out.warnings.insert(out.warnings.end(), list->begin(), list->end());
  }
  if (out.certificate) out.warnings.insert(out.warnings.end(), out.certificate->warnings.begin(), out.certificate->warnings.end());
  return out;
}

}  // namespace heatpencil::pipeline
