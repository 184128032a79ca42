#include "heatpencil/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "heatpencil/error.hpp"

namespace heatpencil::pencil {

using linalg::Index;

int third_of_n(std::size_t n) {
  const auto third = static_cast<int>(n / 3);
  return (n % 3 == 0) ? third : third + 1;
}

PencilConfig PencilConfig::with_parameter(int pencil_parameter) {
  PencilConfig c;
  c.rule = Rule::Explicit;
  c.explicit_parameter = pencil_parameter;
  return c;
}

int PencilConfig::resolve(std::size_t n) const {
  if (rule == Rule::Explicit) return explicit_parameter;
  require(n >= 9, "matrix pencil needs at least 9 samples");
  return third_of_n(n);
}

void PencilConfig::validate() const {
  require(singular_threshold > 0.0 && singular_threshold < 1.0, "singular threshold must lie in (0,1)");
  if (max_order) require(*max_order >= 0, "max_order must be nonnegative");
  if (rule == Rule::Explicit) require(explicit_parameter >= 1, "pencil parameter must be at least 1");
}

HankelSet build_hankel(std::span<const double> samples, int pencil_parameter) {
  const auto n = static_cast<Index>(samples.size());
  const Index l = pencil_parameter;
  require(l >= 1 && l <= n - 1, "pencil parameter must satisfy 1 <= L <= N-1");
  const Index rows = n - l;

  HankelSet h;
  h.pencil_parameter = pencil_parameter;
  h.y0.resize(rows, l);
  h.y1.resize(rows, l);
  h.y.resize(rows, l + 1);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < l; ++c) {
      h.y0(r, c) = samples[static_cast<std::size_t>(l - 1 - c + r)];
      h.y1(r, c) = samples[static_cast<std::size_t>(l - c + r)];
    }
    for (Index c = 0; c <= l; ++c) h.y(r, c) = samples[static_cast<std::size_t>(c + r)];
  }
  return h;
}

HankelSet build_hankel(const model::SampleTrace& trace, const PencilConfig& config) {
  trace.validate();
  config.validate();
  return build_hankel(trace.values, config.resolve(trace.size()));
}

OrderDetection detect_order(const Matrix& y, double epsilon, std::optional<int> max_order) {
  OrderDetection out;
  out.singular_values = linalg::singular_values(y);
  if (out.singular_values.size() == 0 || out.singular_values(0) == 0.0) {
    out.signal_absent = true;
    return out;
  }
  const double sigma_max = out.singular_values(0);
  for (Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) / sigma_max >= epsilon) ++out.order;
  }
  if (max_order) out.order = std::min(out.order, *max_order);
  return out;
}

namespace {

ComplexMatrix ordered_unit_eigenvectors(const Matrix& product) {
  Eigen::EigenSolver<Matrix> es(product, true);
  const auto& values = es.eigenvalues();
  ComplexMatrix vectors = es.eigenvectors();
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(values(a)) > std::abs(values(b)); });
  ComplexMatrix out(vectors.rows(), vectors.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto col = vectors.col(order[j]);
    const double norm = col.norm();
    out.col(static_cast<Index>(j)) = norm > 0.0 ? ComplexMatrix(col / norm) : ComplexMatrix(col);
  }
  return out;
}

}  // namespace

PoleEstimate estimate_poles(const HankelSet& hankel, int order) {
  const Index rows = hankel.y0.rows();
  const Index cols = hankel.y0.cols();
  require(order >= 1 && order <= std::min(rows, cols), "pencil order must satisfy 1 <= M <= min(N-L, L)");

  Eigen::JacobiSVD<Matrix> svd(hankel.y0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  PoleEstimate out;
  out.sigma_m = s(order - 1);
  if (out.sigma_m == 0.0) {
    fail(ErrorCode::RankDeficient, "sigma_M of Y0 is zero: the model order is overstated");
  }
  out.sigma_next = order < s.size() ? s(order) : 0.0;

  const Matrix um = svd.matrixU().leftCols(order);
  const Matrix vm = svd.matrixV().leftCols(order);
  const Vector inv_sigma = s.head(order).cwiseInverse();

  const Matrix ze = inv_sigma.asDiagonal() * (um.transpose() * hankel.y1 * vm);
  Eigen::EigenSolver<Matrix> es(ze, false);
  const auto& eig = es.eigenvalues();

  const Matrix y0m = um * s.head(order).asDiagonal() * vm.transpose();
  out.y0_trunc_gap = linalg::spectral_norm(Matrix(y0m - hankel.y0));
  out.y1_norm = linalg::spectral_norm(hankel.y1);

  const Matrix product = vm * inv_sigma.asDiagonal() * (um.transpose() * hankel.y1);
  out.eigenvectors = ordered_unit_eigenvectors(product);

  for (Index i = 0; i < eig.size(); ++i) {
    const std::complex<double> z = eig(i);
    out.eigenvalues.push_back(z);
    const double mag = std::abs(z);
    std::ostringstream msg;
    if (mag > 0.0 && std::abs(z.imag()) / mag > kRealnessTolerance) {
      msg << "discarded complex pole " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
      out.warnings.push_back(msg.str());
      continue;
    }
    double re = z.real();
    if (re <= 0.0) {
      msg << "discarded non-positive pole " << re;
      out.warnings.push_back(msg.str());
      continue;
    }
    if (re > 1.0 + kUnitPoleSlack) {
      msg << "discarded growing pole " << re;
      out.warnings.push_back(msg.str());
      continue;
    }
    out.poles.push_back(std::min(re, 1.0));
  }
  std::sort(out.poles.begin(), out.poles.end(), std::greater<>());
  return out;
}

std::vector<double> poles_to_rates(std::span<const double> poles, double period) {
  require(period > 0.0, "sampling period must be positive");
  std::vector<double> rates;
  rates.reserve(poles.size());
  for (const double z : poles) {
    if (!(z > 0.0)) fail(ErrorCode::Domain, "pole must be positive to define a decay rate");
    double rate = -std::log(z) / period;
    if (std::abs(rate) < kZeroRateScale / period) rate = 0.0;
    rates.push_back(rate);
  }
  return rates;
}

std::vector<double> fit_amplitudes(const model::SampleTrace& trace, std::span<const double> rates) {
  trace.validate();
  if (rates.empty()) return {};
  const auto n = static_cast<Index>(trace.size());
  const auto m = static_cast<Index>(rates.size());
  require(n >= m, "need at least as many samples as rates");

  Matrix design(n, m);
  for (Index i = 0; i < m; ++i) {
    const double z = std::exp(-rates[static_cast<std::size_t>(i)] * trace.period);
    double power = 1.0;
    for (Index k = 0; k < n; ++k) {
      design(k, i) = power;
      power *= z;
    }
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < m) {
    std::size_t a = 0, b = 1;
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rates.size(); ++i) {
      for (std::size_t j = i + 1; j < rates.size(); ++j) {
        if (std::abs(rates[i] - rates[j]) < closest) {
          closest = std::abs(rates[i] - rates[j]);
          a = i;
          b = j;
        }
      }
    }
    std::ostringstream msg;
    msg.precision(10);
    msg << "amplitude design matrix is rank deficient; closest rates are " << rates[a] << " and " << rates[b];
    fail(ErrorCode::RankDeficient, msg.str());
  }
  const Vector y = Eigen::Map<const Vector>(trace.values.data(), n);
  const Vector r = qr.solve(y);
  return {r.data(), r.data() + r.size()};
}

std::vector<double> to_absolute_time(std::span<const double> amplitudes, std::span<const double> rates,
                                     double t_start) {
  require(amplitudes.size() == rates.size(), "amplitudes and rates must align");
  std::vector<double> out(amplitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitudes[i] * std::exp(rates[i] * t_start);
  return out;
}

model::ExponentialModel PencilEstimate::local_model() const {
  model::ExponentialModel m;
  for (std::size_t i = rates.size(); i-- > 0;) m.terms.push_back({amplitudes[i], rates[i] * period});
  return m;
}

PencilEstimate analyze(const model::SampleTrace& trace, const PencilConfig& config) {
  const HankelSet hankel = build_hankel(trace, config);

  PencilEstimate out;
  out.pencil_parameter = hankel.pencil_parameter;
  out.sample_count = trace.size();
  out.period = trace.period;
  out.t_start = trace.t_start;

  const OrderDetection detection = detect_order(hankel.y, config.singular_threshold, config.max_order);
  out.singular_values = detection.singular_values;
  if (detection.signal_absent || detection.order == 0) return out;

  const auto rows = static_cast<int>(hankel.y0.rows());
  const int l = hankel.pencil_parameter;
  if (detection.order > std::min(rows, l)) {
    std::ostringstream msg;
    msg << "detected order " << detection.order << " violates M <= L <= N-M for L = " << l;
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  PoleEstimate poles = estimate_poles(hankel, detection.order);
  out.poles = std::move(poles.poles);
  out.order = static_cast<int>(out.poles.size());
  out.sigma_m = poles.sigma_m;
  out.sigma_next = poles.sigma_next;
  out.y1_norm = poles.y1_norm;
  out.y0_trunc_gap = poles.y0_trunc_gap;
  out.eigenvectors = std::move(poles.eigenvectors);
  out.warnings = std::move(poles.warnings);

  out.rates = poles_to_rates(out.poles, trace.period);
  out.amplitudes = fit_amplitudes(trace, out.rates);
  return out;
}

}  // namespace heatpencil::pencil
