#include "heatpencil/model.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "heatpencil/error.hpp"

namespace heatpencil::model {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCoefficientTolerance = 1e-10;
constexpr std::size_t kMaxPanels = std::size_t{1} << 20;
constexpr long kMaxKernelTerms = 1000000;
// Below this value of alpha*pi^2*delta the kernel series is replaced by its
// image-sum form, which converges in a handful of terms there.
constexpr double kImageSumThreshold = 1e-6;

// Adaptive Simpson over [a,b] with a Richardson-corrected acceptance test.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        std::size_t initial_panels) {
  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
  };
  std::vector<Panel> stack;
  stack.reserve(64);
  const double width = (b - a) / static_cast<double>(initial_panels);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = (i + 1 == initial_panels) ? b : lo + width;
    const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    stack.push_back({lo, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi),
                     tol / static_cast<double>(initial_panels)});
  }

  std::size_t panels = initial_panels;
  double total = 0.0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double refined = left + right;
    const double delta = refined - p.whole;
    if (std::abs(delta) <= 15.0 * p.tol || p.b - p.a < 1e-14) {
      total += refined + delta / 15.0;
      continue;
    }
    if (++panels > kMaxPanels) {
      fail(ErrorCode::Quadrature, "cosine quadrature did not converge within 2^20 panels");
    }
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
  }
  return total;
}

}  // namespace

void HeatProblem::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  require(t1 > 0.0 && t1 < t2 && t2 < t3, "time windows must satisfy 0 < t1 < t2 < t3");
  require(std::isfinite(control_amplitude), "control amplitude must be finite");
  require(kernel_terms >= 0, "kernel_terms must be nonnegative");
  for (const auto& [n, c] : u0_coeffs) {
    require(n >= 0, "mode indices must be nonnegative");
    require(std::isfinite(c), "cosine coefficients must be finite");
  }
}

std::vector<double> SampleTrace::times() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
  return out;
}

void SampleTrace::validate() const {
  require(period > 0.0 && std::isfinite(period), "sampling period must be positive");
  require(!values.empty(), "trace must contain at least one sample");
  require(std::isfinite(t_start), "trace start time must be finite");
}

double ExponentialModel::evaluate(double t) const {
  double sum = 0.0;
  for (const auto& term : terms) sum += term.amplitude * std::exp(-term.rate * t);
  return sum;
}

void ExponentialModel::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require(terms[i].rate >= 0.0, "decay rates must be nonnegative");
    if (i > 0) require(terms[i].rate > terms[i - 1].rate, "decay rates must be strictly increasing");
  }
}

double eigenvalue(double alpha, int n) {
  require(alpha > 0.0, "alpha must be positive");
  require(n >= 0, "mode index must be nonnegative");
  const double nn = static_cast<double>(n);
  return alpha * nn * nn * kPi * kPi;
}

std::vector<double> cosine_coefficients(const std::function<double(double)>& u0, int n_max) {
  require(n_max >= 0, "n_max must be nonnegative");
  std::vector<double> coeffs(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double scale = (n == 0) ? 1.0 : 2.0;
    const double freq = kPi * static_cast<double>(n);
    auto integrand = [&](double x) { return u0(x) * std::cos(freq * x); };
    const std::size_t panels = 16 + 8 * static_cast<std::size_t>(n);
    coeffs[static_cast<std::size_t>(n)] =
        scale * adaptive_simpson(integrand, 0.0, 1.0, kCoefficientTolerance / scale, panels);
  }
  return coeffs;
}

HeatProblem problem_from_function(double alpha, const std::function<double(double)>& u0, int n_max,
                                  double t1, double t2, double t3, double control_amplitude) {
  HeatProblem p;
  p.alpha = alpha;
  p.t1 = t1;
  p.t2 = t2;
  p.t3 = t3;
  p.control_amplitude = control_amplitude;
  const auto coeffs = cosine_coefficients(u0, n_max);
  for (int n = 0; n <= n_max; ++n) {
    const double c = coeffs[static_cast<std::size_t>(n)];
    if (c != 0.0) p.u0_coeffs.emplace(n, c);
  }
  p.validate();
  return p;
}

double l2_norm_squared(const std::map<int, double>& coeffs) {
  double s = 0.0;
  for (const auto& [n, c] : coeffs) s += (n == 0 ? 1.0 : 0.5) * c * c;
  return s;
}

double evaluate_cosine_series(const std::map<int, double>& coeffs, double x) {
  double s = 0.0;
  for (const auto& [n, c] : coeffs) s += c * std::cos(kPi * n * x);
  return s;
}

double evaluate_cosine_series(const std::vector<double>& coeffs, double x) {
  double s = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) s += coeffs[n] * std::cos(kPi * static_cast<double>(n) * x);
  return s;
}

double free_response(const HeatProblem& problem, double t) {
  if (!(t > 0.0)) fail(ErrorCode::Domain, "free response requires t > 0");
  double sum = 0.0;
  for (const auto& [n, c] : problem.u0_coeffs) sum += c * std::exp(-eigenvalue(problem.alpha, n) * t);
  return sum;
}

double unit_step_kernel_response(double alpha, double delta, int kernel_terms) {
  require(alpha > 0.0, "alpha must be positive");
  if (delta < 0.0) fail(ErrorCode::Domain, "kernel response requires t >= t2");

  const double offset = -1.0 / (3.0 * alpha) - delta;
  if (kernel_terms > 0) {
    double sum = 0.0;
    for (int n = 1; n <= kernel_terms; ++n) {
      const double lambda = eigenvalue(alpha, n);
      sum += 2.0 / lambda * std::exp(-lambda * delta);
    }
    return offset + sum;
  }

  if (delta == 0.0) return 0.0;

  const double x = alpha * kPi * kPi * delta;
  if (x >= kImageSumThreshold) {
    double sum = 0.0;
    for (long n = 1; n <= kMaxKernelTerms; ++n) {
      const double nn = static_cast<double>(n);
      const double term = 2.0 / (alpha * kPi * kPi * nn * nn) * std::exp(-x * nn * nn);
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return offset + sum;
  }

  // G(s,0,0) = (pi alpha s)^{-1/2} sum_{k in Z} exp(-k^2/(alpha s)); integrate
  // each image term in closed form.
  const double root = std::sqrt(delta);
  double images = 2.0 * root;
  for (int k = 1; k < 64; ++k) {
    const double kk = static_cast<double>(k);
    const double a = kk * kk / alpha;
    const double term = 2.0 * (2.0 * root * std::exp(-a / delta) - 2.0 * std::sqrt(kPi * a) * std::erfc(std::sqrt(a / delta)));
    images += term;
    if (std::abs(term) < 1e-17 * images) break;
  }
  return -images / std::sqrt(kPi * alpha);
}

double step_response(const HeatProblem& problem, double t) {
  if (t < problem.t2) fail(ErrorCode::Domain, "step response requires t >= t2");
  return free_response(problem, t) +
         problem.control_amplitude * unit_step_kernel_response(problem.alpha, t - problem.t2, problem.kernel_terms);
}

double observe(const HeatProblem& problem, double t) {
  return t < problem.t2 ? free_response(problem, t) : step_response(problem, t);
}

SampleTrace sample(const HeatProblem& problem, double t_start, double period, std::size_t count) {
  require(t_start > 0.0, "sampling must start at t > 0");
  require(period > 0.0, "sampling period must be positive");
  require(count >= 1, "sample count must be at least 1");
  SampleTrace trace{t_start, period, std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i) trace.values[i] = observe(problem, trace.time(i));
  return trace;
}

}  // namespace heatpencil::model
