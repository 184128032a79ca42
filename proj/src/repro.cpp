#include "heatpencil/repro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>

#include "heatpencil/error.hpp"

namespace heatpencil::repro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCoefficientModes = 200;
constexpr int kReferenceKernelTerms = 200;

std::string g(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Collector {
 public:
  void add(std::string group, std::string name, double published, double computed, double tol, bool relative = false) {
    Field f{std::move(group), std::move(name), published, computed, tol, relative, false};
    const double diff = std::abs(computed - published);
    const double limit = relative ? tol * std::abs(published) : tol;
    f.pass = std::isfinite(computed) && diff <= limit;
    fields.push_back(std::move(f));
  }
  void exact(std::string group, std::string name, double published, double computed) {
    add(std::move(group), std::move(name), published, computed, 0.0);
  }
  std::vector<Field> fields;
};

std::string tolerance_text(const Field& f) {
  if (f.tolerance == 0.0) return "exact";
  if (f.relative) return "±" + g(100.0 * f.tolerance, "%g") + "%";
  return "±" + g(f.tolerance, "%g");
}

std::string markdown(const Report& r) {
  std::string md = "# Reference reproduction\n\n";
  md += "alpha = 4, u0(x) = x - 9 cos(pi x) + 5 cos(3 pi x), windows [0.3, 0.8) / [0.8, 1.3), N1 = N2 = 50, "
        "Ts = 0.01, epsilon = 1e-10, reconstruction on [0.01, 0.8) with M~ = 20, priors M0 = 15, alpha0 = 3.\n";
  std::string group;
  for (const Field& f : r.fields) {
    if (f.group != group) {
      group = f.group;
      md += "\n## " + group + "\n\n| Field | Published | Computed | Difference | Tolerance | Status |\n";
      md += "|---|---|---|---|---|---|\n";
    }
    md += "| " + f.name + " | " + g(f.published, "%.6g") + " | " + g(f.computed, "%.10g") + " | " +
          g(f.computed - f.published, "%.3e") + " | " + tolerance_text(f) + " | " + (f.pass ? "PASS" : "FAIL") + " |\n";
  }

  md += "\n## Diagnostics\n\n";
  const auto& cert_inputs = r.result.certificate_inputs;
  md += "- ||Y0M - Y0||_2 = " + g(cert_inputs.y0_trunc_gap, "%.4e") + " (published 2.2494e-15; sigma_(M+1) = " +
        g(cert_inputs.sigma_next, "%.4e") + "); rounding-level, not gated\n";
  md += "- relative L2 error of u0 on 1001 points = " + g(r.u0_relative_l2, "%.4e") + "\n";
  if (!r.result.certificate_error.empty()) md += "- certificate: " + r.result.certificate_error + "\n";
  for (const auto& w : r.result.warnings) md += "- warning: " + w + "\n";

  md += "\n## Interval\n\n";
  if (r.result.certificate && r.result.certificate->alpha_interval()) {
    const auto [lo, hi] = *r.result.certificate->alpha_interval();
    md += "alpha lies between " + g(lo, "%.4f") + " and " + g(hi, "%.4f") + " (published: between 3.9921 and 4.0079)\n";
  } else {
    md += "alpha interval unavailable (published: between 3.9921 and 4.0079)\n";
  }

  const auto failed = std::count_if(r.fields.begin(), r.fields.end(), [](const Field& f) { return !f.pass; });
  md += "\n## Summary\n\n" + std::to_string(r.fields.size() - static_cast<std::size_t>(failed)) + " of " +
        std::to_string(r.fields.size()) + " fields within tolerance.\n";
  if (failed > 0) {
    md += "\n### Mismatches\n\n| Field | Published | Computed | Difference | Tolerance |\n|---|---|---|---|---|\n";
    for (const Field& f : r.fields) {
      if (f.pass) continue;
      md += "| " + f.group + ": " + f.name + " | " + g(f.published, "%.6g") + " | " + g(f.computed, "%.10g") + " | " +
            g(f.computed - f.published, "%.3e") + " | " + tolerance_text(f) + " |\n";
    }
  }
  return md;
}

}  // namespace

double reference_u0(double x) { return x - 9.0 * std::cos(kPi * x) + 5.0 * std::cos(3.0 * kPi * x); }

model::HeatProblem reference_problem() {
  model::HeatProblem p = model::problem_from_function(4.0, reference_u0, kCoefficientModes, 0.3, 0.8, 1.3, 1.0);
  p.kernel_terms = kReferenceKernelTerms;
  return p;
}

pipeline::PipelineConfig reference_config() { return pipeline::PipelineConfig{}; }

pipeline::Priors reference_priors() { return {15.0, 3.0}; }

double u0_relative_l2_error(const std::vector<double>& coeffs_hat) {
  constexpr int points = 1001;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = i / double(points - 1);
    const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    const double truth = reference_u0(x);
    const double e = model::evaluate_cosine_series(coeffs_hat, x) - truth;
    num += w * e * e;
    den += w * truth * truth;
  }
  return std::sqrt(num / den);
}

Report run() {
  Report r;
  r.problem = reference_problem();
  const pipeline::PipelineConfig cfg = reference_config();
  r.traces = pipeline::simulate(r.problem, cfg);
  r.result = pipeline::identify(r.traces.free, r.traces.step, r.traces.rec, cfg, reference_priors());
  r.u0_relative_l2 = u0_relative_l2_error(r.result.u0_coeffs_hat);

  const auto& res = r.result;
  const auto& s1 = res.step1;
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  Collector c;

  const std::string t1 = "Free window";
  c.exact(t1, "M", 2, s1.estimate.order);
  c.exact(t1, "L", 17, s1.estimate.pencil_parameter);
  const double published_z[] = {1.0000, 0.6738}, published_l[] = {0.0000, 39.4784}, published_c[] = {0.5000, -9.4077};
  for (std::size_t i = 0; i < 2; ++i) {
    const bool have = i < s1.modes.size();
    c.add(t1, "z~" + std::to_string(i), published_z[i], have ? s1.modes[i].pole : nan, 5e-4);
    c.add(t1, "lambda~" + std::to_string(i), published_l[i], have ? s1.modes[i].rate : nan, 5e-4);
    c.add(t1, "C~" + std::to_string(i), published_c[i], have ? s1.modes[i].coefficient : nan, 5e-4);
  }

  const std::string t2 = "Controlled window";
  const auto& pairs = res.step3.pairs;
  c.exact(t2, "M'", 5, res.step3.estimate.order);
  const double published_c2[] = {-8.3333, 5.0661, 1.2665, 0.5664, 1.4090};
  const double published_l2[] = {0.0000, 39.4784, 157.9137, 355.5370, 790.8813};
  for (std::size_t i = 0; i < 5; ++i) {
    c.add(t2, "100 C'" + std::to_string(i), published_c2[i], i < pairs.size() ? 100.0 * pairs[i].coefficient : nan, 5e-3);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    c.add(t2, "100 lambda'" + std::to_string(i), published_l2[i], i < pairs.size() ? 100.0 * pairs[i].rate : nan, 5e-3);
  }
  std::set<int> credible;
  for (const auto& p : pairs) {
    if (p.credible) credible.insert(p.index);
  }
  c.exact(t2, "credible pairs = {1, 2}", 1, credible == std::set<int>{1, 2} ? 1.0 : 0.0);
  c.add(t2, "alpha (step 3)", 4.0000, res.step3.alpha, 1e-3);
  c.add(t2, "alpha = -1/(3 C'0)", 4.0000, res.step3.alpha_constant.value_or(nan), 1e-3);

  const std::string t3 = "Error analysis";
  const auto& ci = res.certificate_inputs;
  const bounds::ErrorCertificate* cert = res.certificate ? &*res.certificate : nullptr;
  c.exact(t3, "M0", 15, cert ? cert->inputs.m0 : nan);
  c.exact(t3, "alpha0", 3, cert ? cert->inputs.alpha0 : nan);
  c.exact(t3, "M", 2, ci.m);
  c.exact(t3, "N", 50, ci.n);
  c.exact(t3, "L", 17, ci.l);
  c.add(t3, "T1", 0.3, ci.t1, 1e-12);
  c.add(t3, "Ts", 0.01, ci.ts, 1e-12);
  c.add(t3, "theta", 2.3687, cert ? cert->theta : nan, 1e-4);
  c.add(t3, "M_theta_L", 0.0936, cert ? cert->m_theta_l : nan, 1e-4);
  c.add(t3, "||Y1||_2", 11.8427, ci.y1_norm, 1e-2);
  c.add(t3, "sigma_M", 9.5089e-5, ci.sigma_m, 0.01, true);
  c.add(t3, "kappa(X_M)", 17.9467, ci.kappa_xm.value_or(nan), 0.01, true);
  c.add(t3, "rho", 1.4522e-10, cert ? cert->rho : nan, 0.05, true);

  const std::string b = "Bounds";
  c.add(b, "pole bound e", 5.2521e-4, cert ? cert->pole.value : nan, 0.05, true);
  c.add(b, "|alpha - alpha~| bound", 7.8974e-3, cert && cert->alpha_bound ? *cert->alpha_bound : nan, 1e-3);
  const auto interval = cert ? cert->alpha_interval() : std::nullopt;
  c.add(b, "alpha interval low", 3.9921, interval ? interval->first : nan, 1e-3);
  c.add(b, "alpha interval high", 4.0079, interval ? interval->second : nan, 1e-3);

  const std::string s4 = "Reconstruction";
  c.add(s4, "alpha_hat", 4.0000, res.alpha_hat, 5e-5);
  c.exact(s4, "n_k", 1, res.step4.indices == std::vector<int>{0, 1} ? 1.0 : 0.0);
  c.exact(s4, "GCV k", 6, res.gcv.k);
  c.add(s4, "relative L2 error of u0 (<= 0.05)", 0.0, r.u0_relative_l2, 0.05);

  r.fields = std::move(c.fields);
  r.all_pass = std::all_of(r.fields.begin(), r.fields.end(), [](const Field& f) { return f.pass; });
  r.markdown = markdown(r);
  return r;
}

}  // namespace heatpencil::repro
