#include "heatpencil/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heatpencil/error.hpp"

namespace heatpencil::io {

namespace {

double number(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key)) fail(ErrorCode::Parse, origin + ": missing field \"" + key + "\"");
  if (!j.at(key).is_number()) fail(ErrorCode::Parse, origin + ": field \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key, const std::string& origin) {
  if (!j.contains(key)) fail(ErrorCode::Parse, origin + ": missing field \"" + key + "\"");
  if (!j.at(key).is_number_integer()) fail(ErrorCode::Parse, origin + ": field \"" + key + "\" must be an integer");
  return j.at(key).get<int>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, origin + ": " + e.what());
  }
}

json load_json(const fs::path& path) { return parse_json(read_text(path), path.string()); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

model::HeatProblem problem_from_json(const json& j) {
  const std::string origin = "problem";
  if (!j.is_object()) fail(ErrorCode::Parse, "problem must be a JSON object");
  model::HeatProblem p;
  p.alpha = number(j, "alpha", origin);
  p.t1 = number(j, "t1", origin);
  p.t2 = number(j, "t2", origin);
  p.t3 = number(j, "t3", origin);
  if (j.contains("control_amplitude")) p.control_amplitude = number(j, "control_amplitude", origin);
  if (j.contains("kernel_terms")) p.kernel_terms = integer(j, "kernel_terms", origin);
  if (!j.contains("u0_cosine") || !j.at("u0_cosine").is_object()) {
    fail(ErrorCode::Parse, "problem: \"u0_cosine\" must be an object mapping mode index to coefficient");
  }
  for (const auto& [key, value] : j.at("u0_cosine").items()) {
    std::size_t used = 0;
    int n = -1;
    try {
      n = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || n < 0) fail(ErrorCode::Parse, "problem: u0_cosine key \"" + key + "\" is not a mode index");
    if (!value.is_number()) fail(ErrorCode::Parse, "problem: u0_cosine[" + key + "] must be a number");
    p.u0_coeffs[n] = value.get<double>();
  }
  p.validate();
  return p;
}

json to_json(const model::HeatProblem& p) {
  json coeffs = json::object();
  for (const auto& [n, c] : p.u0_coeffs) coeffs[std::to_string(n)] = c;
  json j{{"alpha", p.alpha}, {"u0_cosine", coeffs}, {"t1", p.t1}, {"t2", p.t2}, {"t3", p.t3},
         {"control_amplitude", p.control_amplitude}};
  if (p.kernel_terms > 0) j["kernel_terms"] = p.kernel_terms;
  return j;
}

model::HeatProblem load_problem(const fs::path& path) {
  const json j = load_json(path);
  try {
    return problem_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string trace_to_csv(const model::SampleTrace& trace) {
  std::string out = "t,y\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format17(trace.time(i));
    out += ',';
    out += format17(trace.values[i]);
    out += '\n';
  }
  return out;
}

model::SampleTrace trace_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> t, y;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,y") fail(ErrorCode::Parse, origin + ": expected header \"t,y\"");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::Parse, origin + ": line " + std::to_string(line_no) + " has no comma");
    try {
      std::size_t a = 0, b = 0;
      const std::string ts = line.substr(0, comma), ys = line.substr(comma + 1);
      const double tv = std::stod(ts, &a);
      const double yv = std::stod(ys, &b);
      if (a != ts.size() || b != ys.size()) throw std::invalid_argument("trailing characters");
      t.push_back(tv);
      y.push_back(yv);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, origin + ": line " + std::to_string(line_no) + " is not a number pair");
    }
  }
  if (!header) fail(ErrorCode::Parse, origin + ": empty file");
  if (t.empty()) fail(ErrorCode::Parse, origin + ": no samples");

  model::SampleTrace trace;
  trace.t_start = t.front();
  trace.values = std::move(y);
  if (t.size() == 1) {
    fail(ErrorCode::Parse, origin + ": a single sample does not define a sampling period");
  }
  trace.period = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(trace.period > 0.0)) fail(ErrorCode::Parse, origin + ": times must be increasing");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expected = trace.t_start + static_cast<double>(i) * trace.period;
    if (std::abs(t[i] - expected) > 1e-9 * std::max(trace.period, std::abs(expected))) {
      fail(ErrorCode::Parse, origin + ": time grid is not uniform at row " + std::to_string(i + 1));
    }
  }
  return trace;
}

void write_trace(const fs::path& path, const model::SampleTrace& trace) { write_text(path, trace_to_csv(trace)); }

model::SampleTrace load_trace(const fs::path& path) { return trace_from_csv(read_text(path), path.string()); }

pipeline::Priors priors_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::Parse, "priors must be a JSON object");
  pipeline::Priors p;
  p.m0 = number(j, "M0", "priors");
  p.alpha0 = number(j, "alpha0", "priors");
  require(p.m0 >= 0.0, "priors: M0 must be nonnegative");
  require(p.alpha0 > 0.0, "priors: alpha0 must be positive");
  return p;
}

pipeline::Priors load_priors(const fs::path& path) {
  const json j = load_json(path);
  try {
    return priors_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json to_json(const pencil::PencilEstimate& e) {
  json sigma = json::array();
  for (linalg::Index i = 0; i < e.singular_values.size(); ++i) sigma.push_back(e.singular_values(i));
  return json{{"order", e.order},
              {"pencil_parameter", e.pencil_parameter},
              {"sample_count", e.sample_count},
              {"period", e.period},
              {"t_start", e.t_start},
              {"poles", e.poles},
              {"rates", e.rates},
              {"amplitudes", e.amplitudes},
              {"sigma", sigma},
              {"sigma_M", e.sigma_m},
              {"sigma_M_plus_1", e.sigma_next},
              {"y1_norm_2", e.y1_norm},
              {"y0_trunc_gap_2", e.y0_trunc_gap},
              {"warnings", e.warnings}};
}

json to_json(const bounds::ErrorCertificate& c) {
  json modes = json::array();
  for (const auto& m : c.modes) {
    modes.push_back({{"n", m.index},
                     {"pole", m.pole},
                     {"eigenvalue_bound", m.eigenvalue_bound},
                     {"alpha_bound", optional_number(m.alpha_bound)},
                     {"substitution_justified", m.substitution_justified}});
  }
  json interval = nullptr;
  if (const auto iv = c.alpha_interval()) interval = json::array({iv->first, iv->second});
  return json{{"M0", c.inputs.m0},
              {"alpha0", c.inputs.alpha0},
              {"M", c.inputs.m},
              {"N", c.inputs.n},
              {"L", c.inputs.l},
              {"T1", c.inputs.t1},
              {"Ts", c.inputs.ts},
              {"theta", c.theta},
              {"M_theta_L", c.m_theta_l},
              {"Y1_norm_2", c.inputs.y1_norm},
              {"sigma_M", c.inputs.sigma_m},
              {"Y0M_gap_2", c.inputs.y0_trunc_gap},
              {"kappa_XM", c.inputs.kappa_xm},
              {"rho", c.rho},
              {"pole_bound", c.pole.value},
              {"alpha_bound", optional_number(c.alpha_bound)},
              {"alpha_interval", interval},
              {"alpha_hat", optional_number(c.alpha_hat)},
              {"alpha_bound_mode", c.alpha_bound_mode ? json(*c.alpha_bound_mode) : json(nullptr)},
              {"M_theta_L_plus_1", c.m_theta_l1},
              {"tail_bound_T1", c.tail_bound},
              {"frob_y0", c.frob_y0},
              {"frob_y1", c.frob_y1},
              {"pole_bound_general", c.pole.general},
              {"pole_bound_special", optional_number(c.pole.special)},
              {"special_branch", c.special_branch},
              {"near_breakpoint", c.near_breakpoint},
              {"modes", modes},
              {"warnings", c.warnings}};
}

json to_json(const pipeline::CertificateInputs& in) {
  json modes = json::array();
  for (const auto& m : in.modes) modes.push_back({{"n", m.index}, {"pole", m.pole}});
  return json{{"M", in.m},
              {"N", in.n},
              {"L", in.l},
              {"T1", in.t1},
              {"Ts", in.ts},
              {"sigma_M", in.sigma_m},
              {"sigma_M_plus_1", in.sigma_next},
              {"Y1_norm_2", in.y1_norm},
              {"Y0M_gap_2", in.y0_trunc_gap},
              {"kappa_XM", optional_number(in.kappa_xm)},
              {"modes", modes}};
}

json to_json(const pipeline::IdentificationResult& r) {
  json step3_pairs = json::array();
  for (const auto& p : r.step3.pairs) {
    step3_pairs.push_back({{"n", p.index},
                           {"coefficient", p.coefficient},
                           {"rate_per_sample", p.rate},
                           {"credibility", p.credibility},
                           {"credible", p.credible},
                           {"alpha", optional_number(p.alpha)}});
  }
  json step4 = json::array();
  json free_modes = json::array();
  for (std::size_t i = 0; i < r.step1.modes.size(); ++i) {
    const auto& m = r.step1.modes[i];
    step4.push_back({{"n", r.step4.indices[i]}, {"alpha", optional_number(r.step4.alpha_k[i])}});
    free_modes.push_back({{"n", r.step4.indices[i]}, {"rate", m.rate}, {"coefficient", m.coefficient}, {"pole", m.pole}});
  }
  json j{{"alpha_hat", r.alpha_hat},
         {"alpha_candidates",
          {{"step3_pairs", step3_pairs},
           {"step3_constant", optional_number(r.step3.alpha_constant)},
           {"step3_median", r.step3.alpha},
           {"step4", step4}}},
         {"free_modes", free_modes},
         {"u0_cosine_hat", r.u0_coeffs_hat},
         {"gcv_k", r.gcv.k},
         {"gcv_curve", r.gcv.curve},
         {"certificate", r.certificate ? to_json(*r.certificate) : json(nullptr)},
         {"certificate_inputs", to_json(r.certificate_inputs)},
         {"diagnostics",
          {{"step1", to_json(r.step1.estimate)},
           {"step3", to_json(r.step3.estimate)},
           {"design_rank", r.gcv.rank},
           {"gcv_residuals", r.gcv.residuals}}},
         {"warnings", r.warnings}};
  if (r.priors) j["priors"] = {{"M0", r.priors->m0}, {"alpha0", r.priors->alpha0}};
  if (!r.certificate_error.empty()) j["certificate_error"] = r.certificate_error;
  return j;
}

Diagnostics diagnostics_from_json(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::Parse, "diagnostics must be a JSON object");
  const json& j = doc.contains("certificate_inputs") ? doc.at("certificate_inputs") : doc;
  const std::string origin = "diagnostics";
  Diagnostics d;
  d.inputs.m = integer(j, "M", origin);
  d.inputs.n = integer(j, "N", origin);
  d.inputs.l = integer(j, "L", origin);
  d.inputs.t1 = number(j, "T1", origin);
  d.inputs.ts = number(j, "Ts", origin);
  d.inputs.sigma_m = number(j, "sigma_M", origin);
  d.inputs.y1_norm = number(j, "Y1_norm_2", origin);
  d.inputs.y0_trunc_gap = number(j, "Y0M_gap_2", origin);
  if (j.contains("sigma_M_plus_1")) d.inputs.sigma_next = number(j, "sigma_M_plus_1", origin);
  if (j.contains("kappa_XM") && !j.at("kappa_XM").is_null()) d.inputs.kappa_xm = number(j, "kappa_XM", origin);
  if (j.contains("modes")) {
    if (!j.at("modes").is_array()) fail(ErrorCode::Parse, "diagnostics: \"modes\" must be an array");
    for (const json& m : j.at("modes")) d.inputs.modes.push_back({integer(m, "n", origin), number(m, "pole", origin)});
  }
  if (doc.contains("alpha_hat") && doc.at("alpha_hat").is_number()) d.alpha_hat = doc.at("alpha_hat").get<double>();
  return d;
}

}  // namespace heatpencil::io
