#include "heatpencil/heatpencil.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "heatpencil/error.hpp"
#include "heatpencil/io.hpp"
#include "heatpencil/pipeline.hpp"
#include "heatpencil/plot.hpp"
#include "heatpencil/repro.hpp"

struct hp_problem {
  heatpencil::model::HeatProblem value;
};

struct hp_trace {
  heatpencil::model::SampleTrace value;
};

struct hp_result {
  heatpencil::pipeline::IdentificationResult value;
};

namespace {

using heatpencil::Error;
using heatpencil::ErrorCode;
namespace hp = heatpencil;

thread_local std::string last_error;

hp_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return HP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return HP_ERR_DOMAIN;
    case ErrorCode::Io: return HP_ERR_IO;
    case ErrorCode::Parse: return HP_ERR_PARSE;
    case ErrorCode::Quadrature: return HP_ERR_QUADRATURE;
    case ErrorCode::NoModes: return HP_ERR_NO_MODES;
    case ErrorCode::RankDeficient: return HP_ERR_RANK_DEFICIENT;
    case ErrorCode::AmbiguousIndex: return HP_ERR_AMBIGUOUS_INDEX;
    case ErrorCode::AlphaUnrecoverable: return HP_ERR_ALPHA_UNRECOVERABLE;
    case ErrorCode::HypothesisViolated: return HP_ERR_HYPOTHESIS_VIOLATED;
    case ErrorCode::CertificateUnavailable: return HP_ERR_CERTIFICATE_UNAVAILABLE;
    case ErrorCode::Defective: return HP_ERR_DEFECTIVE;
  }
  return HP_ERR_INTERNAL;
}

template <typename F>
hp_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return HP_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return HP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HP_ERR_INTERNAL;
  }
}

void check(const void* p, const char* name) {
  if (p == nullptr) hp::fail(ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hp::pipeline::PipelineConfig to_config(const hp_config* c) {
  hp::pipeline::PipelineConfig cfg;
  if (c == nullptr) return cfg;
  cfg.n1 = c->n1;
  cfg.n2 = c->n2;
  cfg.epsilon = c->epsilon;
  cfg.t0 = c->t0;
  cfg.m_tilde = c->m_tilde;
  cfg.n_rec = c->n_rec;
  cfg.credibility_tol = c->credibility_tol;
  if (c->max_order > 0) cfg.max_order = c->max_order;
  cfg.validate();
  return cfg;
}

}  // namespace

extern "C" {

const char* hp_version(void) { return "0.1.0"; }

const char* hp_last_error(void) { return last_error.c_str(); }

const char* hp_status_name(hp_status status) {
  switch (status) {
    case HP_OK: return "ok";
    case HP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HP_ERR_DOMAIN: return "domain error";
    case HP_ERR_IO: return "i/o error";
    case HP_ERR_PARSE: return "parse error";
    case HP_ERR_QUADRATURE: return "quadrature did not converge";
    case HP_ERR_NO_MODES: return "no detectable modes";
    case HP_ERR_RANK_DEFICIENT: return "rank deficient";
    case HP_ERR_AMBIGUOUS_INDEX: return "ambiguous mode index";
    case HP_ERR_ALPHA_UNRECOVERABLE: return "alpha unrecoverable";
    case HP_ERR_HYPOTHESIS_VIOLATED: return "hypothesis violated";
    case HP_ERR_CERTIFICATE_UNAVAILABLE: return "certificate unavailable";
    case HP_ERR_DEFECTIVE: return "defective eigenvector matrix";
    case HP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hp_string_free(char* s) { std::free(s); }

void hp_config_default(hp_config* config) {
  if (config == nullptr) return;
  const hp::pipeline::PipelineConfig d;
  config->n1 = d.n1;
  config->n2 = d.n2;
  config->epsilon = d.epsilon;
  config->t0 = d.t0;
  config->m_tilde = d.m_tilde;
  config->n_rec = d.n_rec;
  config->credibility_tol = d.credibility_tol;
  config->max_order = 0;
}

hp_status hp_problem_load(const char* path, hp_problem** out) {
  return guard([&] {
    check(path, "path");
    check(out, "out");
    *out = new hp_problem{hp::io::load_problem(path)};
  });
}

hp_status hp_problem_parse(const char* json_text, hp_problem** out) {
  return guard([&] {
    check(json_text, "json_text");
    check(out, "out");
    *out = new hp_problem{hp::io::problem_from_json(hp::io::parse_json(json_text, "problem"))};
  });
}

hp_status hp_problem_reference(hp_problem** out) {
  return guard([&] {
    check(out, "out");
    *out = new hp_problem{hp::repro::reference_problem()};
  });
}

double hp_problem_alpha(const hp_problem* problem) { return problem ? problem->value.alpha : 0.0; }

hp_status hp_problem_to_json(const hp_problem* problem, char** json_out) {
  return guard([&] {
    check(problem, "problem");
    check(json_out, "json_out");
    *json_out = duplicate(hp::io::dump(hp::io::to_json(problem->value)));
  });
}

void hp_problem_free(hp_problem* problem) { delete problem; }

hp_status hp_trace_create(double t_start, double period, const double* values, size_t count, hp_trace** out) {
  return guard([&] {
    check(out, "out");
    if (count > 0) check(values, "values");
    hp::model::SampleTrace t;
    t.t_start = t_start;
    t.period = period;
    t.values.assign(values, values + count);
    t.validate();
    *out = new hp_trace{std::move(t)};
  });
}

hp_status hp_trace_load(const char* csv_path, hp_trace** out) {
  return guard([&] {
    check(csv_path, "csv_path");
    check(out, "out");
    *out = new hp_trace{hp::io::load_trace(csv_path)};
  });
}

hp_status hp_trace_save(const hp_trace* trace, const char* csv_path) {
  return guard([&] {
    check(trace, "trace");
    check(csv_path, "csv_path");
    hp::io::write_trace(csv_path, trace->value);
  });
}

size_t hp_trace_size(const hp_trace* trace) { return trace ? trace->value.size() : 0; }
double hp_trace_t_start(const hp_trace* trace) { return trace ? trace->value.t_start : 0.0; }
double hp_trace_period(const hp_trace* trace) { return trace ? trace->value.period : 0.0; }
const double* hp_trace_values(const hp_trace* trace) { return trace ? trace->value.values.data() : nullptr; }
void hp_trace_free(hp_trace* trace) { delete trace; }

hp_status hp_simulate(const hp_problem* problem, const hp_config* config, hp_trace** free_out, hp_trace** step_out,
                      hp_trace** rec_out) {
  return guard([&] {
    check(problem, "problem");
    check(free_out, "free_out");
    check(step_out, "step_out");
    check(rec_out, "rec_out");
    hp::pipeline::Traces t = hp::pipeline::simulate(problem->value, to_config(config));
    auto f = std::make_unique<hp_trace>(hp_trace{std::move(t.free)});
    auto s = std::make_unique<hp_trace>(hp_trace{std::move(t.step)});
    auto r = std::make_unique<hp_trace>(hp_trace{std::move(t.rec)});
    *free_out = f.release();
    *step_out = s.release();
    *rec_out = r.release();
  });
}

hp_status hp_priors_load(const char* path, hp_priors* out) {
  return guard([&] {
    check(path, "path");
    check(out, "out");
    const auto p = hp::io::load_priors(path);
    out->m0 = p.m0;
    out->alpha0 = p.alpha0;
  });
}

hp_status hp_identify(const hp_trace* free_trace, const hp_trace* step_trace, const hp_trace* rec_trace,
                      const hp_config* config, const hp_priors* priors, hp_result** out) {
  return guard([&] {
    check(free_trace, "free_trace");
    check(step_trace, "step_trace");
    check(rec_trace, "rec_trace");
    check(out, "out");
    std::optional<hp::pipeline::Priors> p;
    if (priors != nullptr) p = hp::pipeline::Priors{priors->m0, priors->alpha0};
    *out = new hp_result{
        hp::pipeline::identify(free_trace->value, step_trace->value, rec_trace->value, to_config(config), p)};
  });
}

double hp_result_alpha_hat(const hp_result* result) { return result ? result->value.alpha_hat : 0.0; }
int hp_result_gcv_k(const hp_result* result) { return result ? result->value.gcv.k : 0; }

size_t hp_result_u0_coeffs(const hp_result* result, const double** coeffs_out) {
  if (result == nullptr) return 0;
  if (coeffs_out != nullptr) *coeffs_out = result->value.u0_coeffs_hat.data();
  return result->value.u0_coeffs_hat.size();
}

int hp_result_has_certificate(const hp_result* result) { return result && result->value.certificate ? 1 : 0; }

hp_status hp_result_alpha_interval(const hp_result* result, double* lo, double* hi) {
  return guard([&] {
    check(result, "result");
    check(lo, "lo");
    check(hi, "hi");
    const auto& c = result->value.certificate;
    const auto iv = c ? c->alpha_interval() : std::nullopt;
    if (!iv) {
      const std::string why = result->value.certificate_error;
      hp::fail(ErrorCode::CertificateUnavailable, why.empty() ? "no alpha interval (priors missing)" : why);
    }
    *lo = iv->first;
    *hi = iv->second;
  });
}

hp_status hp_result_to_json(const hp_result* result, const char* manifest_json, char** json_out) {
  return guard([&] {
    check(result, "result");
    check(json_out, "json_out");
    hp::io::json j = hp::io::to_json(result->value);
    if (manifest_json != nullptr) j["manifest"] = hp::io::parse_json(manifest_json, "manifest");
    *json_out = duplicate(hp::io::dump(j));
  });
}

hp_status hp_result_write_plots(const hp_result* result, const char* dir, const hp_problem* reference) {
  return guard([&] {
    check(result, "result");
    check(dir, "dir");
    hp::plot::write_all(dir, result->value, reference ? &reference->value.u0_coeffs : nullptr);
  });
}

void hp_result_free(hp_result* result) { delete result; }

hp_status hp_bounds_from_json(const char* diagnostics_json, const hp_priors* priors, char** certificate_json) {
  return guard([&] {
    check(diagnostics_json, "diagnostics_json");
    check(priors, "priors");
    check(certificate_json, "certificate_json");
    const auto d = hp::io::diagnostics_from_json(hp::io::parse_json(diagnostics_json, "diagnostics"));
    const auto cert = hp::pipeline::certify(d.inputs, {priors->m0, priors->alpha0}, d.alpha_hat);
    *certificate_json = duplicate(hp::io::dump(hp::io::to_json(cert)));
  });
}

hp_status hp_pencil_analyze(const hp_trace* trace, int pencil_parameter, double epsilon, char** json_out) {
  return guard([&] {
    check(trace, "trace");
    check(json_out, "json_out");
    hp::pencil::PencilConfig cfg;
    if (pencil_parameter > 0) cfg = hp::pencil::PencilConfig::with_parameter(pencil_parameter);
    cfg.singular_threshold = epsilon;
    *json_out = duplicate(hp::io::dump(hp::io::to_json(hp::pencil::analyze(trace->value, cfg))));
  });
}

hp_status hp_repro_paper(const char* out_dir, int* all_pass, char** report_markdown) {
  return guard([&] {
    const hp::repro::Report r = hp::repro::run();
    if (out_dir != nullptr) {
      const std::filesystem::path dir(out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) hp::fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
      hp::io::write_text(dir / "problem.json", hp::io::dump(hp::io::to_json(r.problem)));
      hp::io::write_trace(dir / "free.csv", r.traces.free);
      hp::io::write_trace(dir / "step.csv", r.traces.step);
      hp::io::write_trace(dir / "rec.csv", r.traces.rec);
      hp::io::write_text(dir / "result.json", hp::io::dump(hp::io::to_json(r.result)));
      hp::io::write_text(dir / "report.md", r.markdown);
      hp::plot::write_all(dir, r.result, &r.problem.u0_coeffs);
    }
    if (all_pass != nullptr) *all_pass = r.all_pass ? 1 : 0;
    if (report_markdown != nullptr) *report_markdown = duplicate(r.markdown);
  });
}

}  // extern "C"
