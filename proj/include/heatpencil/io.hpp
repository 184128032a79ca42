#pragma once

// File formats: problem / priors JSON, `t,y` CSV traces, result and
// certificate JSON.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "heatpencil/bounds.hpp"
#include "heatpencil/model.hpp"
#include "heatpencil/pencil.hpp"
#include "heatpencil/pipeline.hpp"

namespace heatpencil::io {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// Throws ErrorCode::Parse on malformed text, Io on unreadable files.
json parse_json(const std::string& text, const std::string& origin = "input");
json load_json(const fs::path& path);
std::string dump(const json& j);

// {"alpha", "u0_cosine": {"n": c}, "t1", "t2", "t3", "control_amplitude", "kernel_terms"?}
model::HeatProblem problem_from_json(const json& j);
json to_json(const model::HeatProblem& problem);
model::HeatProblem load_problem(const fs::path& path);

// `t,y` header, one row per sample, 17 significant digits.
std::string trace_to_csv(const model::SampleTrace& trace);
// Rejects a non-uniform time grid (relative spacing error above 1e-9).
model::SampleTrace trace_from_csv(const std::string& text, const std::string& origin = "trace");
void write_trace(const fs::path& path, const model::SampleTrace& trace);
model::SampleTrace load_trace(const fs::path& path);

// {"M0", "alpha0"}
pipeline::Priors priors_from_json(const json& j);
pipeline::Priors load_priors(const fs::path& path);

json to_json(const pencil::PencilEstimate& estimate);
json to_json(const bounds::ErrorCertificate& certificate);
json to_json(const pipeline::CertificateInputs& inputs);
json to_json(const pipeline::IdentificationResult& result);

struct Diagnostics {
  pipeline::CertificateInputs inputs;
  std::optional<double> alpha_hat;
};

// Accepts a result document (with "certificate_inputs") or the raw
// diagnostics object itself.
Diagnostics diagnostics_from_json(const json& j);

}  // namespace heatpencil::io
