// heatpencil command line: simulate, identify, bounds, repro-paper.
//
// Exit codes: 0 success, 1 reproduction mismatch, 2 input error,
// 3 certificate unavailable.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "heatpencil/heatpencil.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;
constexpr int kExitCertificate = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(hp_status s) {
  switch (s) {
    case HP_OK: return kExitOk;
    case HP_ERR_CERTIFICATE_UNAVAILABLE:
    case HP_ERR_DEFECTIVE: return kExitCertificate;
    default: return kExitInput;
  }
}

void ok(hp_status s, const std::string& context) {
  if (s != HP_OK) throw Failure{exit_code(s), context + ": " + hp_last_error()};
}

// Borrowed C string released on scope exit.
struct Text {
  char* p = nullptr;
  ~Text() { hp_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Problem = Handle<hp_problem, hp_problem_free>;
using Trace = Handle<hp_trace, hp_trace_free>;
using Result = Handle<hp_result, hp_result_free>;

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest(const std::string& subcommand, json inputs, json outputs, json parameters) {
  const char* seed = std::getenv("HEATPENCIL_SEED");
  return json{{"tool", "heatpencil"},
              {"version", hp_version()},
              {"subcommand", subcommand},
              {"timestamp", timestamp()},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)},
              {"parameters", std::move(parameters)},
              {"seed", seed ? json(seed) : json(nullptr)}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitInput, "cannot write " + path.string()};
  out << text;
  if (!out) throw Failure{kExitInput, "write failed for " + path.string()};
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitInput, "cannot create " + dir.string() + ": " + ec.message()};
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Failure{kExitInput, "missing input file " + path.string()};
}

json config_json(const hp_config& c) {
  return json{{"n1", c.n1},           {"n2", c.n2},       {"epsilon", c.epsilon},
              {"t0", c.t0},           {"m_tilde", c.m_tilde}, {"n_rec", c.n_rec},
              {"credibility_tol", c.credibility_tol}, {"max_order", c.max_order}};
}

void add_config_options(CLI::App* cmd, hp_config& c) {
  cmd->add_option("--n1", c.n1, "samples on [T1, T2)")->capture_default_str();
  cmd->add_option("--n2", c.n2, "samples on [T2, T3)")->capture_default_str();
  cmd->add_option("--t0", c.t0, "start of the reconstruction window")->capture_default_str();
  cmd->add_option("--n-rec", c.n_rec, "samples on [T0, T2)")->capture_default_str();
}

void add_identify_options(CLI::App* cmd, hp_config& c) {
  cmd->add_option("--epsilon", c.epsilon, "singular value threshold")->capture_default_str();
  cmd->add_option("--m-tilde", c.m_tilde, "cosine modes in the reconstruction")->capture_default_str();
  cmd->add_option("--credibility-tol", c.credibility_tol, "relative tolerance of the step-3 filter")
      ->capture_default_str();
  cmd->add_option("--max-order", c.max_order, "cap on the detected order (0: none)")->capture_default_str();
}

int run_simulate(const std::string& problem_path, const std::string& out_dir, const hp_config& cfg) {
  require_file(problem_path);
  Problem problem;
  ok(hp_problem_load(problem_path.c_str(), &problem.p), "simulate");
  Trace f, s, r;
  ok(hp_simulate(problem.p, &cfg, &f.p, &s.p, &r.p), "simulate");
  make_dir(out_dir);
  const fs::path dir(out_dir);
  ok(hp_trace_save(f.p, (dir / "free.csv").c_str()), "simulate");
  ok(hp_trace_save(s.p, (dir / "step.csv").c_str()), "simulate");
  ok(hp_trace_save(r.p, (dir / "rec.csv").c_str()), "simulate");
  const json m = manifest("simulate", {{"problem", problem_path}},
                          {{"free", (dir / "free.csv").string()},
                           {"step", (dir / "step.csv").string()},
                           {"rec", (dir / "rec.csv").string()}},
                          config_json(cfg));
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  return kExitOk;
}

int run_identify(const std::string& traces_dir, const std::string& priors_path, const std::string& out_path,
                 const std::string& plot_dir, const std::string& reference_path, const hp_config& cfg) {
  const fs::path dir(traces_dir);
  Trace f, s, r;
  for (const auto& [name, handle] : {std::pair{"free.csv", &f}, std::pair{"step.csv", &s}, std::pair{"rec.csv", &r}}) {
    const fs::path p = dir / name;
    require_file(p);
    ok(hp_trace_load(p.c_str(), &handle->p), "identify");
  }
  std::optional<hp_priors> priors;
  if (!priors_path.empty()) {
    require_file(priors_path);
    hp_priors p{};
    ok(hp_priors_load(priors_path.c_str(), &p), "identify");
    priors = p;
  }
  Problem reference;
  if (!reference_path.empty()) {
    require_file(reference_path);
    ok(hp_problem_load(reference_path.c_str(), &reference.p), "identify");
  }

  Result result;
  ok(hp_identify(f.p, s.p, r.p, &cfg, priors ? &*priors : nullptr, &result.p), "identify");

  json outputs{{"result", out_path}};
  if (!plot_dir.empty()) {
    const fs::path pd(plot_dir);
    outputs["plots"] = {(pd / "gcv.svg").string(), (pd / "gcv.csv").string(), (pd / "u0.svg").string(),
                        (pd / "u0.csv").string()};
  }
  json inputs{{"traces", traces_dir}, {"priors", priors_path.empty() ? json(nullptr) : json(priors_path)}};
  if (!reference_path.empty()) inputs["reference"] = reference_path;
  const std::string m = manifest("identify", inputs, outputs, config_json(cfg)).dump();

  Text doc;
  ok(hp_result_to_json(result.p, m.c_str(), &doc.p), "identify");
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.str();
  } else {
    write_file(out_path, doc.str());
  }
  if (!plot_dir.empty()) {
    make_dir(plot_dir);
    ok(hp_result_write_plots(result.p, plot_dir.c_str(), reference.p), "identify --plot");
  }

  if (priors && !hp_result_has_certificate(result.p)) {
    double lo = 0, hi = 0;
    hp_result_alpha_interval(result.p, &lo, &hi);
    std::cerr << "heatpencil: certificate unavailable: " << hp_last_error() << "\n";
    return kExitCertificate;
  }
  return kExitOk;
}

int run_bounds(const std::string& input_path, const std::string& priors_path, const std::string& out_path) {
  require_file(input_path);
  require_file(priors_path);
  hp_priors priors{};
  ok(hp_priors_load(priors_path.c_str(), &priors), "bounds");
  std::ifstream in(input_path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  Text cert;
  ok(hp_bounds_from_json(ss.str().c_str(), &priors, &cert.p), "bounds");

  json j = json::parse(cert.str());
  j["manifest"] = manifest("bounds", {{"diagnostics", input_path}, {"priors", priors_path}},
                           {{"certificate", out_path.empty() ? json("-") : json(out_path)}}, json::object());
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int run_repro(const std::string& out_dir) {
  make_dir(out_dir);
  int all_pass = 0;
  Text report;
  ok(hp_repro_paper(out_dir.c_str(), &all_pass, &report.p), "repro-paper");
  const fs::path dir(out_dir);
  json outputs = json::array();
  for (const char* name : {"problem.json", "free.csv", "step.csv", "rec.csv", "result.json", "report.md", "gcv.svg",
                           "gcv.csv", "u0.svg", "u0.csv"}) {
    outputs.push_back((dir / name).string());
  }
  write_file(dir / "manifest.json", manifest("repro-paper", json::object(), outputs, json::object()).dump(2) + "\n");
  std::cout << report.str();
  if (!all_pass) {
    std::cerr << "heatpencil: reproduction mismatch (see " << (dir / "report.md").string() << ")\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusivity and initial-state identification from a boundary trace"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hp_version()));

  hp_config cfg;
  hp_config_default(&cfg);

  std::string problem_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "write free.csv, step.csv and rec.csv for a problem file");
  simulate->add_option("problem", problem_path, "problem JSON")->required();
  simulate->add_option("--out", out_dir, "output directory")->required();
  add_config_options(simulate, cfg);

  std::string traces_dir, priors_path, result_path, plot_dir, reference_path;
  auto* identify = app.add_subcommand("identify", "identify alpha and u0 from free/step/rec traces");
  identify->add_option("traces", traces_dir, "directory holding free.csv, step.csv, rec.csv")->required();
  identify->add_option("priors", priors_path, "priors JSON {\"M0\", \"alpha0\"}; enables the certificate");
  identify->add_option("--out", result_path, "result JSON (default: stdout)");
  identify->add_option("--plot", plot_dir, "write gcv.svg, u0.svg and their CSV twins here");
  identify->add_option("--reference", reference_path, "problem JSON whose u0 is drawn in u0.svg");
  add_identify_options(identify, cfg);

  std::string input_path, bounds_priors, cert_path;
  auto* bounds = app.add_subcommand("bounds", "error certificate from a result or diagnostics JSON");
  bounds->add_option("input", input_path, "result.json or raw diagnostics")->required();
  bounds->add_option("priors", bounds_priors, "priors JSON {\"M0\", \"alpha0\"}")->required();
  bounds->add_option("--out", cert_path, "certificate JSON (default: stdout)");

  std::string repro_dir;
  auto* repro = app.add_subcommand("repro-paper", "rerun the reference experiment and compare with published values");
  repro->add_option("--out", repro_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*simulate) return run_simulate(problem_path, out_dir, cfg);
    if (*identify) return run_identify(traces_dir, priors_path, result_path, plot_dir, reference_path, cfg);
    if (*bounds) return run_bounds(input_path, bounds_priors, cert_path);
    if (*repro) return run_repro(repro_dir);
  } catch (const Failure& f) {
    std::cerr << "heatpencil: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "heatpencil: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
