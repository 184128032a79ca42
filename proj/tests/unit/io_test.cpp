#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "heatpencil/error.hpp"
#include "heatpencil/io.hpp"
#include "heatpencil/plot.hpp"
#include "heatpencil/repro.hpp"

namespace hp = heatpencil;
namespace io = heatpencil::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("heatpencil_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

hp::ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const hp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return hp::ErrorCode::InvalidArgument;
}

const hp::pipeline::IdentificationResult& reference_result() {
  static const auto result = [] {
    const hp::pipeline::PipelineConfig cfg;
    const auto tr = hp::pipeline::simulate(hp::repro::reference_problem(), cfg);
    return hp::pipeline::identify(tr.free, tr.step, tr.rec, cfg, hp::repro::reference_priors());
  }();
  return result;
}

}  // namespace

TEST(ProblemJson, RoundTrip) {
  const auto j = io::parse_json(
      R"({"alpha": 4, "u0_cosine": {"0": 0.5, "1": -9.4, "3": 4.9}, "t1": 0.3, "t2": 0.8, "t3": 1.3,
          "control_amplitude": 1})");
  const auto p = io::problem_from_json(j);
  EXPECT_EQ(p.alpha, 4.0);
  EXPECT_EQ(p.u0_coeffs.size(), 3u);
  EXPECT_EQ(p.u0_coeffs.at(3), 4.9);
  EXPECT_EQ(p.kernel_terms, 0);
  const auto back = io::problem_from_json(io::to_json(p));
  EXPECT_EQ(back.u0_coeffs, p.u0_coeffs);
  EXPECT_EQ(back.t3, p.t3);
}

TEST(ProblemJson, Rejections) {
  EXPECT_EQ(code_of([] { io::parse_json("{nope"); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::problem_from_json(io::parse_json(R"({"alpha": 4})")); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] {
              io::problem_from_json(io::parse_json(
                  R"({"alpha": 4, "u0_cosine": {"x": 1}, "t1": 0.3, "t2": 0.8, "t3": 1.3, "control_amplitude": 1})"));
            }),
            hp::ErrorCode::Parse);
  EXPECT_THROW(io::problem_from_json(io::parse_json(
                   R"({"alpha": -4, "u0_cosine": {}, "t1": 0.3, "t2": 0.8, "t3": 1.3, "control_amplitude": 1})")),
               hp::Error);
  EXPECT_EQ(code_of([] { io::load_problem("/nonexistent/problem.json"); }), hp::ErrorCode::Io);
}

TEST(TraceCsv, RoundTripIsExact) {
  hp::model::SampleTrace t;
  t.t_start = 0.3;
  t.period = 0.01;
  for (int i = 0; i < 50; ++i) t.values.push_back(std::sin(0.1 * i) / 3.0);
  const std::string csv = io::trace_to_csv(t);
  EXPECT_EQ(csv.rfind("t,y\n", 0), 0u);
  const auto back = io::trace_from_csv(csv);
  EXPECT_EQ(back.values, t.values);
  EXPECT_NEAR(back.t_start, 0.3, 1e-15);
  EXPECT_NEAR(back.period, 0.01, 1e-15);
  EXPECT_EQ(io::trace_to_csv(back), csv);
}

TEST(TraceCsv, Rejections) {
  EXPECT_EQ(code_of([] { io::trace_from_csv("x,y\n0,1\n1,2\n"); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::trace_from_csv("t,y\n0,1\n"); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::trace_from_csv("t,y\n0,1\n1,2\n3,3\n"); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::trace_from_csv("t,y\n0,1\n1,abc\n"); }), hp::ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::trace_from_csv(""); }), hp::ErrorCode::Parse);
}

TEST(Priors, Parse) {
  const auto p = io::priors_from_json(io::parse_json(R"({"M0": 15, "alpha0": 3})"));
  EXPECT_EQ(p.m0, 15.0);
  EXPECT_EQ(p.alpha0, 3.0);
  EXPECT_EQ(code_of([] { io::priors_from_json(io::parse_json(R"({"M0": 15})")); }), hp::ErrorCode::Parse);
  EXPECT_THROW(io::priors_from_json(io::parse_json(R"({"M0": 15, "alpha0": 0})")), hp::Error);
}

TEST(ResultJson, FieldNames) {
  const auto j = io::to_json(reference_result());
  for (const char* key : {"alpha_hat", "alpha_candidates", "free_modes", "u0_cosine_hat", "gcv_k", "gcv_curve",
                          "certificate", "certificate_inputs", "diagnostics"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("gcv_k").get<int>(), 6);
  EXPECT_EQ(j.at("u0_cosine_hat").size(), 20u);
  EXPECT_EQ(j.at("free_modes").size(), 2u);
  EXPECT_EQ(j.at("free_modes")[1].at("n").get<int>(), 1);
  const auto& step1 = j.at("diagnostics").at("step1");
  for (const char* key : {"order", "poles", "rates", "amplitudes", "sigma", "sigma_M", "y1_norm_2", "y0_trunc_gap_2"}) {
    EXPECT_TRUE(step1.contains(key)) << key;
  }
  const auto& cert = j.at("certificate");
  for (const char* key : {"M0", "alpha0", "M", "N", "L", "T1", "Ts", "theta", "M_theta_L", "Y1_norm_2", "sigma_M",
                          "Y0M_gap_2", "kappa_XM", "rho", "pole_bound", "alpha_bound", "alpha_interval"}) {
    EXPECT_TRUE(cert.contains(key)) << key;
  }
  EXPECT_EQ(j.at("alpha_hat").get<double>(), reference_result().alpha_hat);
}

TEST(ResultJson, Deterministic) {
  EXPECT_EQ(io::dump(io::to_json(reference_result())), io::dump(io::to_json(reference_result())));
}

TEST(Diagnostics, FromResultAndRaw) {
  const auto j = io::to_json(reference_result());
  const auto d = io::diagnostics_from_json(j);
  const auto& ci = reference_result().certificate_inputs;
  EXPECT_EQ(d.inputs.m, ci.m);
  EXPECT_EQ(d.inputs.sigma_m, ci.sigma_m);
  EXPECT_EQ(d.inputs.kappa_xm, ci.kappa_xm);
  EXPECT_EQ(d.alpha_hat, reference_result().alpha_hat);
  const auto raw = io::diagnostics_from_json(j.at("certificate_inputs"));
  EXPECT_EQ(raw.inputs.y1_norm, ci.y1_norm);
  EXPECT_FALSE(raw.alpha_hat.has_value());

  const auto cert = hp::pipeline::certify(d.inputs, hp::repro::reference_priors(), d.alpha_hat);
  EXPECT_EQ(cert.rho, reference_result().certificate->rho);
  EXPECT_EQ(cert.alpha_interval(), reference_result().certificate->alpha_interval());
}

TEST(Plot, CsvTwins) {
  const auto& r = reference_result();
  std::istringstream gcv(hp::plot::gcv_csv(r.gcv));
  std::string line;
  std::getline(gcv, line);
  EXPECT_EQ(line, "k,G");
  int rows = 0;
  while (std::getline(gcv, line)) ++rows;
  EXPECT_EQ(rows, r.gcv.rank);

  const auto truth = hp::repro::reference_problem().u0_coeffs;
  std::istringstream u0(hp::plot::u0_csv(r.u0_coeffs_hat, &truth));
  std::getline(u0, line);
  EXPECT_EQ(line, "x,u0_hat,u0_ref");
  rows = 0;
  while (std::getline(u0, line)) ++rows;
  EXPECT_EQ(rows, hp::plot::kU0GridPoints);
}

TEST(Plot, SvgIsSelfContained) {
  const auto& r = reference_result();
  for (const std::string& svg : {hp::plot::gcv_svg(r.gcv), hp::plot::u0_svg(r.u0_coeffs_hat)}) {
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("viewBox=\"0 0 800 600\""), std::string::npos);
    EXPECT_EQ(svg.find("href"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(Plot, WriteAll) {
  const fs::path dir = scratch_dir("plots");
  hp::plot::write_all(dir / "nested", reference_result());
  for (const char* f : {"gcv.svg", "gcv.csv", "u0.svg", "u0.csv"}) EXPECT_TRUE(fs::exists(dir / "nested" / f)) << f;
  fs::remove_all(dir);
}
