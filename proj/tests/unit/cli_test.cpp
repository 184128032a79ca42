#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("heatpencil_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Invocation run(const std::string& args, const std::string& env = "SOURCE_DATE_EPOCH=0") const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " " + std::string(HEATPENCIL_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                            err.string();
    const int status = std::system(cmd.c_str());
    Invocation r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  // Closed-form cosine coefficients of x - 9 cos(pi x) + 5 cos(3 pi x).
  static json reference_problem() {
    json coeffs = json::object();
    for (int n = 0; n < 200; ++n) {
      double c = n == 0 ? 0.5 : 2.0 * ((n % 2 == 0 ? 1.0 : -1.0) - 1.0) / (n * n * kPi * kPi);
      if (n == 1) c -= 9.0;
      if (n == 3) c += 5.0;
      if (c != 0.0) coeffs[std::to_string(n)] = c;
    }
    return json{{"alpha", 4.0}, {"u0_cosine", coeffs}, {"t1", 0.3},   {"t2", 0.8},
                {"t3", 1.3},    {"control_amplitude", 1.0}, {"kernel_terms", 200}};
  }

  static std::vector<std::pair<double, double>> rows(const std::string& csv) {
    std::vector<std::pair<double, double>> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return out;
  }

  fs::path simulate_reference() const {
    const fs::path problem = write("problem.json", reference_problem().dump());
    const fs::path traces = dir_ / "traces";
    const Invocation r = run("simulate " + problem.string() + " --out " + traces.string());
    EXPECT_EQ(r.code, 0) << r.err;
    return traces;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("simulate").code, 2);
}

TEST_F(Cli, SimulateReference) {
  const fs::path traces = simulate_reference();
  for (const char* f : {"free.csv", "step.csv", "rec.csv", "manifest.json"}) EXPECT_TRUE(fs::exists(traces / f)) << f;
  const auto free_rows = rows(slurp(traces / "free.csv"));
  ASSERT_EQ(free_rows.size(), 50u);
  EXPECT_NEAR(free_rows[0].first, 0.3, 1e-15);

  const json coeffs = reference_problem().at("u0_cosine");
  long double expected = 0.0L;
  for (const auto& [key, c] : coeffs.items()) {
    const int n = std::stoi(key);
    expected += c.get<double>() * std::exp(-4.0L * n * n * kPi * kPi * 0.3L);
  }
  EXPECT_NEAR(free_rows[0].second, static_cast<double>(expected), 1e-14);

  const json m = json::parse(slurp(traces / "manifest.json"));
  EXPECT_EQ(m.at("subcommand"), "simulate");
  EXPECT_EQ(m.at("timestamp"), "1970-01-01T00:00:00Z");
  EXPECT_EQ(m.at("parameters").at("n1"), 50);
  EXPECT_EQ(m.at("outputs").size(), 3u);
}

TEST_F(Cli, SimulateZeroInitialState) {
  const json p{{"alpha", 4.0}, {"u0_cosine", json::object()}, {"t1", 0.3}, {"t2", 0.8}, {"t3", 1.3},
               {"control_amplitude", 1.0}};
  const Invocation r = run("simulate " + write("p.json", p.dump()).string() + " --out " + (dir_ / "t").string());
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& [t, y] : rows(slurp(dir_ / "t" / "free.csv"))) EXPECT_EQ(y, 0.0) << t;
}

TEST_F(Cli, SimulateStepMatchesClosedForm) {
  const json p{{"alpha", 4.0}, {"u0_cosine", {{"0", 0.5}, {"1", -2.0}}}, {"t1", 0.3}, {"t2", 0.8}, {"t3", 1.3},
               {"control_amplitude", 1.0}};
  const Invocation r = run("simulate " + write("p.json", p.dump()).string() + " --out " + (dir_ / "t").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto step = rows(slurp(dir_ / "t" / "step.csv"));
  ASSERT_EQ(step.size(), 50u);
  for (std::size_t i = 0; i < step.size(); i += 7) {
    const long double t = step[i].first, delta = t - 0.8L;
    long double y = 0.5L - 2.0L * std::exp(-4.0L * kPi * kPi * t) - 1.0L / 12.0L - delta;
    if (i > 0) {
      for (int n = 1; n < 5000; ++n) {
        const long double l = 4.0L * n * n * kPi * kPi;
        y += 2.0L / l * std::exp(-l * delta);
      }
      EXPECT_NEAR(step[i].second, static_cast<double>(y), 1e-12) << i;
    } else {
      EXPECT_NEAR(step[i].second, 0.5 - 2.0 * std::exp(-4.0 * kPi * kPi * 0.8), 1e-15);
    }
  }
}

TEST_F(Cli, SimulateInvalidProblem) {
  EXPECT_EQ(run("simulate " + write("bad.json", "{").string() + " --out " + (dir_ / "t").string()).code, 2);
  EXPECT_EQ(run("simulate " + (dir_ / "absent.json").string() + " --out " + (dir_ / "t").string()).code, 2);
}

TEST_F(Cli, IdentifyReference) {
  const fs::path traces = simulate_reference();
  const fs::path priors = write("priors.json", R"({"M0": 15, "alpha0": 3})");
  const fs::path result = dir_ / "result.json", plots = dir_ / "plots";
  const Invocation r = run("identify " + traces.string() + " " + priors.string() + " --out " + result.string() + " --plot " +
                    plots.string() + " --reference " + (dir_ / "problem.json").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(result));
  EXPECT_NEAR(j.at("alpha_hat").get<double>(), 4.0, 1e-3);
  EXPECT_EQ(j.at("gcv_k"), 6);
  for (const char* key : {"alpha_hat", "alpha_candidates", "free_modes", "u0_cosine_hat", "gcv_k", "gcv_curve",
                          "certificate", "manifest"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto& cert = j.at("certificate");
  const auto interval = cert.at("alpha_interval");
  EXPECT_LT(interval[0].get<double>(), 4.0);
  EXPECT_GT(interval[1].get<double>(), 4.0);
  EXPECT_NEAR(interval[1].get<double>() - j.at("alpha_hat").get<double>(), cert.at("alpha_bound").get<double>(), 1e-12);
  EXPECT_LT(cert.at("rho").get<double>(), 1.0);
  for (const char* f : {"gcv.svg", "gcv.csv", "u0.svg", "u0.csv"}) EXPECT_TRUE(fs::exists(plots / f)) << f;
  EXPECT_EQ(slurp(plots / "u0.csv").substr(0, 16), "x,u0_hat,u0_ref\n");
}

TEST_F(Cli, IdentifyToStdoutWithoutPriors) {
  const fs::path traces = simulate_reference();
  const Invocation r = run("identify " + traces.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("certificate").is_null());
}

TEST_F(Cli, IdentifyMissingTrace) {
  const fs::path traces = simulate_reference();
  fs::remove(traces / "step.csv");
  const Invocation r = run("identify " + traces.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("step.csv"), std::string::npos) << r.err;
}

TEST_F(Cli, IdentifyReportsStep) {
  const json p{{"alpha", 4.0}, {"u0_cosine", json::object()}, {"t1", 0.3}, {"t2", 0.8}, {"t3", 1.3},
               {"control_amplitude", 1.0}};
  ASSERT_EQ(run("simulate " + write("p.json", p.dump()).string() + " --out " + (dir_ / "t").string()).code, 0);
  const Invocation r = run("identify " + (dir_ / "t").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("step 1"), std::string::npos) << r.err;
}

TEST_F(Cli, IdentifyIsDeterministic) {
  const fs::path traces = simulate_reference();
  const fs::path priors = write("priors.json", R"({"M0": 15, "alpha0": 3})");
  ASSERT_EQ(run("identify " + traces.string() + " " + priors.string() + " --out " + (dir_ / "a.json").string() +
                " --plot " + (dir_ / "pa").string())
                .code,
            0);
  ASSERT_EQ(run("identify " + traces.string() + " " + priors.string() + " --out " + (dir_ / "b.json").string() +
                " --plot " + (dir_ / "pb").string())
                .code,
            0);
  std::string a = slurp(dir_ / "a.json"), b = slurp(dir_ / "b.json");
  // The manifest records its own output paths; compare everything else byte for byte.
  json ja = json::parse(a), jb = json::parse(b);
  EXPECT_EQ(ja.at("manifest").at("timestamp"), jb.at("manifest").at("timestamp"));
  ja.erase("manifest");
  jb.erase("manifest");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(slurp(dir_ / "pa" / "gcv.csv"), slurp(dir_ / "pb" / "gcv.csv"));
  EXPECT_EQ(slurp(dir_ / "pa" / "u0.csv"), slurp(dir_ / "pb" / "u0.csv"));
}

TEST_F(Cli, BoundsFromResult) {
  const fs::path traces = simulate_reference();
  const fs::path result = dir_ / "result.json";
  ASSERT_EQ(run("identify " + traces.string() + " --out " + result.string()).code, 0);
  const fs::path priors = write("priors.json", R"({"M0": 15, "alpha0": 3})");
  const Invocation r = run("bounds " + result.string() + " " + priors.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json c = json::parse(r.out);
  const json stored = json::parse(slurp(result)).at("certificate");
  EXPECT_TRUE(stored.is_null());
  ASSERT_EQ(run("identify " + traces.string() + " " + priors.string() + " --out " + (dir_ / "with.json").string()).code,
            0);
  const json direct = json::parse(slurp(dir_ / "with.json")).at("certificate");
  EXPECT_EQ(c.at("alpha_interval"), direct.at("alpha_interval"));
  EXPECT_EQ(c.at("rho"), direct.at("rho"));
  EXPECT_EQ(c.at("pole_bound"), direct.at("pole_bound"));
  EXPECT_NEAR(c.at("theta").get<double>(), 2.3687, 1e-4);
  EXPECT_EQ(c.at("manifest").at("subcommand"), "bounds");

  const Invocation zero = run("bounds " + result.string() + " " + write("zero.json", R"({"M0": 0, "alpha0": 3})").string());
  ASSERT_EQ(zero.code, 0) << zero.err;
  const json z = json::parse(zero.out);
  EXPECT_EQ(z.at("frob_y0").get<double>(), 0.0);
  EXPECT_EQ(z.at("frob_y1").get<double>(), 0.0);
}

TEST_F(Cli, BoundsErrors) {
  const fs::path traces = simulate_reference();
  const fs::path result = dir_ / "result.json";
  ASSERT_EQ(run("identify " + traces.string() + " --out " + result.string()).code, 0);
  EXPECT_EQ(run("bounds " + result.string()).code, 2);
  EXPECT_EQ(run("bounds " + result.string() + " " + (dir_ / "absent.json").string()).code, 2);
  const Invocation huge = run("bounds " + result.string() + " " + write("huge.json", R"({"M0": 1e30, "alpha0": 3})").string());
  EXPECT_EQ(huge.code, 3);
  EXPECT_NE(huge.err.find("certificate unavailable"), std::string::npos) << huge.err;
}

TEST_F(Cli, ReproPaperReport) {
  const fs::path out = dir_ / "repro";
  const Invocation r = run("repro-paper --out " + out.string());
  const std::string report = slurp(out / "report.md");
  ASSERT_FALSE(report.empty());
  EXPECT_NE(report.find("between 3.99"), std::string::npos);
  const bool mismatches = report.find("### Mismatches") != std::string::npos;
  EXPECT_EQ(r.code, mismatches ? 1 : 0);
  for (const char* f : {"manifest.json", "result.json", "free.csv", "gcv.svg", "u0.svg"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
}
