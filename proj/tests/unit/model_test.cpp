#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heatpencil/error.hpp"
#include "heatpencil/model.hpp"
#include "support/oracles.hpp"

namespace hp = heatpencil;
using hp::model::HeatProblem;

namespace {

constexpr double kPi = std::numbers::pi;

double reference_u0(double x) { return x - 9.0 * std::cos(kPi * x) + 5.0 * std::cos(3.0 * kPi * x); }

HeatProblem simple_problem(double alpha, std::map<int, double> coeffs) {
  HeatProblem p;
  p.alpha = alpha;
  p.u0_coeffs = std::move(coeffs);
  p.t1 = 0.3;
  p.t2 = 0.8;
  p.t3 = 1.3;
  return p;
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

}  // namespace

TEST(Eigenvalue, Examples) {
  EXPECT_EQ(hp::model::eigenvalue(4.0, 0), 0.0);
  EXPECT_NEAR(hp::model::eigenvalue(4.0, 1) * 0.01 * 100.0, 39.4784, 5e-5);
  EXPECT_NEAR(hp::model::eigenvalue(4.0, 2) * 0.01 * 100.0, 157.9137, 5e-5);
}

TEST(Eigenvalue, ScalesAsNSquared) {
  for (double alpha : {0.5, 1.0, 4.0, 7.3}) {
    const double l1 = hp::model::eigenvalue(alpha, 1);
    EXPECT_NEAR(l1, alpha * kPi * kPi, 1e-14 * l1);
    for (int n = 1; n <= 30; ++n) EXPECT_NEAR(hp::model::eigenvalue(alpha, n) / l1, double(n * n), 1e-12 * n * n);
  }
}

TEST(Eigenvalue, RejectsBadInput) {
  EXPECT_THROW(hp::model::eigenvalue(0.0, 1), hp::Error);
  EXPECT_THROW(hp::model::eigenvalue(1.0, -1), hp::Error);
}

TEST(CosineCoefficients, ReferenceProfile) {
  const auto c = hp::model::cosine_coefficients(reference_u0, 12);
  ASSERT_EQ(c.size(), 13u);
  EXPECT_NEAR(c[0], 0.5, 1e-10);
  EXPECT_NEAR(c[2], 0.0, 1e-10);
  EXPECT_NEAR(c[1], -9.0 - 4.0 / (kPi * kPi), 1e-10);
  EXPECT_NEAR(c[3], 5.0 + oracle::ramp_coefficient(3), 1e-10);
  for (int n = 4; n <= 12; ++n) EXPECT_NEAR(c[n], oracle::ramp_coefficient(n), 1e-10) << n;
}

TEST(CosineCoefficients, PureModesAndConstants) {
  for (int k = 1; k <= 6; ++k) {
    const auto c = hp::model::cosine_coefficients([k](double x) { return std::cos(k * kPi * x); }, 8);
    for (int n = 0; n <= 8; ++n) EXPECT_NEAR(c[n], n == k ? 1.0 : 0.0, 1e-10) << k << " " << n;
  }
  const auto c = hp::model::cosine_coefficients([](double) { return 2.5; }, 5);
  EXPECT_NEAR(c[0], 2.5, 1e-12);
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(c[n], 0.0, 1e-12);
}

TEST(CosineCoefficients, NonConvergenceIsReported) {
  const auto nasty = [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) * std::sin(1.0 / x) : 0.0; };
  EXPECT_EQ(code_of([&] { hp::model::cosine_coefficients(nasty, 2); }), hp::ErrorCode::Quadrature);
}

TEST(CosineCoefficients, ParsevalOnFiniteSums) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::map<int, double> coeffs;
    for (int n = 0; n < 5; ++n) coeffs[n] = u(rng);
    const auto fn = [&](double x) { return hp::model::evaluate_cosine_series(coeffs, x); };
    // Trapezoid on a fine grid is spectrally accurate for cosine sums of degree < grid size.
    const int m = 4096;
    double direct = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double v = fn(double(i) / m);
      direct += (i == 0 || i == m ? 0.5 : 1.0) * v * v / m;
    }
    EXPECT_NEAR(hp::model::l2_norm_squared(coeffs), direct, 1e-9);
  }
}

TEST(FreeResponse, Examples) {
  const HeatProblem constant = simple_problem(4.0, {{0, 0.5}});
  for (double t : {0.01, 0.3, 5.0}) EXPECT_EQ(hp::model::free_response(constant, t), 0.5);

  const HeatProblem single = simple_problem(4.0, {{1, -9.4053}});
  double prev = hp::model::free_response(single, 0.01);
  for (double t = 0.02; t < 3.0; t += 0.01) {
    const double v = hp::model::free_response(single, t);
    EXPECT_GT(v, prev);
    EXPECT_LT(v, 0.0);
    prev = v;
  }
  EXPECT_NEAR(hp::model::free_response(single, 3.0), 0.0, 1e-40);
}

TEST(FreeResponse, MatchesDirectSummation) {
  std::map<int, double> coeffs{{0, 0.5}, {1, -9.0 - 4.0 / (kPi * kPi)}, {3, 5.0 + oracle::ramp_coefficient(3)}};
  for (int n = 5; n <= 399; n += 2) coeffs[n] = oracle::ramp_coefficient(n);
  const HeatProblem p = simple_problem(4.0, coeffs);
  for (double t : {0.01, 0.05, 0.3, 0.55, 0.79}) {
    EXPECT_NEAR(hp::model::free_response(p, t), oracle::dirichlet_sum(coeffs, 4.0, t), 1e-14) << t;
  }
}

TEST(FreeResponse, DecreasingForPositiveModes) {
  const HeatProblem p = simple_problem(2.0, {{0, -1.0}, {1, 0.3}, {2, 2.0}, {5, 0.1}});
  double prev = hp::model::free_response(p, 0.001);
  for (double t = 0.002; t < 2.0; t *= 1.1) {
    const double v = hp::model::free_response(p, t);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(FreeResponse, RequiresPositiveTime) {
  const HeatProblem p = simple_problem(1.0, {{0, 1.0}});
  EXPECT_EQ(code_of([&] { hp::model::free_response(p, 0.0); }), hp::ErrorCode::Domain);
}

TEST(StepResponse, ContinuousAtSwitchOn) {
  const HeatProblem p = simple_problem(4.0, {{0, 0.5}, {1, -9.4}, {3, 4.9}});
  EXPECT_DOUBLE_EQ(hp::model::step_response(p, p.t2), hp::model::free_response(p, p.t2));
  EXPECT_NEAR(hp::model::step_response(p, p.t2 + 1e-12), hp::model::free_response(p, p.t2), 1e-5);
  EXPECT_NEAR(hp::model::observe(p, std::nextafter(p.t2, 0.0)), hp::model::observe(p, p.t2), 1e-12);
}

TEST(StepResponse, ConstantOffset) {
  // Long after switch-on the bracket is -1/(3 alpha) - delta up to exp(-lambda_1 delta).
  const HeatProblem p = simple_problem(4.0, {});
  const double delta = 3.0;
  EXPECT_NEAR(hp::model::step_response(p, p.t2 + delta) + delta, -1.0 / 12.0, 1e-15);
  EXPECT_NEAR(-1.0 / (3.0 * 4.0) * 100.0, -8.3333, 5e-5);
}

TEST(StepResponse, MatchesKernelQuadrature) {
  const HeatProblem p = simple_problem(4.0, {});
  EXPECT_NEAR(hp::model::step_response(p, p.t2 + 0.5), oracle::step_kernel_quadrature(4.0, 0.5), 1e-12);
  for (double alpha : {0.3, 1.0, 4.0, 8.0}) {
    for (double delta : {1e-9, 1e-6, 1e-4, 0.003, 0.05, 0.2, 1.0}) {
      const double expected = oracle::step_kernel_quadrature(alpha, delta);
      EXPECT_NEAR(hp::model::unit_step_kernel_response(alpha, delta), expected, 1e-12 * (1.0 + std::abs(expected)))
          << alpha << " " << delta;
    }
  }
}

TEST(StepResponse, TruncatedKernelSeries) {
  // A positive kernel_terms keeps the closed-form constant and truncates the exponential series.
  const double alpha = 4.0, delta = 1e-6;
  long double series = 0.0L;
  for (int n = 1; n <= 200; ++n) {
    const long double l = alpha * n * n * oracle::kPiL * oracle::kPiL;
    series += 2.0L / l * std::exp(-l * delta);
  }
  const double expected = static_cast<double>(-1.0L / (3.0L * alpha) - delta + series);
  EXPECT_NEAR(hp::model::unit_step_kernel_response(alpha, delta, 200), expected, 1e-15);
  EXPECT_GT(std::abs(hp::model::unit_step_kernel_response(alpha, delta, 200) -
                     hp::model::unit_step_kernel_response(alpha, delta, 0)),
            1e-6);
}

TEST(StepResponse, ScalesWithControlAmplitude) {
  HeatProblem p = simple_problem(3.0, {{0, 1.0}, {2, 0.5}});
  const double t = 1.0;
  const double base = hp::model::step_response(p, t) - hp::model::free_response(p, t);
  p.control_amplitude = -2.5;
  EXPECT_NEAR(hp::model::step_response(p, t) - hp::model::free_response(p, t), -2.5 * base, 1e-15);
}

TEST(StepResponse, RejectsTimesBeforeSwitchOn) {
  const HeatProblem p = simple_problem(4.0, {{0, 1.0}});
  EXPECT_EQ(code_of([&] { hp::model::step_response(p, 0.5); }), hp::ErrorCode::Domain);
}

TEST(Sample, MatchesPointwiseEvaluation) {
  const HeatProblem p = simple_problem(4.0, {{0, 0.5}, {1, -9.4}, {3, 4.9}});
  const auto one = hp::model::sample(p, 0.3, 0.01, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.values[0], hp::model::free_response(p, 0.3));

  const auto trace = hp::model::sample(p, 0.3, 0.01, 100);
  ASSERT_EQ(trace.size(), 100u);
  EXPECT_EQ(trace.t_start, 0.3);
  EXPECT_EQ(trace.period, 0.01);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.time(i);
    EXPECT_EQ(trace.values[i], t < p.t2 ? hp::model::free_response(p, t) : hp::model::step_response(p, t)) << i;
  }
}

TEST(Sample, RejectsBadGrid) {
  const HeatProblem p = simple_problem(4.0, {{0, 1.0}});
  EXPECT_THROW(hp::model::sample(p, 0.0, 0.01, 5), hp::Error);
  EXPECT_THROW(hp::model::sample(p, 0.3, 0.0, 5), hp::Error);
  EXPECT_THROW(hp::model::sample(p, 0.3, 0.01, 0), hp::Error);
}

TEST(HeatProblem, ValidatesInvariants) {
  HeatProblem p = simple_problem(4.0, {{0, 1.0}});
  EXPECT_NO_THROW(p.validate());
  p.alpha = -1.0;
  EXPECT_THROW(p.validate(), hp::Error);
  p = simple_problem(4.0, {{0, 1.0}});
  p.t2 = 0.2;
  EXPECT_THROW(p.validate(), hp::Error);
  p = simple_problem(4.0, {{-1, 1.0}});
  EXPECT_THROW(p.validate(), hp::Error);
}

TEST(ExponentialModel, EvaluatesAndValidates) {
  hp::model::ExponentialModel m{{{2.0, 0.0}, {-1.0, 3.0}}};
  EXPECT_NEAR(m.evaluate(0.5), 2.0 - std::exp(-1.5), 1e-15);
  EXPECT_NO_THROW(m.validate());
  m.terms.push_back({1.0, 3.0});
  EXPECT_THROW(m.validate(), hp::Error);
}

TEST(ProblemFromFunction, CarriesCoefficients) {
  const auto p = hp::model::problem_from_function(4.0, reference_u0, 40, 0.3, 0.8, 1.3);
  EXPECT_EQ(p.alpha, 4.0);
  EXPECT_NEAR(p.u0_coeffs.at(0), 0.5, 1e-10);
  EXPECT_NEAR(p.u0_coeffs.at(1), -9.0 - 4.0 / (kPi * kPi), 1e-10);
  EXPECT_NEAR(hp::model::evaluate_cosine_series(p.u0_coeffs, 0.37), reference_u0(0.37), 5e-3);
}
