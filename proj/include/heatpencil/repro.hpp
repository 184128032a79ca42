#pragma once

// Reference experiment: alpha = 4, u0(x) = x - 9 cos(pi x) + 5 cos(3 pi x),
// windows 0.3 / 0.8 / 1.3, 50 + 50 samples, priors M0 = 15, alpha0 = 3.
// Every published table value is compared against the computed one.

#include <optional>
#include <string>
#include <vector>

#include "heatpencil/model.hpp"
#include "heatpencil/pipeline.hpp"

namespace heatpencil::repro {

double reference_u0(double x);
model::HeatProblem reference_problem();
pipeline::PipelineConfig reference_config();
pipeline::Priors reference_priors();

struct Field {
  std::string group;
  std::string name;
  double published = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool relative = false;  // tolerance is a fraction of |published|
  bool pass = false;
};

struct Report {
  model::HeatProblem problem;
  pipeline::Traces traces;
  pipeline::IdentificationResult result;
  double u0_relative_l2 = 0.0;
  std::vector<Field> fields;
  bool all_pass = false;
  std::string markdown;
};

// Relative L2(0,1) error of the reconstruction on a 1001-point grid.
double u0_relative_l2_error(const std::vector<double>& coeffs_hat);

Report run();

}  // namespace heatpencil::repro
