#pragma once

// Self-contained SVG figures (fixed 800x600 viewBox) with CSV twins.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatpencil/pipeline.hpp"

namespace heatpencil::plot {

inline constexpr int kU0GridPoints = 1001;

// k,G
std::string gcv_csv(const pipeline::GcvSelection& gcv);
// G(k) against k on a log axis; the selected k is marked.
std::string gcv_svg(const pipeline::GcvSelection& gcv);

// x,u0_hat[,u0_ref] on a uniform grid of kU0GridPoints points over [0,1].
std::string u0_csv(const std::vector<double>& coeffs_hat, const std::map<int, double>* reference = nullptr);
std::string u0_svg(const std::vector<double>& coeffs_hat, const std::map<int, double>* reference = nullptr);

// Writes gcv.svg, gcv.csv, u0.svg and u0.csv into dir (created if needed).
void write_all(const std::filesystem::path& dir, const pipeline::IdentificationResult& result,
               const std::map<int, double>* reference = nullptr);

}  // namespace heatpencil::plot
