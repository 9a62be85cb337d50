#pragma once

#include "binsmooth/fit.hpp"
#include "binsmooth/inference.hpp"
#include "binsmooth/simharness.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace binsmooth::report {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v);
json vec_json(const std::vector<double>& v);

json partition_json(const QuantilePartition& part);
json dots_json(const std::vector<Dot>& dots);
json coefficients_json(const FitResult& fit);
json band_json(const BandResult& band);
json test_json(const TestResult& test);
json experiment_json(const ExperimentSummary& sum);

/// Grid flattened to x,mu[,se,lower,upper] rows.
std::string grid_csv(const EvalGrid& grid, const Eigen::VectorXd* lower,
                     const Eigen::VectorXd* upper);

struct SvgSeries {
    std::vector<Dot> dots;
    std::vector<double> line_x;
    std::vector<double> line_y;
    std::vector<double> band_lower; // aligned with line_x; empty if no band
    std::vector<double> band_upper;
    std::vector<double> overlay_y;  // parametric overlay on line_x; optional
};

/// Deterministic standalone SVG: shaded band, fitted line, dots, overlay.
std::string render_svg(const SvgSeries& series);

/// Writes content to path ("-" means stdout).
void write_output(const std::string& path, const std::string& content);

} // namespace binsmooth::report
