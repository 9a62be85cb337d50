#pragma once

#include "binsmooth/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace binsmooth {

/**
 * Simulated data-generating process: x ~ Beta(2,4), a polynomial mean
 * function (default the quartic 24x^4 - 98.8x^3 + 112.4x^2 - 44.4x + 3.6),
 * Gaussian noise, and an optional covariate entering with unit coefficient,
 * either independent uniform on (-1,1) or correlated as 3(x-0.5)+U(-0.5,0.5).
 */
struct DgpSpec {
    Eigen::VectorXd mu_coeffs = default_quartic();
    double noise_sd = 0.5;

    enum class WMode { none, independent_uniform, correlated };
    WMode w_mode = WMode::independent_uniform;

    bool hetero = false;       // sigma(x) = hetero_base + hetero_slope * x
    double hetero_base = 0.1;
    double hetero_slope = 1.0;

    Eigen::Index n = 1000;
    std::uint64_t seed = 1;

    static Eigen::VectorXd default_quartic();

    double mu(double x) const;
    double mu_deriv(double x, int v) const;
    double sigma(double x) const;
};

/// Per observation the stream is consumed in the order (x, w, eps); x comes
/// from the closed-form Beta(2,4) CDF inverted by safeguarded Newton, so the
/// draw sequence is reproducible from the seed alone.
Dataset generate(const DgpSpec& dgp);

enum class ExperimentKind {
    ci_coverage,
    band_coverage,
    spec_size,
    spec_power,
    shape_size,
    shape_power,
    selector_rate,
    covadj_bias,
};

ExperimentKind parse_experiment(const std::string& name);
std::string experiment_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ci_coverage;
    int reps = 100;
    std::uint64_t seed = 1;
    DgpSpec dgp;                   // per-rep seeds are derived from `seed`

    int p = 0, s = 0, v = 0, q = 1;
    double alpha = 0.05;
    int draws = 1000;
    int grid_target = 0;
    int J = 0;                     // fixed bin count; 0 = data-driven
    bool use_dpi = false;          // selector when J = 0
    std::vector<double> eval_points = {0.2, 1.0 / 3.0, 0.5};

    Eigen::Index n2 = 8000;        // larger sample for selector_rate

    // spec_*/shape_* null model; shape tests use direction <= on mu^(v)
    std::string model = "linear";
};

struct ExperimentSummary {
    ExperimentKind kind;
    int reps = 0;
    std::map<std::string, double> metrics;               // aggregates plus *_mc_se
    std::map<std::string, std::vector<double>> per_rep;  // raw series in rep order
    std::vector<std::string> notes;
};

/// Replication-parallel with per-rep substreams; aggregates are reduced in
/// rep order, so the summary is identical for any worker count.
ExperimentSummary run_experiment(const ExperimentConfig& config);

} // namespace binsmooth
