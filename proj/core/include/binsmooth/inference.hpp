#pragma once

#include "binsmooth/dataset.hpp"
#include "binsmooth/fit.hpp"
#include "binsmooth/variance.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace binsmooth {

/**
 * Robust-bias-corrected bundle: for inference after selecting J at order p,
 * the fit is redone at order p+q with smoothness min(s+q, p+q) on the same
 * partition, and all intervals/bands/tests use that refit.
 */
struct RbcModel {
    FitResult fit;     // order p+q
    VarianceModel var;
    int p = 0, s = 0, v = 0, q = 1;
};

RbcModel prepare_rbc(const Dataset& data, int p, int s, int v, int q, int J, VceMode vce);

/// Evaluation grid spanning the partition, equal point count per bin; for
/// discontinuous fits (s = 0) interior knots enter as two one-sided limits.
struct EvalGrid {
    std::vector<double> points;
    Eigen::VectorXd mu;      // mu_hat^(v)
    Eigen::VectorXd omega;   // Omega_hat(x)
    Eigen::VectorXd se;      // sqrt(Omega_hat / n)
    std::vector<SparseBasisRow> rows; // cached v-th derivative basis rows
    Eigen::Index n = 0;
};

/// Grid abscissae for a basis: equal count per bin, the right endpoint, and
/// for s = 0 the left limits of interior knots.  target <= 0 gives the
/// default max(20 J, 500).
std::vector<double> grid_points(const BasisSpec& spec, int target_points = 0);

/// target_points <= 0 selects the default max(20 J, 500).
EvalGrid make_grid(const RbcModel& model, int target_points = 0);

enum class SupMode { abs, pos, neg };

/// Simulated distribution of the sup of the conditional Gaussian process
/// Z(x) = b^(v)(x)' Qinv Sigma^{1/2} N / sqrt(Omega(x)) over the grid.
struct SupSim {
    std::vector<double> sups_sorted;
    SupMode mode = SupMode::abs;
    int draws = 0;
    std::uint64_t seed = 0;
    int clipped_eigenvalues = 0; // rank note from the PSD square root
};

SupSim simulate_sup(const RbcModel& model, const EvalGrid& grid, int draws, std::uint64_t seed,
                    SupMode mode);

/// Finite-sample-consistent critical value: the ceil((1-alpha)(D+1))-th
/// order statistic, so that {statistic > cv} iff {p_value < alpha}.
double critical_value(const SupSim& sim, double alpha);

/// Monte Carlo p-value (r+1)/(draws+1) with r = #{sup draws >= statistic}.
double p_value(const SupSim& sim, double statistic);

struct CiResult {
    EvalGrid grid;
    double multiplier = 0.0; // Phi^{-1}(1 - alpha/2)
    Eigen::VectorXd lower, upper;
    double alpha = 0.05;
};

CiResult pointwise_ci(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                      VceMode vce = VceMode::hc0, int grid_target = 0);

struct BandResult {
    EvalGrid grid;
    double cv = 0.0;
    Eigen::VectorXd lower, upper;
    double alpha = 0.05;
    int draws = 0;
    std::uint64_t seed = 0;
};

BandResult confidence_band(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                           int draws, std::uint64_t seed, VceMode vce = VceMode::hc0,
                           int grid_target = 0);

/**
 * Parametric null families for specification and shape tests.  All built-in
 * families are linear in transformed regressors, so theta_hat comes from a
 * least-squares fit of y on the model regressors and w.
 */
struct ParametricModel {
    enum class Family { constant, linear, polynomial, logistic_mean, exponential_mean, user_coeffs };
    Family family = Family::linear;
    int degree = 1;          // for polynomial
    Eigen::VectorXd coeffs;  // fitted theta_hat, or user-supplied

    /// Parses "constant", "linear", "quadratic", "poly:K", "logistic",
    /// "exponential", or "coeffs:a0,a1,...".
    static ParametricModel parse(const std::string& name);

    std::string describe() const;
    bool needs_fit() const { return family != Family::user_coeffs; }
    int n_params() const;
    Eigen::VectorXd regressors(double x) const;
    double eval(double x, int v) const;
};

/// Least-squares theta_hat of y on [model regressors, w].
ParametricModel fit_model(const ParametricModel& proto, const Dataset& data);

struct TestResult {
    double statistic = 0.0;
    double cv = 0.0;
    double p_value = 0.0;
    std::string kind;  // "two_sided_spec" | "one_sided_left" | "one_sided_right"
    std::string model; // description of m(x, theta_hat)
    double alpha = 0.05;
    int draws = 0;
    std::uint64_t seed = 0;
    EvalGrid grid;                 // evaluation grid used for the sup
    Eigen::VectorXd model_values;  // m^(v)(x, theta_hat) on the grid
};

TestResult test_specification(const Dataset& data, int p, int s, int v, int q, double alpha,
                              int J, const ParametricModel& model, int draws, std::uint64_t seed,
                              VceMode vce = VceMode::hc0, int grid_target = 0);

enum class ShapeDirection { le, ge };

/// One-sided sup test of mu^(v) <= m^(v) (le) or >= (ge); the baseline
/// defaults to m = 0.
TestResult test_shape(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                      ShapeDirection direction, std::optional<ParametricModel> baseline,
                      int draws, std::uint64_t seed, VceMode vce = VceMode::hc0,
                      int grid_target = 0);

} // namespace binsmooth
