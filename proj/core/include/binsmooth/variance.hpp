#pragma once

#include "binsmooth/dataset.hpp"
#include "binsmooth/fit.hpp"

#include <Eigen/Dense>

namespace binsmooth {

enum class VceMode { hc0, hc1, cluster };

/**
 * Sandwich variance pieces for the binscatter fit.  Sigma_hat is the meat
 * (1/n) sum b b' e^2 (or its cluster-summed analogue); Omega(x) quadratic
 * forms are evaluated through the stored Gram factorization, never a dense
 * inverse.
 */
struct VarianceModel {
    Eigen::MatrixXd sigma; // K x K
    VceMode mode = VceMode::hc0;
    Eigen::Index n_eff = 0;    // n, or number of groups for cluster mode
    double dof_factor = 1.0;   // n/(n-K-d) when the HC1-style flag is on
};

VarianceModel sandwich(const FitResult& fit, const Dataset& data, bool hc1 = false);

/// Cluster-robust meat: outer products of within-group score sums.
VarianceModel sandwich_clustered(const FitResult& fit, const Dataset& data, bool hc1 = false);

VarianceModel make_variance(const FitResult& fit, const Dataset& data, VceMode mode);

/// Omega(x0) = b^(v)(x0)' Qinv Sigma Qinv b^(v)(x0).
double omega(const VarianceModel& vm, const FitResult& fit, double x0, int v = 0);

/// Same quadratic form for a precomputed basis row.
double omega_row(const VarianceModel& vm, const FitResult& fit, const SparseBasisRow& row);

} // namespace binsmooth
