#pragma once

#include "binsmooth/dataset.hpp"

#include <Eigen/Dense>

#include <vector>

namespace binsmooth {

/**
 * Quantile-spaced partition of [x_(1), x_(n)] into J bins.  Interior knots
 * sit at the order statistics x_(floor(j*n/J)); bins are left-closed and
 * right-open except the last, which is closed.
 */
struct QuantilePartition {
    Eigen::VectorXd knots;             // J+1 strictly increasing boundaries
    Eigen::VectorXd widths;            // J positive bin widths
    std::vector<Eigen::Index> counts;  // observations per bin, sums to n
    int J = 0;

    int requested_J = 0;   // J asked for before knot dedup
    bool deduped = false;  // true when coincident knots reduced J

    double lo() const { return knots[0]; }
    double hi() const { return knots[J]; }

    /// 0-based bin index of x0; throws EvaluationError outside [lo, hi].
    int locate(double x0) const;
};

QuantilePartition build_partition(const Dataset& data, const SortIndex& sort, int J);

/// max_j h_j / min_j h_j, the quasi-uniformity diagnostic.
double quasi_uniformity_ratio(const QuantilePartition& part);

} // namespace binsmooth
