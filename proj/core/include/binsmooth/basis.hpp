#pragma once

#include "binsmooth/partition.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace binsmooth {

/**
 * Basis configuration: piecewise polynomials of order p on a quantile
 * partition, constrained to be (s-1)-times continuously differentiable.
 * s = 0 is the unconstrained rotated basis, s = p the B-spline basis with
 * simple knots.  Dimension K = (p+1)J - s(J-1).
 */
struct BasisSpec {
    int p = 0;
    int s = 0;
    QuantilePartition part;

    BasisSpec() = default;
    BasisSpec(int p_, int s_, QuantilePartition part_);

    int K() const { return (p + 1) * part.J - s * (part.J - 1); }

    /// Extended knot sequence, precomputed at construction for s >= 1.
    const Eigen::VectorXd& extended_knots() const { return ext_knots_; }

private:
    Eigen::VectorXd ext_knots_;
};

/// One basis evaluation: at most p+1 consecutive nonzero entries.
struct SparseBasisRow {
    int first = 0;          // index of the first active basis function
    Eigen::VectorXd values; // consecutive active values

    int nnz() const { return static_cast<int>(values.size()); }
    double dot(const Eigen::VectorXd& coef) const {
        return coef.segment(first, values.size()).dot(values);
    }
};

/// Extended knot sequence: boundary knots stacked p+1 times, interior
/// quantile knots repeated with multiplicity p-s+1.
struct ExtendedKnots {
    Eigen::VectorXd xi;
};

ExtendedKnots build_extended_knots(const BasisSpec& spec);

/// v-th derivative of the standardized rotated basis (s = 0) at x0.
SparseBasisRow eval_unconstrained(const BasisSpec& spec, double x0, int v = 0);

/// v-th derivative of the order-(p+1) B-spline basis (s >= 1) at x0,
/// scaled by sqrt(J) to match the standardized unconstrained basis.
SparseBasisRow eval_spline(const BasisSpec& spec, double x0, int v = 0);

/// Dispatches on spec.s.
SparseBasisRow eval_basis(const BasisSpec& spec, double x0, int v = 0);

/**
 * Explicit transformation matrix T_s (K x (p+1)J) with b_s(x) = T_s b_0(x),
 * available for s = p (simple interior knots).  Interior rows use the
 * closed-form truncated-power coefficients; rows whose support touches the
 * stacked boundary knots fall back to exact Taylor extraction at bin edges.
 */
Eigen::SparseMatrix<double> transformation_matrix(const BasisSpec& spec);

} // namespace binsmooth
