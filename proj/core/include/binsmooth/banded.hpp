#pragma once

#include <Eigen/Dense>

namespace binsmooth {

/**
 * Symmetric banded matrix in LAPACK-style lower band storage:
 * band(i, j) holds A(j+i, j) for 0 <= i <= kd.
 */
class SymmetricBandMatrix {
public:
    SymmetricBandMatrix() = default;
    SymmetricBandMatrix(int dim, int kd);

    int dim() const { return dim_; }
    int bandwidth() const { return kd_; }

    /// Accumulates v into A(i,j); only the lower triangle is stored.
    void add(int i, int j, double v);
    double at(int i, int j) const;

    void scale(double c) { band_ *= c; }
    Eigen::MatrixXd dense() const;

    const Eigen::MatrixXd& band() const { return band_; }

private:
    int dim_ = 0;
    int kd_ = 0;
    Eigen::MatrixXd band_; // (kd+1) x dim
};

/**
 * Cholesky factorization A = L L' of a symmetric positive definite banded
 * matrix, with L kept in band storage.  Cost O(dim * kd^2); solves are
 * O(dim * kd) per right-hand side.
 */
class BandCholesky {
public:
    BandCholesky() = default;

    /// Factors A; returns false if a pivot is not strictly positive.
    bool factor(const SymmetricBandMatrix& a);

    bool ok() const { return ok_; }
    int dim() const { return dim_; }

    /// Diagonal-based reciprocal condition estimate (min L_kk / max L_kk)^2.
    double rcond_estimate() const;

    /// Index of the smallest Cholesky pivot (diagnostic for near-singularity).
    int weakest_pivot_index() const { return weakest_; }

    void solve_in_place(Eigen::Ref<Eigen::VectorXd> b) const;
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve_matrix(const Eigen::MatrixXd& b) const;

private:
    int dim_ = 0;
    int kd_ = 0;
    bool ok_ = false;
    int weakest_ = -1;
    Eigen::MatrixXd lower_; // (kd+1) x dim, band storage of L
};

} // namespace binsmooth
