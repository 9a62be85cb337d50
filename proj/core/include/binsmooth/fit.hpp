#pragma once

#include "binsmooth/banded.hpp"
#include "binsmooth/basis.hpp"
#include "binsmooth/dataset.hpp"

#include <vector>

namespace binsmooth {

struct Dot {
    double x = 0.0;  // bin center
    double mu = 0.0; // fitted value there
};

/**
 * Covariate-adjusted binscatter least-squares fit.  The Gram block B'B is
 * banded with half-bandwidth p and is kept factored; the covariate block is
 * solved densely via the backfitting identities
 *   gamma = (W'M_B W)^{-1} W'M_B y,   beta = (B'B)^{-1} B'(y - W gamma).
 */
struct FitResult {
    BasisSpec spec;
    Eigen::VectorXd beta;        // K
    Eigen::VectorXd gamma;       // d
    SymmetricBandMatrix gram;    // B'B (unnormalized; Q_hat = gram / n)
    BandCholesky gram_chol;
    Eigen::VectorXd residuals;   // y - B beta - W gamma
    Eigen::Index n = 0;
    double mean_w_gamma = 0.0;   // sample-average covariate contribution
    bool residualized = false;

    double evaluate(double x0, int v = 0) const;

    /// Q_hat^{-1} r for a sparse basis row (banded solves, never dense inverse).
    Eigen::VectorXd q_inv(const SparseBasisRow& r) const;

    /// One dot per bin at the bin midpoint.
    std::vector<Dot> dots() const;
};

FitResult fit_binscatter(const Dataset& data, const BasisSpec& spec);

/**
 * The residualized-binscatter comparator: regress y and x on (1, w), add
 * back sample means, then run canonical binscatter of the residualized
 * response on the residualized regressor.  Biased for mu in general; kept
 * for contrast with the semi-linear adjustment.
 */
FitResult fit_residualized(const Dataset& data, int J);

} // namespace binsmooth
