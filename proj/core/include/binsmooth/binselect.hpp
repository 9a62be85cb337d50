#pragma once

#include "binsmooth/dataset.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace binsmooth {

namespace polytables {

/// Integral of B_m(z)^2 over [0,1], where C(2m,m) B_m is the shifted
/// Legendre polynomial of degree m; equals 1 / (C(2m,m)^2 (2m+1)).
double legendre_sq_integral(int m);

double bernoulli_number(int m);

/// m-th Bernoulli polynomial E_m(z); E_1(z) = z - 1/2, E_m' = m E_{m-1}.
double bernoulli_poly(int m, double z);

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int npts, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights);

} // namespace polytables

struct ImseConstants {
    double variance_const = 0.0; // V_hat(p,s,v)
    double bias_const = 0.0;     // B_hat(p,s,v)
    int p = 0, s = 0, v = 0;
    enum class Method { rot, dpi } method = Method::rot;
    bool degenerate_bias = false;
    bool degenerate_variance = false;
};

struct BinSelection {
    int J = 0;
    int J_unclamped = 0;
    ImseConstants consts;
    std::vector<std::string> warnings;
};

/// Ceiled IMSE-optimal J; throws on a nonpositive variance constant.
int imse_optimal_J(const ImseConstants& consts, Eigen::Index n);

/**
 * Rule-of-thumb selector: Gaussian reference density for f, global
 * polynomial pilots of degree p+1 for the conditional mean and second
 * moment, plugged into the closed-form s = 0 constants.
 */
BinSelection rot_select(const Dataset& data, int p, int s, int v);

/**
 * Direct plug-in selector on a preliminary partition (default: the ROT
 * choice).  The variance constant comes from the binscatter sandwich; the
 * bias constant evaluates the orthogonalized leading approximation error
 * with mu^(p+1) estimated by an order-(p+1) binscatter on the same
 * partition, integrated against the empirical bin-density weights.
 */
BinSelection dpi_select(const Dataset& data, int p, int s, int v,
                        std::optional<int> J_pre = std::nullopt);

} // namespace binsmooth
