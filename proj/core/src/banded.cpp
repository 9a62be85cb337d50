#include "binsmooth/banded.hpp"

#include <cassert>
#include <cmath>

namespace binsmooth {

SymmetricBandMatrix::SymmetricBandMatrix(int dim, int kd)
    : dim_(dim), kd_(kd), band_(Eigen::MatrixXd::Zero(kd + 1, dim)) {
    assert(dim >= 1 && kd >= 0 && kd < dim);
}

void SymmetricBandMatrix::add(int i, int j, double v) {
    if (i < j) std::swap(i, j);
    assert(i - j <= kd_);
    band_(i - j, j) += v;
}

double SymmetricBandMatrix::at(int i, int j) const {
    if (i < j) std::swap(i, j);
    if (i - j > kd_) return 0.0;
    return band_(i - j, j);
}

Eigen::MatrixXd SymmetricBandMatrix::dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int j = 0; j < dim_; ++j) {
        for (int i = j; i <= std::min(dim_ - 1, j + kd_); ++i) {
            out(i, j) = band_(i - j, j);
            out(j, i) = band_(i - j, j);
        }
    }
    return out;
}

bool BandCholesky::factor(const SymmetricBandMatrix& a) {
    dim_ = a.dim();
    kd_ = a.bandwidth();
    lower_ = a.band();
    ok_ = false;
    weakest_ = -1;

    double min_pivot = 0.0;
    for (int j = 0; j < dim_; ++j) {
        double d = lower_(0, j);
        const int k0 = std::max(0, j - kd_);
        for (int k = k0; k < j; ++k) {
            const double ljk = lower_(j - k, k);
            d -= ljk * ljk;
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            weakest_ = j;
            return false;
        }
        const double ljj = std::sqrt(d);
        lower_(0, j) = ljj;
        if (weakest_ < 0 || ljj < min_pivot) {
            min_pivot = ljj;
            weakest_ = j;
        }
        const int imax = std::min(dim_ - 1, j + kd_);
        for (int i = j + 1; i <= imax; ++i) {
            double s = lower_(i - j, j);
            const int kk0 = std::max({0, i - kd_, j - kd_});
            for (int k = kk0; k < j; ++k) {
                s -= lower_(i - k, k) * lower_(j - k, k);
            }
            lower_(i - j, j) = s / ljj;
        }
    }
    ok_ = true;
    return true;
}

double BandCholesky::rcond_estimate() const {
    if (!ok_) return 0.0;
    double lo = lower_(0, 0), hi = lower_(0, 0);
    for (int j = 1; j < dim_; ++j) {
        lo = std::min(lo, lower_(0, j));
        hi = std::max(hi, lower_(0, j));
    }
    const double r = lo / hi;
    return r * r;
}

void BandCholesky::solve_in_place(Eigen::Ref<Eigen::VectorXd> b) const {
    assert(ok_ && b.size() == dim_);
    // forward: L z = b
    for (int i = 0; i < dim_; ++i) {
        double s = b(i);
        const int k0 = std::max(0, i - kd_);
        for (int k = k0; k < i; ++k) s -= lower_(i - k, k) * b(k);
        b(i) = s / lower_(0, i);
    }
    // backward: L' x = z
    for (int i = dim_ - 1; i >= 0; --i) {
        double s = b(i);
        const int imax = std::min(dim_ - 1, i + kd_);
        for (int k = i + 1; k <= imax; ++k) s -= lower_(k - i, i) * b(k);
        b(i) = s / lower_(0, i);
    }
}

Eigen::VectorXd BandCholesky::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = b;
    solve_in_place(x);
    return x;
}

Eigen::MatrixXd BandCholesky::solve_matrix(const Eigen::MatrixXd& b) const {
    Eigen::MatrixXd x = b;
    for (Eigen::Index c = 0; c < x.cols(); ++c) solve_in_place(x.col(c));
    return x;
}

} // namespace binsmooth
