#include "binsmooth/basis.hpp"

#include "binsmooth/errors.hpp"

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

namespace binsmooth {

namespace {

double falling_factorial(int a, int v) {
    double f = 1.0;
    for (int k = 0; k < v; ++k) f *= a - k;
    return f;
}

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

/**
 * Values and derivatives of the p+1 B-spline basis functions that are
 * nonzero on the knot span [xi[span], xi[span+1]).  ders(k, j) holds the k-th
 * derivative of basis function (span - p + j) at u.  This is the standard
 * triangular-table recursion; every divisor is a knot difference straddling
 * the nondegenerate span, so repeated knots never divide by zero.
 */
Eigen::MatrixXd ders_basis_funs(int span, double u, int p, int nders,
                                const Eigen::VectorXd& xi) {
    Eigen::MatrixXd ndu(p + 1, p + 1);
    Eigen::VectorXd left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - xi[span + 1 - j];
        right[j] = xi[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }

    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(nders + 1, p + 1);
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nders && k <= p; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double r = p;
    for (int k = 1; k <= nders && k <= p; ++k) {
        for (int j = 0; j <= p; ++j) ders(k, j) *= r;
        r *= (p - k);
    }
    return ders;
}

void check_derivative_order(const BasisSpec& spec, int v) {
    if (v < 0 || v > spec.p)
        throw ConfigError("derivative order v=" + std::to_string(v) + " exceeds p=" +
                          std::to_string(spec.p));
}

} // namespace

BasisSpec::BasisSpec(int p_, int s_, QuantilePartition part_)
    : p(p_), s(s_), part(std::move(part_)) {
    if (p < 0) throw ConfigError("polynomial order p must be nonnegative");
    if (s < 0 || s > p)
        throw ConfigError("smoothness order s=" + std::to_string(s) +
                          " must satisfy 0 <= s <= p=" + std::to_string(p));
    if (part.J < 1) throw ConfigError("basis requires a valid partition");
    if (s >= 1) {
        const int mult = p - s + 1;
        const int len = 2 * (p + 1) + mult * (part.J - 1);
        ext_knots_.resize(len);
        int pos = 0;
        for (int k = 0; k <= p; ++k) ext_knots_[pos++] = part.knots[0];
        for (int j = 1; j < part.J; ++j)
            for (int r = 0; r < mult; ++r) ext_knots_[pos++] = part.knots[j];
        for (int k = 0; k <= p; ++k) ext_knots_[pos++] = part.knots[part.J];
        assert(pos == len);
    }
}

ExtendedKnots build_extended_knots(const BasisSpec& spec) {
    if (spec.s < 1)
        throw ConfigError("extended knots are defined for s >= 1; s=0 is the unconstrained path");
    return ExtendedKnots{spec.extended_knots()};
}

SparseBasisRow eval_unconstrained(const BasisSpec& spec, double x0, int v) {
    check_derivative_order(spec, v);
    const int p = spec.p;
    const int bin = spec.part.locate(x0);
    const double h = spec.part.widths[bin];
    const double u = (x0 - spec.part.knots[bin]) / h;
    const double scale = std::sqrt(static_cast<double>(spec.part.J)) / std::pow(h, v);

    SparseBasisRow row;
    row.first = bin * (p + 1);
    row.values = Eigen::VectorXd::Zero(p + 1);
    for (int a = v; a <= p; ++a)
        row.values[a] = scale * falling_factorial(a, v) * std::pow(u, a - v);
    return row;
}

SparseBasisRow eval_spline(const BasisSpec& spec, double x0, int v) {
    check_derivative_order(spec, v);
    if (spec.s < 1) throw ConfigError("eval_spline requires s >= 1");
    const int p = spec.p;
    const int bin = spec.part.locate(x0);
    const int span = p + bin * (p - spec.s + 1);

    const Eigen::MatrixXd ders = ders_basis_funs(span, x0, p, v, spec.extended_knots());
    SparseBasisRow row;
    row.first = span - p;
    row.values = std::sqrt(static_cast<double>(spec.part.J)) * ders.row(v).transpose();
    return row;
}

SparseBasisRow eval_basis(const BasisSpec& spec, double x0, int v) {
    return spec.s == 0 ? eval_unconstrained(spec, x0, v) : eval_spline(spec, x0, v);
}

Eigen::SparseMatrix<double> transformation_matrix(const BasisSpec& spec) {
    const int p = spec.p, J = spec.part.J;
    if (spec.s != spec.p)
        throw ConfigError("transformation_matrix is available for s = p only; "
                          "use eval_spline for 0 < s < p");

    const int K = spec.K();
    Eigen::SparseMatrix<double> T(K, (p + 1) * J);
    if (p == 0) {
        T.setIdentity();
        return T;
    }

    const Eigen::VectorXd& xi = spec.extended_knots();
    const int L = static_cast<int>(xi.size());

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(K) * (p + 1) * (p + 1));

    for (int l = 0; l < K; ++l) {
        // support of function l covers bins [l-p, l]
        const int b_lo = std::max(0, l - p);
        const int b_hi = std::min(J - 1, l);
        const bool simple_knots = (l >= p) && (l + p + 1 <= L - 1 - p);

        for (int b = b_lo; b <= b_hi; ++b) {
            const double h = spec.part.widths[b];
            Eigen::VectorXd c(p + 1);

            if (simple_knots) {
                // closed-form coefficients from the truncated-power expansion
                const int jj = p + b + 1; // extended index of the cell's right knot
                const double span_len = xi[l + p + 1] - xi[l];
                for (int a = 0; a <= p; ++a) {
                    double sum = 0.0;
                    for (int k = l; k <= jj - 1; ++k) {
                        double denom = 1.0;
                        for (int kp = l; kp <= l + p + 1; ++kp) {
                            if (kp != k) denom *= xi[kp] - xi[k];
                        }
                        sum += binom(p, a) * std::pow(xi[jj - 1] - xi[k], p - a) *
                               std::pow(h, a) * span_len / denom;
                    }
                    c[a] = sum;
                }
            } else {
                // boundary function with stacked knots: exact Taylor expansion
                // of the polynomial piece at the bin's left edge
                const double xl = spec.part.knots[b];
                const int span = p + b;
                const Eigen::MatrixXd ders = ders_basis_funs(span, xl, p, p, xi);
                const int pos = l - (span - p);
                double fact = 1.0, hpow = 1.0;
                for (int a = 0; a <= p; ++a) {
                    if (a > 0) {
                        fact *= a;
                        hpow *= h;
                    }
                    c[a] = ders(a, pos) * hpow / fact;
                }
            }

            for (int a = 0; a <= p; ++a) {
                if (c[a] != 0.0) trips.emplace_back(l, b * (p + 1) + a, c[a]);
            }
        }
    }
    T.setFromTriplets(trips.begin(), trips.end());
    return T;
}

} // namespace binsmooth
