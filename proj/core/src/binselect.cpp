#include "binsmooth/binselect.hpp"

#include "binsmooth/basis.hpp"
#include "binsmooth/errors.hpp"
#include "binsmooth/fit.hpp"
#include "binsmooth/partition.hpp"
#include "binsmooth/variance.hpp"

#include <cmath>
#include <string>

namespace binsmooth {

namespace polytables {

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

} // namespace

double legendre_sq_integral(int m) {
    const double c = binom(2 * m, m);
    return 1.0 / (c * c * (2 * m + 1));
}

double bernoulli_number(int m) {
    // B_m via the defining recurrence; B_1 = -1/2 convention.
    static thread_local std::vector<double> cache{1.0, -0.5};
    for (int j = static_cast<int>(cache.size()); j <= m; ++j) {
        double s = 0.0;
        for (int k = 0; k < j; ++k) s += binom(j + 1, k) * cache[static_cast<std::size_t>(k)];
        cache.push_back(-s / (j + 1));
    }
    return cache[static_cast<std::size_t>(m)];
}

double bernoulli_poly(int m, double z) {
    double out = 0.0;
    for (int k = 0; k <= m; ++k) out += binom(m, k) * bernoulli_number(m - k) * std::pow(z, k);
    return out;
}

void gauss_legendre(int npts, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights) {
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(npts, npts);
    for (int k = 1; k < npts; ++k) {
        const double off = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = off;
        jac(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    nodes.resize(npts);
    weights.resize(npts);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int k = 0; k < npts; ++k) {
        nodes[k] = mid + half * eig.eigenvalues()[k];
        const double v0 = eig.eigenvectors()(0, k);
        weights[k] = 2.0 * v0 * v0 * half;
    }
}

} // namespace polytables

namespace {

double factorial(int m) {
    double f = 1.0;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

double falling(int a, int v) {
    double f = 1.0;
    for (int k = 0; k < v; ++k) f *= a - k;
    return f;
}

/// tr{ (int psi psi')^{-1} int psi^(v) psi^(v)' } for psi(z) = (1, z, .., z^p).
double psi_trace(int p, int v) {
    const int m = p + 1;
    Eigen::MatrixXd h(m, m), dv = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) h(a, b) = 1.0 / (a + b + 1);
    for (int a = v; a < m; ++a)
        for (int b = v; b < m; ++b)
            dv(a, b) = falling(a, v) * falling(b, v) / (a + b - 2 * v + 1);
    return h.ldlt().solve(dv).trace();
}

int clamp_J(int j_raw, Eigen::Index distinct, std::vector<std::string>& warnings) {
    int j = j_raw;
    if (j < 2) {
        warnings.push_back("selected J=" + std::to_string(j_raw) + " raised to the minimum of 2");
        j = 2;
    }
    if (static_cast<Eigen::Index>(j) > distinct) {
        warnings.push_back("selected J=" + std::to_string(j_raw) + " capped at the " +
                           std::to_string(distinct) + " distinct x values");
        j = static_cast<int>(distinct);
    }
    return j;
}

struct Pilot {
    Eigen::VectorXd fhat;      // Gaussian reference density at x_i
    Eigen::VectorXd sigma2;    // clamped conditional variance at (x_i, w_i)
    double mu_deriv_top = 0.0; // mu_hat^{(p+1)}, constant for a global pilot
    double top_tstat = 0.0;    // t-statistic of the pilot's top coefficient
};

Pilot global_pilot(const Dataset& data, int degree) {
    const Eigen::Index n = data.n();
    const double mx = data.x.mean();
    const double sx = std::sqrt((data.x.array() - mx).square().sum() / (n - 1));
    if (!(sx > 0.0)) throw NumericError("degenerate pilot: x has zero variance");

    Eigen::MatrixXd design(n, degree + 1 + data.d());
    for (Eigen::Index i = 0; i < n; ++i) {
        double z = 1.0;
        const double zi = (data.x[i] - mx) / sx;
        for (int k = 0; k <= degree; ++k) {
            design(i, k) = z;
            z *= zi;
        }
    }
    design.rightCols(data.d()) = data.w;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericError("degenerate pilot regression (collinear design)");

    const Eigen::VectorXd a1 = qr.solve(data.y);
    const Eigen::VectorXd a2 = qr.solve(data.y.array().square().matrix());
    const Eigen::VectorXd m1 = design * a1;
    const Eigen::VectorXd m2 = design * a2;

    Pilot pilot;
    const double var_y = (data.y.array() - data.y.mean()).square().sum() / (n - 1);
    const double floor = 1e-10 * var_y;
    pilot.sigma2 = (m2.array() - m1.array().square()).max(floor);

    pilot.fhat.resize(n);
    const double norm = 1.0 / (sx * std::sqrt(2.0 * M_PI));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = (data.x[i] - mx) / sx;
        pilot.fhat[i] = norm * std::exp(-0.5 * z * z);
    }
    pilot.mu_deriv_top = factorial(degree) * a1[degree] / std::pow(sx, degree);

    // OLS t-statistic of the top pilot coefficient; gauges whether the
    // leading-bias derivative is statistically distinguishable from zero
    const Eigen::Index df = n - design.cols();
    if (df > 0) {
        const double s2 = (data.y - m1).squaredNorm() / static_cast<double>(df);
        Eigen::VectorXd ek = Eigen::VectorXd::Zero(design.cols());
        ek[degree] = 1.0;
        const Eigen::MatrixXd xtx = design.transpose() * design;
        const double var_top = s2 * ek.dot(xtx.ldlt().solve(ek));
        pilot.top_tstat = var_top > 0.0 ? a1[degree] / std::sqrt(var_top) : 0.0;
    }
    return pilot;
}

} // namespace

int imse_optimal_J(const ImseConstants& consts, Eigen::Index n) {
    if (!(consts.variance_const > 0.0))
        throw NumericError("IMSE selection requires a positive variance constant");
    const double ratio = 2.0 * (consts.p - consts.v + 1) * consts.bias_const /
                         ((1.0 + 2.0 * consts.v) * consts.variance_const);
    const double expo = 1.0 / (2.0 * consts.p + 3.0);
    return static_cast<int>(std::ceil(std::pow(ratio, expo) * std::pow(static_cast<double>(n), expo)));
}

BinSelection rot_select(const Dataset& data, int p, int s, int v) {
    if (v < 0 || v > p || s < 0 || s > p) throw ConfigError("rot_select requires 0 <= s,v <= p");
    const SortIndex sorted = sort_index(data);
    const Pilot pilot = global_pilot(data, p + 1);

    BinSelection sel;
    sel.consts.p = p;
    sel.consts.s = s;
    sel.consts.v = v;
    sel.consts.method = ImseConstants::Method::rot;

    const Eigen::Index n = data.n();
    double vsum = 0.0, bsum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        vsum += pilot.sigma2[i] * std::pow(pilot.fhat[i], 2 * v);
        bsum += 1.0 / std::pow(pilot.fhat[i], 2 * (p + 1 - v));
    }
    sel.consts.variance_const = psi_trace(p, v) * vsum / n;
    const double dtop = pilot.mu_deriv_top;
    sel.consts.bias_const = polytables::legendre_sq_integral(p + 1 - v) /
                            std::pow(factorial(p + 1 - v), 2) * dtop * dtop * bsum / n;

    // the leading bias vanishes when mu^(p+1) is (statistically) zero;
    // a noise-driven bias constant would otherwise be blown up by the
    // reference-density tail weights, so gate on the pilot t-statistic
    if (!(std::abs(pilot.top_tstat) >= 2.33) ||
        !(sel.consts.bias_const > 1e-14 * sel.consts.variance_const) ||
        !std::isfinite(sel.consts.bias_const)) {
        sel.consts.degenerate_bias = true;
        sel.warnings.push_back("degenerate bias constant (mu^(p+1) ~ 0); J fixed at the minimum");
        sel.J_unclamped = 2;
        sel.J = clamp_J(2, sorted.distinct_count, sel.warnings);
        return sel;
    }

    sel.J_unclamped = imse_optimal_J(sel.consts, n);
    sel.J = clamp_J(sel.J_unclamped, sorted.distinct_count, sel.warnings);
    return sel;
}

BinSelection dpi_select(const Dataset& data, int p, int s, int v, std::optional<int> J_pre_opt) {
    if (v < 0 || v > p || s < 0 || s > p) throw ConfigError("dpi_select requires 0 <= s,v <= p");
    const SortIndex sorted = sort_index(data);
    const Eigen::Index n = data.n();

    BinSelection sel;
    sel.consts.p = p;
    sel.consts.s = s;
    sel.consts.v = v;
    sel.consts.method = ImseConstants::Method::dpi;

    int J_pre = J_pre_opt ? *J_pre_opt : rot_select(data, p, s, v).J;
    J_pre = clamp_J(J_pre, sorted.distinct_count, sel.warnings);

    const int s_pilot = std::min(s + 1, p + 1);
    const int K_pilot = (p + 2) * J_pre - s_pilot * (J_pre - 1);
    if (n <= K_pilot + data.d())
        throw NumericError("preliminary J=" + std::to_string(J_pre) +
                           " leaves too few observations for the order-" + std::to_string(p + 1) +
                           " pilot binscatter");

    const QuantilePartition part = build_partition(data, sorted, J_pre);
    const int J_eff = part.J;

    const BasisSpec spec(p, s, part);
    const FitResult fit = fit_binscatter(data, spec);
    const VarianceModel vm = sandwich(fit, data);

    // pilot for mu^(p+1): order p+1 on the same partition
    const FitResult pilot_fit = fit_binscatter(data, BasisSpec(p + 1, s_pilot, part));

    const int K = spec.K();
    Eigen::VectorXd nodes, wts;

    // variance constant: J^-(1+2v) tr(Qinv Sigma Qinv  int b^(v) b^(v)' w_hat)
    Eigen::MatrixXd mv = Eigen::MatrixXd::Zero(K, K);
    for (int j = 0; j < J_eff; ++j) {
        const double wj = static_cast<double>(part.counts[static_cast<std::size_t>(j)]) /
                          (static_cast<double>(n) * part.widths[j]);
        polytables::gauss_legendre(p + 2, part.knots[j], part.knots[j + 1], nodes, wts);
        for (int k = 0; k < nodes.size(); ++k) {
            const SparseBasisRow row = eval_basis(spec, nodes[k], v);
            const Eigen::VectorXd seg = row.values * std::sqrt(wts[k] * wj);
            mv.block(row.first, row.first, seg.size(), seg.size()).noalias() +=
                seg * seg.transpose();
        }
    }
    const Eigen::MatrixXd qinv_mv =
        static_cast<double>(n) * fit.gram_chol.solve_matrix(mv); // Q^-1 M
    const Eigen::MatrixXd qinv_mv_t = qinv_mv.transpose();
    const Eigen::MatrixXd c =
        static_cast<double>(n) * fit.gram_chol.solve_matrix(qinv_mv_t); // Q^-1 M Q^-1
    sel.consts.variance_const =
        std::pow(static_cast<double>(J_eff), -(1.0 + 2.0 * v)) * vm.sigma.cwiseProduct(c).sum();

    // bias constant via the orthogonalized leading error
    const int m1 = p + 1 - v;
    auto local_term = [&](double x, int order, int mm) {
        const int bin = part.locate(x);
        const double h = part.widths[bin];
        const double u = (x - part.knots[bin]) / h;
        return pilot_fit.evaluate(x, p + 1) / factorial(order) * std::pow(h, order) *
               polytables::bernoulli_poly(mm, u);
    };

    Eigen::VectorXd proj_rhs = Eigen::VectorXd::Zero(K);
    for (Eigen::Index i = 0; i < n; ++i) {
        const SparseBasisRow row = eval_basis(spec, data.x[i]);
        proj_rhs.segment(row.first, row.values.size()) +=
            row.values * local_term(data.x[i], p + 1, p + 1);
    }
    proj_rhs /= static_cast<double>(n);
    const Eigen::VectorXd proj = static_cast<double>(n) * fit.gram_chol.solve(proj_rhs);

    double bias_int = 0.0;
    for (int j = 0; j < J_eff; ++j) {
        const double wj = static_cast<double>(part.counts[static_cast<std::size_t>(j)]) /
                          (static_cast<double>(n) * part.widths[j]);
        polytables::gauss_legendre(p + 2, part.knots[j], part.knots[j + 1], nodes, wts);
        for (int k = 0; k < nodes.size(); ++k) {
            const SparseBasisRow row = eval_basis(spec, nodes[k], v);
            const double bias = row.dot(proj) - local_term(nodes[k], m1, m1);
            bias_int += wts[k] * wj * bias * bias;
        }
    }
    sel.consts.bias_const = std::pow(static_cast<double>(J_eff), 2.0 * (p + 1 - v)) * bias_int;

    // relative to the response scale, so exactly-representable responses
    // (residuals at rounding level) register as degenerate
    const double vscale = std::max(data.y.array().square().mean(),
                                   (data.y.array() - data.y.mean()).square().mean());
    if (!(sel.consts.variance_const > 1e-14 * vscale) ||
        !std::isfinite(sel.consts.variance_const)) {
        sel.consts.degenerate_variance = true;
        sel.warnings.push_back("degenerate variance constant (noise-free fit); J capped at the "
                               "number of distinct x values");
        sel.J_unclamped = static_cast<int>(sorted.distinct_count);
        sel.J = sel.J_unclamped;
        return sel;
    }
    if (!(sel.consts.bias_const > 1e-14 * sel.consts.variance_const) ||
        !std::isfinite(sel.consts.bias_const)) {
        sel.consts.degenerate_bias = true;
        sel.warnings.push_back("degenerate bias constant; J fixed at the minimum");
        sel.J_unclamped = 2;
        sel.J = clamp_J(2, sorted.distinct_count, sel.warnings);
        return sel;
    }

    sel.J_unclamped = imse_optimal_J(sel.consts, n);
    sel.J = clamp_J(sel.J_unclamped, sorted.distinct_count, sel.warnings);
    return sel;
}

} // namespace binsmooth
