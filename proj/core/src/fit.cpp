#include "binsmooth/fit.hpp"

#include "binsmooth/errors.hpp"

#include <cmath>
#include <string>

namespace binsmooth {

namespace {

constexpr double kRcondTol = 1e-12;

void check_gram(const FitResult& fit) {
    const auto& chol = fit.gram_chol;
    if (!chol.ok() || chol.rcond_estimate() < kRcondTol) {
        const int k = chol.weakest_pivot_index();
        const int per_bin = fit.spec.s == 0 ? fit.spec.p + 1 : 1;
        const int bin = fit.spec.s == 0 ? k / per_bin : std::max(0, k - fit.spec.p);
        throw NumericError("singular binscatter Gram matrix near basis index " +
                           std::to_string(k) + " (around bin " + std::to_string(bin) +
                           "); the partition is too fine for the data");
    }
}

} // namespace

double FitResult::evaluate(double x0, int v) const {
    return eval_basis(spec, x0, v).dot(beta);
}

Eigen::VectorXd FitResult::q_inv(const SparseBasisRow& r) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(spec.K());
    rhs.segment(r.first, r.values.size()) = r.values;
    gram_chol.solve_in_place(rhs);
    return static_cast<double>(n) * rhs; // Q_hat = gram/n
}

std::vector<Dot> FitResult::dots() const {
    std::vector<Dot> out;
    out.reserve(static_cast<std::size_t>(spec.part.J));
    for (int j = 0; j < spec.part.J; ++j) {
        const double mid = 0.5 * (spec.part.knots[j] + spec.part.knots[j + 1]);
        out.push_back({mid, evaluate(mid, 0)});
    }
    return out;
}

FitResult fit_binscatter(const Dataset& data, const BasisSpec& spec) {
    const Eigen::Index n = data.n();
    const Eigen::Index d = data.d();
    const int K = spec.K();
    if (n <= K + d)
        throw NumericError("sample size n=" + std::to_string(n) +
                           " too small for K=" + std::to_string(K) + " basis functions and d=" +
                           std::to_string(d) + " covariates");

    FitResult fit;
    fit.spec = spec;
    fit.n = n;

    const int kd = std::min(spec.p, K - 1);
    fit.gram = SymmetricBandMatrix(K, kd);
    Eigen::VectorXd by = Eigen::VectorXd::Zero(K);
    Eigen::MatrixXd bw = Eigen::MatrixXd::Zero(K, d);

    for (Eigen::Index i = 0; i < n; ++i) {
        const SparseBasisRow row = eval_basis(spec, data.x[i]);
        const int m = row.nnz();
        for (int a = 0; a < m; ++a) {
            const double va = row.values[a];
            if (va == 0.0) continue;
            for (int b = a; b < m; ++b)
                fit.gram.add(row.first + a, row.first + b, va * row.values[b]);
            by[row.first + a] += va * data.y[i];
            for (Eigen::Index c = 0; c < d; ++c) bw(row.first + a, c) += va * data.w(i, c);
        }
    }

    fit.gram_chol.factor(fit.gram);
    check_gram(fit);

    if (d > 0) {
        const Eigen::MatrixXd ginv_bw = fit.gram_chol.solve_matrix(bw);
        const Eigen::VectorXd ginv_by = fit.gram_chol.solve(by);
        const Eigen::MatrixXd wmw = data.w.transpose() * data.w - bw.transpose() * ginv_bw;
        const Eigen::VectorXd wmy = data.w.transpose() * data.y - bw.transpose() * ginv_by;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(wmw);
        const Eigen::VectorXd dvec = ldlt.vectorD();
        if (ldlt.info() != Eigen::Success || dvec.minCoeff() <= kRcondTol * dvec.maxCoeff()) {
            Eigen::Index worst = 0;
            dvec.minCoeff(&worst);
            throw NumericError("singular covariate block W'M_B W (covariate column " +
                               std::to_string(worst) + " is collinear)");
        }
        fit.gamma = ldlt.solve(wmy);
        fit.beta = fit.gram_chol.solve(by - bw * fit.gamma);
        fit.mean_w_gamma = data.w.colwise().mean().dot(fit.gamma);
    } else {
        fit.gamma = Eigen::VectorXd(0);
        fit.beta = fit.gram_chol.solve(by);
    }

    fit.residuals.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double r = data.y[i] - eval_basis(spec, data.x[i]).dot(fit.beta);
        if (d > 0) r -= data.w.row(i).dot(fit.gamma);
        fit.residuals[i] = r;
    }
    return fit;
}

FitResult fit_residualized(const Dataset& data, int J) {
    if (data.d() < 1)
        throw ConfigError("residualized binscatter requires at least one covariate");

    const Eigen::Index n = data.n();
    Eigen::MatrixXd design(n, data.d() + 1);
    design.col(0).setOnes();
    design.rightCols(data.d()) = data.w;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericError("singular (1, w) design in residualized binscatter");

    const Eigen::VectorXd dy = qr.solve(data.y);
    const Eigen::VectorXd dx = qr.solve(data.x);

    // residuals recentered at the sample means so plots share axes
    Eigen::VectorXd y_t = data.y - design * dy;
    Eigen::VectorXd x_t = data.x - design * dx;
    y_t.array() += data.y.mean();
    x_t.array() += data.x.mean();

    Dataset resid_data = Dataset::make(std::move(y_t), std::move(x_t));
    const SortIndex sorted = sort_index(resid_data);
    const QuantilePartition part = build_partition(resid_data, sorted, J);

    FitResult fit = fit_binscatter(resid_data, BasisSpec(0, 0, part));
    fit.residualized = true;
    return fit;
}

} // namespace binsmooth
