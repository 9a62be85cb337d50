#include "binsmooth/variance.hpp"

#include "binsmooth/errors.hpp"

#include <vector>

namespace binsmooth {

namespace {

double hc1_factor(const FitResult& fit, const Dataset& data, bool hc1) {
    if (!hc1) return 1.0;
    const double denom = static_cast<double>(fit.n) - fit.spec.K() - data.d();
    if (denom <= 0.0) throw NumericError("HC1 correction undefined: n <= K + d");
    return static_cast<double>(fit.n) / denom;
}

} // namespace

VarianceModel sandwich(const FitResult& fit, const Dataset& data, bool hc1) {
    const int K = fit.spec.K();
    VarianceModel vm;
    vm.mode = hc1 ? VceMode::hc1 : VceMode::hc0;
    vm.n_eff = fit.n;
    vm.dof_factor = hc1_factor(fit, data, hc1);
    vm.sigma = Eigen::MatrixXd::Zero(K, K);

    for (Eigen::Index i = 0; i < fit.n; ++i) {
        const SparseBasisRow row = eval_basis(fit.spec, data.x[i]);
        const double e2 = fit.residuals[i] * fit.residuals[i];
        const int m = row.nnz();
        for (int a = 0; a < m; ++a) {
            const double va = row.values[a] * e2;
            if (va == 0.0) continue;
            for (int b = 0; b < m; ++b)
                vm.sigma(row.first + a, row.first + b) += va * row.values[b];
        }
    }
    vm.sigma *= vm.dof_factor / static_cast<double>(fit.n);
    return vm;
}

VarianceModel sandwich_clustered(const FitResult& fit, const Dataset& data, bool hc1) {
    if (!data.has_cluster())
        throw ConfigError("cluster-robust variance requested but no cluster labels present");

    const int K = fit.spec.K();
    VarianceModel vm;
    vm.mode = VceMode::cluster;
    vm.n_eff = data.n_groups;
    vm.dof_factor = hc1_factor(fit, data, hc1);
    vm.sigma = Eigen::MatrixXd::Zero(K, K);

    std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(data.n_groups));
    for (Eigen::Index i = 0; i < fit.n; ++i)
        groups[static_cast<std::size_t>(data.cluster[static_cast<std::size_t>(i)])].push_back(i);

    Eigen::VectorXd score(K);
    for (const auto& idx : groups) {
        score.setZero();
        for (Eigen::Index i : idx) {
            const SparseBasisRow row = eval_basis(fit.spec, data.x[i]);
            score.segment(row.first, row.values.size()) += row.values * fit.residuals[i];
        }
        vm.sigma.noalias() += score * score.transpose();
    }
    vm.sigma *= vm.dof_factor / static_cast<double>(fit.n);
    return vm;
}

VarianceModel make_variance(const FitResult& fit, const Dataset& data, VceMode mode) {
    switch (mode) {
        case VceMode::hc0: return sandwich(fit, data, false);
        case VceMode::hc1: return sandwich(fit, data, true);
        case VceMode::cluster: return sandwich_clustered(fit, data, false);
    }
    throw ConfigError("unknown variance mode");
}

double omega_row(const VarianceModel& vm, const FitResult& fit, const SparseBasisRow& row) {
    const Eigen::VectorXd z = fit.q_inv(row);
    return z.dot(vm.sigma * z);
}

double omega(const VarianceModel& vm, const FitResult& fit, double x0, int v) {
    return omega_row(vm, fit, eval_basis(fit.spec, x0, v));
}

} // namespace binsmooth
