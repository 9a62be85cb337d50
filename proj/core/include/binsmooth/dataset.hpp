#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace binsmooth {

/**
 * Estimation sample: response y, scalar regressor x, optional covariate
 * matrix w (n x d), optional cluster labels.  Immutable after construction
 * and safe to share across threads.
 */
struct Dataset {
    Eigen::VectorXd y;
    Eigen::VectorXd x;
    Eigen::MatrixXd w;            // n x d, d >= 0
    std::vector<int> cluster;     // empty if absent; ids in 0..n_groups-1
    int n_groups = 0;

    Eigen::Index n() const { return x.size(); }
    Eigen::Index d() const { return w.cols(); }
    bool has_cluster() const { return !cluster.empty(); }

    /// Validates lengths, finiteness, and cluster label counts.
    static Dataset make(Eigen::VectorXd y, Eigen::VectorXd x,
                        Eigen::MatrixXd w = Eigen::MatrixXd(),
                        std::vector<int> cluster = {});
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0; // listwise deletion of rows with missing cells
};

/**
 * Loads a header-first comma-separated file (UTF-8, '.' decimal separator).
 * Rows with an empty/NA cell in any selected column are dropped and counted.
 */
Dataset load_csv(const std::string& path,
                 const std::string& y_col,
                 const std::string& x_col,
                 const std::vector<std::string>& w_cols = {},
                 const std::optional<std::string>& cluster_col = std::nullopt,
                 LoadReport* report = nullptr);

/// Stable ascending permutation of x (ties keep original order).
struct SortIndex {
    std::vector<Eigen::Index> perm;
    Eigen::Index distinct_count = 0;
};

SortIndex sort_index(const Dataset& data);

} // namespace binsmooth
