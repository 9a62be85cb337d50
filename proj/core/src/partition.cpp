#include "binsmooth/partition.hpp"

#include "binsmooth/errors.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace binsmooth {

int QuantilePartition::locate(double x0) const {
    if (x0 < lo() || x0 > hi())
        throw EvaluationError("evaluation point " + std::to_string(x0) + " outside support [" +
                              std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
    if (x0 == hi()) return J - 1; // last bin is closed on the right
    // largest j with knots[j] <= x0
    const double* begin = knots.data();
    const double* end = begin + J + 1;
    int j = static_cast<int>(std::upper_bound(begin, end, x0) - begin) - 1;
    assert(j >= 0 && j < J);
    return j;
}

QuantilePartition build_partition(const Dataset& data, const SortIndex& sort, int J) {
    const Eigen::Index n = data.n();
    if (J < 2) throw ConfigError("number of bins must be at least 2, got " + std::to_string(J));
    if (J > sort.distinct_count)
        throw NumericError("J=" + std::to_string(J) + " exceeds the " +
                           std::to_string(sort.distinct_count) +
                           " distinct x values; choose a smaller J");
    assert(static_cast<Eigen::Index>(J) <= n);

    auto order_stat = [&](Eigen::Index k) { // 1-based order statistic
        return data.x[sort.perm[static_cast<std::size_t>(k - 1)]];
    };

    std::vector<double> raw;
    raw.reserve(static_cast<std::size_t>(J) + 1);
    raw.push_back(order_stat(1));
    for (int j = 1; j < J; ++j) {
        const Eigen::Index k = (static_cast<Eigen::Index>(j) * n) / J; // floor(j*n/J)
        assert(k >= 1 && k <= n);
        raw.push_back(order_stat(k));
    }
    raw.push_back(order_stat(n));

    // Coincident knots (ties in x) collapse; J shrinks accordingly.
    std::vector<double> uniq;
    uniq.reserve(raw.size());
    for (double t : raw) {
        if (uniq.empty() || t > uniq.back()) uniq.push_back(t);
    }
    if (uniq.size() < 2)
        throw NumericError("degenerate partition: all candidate knots coincide");

    QuantilePartition part;
    part.requested_J = J;
    part.J = static_cast<int>(uniq.size()) - 1;
    part.deduped = part.J != J;
    part.knots = Eigen::Map<Eigen::VectorXd>(uniq.data(), static_cast<Eigen::Index>(uniq.size()));
    part.widths.resize(part.J);
    for (int j = 0; j < part.J; ++j) part.widths[j] = part.knots[j + 1] - part.knots[j];

    part.counts.assign(static_cast<std::size_t>(part.J), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++part.counts[static_cast<std::size_t>(part.locate(data.x[i]))];

    return part;
}

double quasi_uniformity_ratio(const QuantilePartition& part) {
    return part.widths.maxCoeff() / part.widths.minCoeff();
}

} // namespace binsmooth
