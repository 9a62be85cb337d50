#include "binsmooth/dataset.hpp"

#include "binsmooth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace binsmooth {

namespace {

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "nan" || cell == "NaN" ||
           cell == ".";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& col, std::size_t row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw DataError("non-numeric cell '" + cell + "' in column '" + col + "' at data row " +
                        std::to_string(row));
    }
}

} // namespace

Dataset Dataset::make(Eigen::VectorXd y, Eigen::VectorXd x, Eigen::MatrixXd w,
                      std::vector<int> cluster) {
    const Eigen::Index n = x.size();
    if (n < 2) throw DataError("need at least 2 observations, got " + std::to_string(n));
    if (y.size() != n) throw DataError("y and x lengths differ");
    if (w.size() > 0 && w.rows() != n) throw DataError("covariate rows do not match sample size");
    if (!cluster.empty() && static_cast<Eigen::Index>(cluster.size()) != n)
        throw DataError("cluster labels do not match sample size");

    if (!y.allFinite() || !x.allFinite() || (w.size() > 0 && !w.allFinite()))
        throw DataError("non-finite value in y, x, or w");

    Dataset out;
    out.y = std::move(y);
    out.x = std::move(x);
    out.w = w.size() > 0 ? std::move(w) : Eigen::MatrixXd(n, 0);
    if (!cluster.empty()) {
        // compact labels to 0..G-1 preserving first-appearance order
        std::unordered_map<int, int> ids;
        for (int& c : cluster) {
            auto [it, inserted] = ids.try_emplace(c, static_cast<int>(ids.size()));
            c = it->second;
        }
        out.n_groups = static_cast<int>(ids.size());
        if (out.n_groups < 2)
            throw DataError("cluster variable must have at least 2 distinct groups");
        out.cluster = std::move(cluster);
    }
    return out;
}

Dataset load_csv(const std::string& path, const std::string& y_col, const std::string& x_col,
                 const std::vector<std::string>& w_cols,
                 const std::optional<std::string>& cluster_col, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    const auto header = split_csv_line(line);

    auto column_of = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ConfigError("column '" + name + "' not found in " + path);
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t yi = column_of(y_col);
    const std::size_t xi = column_of(x_col);
    std::vector<std::size_t> wi;
    for (const auto& c : w_cols) wi.push_back(column_of(c));
    std::optional<std::size_t> ci;
    if (cluster_col) ci = column_of(*cluster_col);

    std::vector<double> ys, xs;
    std::vector<std::vector<double>> ws(wi.size());
    std::vector<std::string> cl_raw;
    LoadReport rep;

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        auto cell = [&](std::size_t k) -> const std::string& {
            static const std::string empty;
            return k < cells.size() ? cells[k] : empty;
        };

        bool missing = is_missing(cell(yi)) || is_missing(cell(xi));
        for (auto k : wi) missing = missing || is_missing(cell(k));
        if (ci) missing = missing || is_missing(cell(*ci));
        if (missing) {
            ++rep.rows_dropped;
            continue;
        }

        ys.push_back(parse_number(cell(yi), y_col, row));
        xs.push_back(parse_number(cell(xi), x_col, row));
        for (std::size_t k = 0; k < wi.size(); ++k)
            ws[k].push_back(parse_number(cell(wi[k]), w_cols[k], row));
        if (ci) cl_raw.push_back(cell(*ci));
    }
    rep.rows_read = row;
    if (report) *report = rep;

    if (ys.empty()) throw DataError("no usable rows in " + path);

    const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
    Eigen::MatrixXd w(n, static_cast<Eigen::Index>(ws.size()));
    for (std::size_t k = 0; k < ws.size(); ++k)
        w.col(static_cast<Eigen::Index>(k)) = Eigen::Map<Eigen::VectorXd>(ws[k].data(), n);

    std::vector<int> cluster;
    if (ci) {
        std::unordered_map<std::string, int> ids;
        cluster.reserve(cl_raw.size());
        for (const auto& s : cl_raw) {
            auto [it, inserted] = ids.try_emplace(s, static_cast<int>(ids.size()));
            cluster.push_back(it->second);
        }
    }
    return Dataset::make(std::move(y), std::move(x), std::move(w), std::move(cluster));
}

SortIndex sort_index(const Dataset& data) {
    SortIndex out;
    out.perm.resize(static_cast<std::size_t>(data.n()));
    std::iota(out.perm.begin(), out.perm.end(), Eigen::Index{0});
    std::stable_sort(out.perm.begin(), out.perm.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return data.x[a] < data.x[b]; });
    out.distinct_count = data.n() == 0 ? 0 : 1;
    for (std::size_t i = 1; i < out.perm.size(); ++i) {
        if (data.x[out.perm[i]] != data.x[out.perm[i - 1]]) ++out.distinct_count;
    }
    return out;
}

} // namespace binsmooth
