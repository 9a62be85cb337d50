#include "binsmooth/inference.hpp"

#include "binsmooth/errors.hpp"
#include "binsmooth/parallel.hpp"
#include "binsmooth/partition.hpp"
#include "binsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace binsmooth {

RbcModel prepare_rbc(const Dataset& data, int p, int s, int v, int q, int J, VceMode vce) {
    if (q < 1) throw ConfigError("bias-correction order q must be at least 1");
    if (v < 0 || v > p) throw ConfigError("v exceeds p");
    if (s < 0 || s > p) throw ConfigError("s exceeds p");

    const SortIndex sorted = sort_index(data);
    const QuantilePartition part = build_partition(data, sorted, J);

    RbcModel model;
    model.p = p;
    model.s = s;
    model.v = v;
    model.q = q;
    const int p_rbc = p + q;
    const int s_rbc = std::min(s + q, p + q);
    model.fit = fit_binscatter(data, BasisSpec(p_rbc, s_rbc, part));
    model.var = make_variance(model.fit, data, vce);
    return model;
}

std::vector<double> grid_points(const BasisSpec& spec, int target_points) {
    const QuantilePartition& part = spec.part;
    const int J = part.J;
    if (target_points <= 0) target_points = std::max(20 * J, 500);

    const int per_bin = (target_points + J - 1) / J;
    const bool discontinuous = spec.s == 0;

    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(per_bin) * J + J + 1);
    for (int j = 0; j < J; ++j) {
        const double a = part.knots[j], h = part.widths[j];
        for (int k = 0; k < per_bin; ++k)
            points.push_back(a + h * static_cast<double>(k) / per_bin);
        if (discontinuous && j + 1 < J) {
            // left limit of the interior knot; the knot itself opens the next bin
            const double left = part.knots[j + 1] - h * 1e-9;
            if (left > points.back()) points.push_back(left);
        }
    }
    points.push_back(part.hi());
    return points;
}

EvalGrid make_grid(const RbcModel& model, int target_points) {
    EvalGrid grid;
    grid.n = model.fit.n;
    grid.points = grid_points(model.fit.spec, target_points);

    const std::size_t g = grid.points.size();
    grid.mu.resize(static_cast<Eigen::Index>(g));
    grid.omega.resize(static_cast<Eigen::Index>(g));
    grid.se.resize(static_cast<Eigen::Index>(g));
    grid.rows.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
        grid.rows[i] = eval_basis(model.fit.spec, grid.points[i], model.v);
        grid.mu[static_cast<Eigen::Index>(i)] = grid.rows[i].dot(model.fit.beta);
        const double om = omega_row(model.var, model.fit, grid.rows[i]);
        grid.omega[static_cast<Eigen::Index>(i)] = om;
        grid.se[static_cast<Eigen::Index>(i)] =
            std::sqrt(std::max(0.0, om) / static_cast<double>(model.fit.n));
    }
    return grid;
}

SupSim simulate_sup(const RbcModel& model, const EvalGrid& grid, int draws, std::uint64_t seed,
                    SupMode mode) {
    if (draws < 1) throw ConfigError("draws must be positive");
    const int K = model.fit.spec.K();

    // PSD square root of Sigma with small-eigenvalue clipping
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.var.sigma);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of Sigma failed");
    const double trace = std::max(model.var.sigma.trace(), 0.0);
    const double clip = 1e-12 * trace;
    if (trace > 0.0 && eig.eigenvalues().minCoeff() < -1e-8 * trace)
        throw NumericError("variance matrix Sigma is numerically indefinite");

    SupSim sim;
    sim.mode = mode;
    sim.draws = draws;
    sim.seed = seed;

    Eigen::VectorXd sq(K);
    for (int k = 0; k < K; ++k) {
        const double lam = eig.eigenvalues()[k];
        if (lam <= clip) {
            sq[k] = 0.0;
            ++sim.clipped_eigenvalues;
        } else {
            sq[k] = std::sqrt(lam);
        }
    }
    const Eigen::MatrixXd sqrt_sigma = eig.eigenvectors() * sq.asDiagonal();

    // P(g, :) = b^(v)(x_g)' Qinv Sigma^{1/2} / sqrt(Omega(x_g))
    const std::size_t g = grid.points.size();
    Eigen::MatrixXd proj(static_cast<Eigen::Index>(g), K);
    for (std::size_t i = 0; i < g; ++i) {
        const Eigen::VectorXd z = model.fit.q_inv(grid.rows[i]);
        const double om = grid.omega[static_cast<Eigen::Index>(i)];
        if (om > 0.0) {
            proj.row(static_cast<Eigen::Index>(i)) = (sqrt_sigma.transpose() * z) / std::sqrt(om);
        } else {
            proj.row(static_cast<Eigen::Index>(i)).setZero();
        }
    }

    sim.sups_sorted.assign(static_cast<std::size_t>(draws), 0.0);
    parallel_for(static_cast<std::size_t>(draws), [&](std::size_t r) {
        Rng rng = Rng::substream(seed, r, "supdraw");
        Eigen::VectorXd normals(K);
        for (int k = 0; k < K; ++k) normals[k] = rng.normal();
        const Eigen::VectorXd z = proj * normals;
        double sup = -std::numeric_limits<double>::infinity();
        switch (mode) {
            case SupMode::abs: sup = z.cwiseAbs().maxCoeff(); break;
            case SupMode::pos: sup = z.maxCoeff(); break;
            case SupMode::neg: sup = (-z).maxCoeff(); break;
        }
        sim.sups_sorted[r] = sup;
    });
    std::sort(sim.sups_sorted.begin(), sim.sups_sorted.end());
    return sim;
}

double critical_value(const SupSim& sim, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    const int d = sim.draws;
    const double t = alpha * (d + 1);
    // r_max = largest r with (r+1)/(D+1) < alpha; cv is the (D - r_max)-th
    // ascending order statistic, making {stat > cv} == {p_value < alpha}
    long r_max;
    if (std::abs(t - std::llround(t)) < 1e-6) {
        r_max = std::llround(t) - 2;
    } else {
        r_max = static_cast<long>(std::ceil(t)) - 2;
    }
    long k = d - std::max(r_max, -1L); // 1-based index
    if (k > d) return std::numeric_limits<double>::infinity();
    if (k < 1) k = 1;
    return sim.sups_sorted[static_cast<std::size_t>(k - 1)];
}

double p_value(const SupSim& sim, double statistic) {
    const auto it =
        std::lower_bound(sim.sups_sorted.begin(), sim.sups_sorted.end(), statistic);
    const auto r = sim.sups_sorted.end() - it; // #{sup >= statistic}
    return static_cast<double>(r + 1) / (sim.draws + 1);
}

CiResult pointwise_ci(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                      VceMode vce, int grid_target) {
    const RbcModel model = prepare_rbc(data, p, s, v, q, J, vce);
    CiResult out;
    out.grid = make_grid(model, grid_target);
    out.alpha = alpha;
    out.multiplier = normal_quantile(1.0 - alpha / 2.0);
    out.lower = out.grid.mu - out.multiplier * out.grid.se;
    out.upper = out.grid.mu + out.multiplier * out.grid.se;
    return out;
}

BandResult confidence_band(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                           int draws, std::uint64_t seed, VceMode vce, int grid_target) {
    const RbcModel model = prepare_rbc(data, p, s, v, q, J, vce);
    BandResult out;
    out.grid = make_grid(model, grid_target);
    out.alpha = alpha;
    out.draws = draws;
    out.seed = seed;
    const SupSim sim = simulate_sup(model, out.grid, draws, seed, SupMode::abs);
    out.cv = critical_value(sim, alpha);
    out.lower = out.grid.mu - out.cv * out.grid.se;
    out.upper = out.grid.mu + out.cv * out.grid.se;
    return out;
}

// --- parametric models ---------------------------------------------------

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// v-th derivative of the logistic function as a polynomial in logistic(x):
/// d/dx P(L) = P'(L) L(1-L).
double logistic_deriv(double x, int v) {
    std::vector<double> poly{0.0, 1.0}; // L
    for (int k = 0; k < v; ++k) {
        // P'(L) * (L - L^2)
        std::vector<double> dp(poly.size() > 1 ? poly.size() - 1 : 1, 0.0);
        for (std::size_t j = 1; j < poly.size(); ++j) dp[j - 1] = poly[j] * static_cast<double>(j);
        std::vector<double> next(dp.size() + 2, 0.0);
        for (std::size_t j = 0; j < dp.size(); ++j) {
            next[j + 1] += dp[j];
            next[j + 2] -= dp[j];
        }
        poly = std::move(next);
    }
    const double l = logistic(x);
    double out = 0.0, lp = 1.0;
    for (double c : poly) {
        out += c * lp;
        lp *= l;
    }
    return out;
}

} // namespace

ParametricModel ParametricModel::parse(const std::string& name) {
    ParametricModel m;
    if (name == "constant") {
        m.family = Family::constant;
    } else if (name == "linear") {
        m.family = Family::linear;
    } else if (name == "quadratic") {
        m.family = Family::polynomial;
        m.degree = 2;
    } else if (name == "cubic") {
        m.family = Family::polynomial;
        m.degree = 3;
    } else if (name.rfind("poly:", 0) == 0) {
        m.family = Family::polynomial;
        m.degree = std::stoi(name.substr(5));
        if (m.degree < 1) throw ConfigError("polynomial degree must be >= 1");
    } else if (name == "logistic") {
        m.family = Family::logistic_mean;
    } else if (name == "exponential") {
        m.family = Family::exponential_mean;
    } else if (name.rfind("coeffs:", 0) == 0) {
        m.family = Family::user_coeffs;
        std::stringstream ss(name.substr(7));
        std::vector<double> c;
        std::string tok;
        while (std::getline(ss, tok, ',')) c.push_back(std::stod(tok));
        if (c.empty()) throw ConfigError("coeffs: requires at least one coefficient");
        m.coeffs = Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    } else {
        throw ConfigError("unknown model '" + name +
                          "' (use constant|linear|quadratic|cubic|poly:K|logistic|exponential|"
                          "coeffs:a0,a1,...)");
    }
    return m;
}

std::string ParametricModel::describe() const {
    switch (family) {
        case Family::constant: return "constant";
        case Family::linear: return "linear";
        case Family::polynomial: return "polynomial(" + std::to_string(degree) + ")";
        case Family::logistic_mean: return "logistic-in-mean";
        case Family::exponential_mean: return "exponential-in-mean";
        case Family::user_coeffs: return "user-coefficients";
    }
    return "?";
}

int ParametricModel::n_params() const {
    switch (family) {
        case Family::constant: return 1;
        case Family::linear: return 2;
        case Family::polynomial: return degree + 1;
        case Family::logistic_mean:
        case Family::exponential_mean: return 2;
        case Family::user_coeffs: return static_cast<int>(coeffs.size());
    }
    return 0;
}

Eigen::VectorXd ParametricModel::regressors(double x) const {
    Eigen::VectorXd r(n_params());
    switch (family) {
        case Family::constant: r << 1.0; break;
        case Family::linear: r << 1.0, x; break;
        case Family::polynomial: {
            double z = 1.0;
            for (int k = 0; k <= degree; ++k) {
                r[k] = z;
                z *= x;
            }
            break;
        }
        case Family::logistic_mean: r << 1.0, logistic(x); break;
        case Family::exponential_mean: r << 1.0, std::exp(x); break;
        case Family::user_coeffs: {
            double z = 1.0;
            for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
                r[k] = z;
                z *= x;
            }
            break;
        }
    }
    return r;
}

double ParametricModel::eval(double x, int v) const {
    if (coeffs.size() != n_params())
        throw NumericError("parametric model evaluated before fitting theta");
    switch (family) {
        case Family::constant: return v == 0 ? coeffs[0] : 0.0;
        case Family::linear:
            if (v == 0) return coeffs[0] + coeffs[1] * x;
            return v == 1 ? coeffs[1] : 0.0;
        case Family::polynomial:
        case Family::user_coeffs: {
            double out = 0.0;
            for (Eigen::Index k = v; k < coeffs.size(); ++k) {
                double f = 1.0;
                for (int j = 0; j < v; ++j) f *= static_cast<double>(k - j);
                out += coeffs[k] * f * std::pow(x, static_cast<double>(k - v));
            }
            return out;
        }
        case Family::logistic_mean:
            return (v == 0 ? coeffs[0] : 0.0) + coeffs[1] * logistic_deriv(x, v);
        case Family::exponential_mean:
            return (v == 0 ? coeffs[0] : 0.0) + coeffs[1] * std::exp(x);
    }
    return 0.0;
}

ParametricModel fit_model(const ParametricModel& proto, const Dataset& data) {
    if (!proto.needs_fit()) return proto;
    const Eigen::Index n = data.n();
    const int k = proto.n_params();
    Eigen::MatrixXd design(n, k + data.d());
    for (Eigen::Index i = 0; i < n; ++i) design.row(i).head(k) = proto.regressors(data.x[i]);
    if (data.d() > 0) design.rightCols(data.d()) = data.w;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericError("parametric model fit failed: collinear design for " +
                           proto.describe());
    ParametricModel out = proto;
    out.coeffs = qr.solve(data.y).head(k);
    return out;
}

// --- tests ----------------------------------------------------------------

TestResult test_specification(const Dataset& data, int p, int s, int v, int q, double alpha,
                              int J, const ParametricModel& model, int draws, std::uint64_t seed,
                              VceMode vce, int grid_target) {
    const RbcModel rbc = prepare_rbc(data, p, s, v, q, J, vce);
    EvalGrid grid = make_grid(rbc, grid_target);
    const ParametricModel fitted = fit_model(model, data);

    Eigen::VectorXd model_values(static_cast<Eigen::Index>(grid.points.size()));
    double stat = 0.0;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        model_values[ii] = fitted.eval(grid.points[i], v);
        const double diff = grid.mu[ii] - model_values[ii];
        const double t = grid.se[ii] > 0.0
                             ? std::abs(diff) / grid.se[ii]
                             : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        stat = std::max(stat, t);
    }

    const SupSim sim = simulate_sup(rbc, grid, draws, seed, SupMode::abs);
    TestResult out;
    out.grid = std::move(grid);
    out.model_values = std::move(model_values);
    out.statistic = stat;
    out.cv = critical_value(sim, alpha);
    out.p_value = p_value(sim, stat);
    out.kind = "two_sided_spec";
    out.model = fitted.describe();
    out.alpha = alpha;
    out.draws = draws;
    out.seed = seed;
    return out;
}

TestResult test_shape(const Dataset& data, int p, int s, int v, int q, double alpha, int J,
                      ShapeDirection direction, std::optional<ParametricModel> baseline,
                      int draws, std::uint64_t seed, VceMode vce, int grid_target) {
    if (v > p) throw ConfigError("shape test needs v <= p");
    const RbcModel rbc = prepare_rbc(data, p, s, v, q, J, vce);
    EvalGrid grid = make_grid(rbc, grid_target);

    std::optional<ParametricModel> fitted;
    if (baseline) fitted = fit_model(*baseline, data);

    Eigen::VectorXd model_values(static_cast<Eigen::Index>(grid.points.size()));
    const double sign = direction == ShapeDirection::le ? 1.0 : -1.0;
    double stat = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        const double m = fitted ? fitted->eval(grid.points[i], v) : 0.0;
        model_values[ii] = m;
        const double diff = sign * (grid.mu[ii] - m);
        const double t = grid.se[ii] > 0.0
                             ? diff / grid.se[ii]
                             : (diff <= 0.0 ? -std::numeric_limits<double>::infinity()
                                            : std::numeric_limits<double>::infinity());
        stat = std::max(stat, t);
    }

    const SupSim sim = simulate_sup(rbc, grid, draws, seed,
                                    direction == ShapeDirection::le ? SupMode::pos : SupMode::neg);
    TestResult out;
    out.grid = std::move(grid);
    out.model_values = std::move(model_values);
    out.statistic = stat;
    out.cv = critical_value(sim, alpha);
    out.p_value = p_value(sim, stat);
    out.kind = direction == ShapeDirection::le ? "one_sided_left" : "one_sided_right";
    out.model = fitted ? fitted->describe() : "zero";
    out.alpha = alpha;
    out.draws = draws;
    out.seed = seed;
    return out;
}

} // namespace binsmooth
