#include "binsmooth/simharness.hpp"

#include "binsmooth/binselect.hpp"
#include "binsmooth/errors.hpp"
#include "binsmooth/fit.hpp"
#include "binsmooth/inference.hpp"
#include "binsmooth/parallel.hpp"
#include "binsmooth/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace binsmooth {

namespace {

/// Beta(2,4) CDF: F(x) = 10x^2 - 20x^3 + 15x^4 - 4x^5 on [0,1].
double beta24_cdf(double x) {
    return ((((-4.0 * x + 15.0) * x - 20.0) * x + 10.0) * x) * x;
}

double beta24_pdf(double x) {
    const double om = 1.0 - x;
    return 20.0 * x * om * om * om;
}

/// Inverse CDF by Newton iterations safeguarded with bisection.
double beta24_quantile(double u) {
    double lo = 0.0, hi = 1.0, x = 1.0 - std::pow(1.0 - u, 0.25); // rough upper-tail guess
    if (x <= 0.0 || x >= 1.0) x = 0.5;
    for (int it = 0; it < 80; ++it) {
        const double err = beta24_cdf(x) - u;
        if (err > 0.0) hi = x; else lo = x;
        const double dens = beta24_pdf(x);
        double step = dens > 1e-12 ? err / dens : 0.0;
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15) return next;
        x = next;
    }
    return x;
}

} // namespace

Eigen::VectorXd DgpSpec::default_quartic() {
    Eigen::VectorXd c(5);
    c << 3.6, -44.4, 112.4, -98.8, 24.0; // ascending powers
    return c;
}

double DgpSpec::mu(double x) const {
    double out = 0.0;
    for (Eigen::Index k = mu_coeffs.size() - 1; k >= 0; --k) out = out * x + mu_coeffs[k];
    return out;
}

double DgpSpec::mu_deriv(double x, int v) const {
    double out = 0.0;
    for (Eigen::Index k = mu_coeffs.size() - 1; k >= v; --k) {
        double f = 1.0;
        for (int j = 0; j < v; ++j) f *= static_cast<double>(k - j);
        out = out * x + mu_coeffs[k] * f;
    }
    return out;
}

double DgpSpec::sigma(double x) const {
    return hetero ? hetero_base + hetero_slope * x : noise_sd;
}

Dataset generate(const DgpSpec& dgp) {
    if (dgp.n < 10) throw ConfigError("simulated sample size must be at least 10");
    Rng rng = Rng::substream(dgp.seed, 0, "dgp");

    const bool has_w = dgp.w_mode != DgpSpec::WMode::none;
    Eigen::VectorXd x(dgp.n), y(dgp.n);
    Eigen::MatrixXd w(dgp.n, has_w ? 1 : 0);

    for (Eigen::Index i = 0; i < dgp.n; ++i) {
        const double xi = beta24_quantile(rng.uniform01());
        double wi = 0.0;
        if (dgp.w_mode == DgpSpec::WMode::independent_uniform) {
            wi = rng.uniform(-1.0, 1.0);
        } else if (dgp.w_mode == DgpSpec::WMode::correlated) {
            wi = 3.0 * (xi - 0.5) + rng.uniform(-0.5, 0.5);
        }
        const double eps = dgp.sigma(xi) * rng.normal();
        x[i] = xi;
        y[i] = dgp.mu(xi) + (has_w ? wi : 0.0) + eps;
        if (has_w) w(i, 0) = wi;
    }
    return Dataset::make(std::move(y), std::move(x), std::move(w));
}

ExperimentKind parse_experiment(const std::string& name) {
    if (name == "ci_coverage") return ExperimentKind::ci_coverage;
    if (name == "band_coverage") return ExperimentKind::band_coverage;
    if (name == "spec_size") return ExperimentKind::spec_size;
    if (name == "spec_power") return ExperimentKind::spec_power;
    if (name == "shape_size") return ExperimentKind::shape_size;
    if (name == "shape_power") return ExperimentKind::shape_power;
    if (name == "selector_rate") return ExperimentKind::selector_rate;
    if (name == "covadj_bias") return ExperimentKind::covadj_bias;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::ci_coverage: return "ci_coverage";
        case ExperimentKind::band_coverage: return "band_coverage";
        case ExperimentKind::spec_size: return "spec_size";
        case ExperimentKind::spec_power: return "spec_power";
        case ExperimentKind::shape_size: return "shape_size";
        case ExperimentKind::shape_power: return "shape_power";
        case ExperimentKind::selector_rate: return "selector_rate";
        case ExperimentKind::covadj_bias: return "covadj_bias";
    }
    return "?";
}

namespace {

std::uint64_t rep_seed(const ExperimentConfig& cfg, std::size_t rep) {
    return Rng::substream(cfg.seed, rep, "rep").next_u64();
}

int choose_J(const ExperimentConfig& cfg, const Dataset& data) {
    if (cfg.J > 0) return cfg.J;
    return cfg.use_dpi ? dpi_select(data, cfg.p, cfg.s, cfg.v).J
                       : rot_select(data, cfg.p, cfg.s, cfg.v).J;
}

void add_rate(ExperimentSummary& sum, const std::string& name, const std::vector<double>& vals) {
    const double n = static_cast<double>(vals.size());
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max(1.0, n - 1.0);
    sum.metrics[name] = mean;
    sum.metrics[name + "_mc_se"] = std::sqrt(var / n);
    sum.per_rep[name] = vals;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    ExperimentSummary sum;
    sum.kind = cfg.kind;
    sum.reps = cfg.reps;
    const std::size_t reps = static_cast<std::size_t>(cfg.reps);

    switch (cfg.kind) {
        case ExperimentKind::ci_coverage: {
            const std::size_t npts = cfg.eval_points.size();
            std::vector<std::vector<double>> cover(npts, std::vector<double>(reps, 0.0));
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec dgp = cfg.dgp;
                dgp.seed = rep_seed(cfg, r);
                const Dataset data = generate(dgp);
                const int J = choose_J(cfg, data);
                const RbcModel rbc =
                    prepare_rbc(data, cfg.p, cfg.s, cfg.v, cfg.q, J, VceMode::hc0);
                const double mult = normal_quantile(1.0 - cfg.alpha / 2.0);
                for (std::size_t k = 0; k < npts; ++k) {
                    const double x0 = cfg.eval_points[k];
                    const double mu_hat = rbc.fit.evaluate(x0, cfg.v);
                    const double se = std::sqrt(
                        std::max(0.0, omega(rbc.var, rbc.fit, x0, cfg.v)) /
                        static_cast<double>(rbc.fit.n));
                    const double truth = dgp.mu_deriv(x0, cfg.v);
                    cover[k][r] =
                        (truth >= mu_hat - mult * se && truth <= mu_hat + mult * se) ? 1.0 : 0.0;
                }
            });
            for (std::size_t k = 0; k < npts; ++k) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "coverage_x%.6g", cfg.eval_points[k]);
                add_rate(sum, buf, cover[k]);
            }
            break;
        }

        case ExperimentKind::band_coverage: {
            std::vector<double> cover(reps, 0.0);
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec dgp = cfg.dgp;
                dgp.seed = rep_seed(cfg, r);
                const Dataset data = generate(dgp);
                const int J = choose_J(cfg, data);
                const BandResult band =
                    confidence_band(data, cfg.p, cfg.s, cfg.v, cfg.q, cfg.alpha, J, cfg.draws,
                                    dgp.seed, VceMode::hc0, cfg.grid_target);
                bool all_in = true;
                for (std::size_t g = 0; g < band.grid.points.size(); ++g) {
                    const double truth = dgp.mu_deriv(band.grid.points[g], cfg.v);
                    const Eigen::Index gi = static_cast<Eigen::Index>(g);
                    if (truth < band.lower[gi] || truth > band.upper[gi]) {
                        all_in = false;
                        break;
                    }
                }
                cover[r] = all_in ? 1.0 : 0.0;
            });
            add_rate(sum, "uniform_coverage", cover);
            break;
        }

        case ExperimentKind::spec_size:
        case ExperimentKind::spec_power: {
            std::vector<double> reject(reps, 0.0);
            const ParametricModel proto = ParametricModel::parse(cfg.model);
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec dgp = cfg.dgp;
                dgp.seed = rep_seed(cfg, r);
                const Dataset data = generate(dgp);
                const int J = choose_J(cfg, data);
                const TestResult res =
                    test_specification(data, cfg.p, cfg.s, cfg.v, cfg.q, cfg.alpha, J, proto,
                                       cfg.draws, dgp.seed, VceMode::hc0, cfg.grid_target);
                reject[r] = res.p_value < cfg.alpha ? 1.0 : 0.0;
            });
            add_rate(sum, "rejection_rate", reject);
            break;
        }

        case ExperimentKind::shape_size:
        case ExperimentKind::shape_power: {
            std::vector<double> reject(reps, 0.0);
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec dgp = cfg.dgp;
                dgp.seed = rep_seed(cfg, r);
                const Dataset data = generate(dgp);
                const int J = choose_J(cfg, data);
                const TestResult res =
                    test_shape(data, cfg.p, cfg.s, cfg.v, cfg.q, cfg.alpha, J,
                               ShapeDirection::le, std::nullopt, cfg.draws, dgp.seed,
                               VceMode::hc0, cfg.grid_target);
                reject[r] = res.p_value < cfg.alpha ? 1.0 : 0.0;
            });
            add_rate(sum, "rejection_rate", reject);
            break;
        }

        case ExperimentKind::selector_rate: {
            std::vector<double> ratio(reps, 0.0), j_small(reps, 0.0), j_big(reps, 0.0);
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec small = cfg.dgp;
                small.seed = rep_seed(cfg, 2 * r);
                DgpSpec big = cfg.dgp;
                big.n = cfg.n2;
                big.seed = rep_seed(cfg, 2 * r + 1);
                const int j1 = rot_select(generate(small), cfg.p, cfg.s, cfg.v).J;
                const int j2 = rot_select(generate(big), cfg.p, cfg.s, cfg.v).J;
                j_small[r] = j1;
                j_big[r] = j2;
                ratio[r] = static_cast<double>(j2) / j1;
            });
            add_rate(sum, "ratio", ratio);
            add_rate(sum, "J_small", j_small);
            add_rate(sum, "J_big", j_big);
            break;
        }

        case ExperimentKind::covadj_bias: {
            std::vector<double> dev_semi(reps, 0.0), dev_resid(reps, 0.0);
            parallel_for(reps, [&](std::size_t r) {
                DgpSpec dgp = cfg.dgp;
                dgp.seed = rep_seed(cfg, r);
                const Dataset data = generate(dgp);
                const int J = cfg.J > 0 ? cfg.J
                                        : (cfg.use_dpi ? dpi_select(data, 0, 0, 0).J
                                                       : rot_select(data, 0, 0, 0).J);

                const SortIndex sorted = sort_index(data);
                const FitResult semi =
                    fit_binscatter(data, BasisSpec(0, 0, build_partition(data, sorted, J)));
                const FitResult resid = fit_residualized(data, J);

                auto mean_abs_dev = [&](const FitResult& fit) {
                    double acc = 0.0;
                    const auto ds = fit.dots();
                    for (const Dot& dot : ds) acc += std::abs(dot.mu - dgp.mu(dot.x));
                    return acc / static_cast<double>(ds.size());
                };
                dev_semi[r] = mean_abs_dev(semi);
                dev_resid[r] = mean_abs_dev(resid);
            });
            add_rate(sum, "mean_abs_dev_semilinear", dev_semi);
            add_rate(sum, "mean_abs_dev_residualized", dev_resid);
            sum.metrics["deviation_ratio"] =
                sum.metrics["mean_abs_dev_residualized"] / sum.metrics["mean_abs_dev_semilinear"];
            break;
        }
    }
    return sum;
}

} // namespace binsmooth
