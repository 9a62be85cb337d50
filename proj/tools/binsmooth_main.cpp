// binsmooth: generalized binscatter fits, bin selection, confidence bands,
// and sup-type specification/shape tests from CSV input.

#include "binsmooth/binselect.hpp"
#include "binsmooth/dataset.hpp"
#include "binsmooth/errors.hpp"
#include "binsmooth/fit.hpp"
#include "binsmooth/inference.hpp"
#include "binsmooth/simharness.hpp"
#include "report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace binsmooth;
using binsmooth::report::json;

constexpr int kSchemaVersion = 1;

// experiment-specific default orders: tests follow the cubic recommendation,
// coverage experiments run the canonical+robust route
std::pair<int, int> default_orders_for(binsmooth::ExperimentKind kind) {
    using EK = binsmooth::ExperimentKind;
    switch (kind) {
        case EK::spec_size:
        case EK::spec_power:
        case EK::shape_size:
        case EK::shape_power: return {3, 3};
        default: return {0, 0};
    }
}

struct Options {
    // data
    std::string data_path;
    std::string y_col = "y";
    std::string x_col = "x";
    std::vector<std::string> w_cols;
    std::string cluster_col;

    // estimator configuration; p/s track whether the user set them
    int p = 3;
    int s = 3;
    int v = 0;
    int q = 1;
    bool p_explicit = false;

    int J = 0; // 0 = data-driven
    std::string method = "rot";

    double alpha = 0.05;
    int draws = 1000;
    std::uint64_t seed = 42;
    std::string vce = "hc0";
    int grid = 0;

    std::string model;

    std::string out = "-";
    std::string csv_path;
    std::string svg_path;
};

void add_data_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--data", o.data_path, "input CSV file")->required();
    cmd->add_option("--y", o.y_col, "response column")->capture_default_str();
    cmd->add_option("--x", o.x_col, "regressor column")->capture_default_str();
    cmd->add_option("--w", o.w_cols, "covariate columns, comma separated")->delimiter(',');
    cmd->add_option("--cluster", o.cluster_col, "cluster label column");
}

void add_order_options(CLI::App* cmd, Options& o, bool with_q = true) {
    auto* popt = cmd->add_option("--p", o.p, "within-bin polynomial order");
    popt->check(CLI::NonNegativeNumber);
    auto* sopt = cmd->add_option("--s", o.s, "smoothness order (0..p; defaults to p)");
    cmd->add_option("--v", o.v, "derivative of interest")->check(CLI::NonNegativeNumber);
    if (with_q) cmd->add_option("--q", o.q, "bias-correction order")->capture_default_str();
    cmd->callback([&o, popt, sopt]() {
        o.p_explicit = popt->count() > 0;
        if (o.p_explicit && sopt->count() == 0) o.s = o.p;
    });
}

void add_selection_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--J", o.J, "fixed number of bins (bypasses selection)");
    cmd->add_option("--method", o.method, "bin selector: rot or dpi")
        ->check(CLI::IsMember({"rot", "dpi"}))
        ->capture_default_str();
}

void add_inference_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--alpha", o.alpha, "level for intervals/bands/tests")
        ->check(CLI::Range(1e-6, 0.999999))
        ->capture_default_str();
    cmd->add_option("--draws", o.draws, "Gaussian simulation draws")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "simulation seed")->capture_default_str();
    cmd->add_option("--vce", o.vce, "variance estimator: hc0, hc1, or cluster")
        ->check(CLI::IsMember({"hc0", "hc1", "cluster"}))
        ->capture_default_str();
    cmd->add_option("--grid", o.grid, "evaluation grid size (0 = max(20J, 500))");
}

void add_output_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--out", o.out, "JSON output file ('-' = stdout)")->capture_default_str();
    cmd->add_option("--csv", o.csv_path, "also write the grid as CSV");
    cmd->add_option("--svg", o.svg_path, "also write an SVG plot");
}

VceMode parse_vce(const std::string& name) {
    if (name == "hc0") return VceMode::hc0;
    if (name == "hc1") return VceMode::hc1;
    if (name == "cluster") return VceMode::cluster;
    throw ConfigError("unknown vce mode '" + name + "'");
}

void validate_orders(const Options& o) {
    if (o.s < 0 || o.s > o.p)
        throw ConfigError("s=" + std::to_string(o.s) + " must satisfy 0 <= s <= p=" +
                          std::to_string(o.p));
    if (o.v < 0 || o.v > o.p)
        throw ConfigError("v=" + std::to_string(o.v) + " exceeds p=" + std::to_string(o.p));
    if (o.q < 1) throw ConfigError("q must be at least 1");
}

Dataset load_data(const Options& o, json& meta) {
    LoadReport rep;
    std::optional<std::string> cluster;
    if (!o.cluster_col.empty()) cluster = o.cluster_col;
    Dataset data = load_csv(o.data_path, o.y_col, o.x_col, o.w_cols, cluster, &rep);
    meta["rows_read"] = rep.rows_read;
    meta["rows_dropped"] = rep.rows_dropped;
    if (parse_vce(o.vce) == VceMode::cluster && !data.has_cluster())
        throw ConfigError("--vce cluster requires --cluster");
    return data;
}

json selection_json(const BinSelection& sel) {
    return json{{"J", sel.J},
                {"J_unclamped", sel.J_unclamped},
                {"method", sel.consts.method == ImseConstants::Method::rot ? "rot" : "dpi"},
                {"variance_const", sel.consts.variance_const},
                {"bias_const", sel.consts.bias_const},
                {"degenerate_bias", sel.consts.degenerate_bias},
                {"degenerate_variance", sel.consts.degenerate_variance},
                {"p", sel.consts.p},
                {"s", sel.consts.s},
                {"v", sel.consts.v}};
}

/// J from --J or the selector at orders (p, s, v); fills `doc` as it goes.
int choose_bins(const Options& o, const Dataset& data, int p, int s, int v, json& doc) {
    if (o.J > 0) {
        doc["selection"] = nullptr;
        return o.J;
    }
    const BinSelection sel = o.method == "dpi" ? dpi_select(data, p, s, v)
                                               : rot_select(data, p, s, v);
    doc["selection"] = selection_json(sel);
    for (const auto& w : sel.warnings) doc["metadata"]["warnings"].push_back(w);
    return sel.J;
}

json base_doc(const std::string& command, const Dataset& data) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    doc["n"] = static_cast<long long>(data.n());
    doc["d"] = static_cast<long long>(data.d());
    doc["metadata"]["warnings"] = json::array();
    return doc;
}

void finish(const Options& o, const json& doc) {
    report::write_output(o.out, doc.dump(2));
}

// Step-1/Step-2 core shared by `fit` and `band`: canonical dots at the
// selected partition plus a smooth line (default cubic) on the same bins.
struct Pipeline {
    QuantilePartition part;
    FitResult dots_fit;
    FitResult line_fit;
    int line_p = 3, line_s = 3;
};

Pipeline run_pipeline(const Options& o, const Dataset& data, json& doc) {
    const int sel_p = o.p_explicit ? o.p : 0;
    const int sel_s = o.p_explicit ? o.s : 0;
    const int J = choose_bins(o, data, sel_p, sel_s, o.v, doc);

    Pipeline pipe;
    pipe.part = build_partition(data, sort_index(data), J);
    if (pipe.part.deduped)
        doc["metadata"]["warnings"].push_back(
            "coincident quantile knots: J reduced from " +
            std::to_string(pipe.part.requested_J) + " to " + std::to_string(pipe.part.J));

    pipe.dots_fit = fit_binscatter(data, BasisSpec(0, 0, pipe.part));
    pipe.line_p = o.p_explicit ? o.p : 3;
    pipe.line_s = o.p_explicit ? o.s : 3;
    pipe.line_fit = (pipe.line_p == 0 && pipe.line_s == 0)
                        ? pipe.dots_fit
                        : fit_binscatter(data, BasisSpec(pipe.line_p, pipe.line_s, pipe.part));

    doc["partition"] = report::partition_json(pipe.part);
    doc["dots"] = report::dots_json(pipe.dots_fit.dots());
    doc["coefficients"] = report::coefficients_json(pipe.line_fit);
    doc["metadata"]["dots_covariate_shift"] = pipe.dots_fit.mean_w_gamma;
    doc["metadata"]["dots_shift_applied"] = false;
    return pipe;
}

json line_json(const FitResult& fit, int v, int grid_target) {
    const std::vector<double> xs = grid_points(fit.spec, grid_target);
    Eigen::VectorXd mu(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        mu[static_cast<Eigen::Index>(i)] = fit.evaluate(xs[i], v);
    return json{{"grid", report::vec_json(xs)}, {"mu", report::vec_json(mu)}};
}

int cmd_fit(const Options& o, bool with_band) {
    json doc;
    {
        json meta;
        const Dataset data = load_data(o, meta);
        doc = base_doc(with_band ? "band" : "fit", data);
        doc["metadata"].update(meta);
        if (o.p_explicit) validate_orders(o);

        const Pipeline pipe = run_pipeline(o, data, doc);
        doc["line"] = line_json(pipe.line_fit, o.v, o.grid);

        json cfg{{"p", pipe.line_p}, {"s", pipe.line_s}, {"v", o.v},
                 {"J", pipe.part.J}, {"method", o.J > 0 ? "fixed" : o.method},
                 {"vce", o.vce},     {"seed", o.seed}};

        report::SvgSeries svg;
        svg.dots = pipe.dots_fit.dots();
        for (const auto& g : doc["line"]["grid"]) svg.line_x.push_back(g.get<double>());
        for (const auto& m : doc["line"]["mu"]) svg.line_y.push_back(m.get<double>());

        if (with_band) {
            // selection at order sel_p, band simulated from the order
            // (sel_p + q_eff) refit on the same partition; with defaults this
            // is the canonical-selection / cubic-band recommendation
            const int sel_p = o.p_explicit ? o.p : 0;
            const int sel_s = o.p_explicit ? o.s : 0;
            const int q_eff = o.p_explicit ? o.q : 3;
            const BandResult band =
                confidence_band(data, sel_p, sel_s, o.v, q_eff, o.alpha, pipe.part.J, o.draws,
                                o.seed, parse_vce(o.vce), o.grid);
            doc["band"] = report::band_json(band);
            cfg["q"] = q_eff;
            cfg["alpha"] = o.alpha;
            cfg["draws"] = o.draws;

            svg.line_x.clear();
            svg.line_y.clear();
            for (std::size_t i = 0; i < band.grid.points.size(); ++i) {
                const Eigen::Index ii = static_cast<Eigen::Index>(i);
                svg.line_x.push_back(band.grid.points[i]);
                svg.line_y.push_back(band.grid.mu[ii]);
                svg.band_lower.push_back(band.lower[ii]);
                svg.band_upper.push_back(band.upper[ii]);
            }
            if (!o.model.empty()) {
                const ParametricModel overlay =
                    fit_model(ParametricModel::parse(o.model), data);
                for (double x : band.grid.points) svg.overlay_y.push_back(overlay.eval(x, o.v));
                doc["overlay_model"] = overlay.describe();
            }
            if (!o.csv_path.empty())
                report::write_output(o.csv_path,
                                     report::grid_csv(band.grid, &band.lower, &band.upper));
        } else if (!o.csv_path.empty()) {
            std::ostringstream csv;
            csv << "x,mu\n";
            for (std::size_t i = 0; i < svg.line_x.size(); ++i) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", svg.line_x[i], svg.line_y[i]);
                csv << buf;
            }
            report::write_output(o.csv_path, csv.str());
        }
        doc["config"] = cfg;
        if (!o.svg_path.empty()) report::write_output(o.svg_path, report::render_svg(svg));
    }
    finish(o, doc);
    return 0;
}

int cmd_test(const Options& o, bool shape, const std::string& direction) {
    json meta;
    const Dataset data = load_data(o, meta);
    json doc = base_doc(shape ? "test-shape" : "test-spec", data);
    doc["metadata"].update(meta);

    Options eff = o;
    if (!eff.p_explicit && eff.v > 2) eff.p = eff.s = 3 + eff.v; // recommended order for high v
    validate_orders(eff);

    const int J = choose_bins(eff, data, eff.p, eff.s, eff.v, doc);
    doc["config"] = json{{"p", eff.p},     {"s", eff.s},       {"v", eff.v},
                         {"q", eff.q},     {"J", J},           {"alpha", eff.alpha},
                         {"draws", eff.draws}, {"seed", eff.seed}, {"vce", eff.vce}};

    TestResult res;
    if (shape) {
        std::optional<ParametricModel> baseline;
        if (!eff.model.empty()) baseline = ParametricModel::parse(eff.model);
        const ShapeDirection dir =
            direction == "ge" ? ShapeDirection::ge : ShapeDirection::le;
        res = test_shape(data, eff.p, eff.s, eff.v, eff.q, eff.alpha, J, dir, baseline,
                         eff.draws, eff.seed, parse_vce(eff.vce), eff.grid);
    } else {
        if (eff.model.empty()) throw ConfigError("test-spec requires --model");
        res = test_specification(data, eff.p, eff.s, eff.v, eff.q, eff.alpha, J,
                                 ParametricModel::parse(eff.model), eff.draws, eff.seed,
                                 parse_vce(eff.vce), eff.grid);
    }
    doc["test"] = report::test_json(res);
    doc["test"]["grid"] = report::vec_json(res.grid.points);
    doc["test"]["mu"] = report::vec_json(res.grid.mu);
    doc["test"]["se"] = report::vec_json(res.grid.se);
    doc["test"]["model_values"] = report::vec_json(res.model_values);

    if (!o.csv_path.empty())
        report::write_output(o.csv_path, report::grid_csv(res.grid, nullptr, nullptr));
    if (!o.svg_path.empty()) {
        report::SvgSeries svg;
        svg.line_x = res.grid.points;
        for (Eigen::Index i = 0; i < res.grid.mu.size(); ++i) {
            svg.line_y.push_back(res.grid.mu[i]);
            svg.overlay_y.push_back(res.model_values[i]);
        }
        report::write_output(o.svg_path, report::render_svg(svg));
    }
    finish(o, doc);
    return 0;
}

int cmd_select_bins(const Options& o) {
    json meta;
    const Dataset data = load_data(o, meta);
    json doc = base_doc("select-bins", data);
    doc["metadata"].update(meta);

    Options eff = o;
    if (!eff.p_explicit) eff.p = eff.s = 0; // canonical selection by default
    validate_orders(eff);

    const int J = choose_bins(eff, data, eff.p, eff.s, eff.v, doc);
    doc["config"] = json{{"p", eff.p}, {"s", eff.s}, {"v", eff.v},
                         {"method", o.J > 0 ? "fixed" : o.method}};
    doc["J"] = J;
    doc["partition"] = report::partition_json(build_partition(data, sort_index(data), J));
    finish(o, doc);
    return 0;
}

int cmd_compare_covadj(const Options& o) {
    json meta;
    const Dataset data = load_data(o, meta);
    if (data.d() < 1) throw ConfigError("compare-covadj requires covariates (--w)");
    json doc = base_doc("compare-covadj", data);
    doc["metadata"].update(meta);

    Options eff = o;
    eff.p = eff.s = 0;
    const int J = choose_bins(eff, data, 0, 0, 0, doc);

    const QuantilePartition part = build_partition(data, sort_index(data), J);
    const FitResult semi = fit_binscatter(data, BasisSpec(0, 0, part));
    const FitResult resid = fit_residualized(data, J);

    const auto semi_dots = semi.dots();
    const auto resid_dots = resid.dots();
    double gap = 0.0;
    for (std::size_t j = 0; j < std::min(semi_dots.size(), resid_dots.size()); ++j)
        gap += std::abs(semi_dots[j].mu - resid_dots[j].mu);
    gap /= static_cast<double>(std::min(semi_dots.size(), resid_dots.size()));

    doc["config"] = json{{"J", J}, {"method", o.J > 0 ? "fixed" : o.method}};
    doc["partition"] = report::partition_json(part);
    doc["semilinear"] = {{"dots", report::dots_json(semi_dots)},
                         {"gamma", report::vec_json(semi.gamma)}};
    doc["residualized"] = {{"dots", report::dots_json(resid_dots)},
                           {"partition", report::partition_json(resid.spec.part)}};
    doc["mean_abs_dot_gap"] = gap;

    if (!o.svg_path.empty()) {
        report::SvgSeries svg;
        svg.dots = semi_dots;
        for (const Dot& d : resid_dots) {
            svg.line_x.push_back(d.x);
            svg.line_y.push_back(d.mu);
        }
        report::write_output(o.svg_path, report::render_svg(svg));
    }
    finish(o, doc);
    return 0;
}

struct SimulateOptions {
    std::string experiment = "ci_coverage";
    int reps = 100;
    long long n = 1000;
    long long n2 = 8000;
    std::string w_mode = "independent";
    std::string mu = "quartic";
    double noise_sd = 0.5;
    bool hetero = false;
    double hetero_slope = 1.0;
};

int cmd_simulate(const Options& o, const SimulateOptions& so) {
    ExperimentConfig cfg;
    cfg.kind = parse_experiment(so.experiment);
    cfg.reps = so.reps;
    cfg.seed = o.seed;
    cfg.p = o.p_explicit ? o.p : default_orders_for(cfg.kind).first;
    cfg.s = o.p_explicit ? o.s : default_orders_for(cfg.kind).second;
    cfg.v = o.v;
    cfg.q = o.q;
    cfg.alpha = o.alpha;
    cfg.draws = o.draws;
    cfg.grid_target = o.grid;
    cfg.n2 = so.n2;
    cfg.J = o.J;
    cfg.use_dpi = o.method == "dpi";
    if (!o.model.empty()) cfg.model = o.model;

    cfg.dgp.n = so.n;
    cfg.dgp.noise_sd = so.noise_sd;
    cfg.dgp.hetero = so.hetero;
    cfg.dgp.hetero_slope = so.hetero_slope;
    if (so.w_mode == "none") cfg.dgp.w_mode = DgpSpec::WMode::none;
    else if (so.w_mode == "correlated") cfg.dgp.w_mode = DgpSpec::WMode::correlated;
    else cfg.dgp.w_mode = DgpSpec::WMode::independent_uniform;

    if (so.mu == "quartic") {
        cfg.dgp.mu_coeffs = DgpSpec::default_quartic();
    } else if (so.mu == "linear") {
        cfg.dgp.mu_coeffs = Eigen::Vector2d(2.0, 3.0);
    } else if (so.mu.rfind("coeffs:", 0) == 0) {
        const ParametricModel m = ParametricModel::parse(so.mu);
        cfg.dgp.mu_coeffs = m.coeffs;
    } else {
        throw ConfigError("unknown --mu '" + so.mu + "' (quartic|linear|coeffs:a0,a1,...)");
    }

    const ExperimentSummary sum = run_experiment(cfg);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "simulate";
    doc["config"] = json{{"experiment", so.experiment},
                         {"reps", cfg.reps},
                         {"n", static_cast<long long>(cfg.dgp.n)},
                         {"n2", static_cast<long long>(cfg.n2)},
                         {"seed", cfg.seed},
                         {"p", cfg.p},
                         {"s", cfg.s},
                         {"v", cfg.v},
                         {"q", cfg.q},
                         {"alpha", cfg.alpha},
                         {"draws", cfg.draws},
                         {"w_mode", so.w_mode},
                         {"mu", so.mu},
                         {"noise_sd", so.noise_sd},
                         {"model", cfg.model}};
    doc["result"] = report::experiment_json(sum);
    finish(o, doc);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized binscatter: quantile-binned polynomial/spline regression with "
                 "covariate adjustment, IMSE-optimal bin selection, robust confidence bands, "
                 "and sup-type hypothesis tests"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML-style config file (flags override it)");
    app.footer("environment: BINSMOOTH_THREADS caps the worker count");


    Options o;
    SimulateOptions so;
    std::string direction = "le";

    auto* fit = app.add_subcommand("fit", "canonical dots plus a smooth line");
    fit->fallthrough();
    add_data_options(fit, o);
    add_order_options(fit, o, false);
    add_selection_options(fit, o);
    add_output_options(fit, o);
    fit->add_option("--vce", o.vce)->check(CLI::IsMember({"hc0", "hc1", "cluster"}));
    fit->add_option("--grid", o.grid);
    fit->add_option("--seed", o.seed);

    auto* band = app.add_subcommand("band", "fit plus a uniform confidence band");
    band->fallthrough();
    add_data_options(band, o);
    add_order_options(band, o);
    add_selection_options(band, o);
    add_inference_options(band, o);
    add_output_options(band, o);
    band->add_option("--model", o.model, "parametric overlay for the plot");

    auto* tspec = app.add_subcommand("test-spec", "sup test of a parametric specification");
    tspec->fallthrough();
    add_data_options(tspec, o);
    add_order_options(tspec, o);
    add_selection_options(tspec, o);
    add_inference_options(tspec, o);
    add_output_options(tspec, o);
    tspec->add_option("--model", o.model, "null family (constant|linear|quadratic|cubic|"
                                          "poly:K|logistic|exponential|coeffs:...)");

    auto* tshape = app.add_subcommand("test-shape", "one-sided sup test of a shape restriction");
    tshape->fallthrough();
    add_data_options(tshape, o);
    add_order_options(tshape, o);
    add_selection_options(tshape, o);
    add_inference_options(tshape, o);
    add_output_options(tshape, o);
    tshape->add_option("--direction", direction, "le tests mu^(v) <= baseline, ge the reverse")
        ->check(CLI::IsMember({"le", "ge"}))
        ->capture_default_str();
    tshape->add_option("--model", o.model, "optional parametric baseline (default 0)");

    auto* sel = app.add_subcommand("select-bins", "IMSE-optimal number of bins");
    sel->fallthrough();
    add_data_options(sel, o);
    add_order_options(sel, o, false);
    add_selection_options(sel, o);
    add_output_options(sel, o);

    auto* cov = app.add_subcommand("compare-covadj",
                                   "semi-linear versus residualized covariate adjustment");
    cov->fallthrough();
    add_data_options(cov, o);
    add_selection_options(cov, o);
    add_output_options(cov, o);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments on the built-in DGP");
    sim->fallthrough();
    sim->add_option("--experiment", so.experiment,
                    "ci_coverage|band_coverage|spec_size|spec_power|shape_size|shape_power|"
                    "selector_rate|covadj_bias")
        ->capture_default_str();
    sim->add_option("--reps", so.reps)->capture_default_str();
    sim->add_option("--n", so.n)->capture_default_str();
    sim->add_option("--n2", so.n2, "larger n for selector_rate")->capture_default_str();
    sim->add_option("--w-mode", so.w_mode, "none|independent|correlated")
        ->check(CLI::IsMember({"none", "independent", "correlated"}))
        ->capture_default_str();
    sim->add_option("--mu", so.mu, "quartic|linear|coeffs:a0,a1,...")->capture_default_str();
    sim->add_option("--noise-sd", so.noise_sd)->capture_default_str();
    sim->add_flag("--hetero", so.hetero, "noise sd 0.1 + c*x instead of constant");
    sim->add_option("--hetero-slope", so.hetero_slope)->capture_default_str();
    add_order_options(sim, o);
    add_selection_options(sim, o);
    add_inference_options(sim, o);
    sim->add_option("--model", o.model, "null family for spec_* experiments");
    sim->add_option("--out", o.out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(o, false);
        if (band->parsed()) return cmd_fit(o, true);
        if (tspec->parsed()) return cmd_test(o, false, direction);
        if (tshape->parsed()) return cmd_test(o, true, direction);
        if (sel->parsed()) return cmd_select_bins(o);
        if (cov->parsed()) return cmd_compare_covadj(o);
        if (sim->parsed()) return cmd_simulate(o, so);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
