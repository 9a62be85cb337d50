#include "report.hpp"

#include "binsmooth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace binsmooth::report {

json vec_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json vec_json(const std::vector<double>& v) {
    return json(v);
}

json partition_json(const QuantilePartition& part) {
    json counts = json::array();
    for (auto c : part.counts) counts.push_back(static_cast<long long>(c));
    return json{{"J", part.J},
                {"requested_J", part.requested_J},
                {"deduped", part.deduped},
                {"knots", vec_json(part.knots)},
                {"counts", counts}};
}

json dots_json(const std::vector<Dot>& dots) {
    json arr = json::array();
    for (const Dot& d : dots) arr.push_back(json{{"x", d.x}, {"mu", d.mu}});
    return arr;
}

json coefficients_json(const FitResult& fit) {
    return json{{"beta", vec_json(fit.beta)}, {"gamma", vec_json(fit.gamma)}};
}

json band_json(const BandResult& band) {
    return json{{"alpha", band.alpha},
                {"cv", band.cv},
                {"draws", band.draws},
                {"seed", band.seed},
                {"n", static_cast<long long>(band.grid.n)},
                {"grid", vec_json(band.grid.points)},
                {"mu", vec_json(band.grid.mu)},
                {"omega", vec_json(band.grid.omega)},
                {"se", vec_json(band.grid.se)},
                {"lower", vec_json(band.lower)},
                {"upper", vec_json(band.upper)}};
}

json test_json(const TestResult& test) {
    return json{{"kind", test.kind},
                {"model", test.model},
                {"statistic", test.statistic},
                {"cv", test.cv},
                {"p_value", test.p_value},
                {"alpha", test.alpha},
                {"draws", test.draws},
                {"seed", test.seed},
                {"reject", test.p_value < test.alpha}};
}

json experiment_json(const ExperimentSummary& sum) {
    json metrics;
    for (const auto& [k, v] : sum.metrics) metrics[k] = v;
    json per_rep;
    for (const auto& [k, v] : sum.per_rep) per_rep[k] = v;
    return json{{"experiment", experiment_name(sum.kind)},
                {"reps", sum.reps},
                {"metrics", metrics},
                {"per_rep", per_rep},
                {"notes", sum.notes}};
}

std::string grid_csv(const EvalGrid& grid, const Eigen::VectorXd* lower,
                     const Eigen::VectorXd* upper) {
    std::ostringstream out;
    out << "x,mu,omega,se";
    if (lower && upper) out << ",lower,upper";
    out << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        put(grid.points[i]);
        out << ",";
        put(grid.mu[ii]);
        out << ",";
        put(grid.omega[ii]);
        out << ",";
        put(grid.se[ii]);
        if (lower && upper) {
            out << ",";
            put((*lower)[ii]);
            out << ",";
            put((*upper)[ii]);
        }
        out << "\n";
    }
    return out.str();
}

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 20.0, kBottom = 45.0;

struct Scale {
    double x0, x1, y0, y1;
    double px(double x) const {
        return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
    }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void polyline(std::ostringstream& out, const Scale& sc, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << " ";
        out << fmt(sc.px(xs[i])) << "," << fmt(sc.py(ys[i]));
    }
    out << "\"/>\n";
}

} // namespace

std::string render_svg(const SvgSeries& series) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](double x, double y) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const Dot& d : series.dots) grow(d.x, d.mu);
    for (std::size_t i = 0; i < series.line_x.size(); ++i) grow(series.line_x[i], series.line_y[i]);
    for (std::size_t i = 0; i < series.band_lower.size(); ++i) {
        grow(series.line_x[i], series.band_lower[i]);
        grow(series.line_x[i], series.band_upper[i]);
    }
    for (std::size_t i = 0; i < series.overlay_y.size(); ++i)
        grow(series.line_x[i], series.overlay_y[i]);
    if (!(x0 < x1)) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (!(y0 < y1)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double ypad = 0.05 * (y1 - y0);
    Scale sc{x0, x1, y0 - ypad, y1 + ypad};

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!series.band_lower.empty()) {
        out << "<path fill=\"#9ecae1\" fill-opacity=\"0.55\" stroke=\"none\" d=\"M ";
        for (std::size_t i = 0; i < series.line_x.size(); ++i) {
            if (i) out << " L ";
            out << fmt(sc.px(series.line_x[i])) << " " << fmt(sc.py(series.band_upper[i]));
        }
        for (std::size_t i = series.line_x.size(); i-- > 0;) {
            out << " L " << fmt(sc.px(series.line_x[i])) << " "
                << fmt(sc.py(series.band_lower[i]));
        }
        out << " Z\"/>\n";
    }

    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kHeight - kBottom) << "\" x2=\""
        << fmt(kWidth - kRight) << "\" y2=\"" << fmt(kHeight - kBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xt = x0 + (x1 - x0) * t / 4.0;
        const double yt = sc.y0 + (sc.y1 - sc.y0) * t / 4.0;
        out << "<text x=\"" << fmt(sc.px(xt)) << "\" y=\"" << fmt(kHeight - kBottom + 18.0)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(xt) << "</text>\n";
        out << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(sc.py(yt) + 4.0)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(yt) << "</text>\n";
    }

    if (!series.line_x.empty())
        polyline(out, sc, series.line_x, series.line_y,
                 "stroke=\"#1f4e99\" stroke-width=\"1.8\"");
    if (!series.overlay_y.empty())
        polyline(out, sc, series.line_x, series.overlay_y,
                 "stroke=\"#b22222\" stroke-width=\"1.4\" stroke-dasharray=\"6,4\"");
    for (const Dot& d : series.dots) {
        out << "<circle cx=\"" << fmt(sc.px(d.x)) << "\" cy=\"" << fmt(sc.py(d.mu))
            << "\" r=\"3.2\" fill=\"#13335c\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-" || path.empty()) {
        std::cout << content;
        if (content.empty() || content.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write to " + path);
    out << content;
}

} // namespace binsmooth::report
