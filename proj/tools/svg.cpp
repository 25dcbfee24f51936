#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace deepritz::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo;
    double hi;
    bool log;

    double t(double v) const {
        const double a = log ? std::log10(v) : v;
        const double l = log ? std::log10(lo) : lo;
        const double h = log ? std::log10(hi) : hi;
        return h > l ? (a - l) / (h - l) : 0.5;
    }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int a = static_cast<int>(std::floor(std::log10(lo)));
            const int b = static_cast<int>(std::ceil(std::log10(hi)));
            const bool dense = b - a <= 2;
            for (int e = a; e <= b; ++e) {
                for (double m : {1.0, 2.0, 5.0}) {
                    if (!dense && m != 1.0) continue;
                    const double v = m * std::pow(10.0, e);
                    if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) out.push_back(v);
                }
            }
            return out;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
            out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        }
        return out;
    }
};

Axis make_axis(const std::vector<double>& values, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) return {log ? 0.1 : 0.0, 1.0, log};
    if (log) {
        if (hi / lo < 1.5) {
            lo /= 1.25;
            hi *= 1.25;
        }
        return {lo / 1.1, hi * 1.1, true};
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad, false};
}

bool usable(double x, double y, const LinePlot& p) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (p.log_x && x <= 0.0) return false;
    if (p.log_y && y <= 0.0) return false;
    return true;
}

// Approximate viridis through five anchor colours.
std::array<int, 3> colormap(double t) {
    static const std::array<std::array<double, 3>, 5> anchors{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
    }};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k) {
        c[static_cast<std::size_t>(k)] =
            static_cast<int>(std::lround(anchors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * (1 - f) +
                                         anchors[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(k)] * f));
    }
    return c;
}

std::string hex(const std::array<int, 3>& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

}  // namespace

std::string render_line_plot(const LinePlot& plot) {
    std::vector<double> xs, ys;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i], plot)) continue;
            xs.push_back(s.x[i]);
            ys.push_back(s.y[i]);
        }
    }
    const Axis ax = make_axis(xs, plot.log_x);
    const Axis ay = make_axis(ys, plot.log_y);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + ax.t(x) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - ay.t(y)) * ph; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                      num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(plot.title) + "</text>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : ax.ticks()) {
        const double x = px(v);
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kTop) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 16) + "\" text-anchor=\"middle\">" +
               tick_label(v) + "</text>\n";
    }
    for (double v : ay.ticks()) {
        const double y = py(v);
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(y) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick_label(v) +
               "</text>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 18) + "\" text-anchor=\"middle\">" +
           escape(plot.x_label) + "</text>\n";
    svg += "<text transform=\"translate(20," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape(plot.y_label) + "</text>\n";

    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& series = plot.series[s];
        const std::string color = kColors[s % kColors.size()];
        std::string points;
        std::string marks;
        for (std::size_t i = 0; i < std::min(series.x.size(), series.y.size()); ++i) {
            if (!usable(series.x[i], series.y[i], plot)) continue;
            const double x = px(series.x[i]);
            const double y = py(series.y[i]);
            points += num(x) + "," + num(y) + " ";
            marks += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        svg += marks;
        const double ly = kTop + 14 + 18 * static_cast<double>(s);
        svg += "<line x1=\"" + num(kLeft + pw + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(kLeft + pw + 32) +
               "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kLeft + pw + 38) + "\" y=\"" + num(ly) + "\">" + escape(series.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_heatmap(const Network& net, const Domain& domain, int resolution, const std::string& title) {
    double x0 = -1.0, y0 = -1.0, side = 2.0;
    if (domain.kind() == Domain::Kind::Square) {
        x0 = domain.lo_x();
        y0 = domain.lo_y();
        side = domain.extent();
    }
    const int n = resolution;
    const double h = side / n;
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n) * n, 2);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) pts.row(j * n + i) << x0 + (i + 0.5) * h, y0 + (j + 0.5) * h;
    }
    const Eigen::VectorXd u = net.evaluate(pts);
    std::vector<bool> inside(static_cast<std::size_t>(n) * n);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index k = 0; k < pts.rows(); ++k) {
        inside[static_cast<std::size_t>(k)] = domain.contains(pts.row(k).transpose());
        if (!inside[static_cast<std::size_t>(k)]) continue;
        lo = std::min(lo, u[k]);
        hi = std::max(hi, u[k]);
    }
    if (!(hi > lo)) hi = lo + 1.0;

    constexpr double cell = 2.5;  // pixels per grid cell
    const double size = cell * n;
    const double margin = 40.0;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(size + 2 * margin + 90) +
                      "\" height=\"" + num(size + 2 * margin) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(margin + size / 2) + "\" y=\"26\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(title) + "</text>\n";
    svg += "<g shape-rendering=\"crispEdges\">\n";
    // Rows are merged into runs of equal quantised colour.
    for (int j = 0; j < n; ++j) {
        const double y = margin + (n - 1 - j) * cell;
        int i = 0;
        while (i < n) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            if (!inside[k]) {
                ++i;
                continue;
            }
            const int level = static_cast<int>(std::lround(255.0 * (u[static_cast<Eigen::Index>(k)] - lo) / (hi - lo)));
            int end = i + 1;
            while (end < n) {
                const std::size_t kk = static_cast<std::size_t>(j) * n + end;
                if (!inside[kk]) break;
                const int l2 =
                    static_cast<int>(std::lround(255.0 * (u[static_cast<Eigen::Index>(kk)] - lo) / (hi - lo)));
                if (l2 != level) break;
                ++end;
            }
            svg += "<rect x=\"" + num(margin + i * cell) + "\" y=\"" + num(y) + "\" width=\"" + num((end - i) * cell) +
                   "\" height=\"" + num(cell) + "\" fill=\"" + hex(colormap(level / 255.0)) + "\"/>\n";
            i = end;
        }
    }
    svg += "</g>\n";
    // Colour bar.
    const double bx = margin + size + 20;
    for (int k = 0; k < 64; ++k) {
        const double t = k / 63.0;
        svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(margin + (1 - t) * (size - size / 64)) + "\" width=\"16\" height=\"" +
               num(size / 64 + 0.5) + "\" fill=\"" + hex(colormap(t)) + "\"/>\n";
    }
    svg += "<text x=\"" + num(bx + 22) + "\" y=\"" + num(margin + 10) + "\">" + tick_label(hi) + "</text>\n";
    svg += "<text x=\"" + num(bx + 22) + "\" y=\"" + num(margin + size) + "\">" + tick_label(lo) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace deepritz::cli
