#include "deepritz/cpwl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "deepritz/errors.hpp"

namespace deepritz {

Cpwl1D::Cpwl1D(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2) throw ConfigError("a piecewise-linear function needs at least 2 breakpoints");
    if (breakpoints_.size() != values_.size()) throw ConfigError("breakpoints and values differ in length");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) throw ConfigError("breakpoints must be strictly increasing");
    }
}

std::size_t Cpwl1D::piece(double x) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
    return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, breakpoints_.size() - 2);
}

double Cpwl1D::slope(std::size_t i) const {
    return (values_[i + 1] - values_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
}

double Cpwl1D::operator()(double x) const {
    if (x <= breakpoints_.front()) return values_.front();
    if (x >= breakpoints_.back()) return values_.back();
    const std::size_t i = piece(x);
    return values_[i] + (x - breakpoints_[i]) * slope(i);
}

double Cpwl1D::derivative(double x) const {
    if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
    return slope(piece(x));
}

Cpwl1D interpolate_1d(const std::function<double(double)>& target, std::vector<double> breakpoints) {
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1])) throw ConfigError("breakpoints must be strictly increasing");
    }
    std::vector<double> values;
    values.reserve(breakpoints.size());
    for (double b : breakpoints) values.push_back(target(b));
    return Cpwl1D(std::move(breakpoints), std::move(values));
}

std::vector<double> uniform_breakpoints(double a, double b, std::size_t cells) {
    if (cells == 0 || !(b > a)) throw ConfigError("uniform grid needs a < b and at least one cell");
    std::vector<double> out(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    out.back() = b;
    return out;
}

Network cpwl_to_relu_1d(const Cpwl1D& c) {
    const std::size_t k = c.size();
    Architecture arch{1, {static_cast<int>(k)}, Activation::ReLU};
    std::vector<double> params;
    params.reserve(arch.param_count());
    // Hidden layer: ReLU(x - b_j).
    for (std::size_t j = 0; j < k; ++j) params.push_back(1.0);
    for (std::size_t j = 0; j < k; ++j) params.push_back(-c.breakpoints()[j]);
    // Output layer: slope increments.
    double previous = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        const double s = c.slope(j);
        params.push_back(s - previous);
        previous = s;
    }
    params.push_back(-previous);
    params.push_back(c.values().front());
    return Network(std::move(arch), std::move(params));
}

Network relu_max_gadget(int k) {
    if (k < 2) throw ConfigError("max gadget needs at least 2 inputs");
    // `signals` expresses the values still to be maxed as linear functions of
    // the previous layer's units (initially the raw inputs).
    Eigen::MatrixXd signals = Eigen::MatrixXd::Identity(k, k);
    std::vector<Eigen::MatrixXd> hidden;
    while (signals.rows() > 1) {
        const Eigen::Index n = signals.rows();
        const Eigen::Index pairs = n / 2;
        const bool odd = n % 2 == 1;
        const Eigen::Index units = 3 * pairs + (odd ? 2 : 0);
        Eigen::MatrixXd unit_def = Eigen::MatrixXd::Zero(units, n);
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(pairs + (odd ? 1 : 0), units);
        for (Eigen::Index p = 0; p < pairs; ++p) {
            const Eigen::Index a = 2 * p;
            const Eigen::Index b = 2 * p + 1;
            // max(a, b) = ReLU(a - b) + ReLU(b) - ReLU(-b)
            unit_def(3 * p, a) = 1.0;
            unit_def(3 * p, b) = -1.0;
            unit_def(3 * p + 1, b) = 1.0;
            unit_def(3 * p + 2, b) = -1.0;
            next(p, 3 * p) = 1.0;
            next(p, 3 * p + 1) = 1.0;
            next(p, 3 * p + 2) = -1.0;
        }
        if (odd) {
            // pass-through: c = ReLU(c) - ReLU(-c)
            unit_def(3 * pairs, n - 1) = 1.0;
            unit_def(3 * pairs + 1, n - 1) = -1.0;
            next(pairs, 3 * pairs) = 1.0;
            next(pairs, 3 * pairs + 1) = -1.0;
        }
        hidden.push_back(unit_def * signals);
        signals = next;
    }

    Architecture arch{k, {}, Activation::ReLU};
    for (const auto& w : hidden) arch.hidden_widths.push_back(static_cast<int>(w.rows()));
    std::vector<double> params;
    params.reserve(arch.param_count());
    auto append = [&](const Eigen::MatrixXd& w) {
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index col = 0; col < w.cols(); ++col) params.push_back(w(r, col));
        }
        params.insert(params.end(), static_cast<std::size_t>(w.rows()), 0.0);
    };
    for (const auto& w : hidden) append(w);
    append(signals);
    return Network(std::move(arch), std::move(params));
}

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

double sobolev_error_1d(const Cpwl1D& c, const std::function<double(double)>& target,
                        const std::function<double(double)>& target_derivative, double p, int gauss_points) {
    const GaussRule rule = gauss_legendre(gauss_points);
    double total = 0.0;
    const auto& b = c.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double half = 0.5 * (b[i + 1] - b[i]);
        const double mid = 0.5 * (b[i + 1] + b[i]);
        const double s = c.slope(i);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = mid + half * rule.nodes[q];
            const double value = c.values()[i] + (x - b[i]) * s;
            total += half * rule.weights[q] *
                     (std::pow(std::abs(value - target(x)), p) + std::pow(std::abs(s - target_derivative(x)), p));
        }
    }
    return std::pow(total, 1.0 / p);
}

SimplicialInterpolant2D::SimplicialInterpolant2D(Box2D box, double delta) : x0_(box.x0), y0_(box.y0), delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("grid width must be positive");
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw ConfigError("bounding box must have positive extent");
    // Whole number of cells; tolerate round-off in (x1 - x0) / delta.
    nx_ = std::max(1, static_cast<int>(std::ceil((box.x1 - box.x0) / delta - 1e-9)));
    ny_ = std::max(1, static_cast<int>(std::ceil((box.y1 - box.y0) / delta - 1e-9)));
    values_.assign(static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1), 0.0);
}

SimplicialInterpolant2D::Locate SimplicialInterpolant2D::locate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double gx = (x[0] - x0_) / delta_;
    const double gy = (x[1] - y0_) / delta_;
    constexpr double tol = 1e-12;
    Locate loc{};
    loc.inside = gx >= -tol && gy >= -tol && gx <= nx_ + tol && gy <= ny_ + tol;
    if (!loc.inside) return loc;
    loc.i = std::clamp(static_cast<int>(std::floor(gx)), 0, nx_ - 1);
    loc.j = std::clamp(static_cast<int>(std::floor(gy)), 0, ny_ - 1);
    loc.s = std::clamp(gx - loc.i, 0.0, 1.0);
    loc.t = std::clamp(gy - loc.j, 0.0, 1.0);
    return loc;
}

double SimplicialInterpolant2D::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Locate c = locate(x);
    if (!c.inside) return 0.0;
    const double v00 = vertex_value(c.i, c.j);
    const double v10 = vertex_value(c.i + 1, c.j);
    const double v01 = vertex_value(c.i, c.j + 1);
    const double v11 = vertex_value(c.i + 1, c.j + 1);
    if (c.s >= c.t) return v00 + c.s * (v10 - v00) + c.t * (v11 - v10);
    return v00 + c.t * (v01 - v00) + c.s * (v11 - v01);
}

Eigen::Vector2d SimplicialInterpolant2D::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Locate c = locate(x);
    if (!c.inside) return Eigen::Vector2d::Zero();
    const double v00 = vertex_value(c.i, c.j);
    const double v10 = vertex_value(c.i + 1, c.j);
    const double v01 = vertex_value(c.i, c.j + 1);
    const double v11 = vertex_value(c.i + 1, c.j + 1);
    if (c.s >= c.t) return Eigen::Vector2d(v10 - v00, v11 - v10) / delta_;
    return Eigen::Vector2d(v11 - v01, v01 - v00) / delta_;
}

Box2D SimplicialInterpolant2D::support_box() const {
    int i_lo = nx_ + 1, i_hi = -1, j_lo = ny_ + 1, j_hi = -1;
    for (int j = 0; j <= ny_; ++j) {
        for (int i = 0; i <= nx_; ++i) {
            if (vertex_value(i, j) != 0.0) {
                i_lo = std::min(i_lo, i);
                i_hi = std::max(i_hi, i);
                j_lo = std::min(j_lo, j);
                j_hi = std::max(j_hi, j);
            }
        }
    }
    if (i_hi < 0) return {x0_, x0_, y0_, y0_};
    i_lo = std::max(0, i_lo - 1);
    j_lo = std::max(0, j_lo - 1);
    i_hi = std::min(nx_, i_hi + 1);
    j_hi = std::min(ny_, j_hi + 1);
    return {x0_ + i_lo * delta_, x0_ + i_hi * delta_, y0_ + j_lo * delta_, y0_ + j_hi * delta_};
}

SimplicialInterpolant2D SimplicialInterpolant2D::hat(Box2D box, double delta, int i, int j) {
    SimplicialInterpolant2D s(box, delta);
    if (i < 0 || j < 0 || i > s.nx_ || j > s.ny_) throw ConfigError("hat vertex outside the grid");
    s.vertex_value(i, j) = 1.0;
    return s;
}

void SimplicialInterpolant2D::for_each_triangle(
    const std::function<void(const Eigen::Vector2d&, const Eigen::Vector2d&, const Eigen::Vector2d&)>& fn) const {
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const auto p00 = vertex(i, j);
            const auto p10 = vertex(i + 1, j);
            const auto p01 = vertex(i, j + 1);
            const auto p11 = vertex(i + 1, j + 1);
            fn(p00, p10, p11);
            fn(p00, p11, p01);
        }
    }
}

SimplicialInterpolant2D interpolate_2d(const Target2D& target, double delta, Box2D box) {
    SimplicialInterpolant2D s(box, delta);
    for (int j = 0; j <= s.cells_y(); ++j) {
        for (int i = 0; i <= s.cells_x(); ++i) s.vertex_value(i, j) = target(s.vertex(i, j));
    }
    return s;
}

double sobolev_error_2d(const SimplicialInterpolant2D& s, const Target2D& target,
                        const TargetGradient2D& target_gradient, double p) {
    // Degree-5 seven-point rule on the reference triangle (weights sum to 1).
    const double r15 = std::sqrt(15.0);
    const double a1 = (6.0 - r15) / 21.0;
    const double a2 = (6.0 + r15) / 21.0;
    const double w1 = (155.0 - r15) / 1200.0;
    const double w2 = (155.0 + r15) / 1200.0;
    const std::array<std::array<double, 3>, 7> rule{{{1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
                                                     {a1, a1, w1},
                                                     {1.0 - 2.0 * a1, a1, w1},
                                                     {a1, 1.0 - 2.0 * a1, w1},
                                                     {a2, a2, w2},
                                                     {1.0 - 2.0 * a2, a2, w2},
                                                     {a2, 1.0 - 2.0 * a2, w2}}};
    double total = 0.0;
    s.for_each_triangle([&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
        const Eigen::Vector2d e1 = b - a;
        const Eigen::Vector2d e2 = c - a;
        const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
        const Eigen::Vector2d centroid = (a + b + c) / 3.0;
        const Eigen::Vector2d grad = s.gradient(centroid);
        for (const auto& q : rule) {
            const Eigen::Vector2d x = a + q[0] * e1 + q[1] * e2;
            const double dv = s(x) - target(x);
            const double dg = (grad - target_gradient(x)).norm();
            total += area * q[2] * (std::pow(std::abs(dv), p) + std::pow(dg, p));
        }
    });
    return std::pow(total, 1.0 / p);
}

}  // namespace deepritz
