#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "deepritz/network.hpp"

namespace deepritz {

/// Continuous piecewise-linear function of one variable, affine between
/// consecutive breakpoints and constant outside [breakpoints.front(), breakpoints.back()].
class Cpwl1D {
public:
    /// Throws ConfigError unless K >= 2, sizes agree and breakpoints strictly increase.
    Cpwl1D(std::vector<double> breakpoints, std::vector<double> values);

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return breakpoints_.size(); }
    bool zero_boundary() const noexcept { return values_.front() == 0.0 && values_.back() == 0.0; }

    double operator()(double x) const;
    /// Slope of the piece containing x (right-continuous; 0 outside the span).
    double derivative(double x) const;
    /// Slope of piece i, i.e. between breakpoints i and i + 1.
    double slope(std::size_t i) const;

private:
    std::size_t piece(double x) const;

    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Interpolant agreeing with `target` at every breakpoint.
Cpwl1D interpolate_1d(const std::function<double(double)>& target, std::vector<double> breakpoints);

/// `k + 1` equispaced breakpoints on [a, b].
std::vector<double> uniform_breakpoints(double a, double b, std::size_t cells);

/// One-hidden-layer ReLU network equal to `c` on the whole real line:
///   u(x) = c(x_0) + sum_k beta_k ReLU(x - x_k),
/// with beta_k the slope increments (the last one cancels the final slope).
Network cpwl_to_relu_1d(const Cpwl1D& c);

/// ReLU network of depth ceil(log2 k) + 1 computing max(x_1, ..., x_k) by a
/// pairwise tree of max(a, b) = b + ReLU(a - b) gadgets.
Network relu_max_gadget(int k);

/// (int_a^b |c - target|^p + |c' - target'|^p)^{1/p} over the span of the
/// breakpoints, by Gauss-Legendre quadrature on each piece.
double sobolev_error_1d(const Cpwl1D& c, const std::function<double(double)>& target,
                        const std::function<double(double)>& target_derivative, double p,
                        int gauss_points = 8);

struct Box2D {
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;
};

/// Piecewise-linear interpolant on a uniform grid of width delta over a box.
/// Each grid square is cut along its bottom-left to top-right diagonal.
/// Evaluates to 0 outside the box.
class SimplicialInterpolant2D {
public:
    /// Grid covering `box` with vertex spacing `delta` (the box is extended
    /// to a whole number of cells). Throws ConfigError for delta <= 0.
    SimplicialInterpolant2D(Box2D box, double delta);

    double delta() const noexcept { return delta_; }
    int cells_x() const noexcept { return nx_; }
    int cells_y() const noexcept { return ny_; }
    Box2D box() const noexcept { return {x0_, x0_ + nx_ * delta_, y0_, y0_ + ny_ * delta_}; }
    Eigen::Vector2d vertex(int i, int j) const { return {x0_ + i * delta_, y0_ + j * delta_}; }
    double& vertex_value(int i, int j) { return values_[index(i, j)]; }
    double vertex_value(int i, int j) const { return values_[index(i, j)]; }

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Gradient of the triangle containing x (zero outside the box).
    Eigen::Vector2d gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Bounding box of the closure of the support: vertices with nonzero
    /// value expanded by one cell. Empty box when the function is zero.
    Box2D support_box() const;

    /// Nodal basis function ("hat") of vertex (i, j).
    static SimplicialInterpolant2D hat(Box2D box, double delta, int i, int j);

    /// Calls fn(a, b, c) for the three vertex coordinates of every triangle.
    void for_each_triangle(const std::function<void(const Eigen::Vector2d&, const Eigen::Vector2d&,
                                                    const Eigen::Vector2d&)>& fn) const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_ + 1) + static_cast<std::size_t>(i);
    }
    struct Locate {
        int i, j;
        double s, t;
        bool inside;
    };
    Locate locate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    double x0_;
    double y0_;
    double delta_;
    int nx_;
    int ny_;
    std::vector<double> values_;
};

using Target2D = std::function<double(const Eigen::Vector2d&)>;
using TargetGradient2D = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Vertex values sampled from `target`. Throws ConfigError for delta <= 0.
SimplicialInterpolant2D interpolate_2d(const Target2D& target, double delta, Box2D box);

/// W^{1,p} error over the interpolant's box, degree-5 quadrature per triangle.
double sobolev_error_2d(const SimplicialInterpolant2D& s, const Target2D& target,
                        const TargetGradient2D& target_gradient, double p);

}  // namespace deepritz
