#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include <Eigen/Dense>

namespace deepritz {

/// Bounded domain with interior and boundary samplers.
///
/// Interval: [a, b], boundary "measure" 2 (counting measure on the endpoints).
/// UnitDisk: centred at the origin, |Omega| = pi, |dOmega| = 2 pi.
/// Square: axis-aligned [lo, lo + side]^2; the unit square is lo = 0, side = 1.
class Domain {
public:
    enum class Kind { Interval, UnitDisk, Square };

    static Domain interval(double a, double b);
    static Domain unit_disk();
    static Domain unit_square();
    /// Square centred at (cx, cy) with the given side length.
    static Domain square(double cx, double cy, double side);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return kind_ == Kind::Interval ? 1 : 2; }
    double measure() const noexcept;
    double boundary_measure() const noexcept;
    /// Lower corner / left endpoint and extent (Interval: length, Square: side).
    double lo_x() const noexcept { return lo_x_; }
    double lo_y() const noexcept { return lo_y_; }
    double extent() const noexcept { return extent_; }

    bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 0.0) const;
    /// Distance of x from the boundary curve (0 on the boundary).
    double boundary_distance(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    std::string describe() const;

private:
    Domain(Kind kind, double lo_x, double lo_y, double extent)
        : kind_(kind), lo_x_(lo_x), lo_y_(lo_y), extent_(extent) {}

    Kind kind_;
    double lo_x_;
    double lo_y_;
    double extent_;
};

/// Interior and boundary Monte Carlo samples plus the measures needed to turn
/// sample means into integrals.
struct SampleBatch {
    Eigen::MatrixXd interior;  ///< N_i x d
    Eigen::MatrixXd boundary;  ///< N_b x d
    std::uint64_t seed = 0;
    double interior_measure = 0.0;
    double boundary_measure = 0.0;
};

/// Uniform interior samples (disk via r = sqrt(U)) and boundary samples
/// uniform in arc length. An interval's boundary batch is always exactly its
/// two endpoints, so the boundary integral is u(a) + u(b) without noise.
/// Throws ConfigError when a count is zero.
SampleBatch sample(const Domain& domain, std::size_t n_interior, std::size_t n_boundary,
                   std::uint64_t seed);

/// measure * mean(values). Throws ConfigError on an empty batch.
double mc_integral(const Eigen::Ref<const Eigen::VectorXd>& values, double measure);

/// Standard error of mc_integral: measure * sample_std / sqrt(N).
double mc_standard_error(const Eigen::Ref<const Eigen::VectorXd>& values, double measure);

/// Right-hand side f.
struct ConstantRhs {
    double value = 1.0;
};
/// chi_{B_r(0,-1/2)} - chi_{B_r(0,1/2)}, strict ball membership.
struct TwoBallsRhs {
    double radius = 0.4;
};
/// amplitude * sin(k pi x) sin(m pi y).
struct FourierModeRhs {
    int k = 1;
    int m = 1;
    double amplitude = 1.0;
};
struct CustomRhs {
    std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> fn;
    std::string name = "custom";
};

using Rhs = std::variant<ConstantRhs, TwoBallsRhs, FourierModeRhs, CustomRhs>;

double rhs_value(const Rhs& f, const Eigen::Ref<const Eigen::VectorXd>& x);
/// f at each row of `points`.
Eigen::VectorXd rhs_eval(const Rhs& f, const Eigen::MatrixXd& points);
std::string describe(const Rhs& f);

}  // namespace deepritz
