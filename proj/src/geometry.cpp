#include "deepritz/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "deepritz/errors.hpp"
#include "deepritz/rng.hpp"

namespace deepritz {

Domain Domain::interval(double a, double b) {
    if (!(b > a)) throw ConfigError("interval requires a < b");
    return Domain(Kind::Interval, a, 0.0, b - a);
}

Domain Domain::unit_disk() { return Domain(Kind::UnitDisk, -1.0, -1.0, 2.0); }

Domain Domain::unit_square() { return Domain(Kind::Square, 0.0, 0.0, 1.0); }

Domain Domain::square(double cx, double cy, double side) {
    if (!(side > 0.0)) throw ConfigError("square side must be positive");
    return Domain(Kind::Square, cx - side / 2.0, cy - side / 2.0, side);
}

double Domain::measure() const noexcept {
    switch (kind_) {
        case Kind::Interval: return extent_;
        case Kind::UnitDisk: return std::numbers::pi;
        case Kind::Square: return extent_ * extent_;
    }
    return 0.0;
}

double Domain::boundary_measure() const noexcept {
    switch (kind_) {
        case Kind::Interval: return 2.0;
        case Kind::UnitDisk: return 2.0 * std::numbers::pi;
        case Kind::Square: return 4.0 * extent_;
    }
    return 0.0;
}

bool Domain::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
    switch (kind_) {
        case Kind::Interval: return x[0] >= lo_x_ - tol && x[0] <= lo_x_ + extent_ + tol;
        case Kind::UnitDisk: return x.norm() <= 1.0 + tol;
        case Kind::Square:
            return x[0] >= lo_x_ - tol && x[0] <= lo_x_ + extent_ + tol && x[1] >= lo_y_ - tol &&
                   x[1] <= lo_y_ + extent_ + tol;
    }
    return false;
}

double Domain::boundary_distance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    switch (kind_) {
        case Kind::Interval: return std::min(std::abs(x[0] - lo_x_), std::abs(x[0] - lo_x_ - extent_));
        case Kind::UnitDisk: return std::abs(x.norm() - 1.0);
        case Kind::Square: {
            const double dx = std::min(std::abs(x[0] - lo_x_), std::abs(x[0] - lo_x_ - extent_));
            const double dy = std::min(std::abs(x[1] - lo_y_), std::abs(x[1] - lo_y_ - extent_));
            const bool inside_x = x[0] >= lo_x_ && x[0] <= lo_x_ + extent_;
            const bool inside_y = x[1] >= lo_y_ && x[1] <= lo_y_ + extent_;
            if (inside_x && inside_y) return std::min(dx, dy);
            if (inside_x) return dy;
            if (inside_y) return dx;
            return std::hypot(dx, dy);
        }
    }
    return 0.0;
}

std::string Domain::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case Kind::Interval: out << "interval[" << lo_x_ << "," << lo_x_ + extent_ << "]"; break;
        case Kind::UnitDisk: out << "unit_disk"; break;
        case Kind::Square:
            out << "square[" << lo_x_ << "," << lo_x_ + extent_ << "]x[" << lo_y_ << ","
                << lo_y_ + extent_ << "]";
            break;
    }
    return out.str();
}

SampleBatch sample(const Domain& domain, std::size_t n_interior, std::size_t n_boundary,
                   std::uint64_t seed) {
    if (n_interior == 0 || n_boundary == 0) throw ConfigError("sample counts must be at least 1");
    SampleBatch batch;
    batch.seed = seed;
    batch.interior_measure = domain.measure();
    batch.boundary_measure = domain.boundary_measure();
    const auto ni = static_cast<Eigen::Index>(n_interior);
    const auto nb = static_cast<Eigen::Index>(n_boundary);
    Rng interior_rng(split_seed(seed, 0));
    Rng boundary_rng(split_seed(seed, 1));
    const double lo_x = domain.lo_x();
    const double lo_y = domain.lo_y();
    const double ext = domain.extent();

    switch (domain.kind()) {
        case Domain::Kind::Interval:
            batch.interior.resize(ni, 1);
            for (Eigen::Index i = 0; i < ni; ++i) batch.interior(i, 0) = lo_x + ext * interior_rng.uniform();
            batch.boundary.resize(2, 1);
            batch.boundary << lo_x, lo_x + ext;
            break;
        case Domain::Kind::UnitDisk:
            batch.interior.resize(ni, 2);
            for (Eigen::Index i = 0; i < ni; ++i) {
                const double r = std::sqrt(interior_rng.uniform());
                const double phi = 2.0 * std::numbers::pi * interior_rng.uniform();
                batch.interior(i, 0) = r * std::cos(phi);
                batch.interior(i, 1) = r * std::sin(phi);
            }
            batch.boundary.resize(nb, 2);
            for (Eigen::Index i = 0; i < nb; ++i) {
                const double phi = 2.0 * std::numbers::pi * boundary_rng.uniform();
                batch.boundary(i, 0) = std::cos(phi);
                batch.boundary(i, 1) = std::sin(phi);
            }
            break;
        case Domain::Kind::Square:
            batch.interior.resize(ni, 2);
            for (Eigen::Index i = 0; i < ni; ++i) {
                batch.interior(i, 0) = lo_x + ext * interior_rng.uniform();
                batch.interior(i, 1) = lo_y + ext * interior_rng.uniform();
            }
            batch.boundary.resize(nb, 2);
            for (Eigen::Index i = 0; i < nb; ++i) {
                // Arc-length parameter along the perimeter, edge by edge.
                const double s = 4.0 * boundary_rng.uniform();
                const int edge = std::min(3, static_cast<int>(s));
                const double t = ext * (s - edge);
                switch (edge) {
                    case 0: batch.boundary.row(i) << lo_x + t, lo_y; break;
                    case 1: batch.boundary.row(i) << lo_x + ext, lo_y + t; break;
                    case 2: batch.boundary.row(i) << lo_x + ext - t, lo_y + ext; break;
                    default: batch.boundary.row(i) << lo_x, lo_y + ext - t; break;
                }
            }
            break;
    }
    return batch;
}

double mc_integral(const Eigen::Ref<const Eigen::VectorXd>& values, double measure) {
    if (values.size() == 0) throw ConfigError("Monte Carlo estimate of an empty batch");
    return measure * values.mean();
}

double mc_standard_error(const Eigen::Ref<const Eigen::VectorXd>& values, double measure) {
    const auto n = values.size();
    if (n == 0) throw ConfigError("Monte Carlo estimate of an empty batch");
    if (n == 1) return 0.0;
    const double mean = values.mean();
    const double var = (values.array() - mean).square().sum() / static_cast<double>(n - 1);
    return measure * std::sqrt(var / static_cast<double>(n));
}

namespace {

struct RhsVisitor {
    const Eigen::Ref<const Eigen::VectorXd>& x;

    double operator()(const ConstantRhs& f) const { return f.value; }
    double operator()(const TwoBallsRhs& f) const {
        const double r2 = f.radius * f.radius;
        const double below = x[0] * x[0] + (x[1] + 0.5) * (x[1] + 0.5);
        const double above = x[0] * x[0] + (x[1] - 0.5) * (x[1] - 0.5);
        return (below < r2 ? 1.0 : 0.0) - (above < r2 ? 1.0 : 0.0);
    }
    double operator()(const FourierModeRhs& f) const {
        return f.amplitude * std::sin(f.k * std::numbers::pi * x[0]) * std::sin(f.m * std::numbers::pi * x[1]);
    }
    double operator()(const CustomRhs& f) const { return f.fn(x); }
};

}  // namespace

double rhs_value(const Rhs& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return std::visit(RhsVisitor{x}, f);
}

Eigen::VectorXd rhs_eval(const Rhs& f, const Eigen::MatrixXd& points) {
    Eigen::VectorXd out(points.rows());
    if (const auto* c = std::get_if<ConstantRhs>(&f)) {
        out.setConstant(c->value);
        return out;
    }
    Eigen::VectorXd x(points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        x = points.row(i).transpose();
        out[i] = rhs_value(f, x);
    }
    return out;
}

std::string describe(const Rhs& f) {
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ConstantRhs>) {
                out << "constant(" << r.value << ")";
            } else if constexpr (std::is_same_v<T, TwoBallsRhs>) {
                out << "two_balls(" << r.radius << ")";
            } else if constexpr (std::is_same_v<T, FourierModeRhs>) {
                out << "fourier(" << r.k << "," << r.m << "," << r.amplitude << ")";
            } else {
                out << r.name;
            }
        },
        f);
    return out.str();
}

}  // namespace deepritz
