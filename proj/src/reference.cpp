#include "deepritz/reference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "deepritz/autodiff.hpp"
#include "deepritz/cpwl.hpp"
#include "deepritz/errors.hpp"
#include "deepritz/rng.hpp"

namespace deepritz {

namespace {

constexpr double kBoundaryTolerance = 1e-12;

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p-Laplace solution requires 1 < p < inf");
}

}  // namespace

double p_laplace_constant(double p, int d) {
    check_p(p);
    if (d < 1) throw DomainError("dimension must be positive");
    return ((p - 1.0) / p) * std::pow(static_cast<double>(d), -1.0 / (p - 1.0));
}

double p_laplace_radial(double p, int d, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double r = x.norm();
    if (r > 1.0 + kBoundaryTolerance) throw DomainError("p-Laplace radial solution evaluated outside the unit ball");
    const double q = p / (p - 1.0);
    return p_laplace_constant(p, d) * (1.0 - std::pow(std::min(r, 1.0), q));
}

double poisson_fourier(int k, int m, double a, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return a * std::sin(k * std::numbers::pi * x[0]) * std::sin(m * std::numbers::pi * x[1]);
}

double poisson_fourier_forcing(int k, int m, double a, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const double scale = (k * k + m * m) * std::numbers::pi * std::numbers::pi;
    return scale * poisson_fourier(k, m, a, x);
}

ExactSolution ExactSolution::p_laplace_radial(double p, int d, double constant_scale) {
    ExactSolution s(Kind::PLaplaceRadial, d);
    s.p_ = p;
    s.constant_ = constant_scale * p_laplace_constant(p, d);
    return s;
}

ExactSolution ExactSolution::poisson_fourier(int k, int m, double a) {
    if (k < 1 || m < 1) throw DomainError("Fourier mode indices must be positive");
    ExactSolution s(Kind::PoissonFourier, 2);
    s.k_ = k;
    s.m_ = m;
    s.constant_ = a;
    return s;
}

ExactSolution ExactSolution::poisson_1d() { return ExactSolution(Kind::Poisson1D, 1); }

double ExactSolution::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    switch (kind_) {
        case Kind::PLaplaceRadial: {
            const double r = x.norm();
            if (r > 1.0 + kBoundaryTolerance) throw DomainError("radial solution evaluated outside the unit ball");
            return constant_ * (1.0 - std::pow(std::min(r, 1.0), p_ / (p_ - 1.0)));
        }
        case Kind::PoissonFourier: return deepritz::poisson_fourier(k_, m_, constant_, x);
        case Kind::Poisson1D: return 0.5 * x[0] * (1.0 - x[0]);
    }
    return 0.0;
}

Eigen::VectorXd ExactSolution::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    switch (kind_) {
        case Kind::PLaplaceRadial: {
            const double r = x.norm();
            if (r > 1.0 + kBoundaryTolerance) throw DomainError("radial solution evaluated outside the unit ball");
            if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
            // d/dx C (1 - r^q) = -C q r^{q-2} x
            const double q = p_ / (p_ - 1.0);
            return (-constant_ * q * std::pow(r, q - 2.0)) * x;
        }
        case Kind::PoissonFourier: {
            const double kx = k_ * std::numbers::pi;
            const double my = m_ * std::numbers::pi;
            Eigen::VectorXd g(2);
            g << constant_ * kx * std::cos(kx * x[0]) * std::sin(my * x[1]),
                constant_ * my * std::sin(kx * x[0]) * std::cos(my * x[1]);
            return g;
        }
        case Kind::Poisson1D: {
            Eigen::VectorXd g(1);
            g << 0.5 - x[0];
            return g;
        }
    }
    return Eigen::VectorXd::Zero(x.size());
}

double ExactSolution::laplacian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    switch (kind_) {
        case Kind::PLaplaceRadial: {
            if (p_ != 2.0) throw DomainError("Laplacian of the radial solution is only provided for p = 2");
            // C (1 - |x|^2) has Laplacian -2 d C.
            return -2.0 * dim_ * constant_;
        }
        case Kind::PoissonFourier:
            return -(k_ * k_ + m_ * m_) * std::numbers::pi * std::numbers::pi * value(x);
        case Kind::Poisson1D: return -1.0;
    }
    return 0.0;
}

Rhs ExactSolution::forcing() const {
    if (kind_ == Kind::PoissonFourier) {
        return FourierModeRhs{k_, m_, constant_ * (k_ * k_ + m_ * m_) * std::numbers::pi * std::numbers::pi};
    }
    return ConstantRhs{1.0};
}

Domain ExactSolution::domain() const {
    switch (kind_) {
        case Kind::PLaplaceRadial: return Domain::unit_disk();
        case Kind::PoissonFourier: return Domain::unit_square();
        case Kind::Poisson1D: return Domain::interval(0.0, 1.0);
    }
    return Domain::unit_disk();
}

std::string ExactSolution::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case Kind::PLaplaceRadial: out << "plaplace_radial(p=" << p_ << ",d=" << dim_ << ",C=" << constant_ << ")"; break;
        case Kind::PoissonFourier: out << "poisson_fourier(" << k_ << "," << m_ << "," << constant_ << ")"; break;
        case Kind::Poisson1D: out << "poisson_1d"; break;
    }
    return out.str();
}

ErrorNorms error_norms(const Network& net, const ExactSolution& exact, const SampleBatch& batch, double p) {
    const DualBatch dual = forward_with_input_grad(net, batch.interior);
    const Eigen::Index n = dual.values.size();
    double l2 = 0.0, lp = 0.0, grad_lp = 0.0, ref_l2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd x = batch.interior.row(i).transpose();
        const double u = exact.value(x);
        const double diff = dual.values[i] - u;
        const double grad_diff = (dual.input_grads.row(i).transpose() - exact.gradient(x)).norm();
        l2 += diff * diff;
        lp += std::pow(std::abs(diff), p);
        grad_lp += std::pow(grad_diff, p);
        ref_l2 += u * u;
    }
    const double w = batch.interior_measure / static_cast<double>(n);
    ErrorNorms out;
    out.l2 = std::sqrt(w * l2);
    out.lp = std::pow(w * lp, 1.0 / p);
    out.w1p = std::pow(w * (lp + grad_lp), 1.0 / p);
    out.reference_l2 = std::sqrt(w * ref_l2);
    return out;
}

ResidualEstimate weak_form_residual(const ExactSolution& exact, const SimplicialInterpolant2D& v,
                                    std::size_t n_samples, std::uint64_t seed) {
    if (exact.dim() != 2) throw ConfigError("weak-form residual is implemented for 2D solutions");
    if (n_samples < 2) throw ConfigError("weak-form residual needs at least 2 samples");
    const Box2D box = v.support_box();
    const double area = (box.x1 - box.x0) * (box.y1 - box.y0);
    if (!(area > 0.0)) throw ConfigError("test function is identically zero");
    const Rhs f = exact.forcing();
    const double p = exact.kind() == ExactSolution::Kind::PLaplaceRadial ? exact.p() : 2.0;

    Rng rng(seed);
    Eigen::VectorXd integrand(static_cast<Eigen::Index>(n_samples));
    Eigen::VectorXd test_values(static_cast<Eigen::Index>(n_samples));
    Eigen::VectorXd x(2);
    for (Eigen::Index i = 0; i < integrand.size(); ++i) {
        x << rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1);
        const Eigen::VectorXd gu = exact.gradient(x);
        const double norm = gu.norm();
        const double flux_scale = (p == 2.0 || norm == 0.0) ? 1.0 : std::pow(norm, p - 2.0);
        const double vx = v(x);
        integrand[i] = flux_scale * gu.dot(v.gradient(x)) - rhs_value(f, x) * vx;
        test_values[i] = vx;
    }
    ResidualEstimate out;
    out.value = mc_integral(integrand, area);
    out.standard_error = mc_standard_error(integrand, area);
    out.test_integral = mc_integral(test_values, area);
    return out;
}

}  // namespace deepritz
