#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "deepritz/geometry.hpp"
#include "deepritz/network.hpp"

namespace deepritz {

class SimplicialInterpolant2D;

/// Constant of the radial p-Laplace solution on the unit ball with f = 1:
/// C = ((p - 1) / p) * d^{-1/(p - 1)}.
double p_laplace_constant(double p, int d);

/// u(x) = C (1 - |x|^{p/(p-1)}). Throws DomainError for |x| > 1.
double p_laplace_radial(double p, int d, const Eigen::Ref<const Eigen::VectorXd>& x);

/// a sin(k pi x) sin(m pi y) and its forcing a (k^2 + m^2) pi^2 sin sin.
double poisson_fourier(int k, int m, double a, const Eigen::Ref<const Eigen::VectorXd>& x);
double poisson_fourier_forcing(int k, int m, double a, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Closed-form minimiser with value and gradient.
class ExactSolution {
public:
    enum class Kind { PLaplaceRadial, PoissonFourier, Poisson1D };

    /// Radial p-Laplace solution on the unit disk (d = 2) or ball, f = 1.
    /// `constant_scale` multiplies C; it exists for mutation testing only.
    static ExactSolution p_laplace_radial(double p, int d, double constant_scale = 1.0);
    /// Poisson eigenfunction solution on the unit square.
    static ExactSolution poisson_fourier(int k, int m, double a);
    /// u = x (1 - x) / 2 on (0, 1), solving -u'' = 1.
    static ExactSolution poisson_1d();

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    double p() const noexcept { return p_; }
    double constant() const noexcept { return constant_; }

    double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Laplacian (available for the p = 2 problems).
    double laplacian(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// The right-hand side this function solves.
    Rhs forcing() const;
    /// Domain on which the function has zero trace.
    Domain domain() const;
    std::string describe() const;

private:
    ExactSolution(Kind kind, int dim) : kind_(kind), dim_(dim) {}

    Kind kind_;
    int dim_;
    double p_ = 2.0;
    double constant_ = 1.0;
    int k_ = 1;
    int m_ = 1;
};

struct ErrorNorms {
    double l2 = 0.0;
    double lp = 0.0;
    double w1p = 0.0;
    double reference_l2 = 0.0;  ///< ||u_exact||_{L^2}, for relative errors
};

/// MC estimates of ||u_theta - u|| in L^2, L^p and W^{1,p} on the interior
/// samples of `batch`.
ErrorNorms error_norms(const Network& net, const ExactSolution& exact, const SampleBatch& batch,
                       double p = 2.0);

/// Monte Carlo estimate of the weak-form residual
///   int |grad u|^{p-2} grad u . grad v - int f v
/// for a zero-boundary test function v, sampling uniformly on the bounding
/// box of supp(v).
struct ResidualEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    double test_integral = 0.0;  ///< int v, for scale
};
ResidualEstimate weak_form_residual(const ExactSolution& exact, const SimplicialInterpolant2D& v,
                                    std::size_t n_samples, std::uint64_t seed);

}  // namespace deepritz
