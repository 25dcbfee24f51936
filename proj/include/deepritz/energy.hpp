#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "deepritz/autodiff.hpp"
#include "deepritz/geometry.hpp"
#include "deepritz/network.hpp"

namespace deepritz {

/// Double-well potential W(u) = u^2 (u - 1)^2 / 4.
double potential_W(double u) noexcept;
/// W'(u) = u (u - 1) (2u - 1) / 2.
double potential_W_prime(double u) noexcept;

/// Variational energy: p-Dirichlet (1/p)|grad u|^p or phase field
/// (eps/2)|grad u|^2 + W(u)/eps.
class EnergySpec {
public:
    enum class Kind { PDirichlet, PhaseField };

    /// Throws ConfigError unless p > 1.
    static EnergySpec p_dirichlet(double p);
    /// Throws ConfigError unless eps > 0.
    static EnergySpec phase_field(double epsilon);

    Kind kind() const noexcept { return kind_; }
    double p() const noexcept { return p_; }
    double epsilon() const noexcept { return epsilon_; }
    /// Exponent of the natural energy space (p, or 2 for the phase field).
    double growth_exponent() const noexcept { return kind_ == Kind::PDirichlet ? p_ : 2.0; }

    struct Pointwise {
        double value;
        double d_u;                ///< dL/du
        double d_grad_scale;       ///< dL/d(grad u) = d_grad_scale * grad u
    };
    /// Lagrangian at (u, grad u); `grad_norm2` is |grad u|^2.
    Pointwise lagrangian(double u, double grad_norm2) const noexcept;

private:
    EnergySpec(Kind kind, double p, double epsilon) : kind_(kind), p_(p), epsilon_(epsilon) {}
    Kind kind_;
    double p_;
    double epsilon_;
};

/// E(u) - f(u) + lambda * int_{dOmega} |u|^q, the boundary-penalised objective.
struct PenalizedProblem {
    EnergySpec energy = EnergySpec::p_dirichlet(2.0);
    Rhs rhs = ConstantRhs{0.0};
    double lambda = 0.0;
    double penalty_exponent = 2.0;
    Domain domain = Domain::unit_disk();

    /// Throws ConfigError for a negative/non-finite lambda or exponent <= 1.
    void validate() const;
};

double energy_estimate(const EnergySpec& spec, const Network& net, const SampleBatch& batch);
double force_estimate(const Rhs& rhs, const Network& net, const SampleBatch& batch);
double penalty_estimate(const PenalizedProblem& problem, const Network& net, const SampleBatch& batch);
double objective(const PenalizedProblem& problem, const Network& net, const SampleBatch& batch);

struct ObjectiveParts {
    double energy = 0.0;
    double force = 0.0;
    double penalty = 0.0;
    double total() const noexcept { return energy - force + penalty; }
};
ObjectiveParts evaluate_objective(const PenalizedProblem& problem, const Network& net,
                                  const SampleBatch& batch);

struct ObjectiveGradient {
    ObjectiveParts parts;
    std::vector<double> grad;
};
/// Objective value and its parameter gradient on one batch.
ObjectiveGradient objective_with_grad(const PenalizedProblem& problem, const Network& net,
                                      const SampleBatch& batch);

/// MC estimates of the norms used by the coercivity and Friedrich diagnostics.
struct NormEstimates {
    double lp_p = 0.0;           ///< int |u|^p
    double grad_lp_p = 0.0;      ///< int |grad u|^p
    double boundary_lp_p = 0.0;  ///< int_{dOmega} |u|^p
    double l4 = 0.0;             ///< ||u||_{L^4}
    double h1 = 0.0;             ///< ||u||_{H^1}
};
NormEstimates estimate_norms(const Network& net, const SampleBatch& batch, double p);

/// Norm of the energy space: W^{1,p} for p-Dirichlet, H^1 + L^4 for the phase field.
double energy_space_norm(const EnergySpec& spec, const NormEstimates& norms);

struct CoercivityEntry {
    double lhs = 0.0;     ///< E(u) + ||u||_B^p
    double rhs = 0.0;     ///< c (||u||_X^p - ||u||_X - 1)
    double x_norm = 0.0;  ///< ||u||_X
    bool holds = false;
};

struct CoercivityReport {
    std::vector<CoercivityEntry> entries;
    /// Largest c for which every entry satisfies lhs >= rhs (infinity when
    /// no entry has a positive bracket).
    double max_admissible_c = std::numeric_limits<double>::infinity();
    bool all_hold() const noexcept;
};

/// Checks E(u) + ||gamma u||_B^p >= c (||u||_X^p - ||u||_X - 1) for each net.
CoercivityReport coercivity_check(const EnergySpec& spec, const std::vector<Network>& nets,
                                  const SampleBatch& batch, double c);

/// ||u||^p_{W^{1,p}} / (||grad u||^p_{L^p} + ||u||^p_{L^p(dOmega)}).
/// Throws DegenerateInputError when the denominator is below 1e-14.
double friedrich_ratio(const Network& net, const SampleBatch& batch, double p);

}  // namespace deepritz
