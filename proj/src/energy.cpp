#include "deepritz/energy.hpp"

#include <algorithm>
#include <cmath>

#include "deepritz/errors.hpp"

namespace deepritz {

double potential_W(double u) noexcept {
    const double v = u * (u - 1.0);
    return 0.25 * v * v;
}

double potential_W_prime(double u) noexcept { return 0.5 * u * (u - 1.0) * (2.0 * u - 1.0); }

EnergySpec EnergySpec::p_dirichlet(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p-Dirichlet energy requires 1 < p < inf");
    return EnergySpec(Kind::PDirichlet, p, 0.0);
}

EnergySpec EnergySpec::phase_field(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("phase-field energy requires eps > 0");
    return EnergySpec(Kind::PhaseField, 2.0, epsilon);
}

EnergySpec::Pointwise EnergySpec::lagrangian(double u, double grad_norm2) const noexcept {
    if (kind_ == Kind::PDirichlet) {
        if (grad_norm2 <= 0.0) return {0.0, 0.0, 0.0};
        if (p_ == 2.0) return {0.5 * grad_norm2, 0.0, 1.0};
        // |g|^p / p, derivative |g|^{p-2} g
        const double pow_pm2 = std::pow(grad_norm2, 0.5 * (p_ - 2.0));
        return {pow_pm2 * grad_norm2 / p_, 0.0, pow_pm2};
    }
    return {0.5 * epsilon_ * grad_norm2 + potential_W(u) / epsilon_, potential_W_prime(u) / epsilon_,
            epsilon_};
}

void PenalizedProblem::validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0) throw ConfigError("penalty weight lambda must be finite and >= 0");
    if (!(penalty_exponent > 1.0) || !std::isfinite(penalty_exponent)) {
        throw ConfigError("penalty exponent must lie in (1, inf)");
    }
    if (domain.dim() != 2 &&
        (std::holds_alternative<TwoBallsRhs>(rhs) || std::holds_alternative<FourierModeRhs>(rhs))) {
        throw ConfigError("two-balls and Fourier right-hand sides need a 2D domain");
    }
}

namespace {

double abs_pow(double v, double q) {
    const double a = std::abs(v);
    return q == 2.0 ? a * a : std::pow(a, q);
}

// Interior part (energy - force) as a closure over a DualBatch.
TermAdjoint interior_term(const EnergySpec& spec, const Eigen::VectorXd& f_values, double measure,
                          const DualBatch& dual) {
    const Eigen::Index n = dual.values.size();
    const double w = measure / static_cast<double>(n);
    TermAdjoint adj;
    adj.d_values.resize(n);
    adj.d_input_grads.resize(n, dual.input_grads.cols());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = dual.values[i];
        const auto lag = spec.lagrangian(u, dual.input_grads.row(i).squaredNorm());
        sum += lag.value - f_values[i] * u;
        adj.d_values[i] = w * (lag.d_u - f_values[i]);
        adj.d_input_grads.row(i) = (w * lag.d_grad_scale) * dual.input_grads.row(i);
    }
    adj.value = w * sum;
    return adj;
}

TermAdjoint boundary_term(double lambda, double q, double measure, const DualBatch& dual) {
    const Eigen::Index n = dual.values.size();
    const double w = lambda * measure / static_cast<double>(n);
    TermAdjoint adj;
    adj.d_values.resize(n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = dual.values[i];
        sum += abs_pow(u, q);
        // d|u|^q/du = q |u|^{q-2} u
        adj.d_values[i] = u == 0.0 ? 0.0 : w * q * abs_pow(u, q - 1.0) * (u > 0.0 ? 1.0 : -1.0);
    }
    adj.value = w * sum;
    return adj;
}

}  // namespace

double energy_estimate(const EnergySpec& spec, const Network& net, const SampleBatch& batch) {
    const DualBatch dual = forward_with_input_grad(net, batch.interior);
    const Eigen::Index n = dual.values.size();
    if (n == 0) throw ConfigError("energy estimate on an empty batch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = spec.lagrangian(dual.values[i], dual.input_grads.row(i).squaredNorm()).value;
        if (!std::isfinite(v)) throw NumericError("energy", "non-finite Lagrangian value");
        sum += v;
    }
    return batch.interior_measure * sum / static_cast<double>(n);
}

double force_estimate(const Rhs& rhs, const Network& net, const SampleBatch& batch) {
    const Eigen::VectorXd u = net.evaluate(batch.interior);
    const Eigen::VectorXd f = rhs_eval(rhs, batch.interior);
    return mc_integral(u.cwiseProduct(f), batch.interior_measure);
}

double penalty_estimate(const PenalizedProblem& problem, const Network& net, const SampleBatch& batch) {
    if (problem.lambda == 0.0) return 0.0;
    const Eigen::VectorXd u = net.evaluate(batch.boundary);
    const Eigen::VectorXd powered = u.unaryExpr([q = problem.penalty_exponent](double v) { return abs_pow(v, q); });
    return problem.lambda * mc_integral(powered, batch.boundary_measure);
}

ObjectiveParts evaluate_objective(const PenalizedProblem& problem, const Network& net,
                                  const SampleBatch& batch) {
    return {energy_estimate(problem.energy, net, batch), force_estimate(problem.rhs, net, batch),
            penalty_estimate(problem, net, batch)};
}

double objective(const PenalizedProblem& problem, const Network& net, const SampleBatch& batch) {
    return evaluate_objective(problem, net, batch).total();
}

ObjectiveGradient objective_with_grad(const PenalizedProblem& problem, const Network& net,
                                      const SampleBatch& batch) {
    ObjectiveGradient out;
    const Eigen::VectorXd f_values = rhs_eval(problem.rhs, batch.interior);
    double energy = 0.0;
    double force = 0.0;
    const auto interior = objective_param_grad(net, batch.interior, [&](const DualBatch& dual) {
        TermAdjoint adj = interior_term(problem.energy, f_values, batch.interior_measure, dual);
        force = mc_integral(dual.values.cwiseProduct(f_values), batch.interior_measure);
        energy = adj.value + force;
        return adj;
    });
    out.parts.energy = energy;
    out.parts.force = force;
    out.grad = interior.grad;
    if (problem.lambda > 0.0) {
        const auto boundary = objective_param_grad(net, batch.boundary, [&](const DualBatch& dual) {
            return boundary_term(problem.lambda, problem.penalty_exponent, batch.boundary_measure, dual);
        });
        out.parts.penalty = boundary.value;
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += boundary.grad[i];
    }
    return out;
}

NormEstimates estimate_norms(const Network& net, const SampleBatch& batch, double p) {
    const DualBatch dual = forward_with_input_grad(net, batch.interior);
    const Eigen::Index n = dual.values.size();
    NormEstimates norms;
    double lp = 0.0, grad_lp = 0.0, l2 = 0.0, grad_l2 = 0.0, l4 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = dual.values[i];
        const double g2 = dual.input_grads.row(i).squaredNorm();
        lp += abs_pow(u, p);
        grad_lp += p == 2.0 ? g2 : std::pow(g2, 0.5 * p);
        l2 += u * u;
        grad_l2 += g2;
        l4 += u * u * u * u;
    }
    const double w = batch.interior_measure / static_cast<double>(n);
    norms.lp_p = w * lp;
    norms.grad_lp_p = w * grad_lp;
    norms.h1 = std::sqrt(w * (l2 + grad_l2));
    norms.l4 = std::pow(w * l4, 0.25);
    const Eigen::VectorXd ub = net.evaluate(batch.boundary);
    norms.boundary_lp_p = mc_integral(ub.unaryExpr([p](double v) { return abs_pow(v, p); }),
                                      batch.boundary_measure);
    return norms;
}

double energy_space_norm(const EnergySpec& spec, const NormEstimates& norms) {
    if (spec.kind() == EnergySpec::Kind::PhaseField) return norms.h1 + norms.l4;
    return std::pow(norms.lp_p + norms.grad_lp_p, 1.0 / spec.p());
}

bool CoercivityReport::all_hold() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.holds; });
}

CoercivityReport coercivity_check(const EnergySpec& spec, const std::vector<Network>& nets,
                                  const SampleBatch& batch, double c) {
    CoercivityReport report;
    const double p = spec.growth_exponent();
    for (const auto& net : nets) {
        const NormEstimates norms = estimate_norms(net, batch, p);
        CoercivityEntry e;
        e.x_norm = energy_space_norm(spec, norms);
        e.lhs = energy_estimate(spec, net, batch) + norms.boundary_lp_p;
        const double bracket = std::pow(e.x_norm, p) - e.x_norm - 1.0;
        e.rhs = c * bracket;
        e.holds = e.lhs >= e.rhs;
        if (bracket > 0.0) report.max_admissible_c = std::min(report.max_admissible_c, e.lhs / bracket);
        report.entries.push_back(e);
    }
    return report;
}

double friedrich_ratio(const Network& net, const SampleBatch& batch, double p) {
    const NormEstimates norms = estimate_norms(net, batch, p);
    const double denominator = norms.grad_lp_p + norms.boundary_lp_p;
    if (denominator < 1e-14) {
        throw DegenerateInputError("Friedrich ratio undefined: gradient and boundary norms vanish");
    }
    return (norms.lp_p + norms.grad_lp_p) / denominator;
}

}  // namespace deepritz
