#include "deepritz/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "deepritz/errors.hpp"
#include "deepritz/rng.hpp"

namespace deepritz {

namespace {
constexpr double kDivergenceThreshold = 1e12;
}

std::string_view to_string(Algorithm a) { return a == Algorithm::Adam ? "adam" : "sgd"; }

Algorithm parse_algorithm(std::string_view name) {
    if (name == "adam" || name == "Adam") return Algorithm::Adam;
    if (name == "sgd" || name == "SGD") return Algorithm::SGD;
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

void OptimConfig::validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("step_size must be positive");
    if (final_step_size < 0.0 || !std::isfinite(final_step_size)) throw ConfigError("final_step_size must be >= 0");
    if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
    if (batch_interior < 1 || batch_boundary < 1) throw ConfigError("training batch sizes must be positive");
    if (eval_interior < 1 || eval_boundary < 1) throw ConfigError("evaluation batch sizes must be positive");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be positive");
    if (!(adam_betas.first >= 0.0 && adam_betas.first < 1.0 && adam_betas.second >= 0.0 && adam_betas.second < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
    if (tolerance < 0.0) throw ConfigError("tolerance must be >= 0");
}

double OptimConfig::step_size_at(std::size_t step) const {
    if (final_step_size <= 0.0 || max_steps <= 1) return step_size;
    const double t = static_cast<double>(step) / static_cast<double>(max_steps - 1);
    return step_size * std::pow(final_step_size / step_size, t);
}

Optimizer::Optimizer(const OptimConfig& config, std::size_t n_params)
    : algorithm_(config.algorithm), beta1_(config.adam_betas.first), beta2_(config.adam_betas.second),
      eps_(config.adam_eps), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& grad, double step_size) {
    if (algorithm_ == Algorithm::SGD) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= step_size * grad[i];
        return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= step_size * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

Metrics evaluate_metrics(const PenalizedProblem& problem, const Network& net, const SampleBatch& eval_batch,
                         const std::optional<ExactSolution>& reference) {
    Metrics m;
    const ObjectiveParts parts = evaluate_objective(problem, net, eval_batch);
    m.energy = parts.energy;
    m.force = parts.force;
    m.penalty = parts.penalty;
    m.objective = parts.total();
    const Eigen::VectorXd ub = net.evaluate(eval_batch.boundary);
    m.boundary_l2 = std::sqrt(mc_integral(ub.cwiseAbs2(), eval_batch.boundary_measure));
    if (reference) {
        const double p = problem.energy.kind() == EnergySpec::Kind::PDirichlet ? problem.energy.p() : 2.0;
        const ErrorNorms e = error_norms(net, *reference, eval_batch, p);
        m.err_l2 = e.l2;
        m.err_w1p = e.w1p;
        m.rel_err_l2 = e.reference_l2 > 0.0 ? e.l2 / e.reference_l2 : e.l2;
    }
    return m;
}

SampleBatch eval_batch_for(const Domain& domain, const OptimConfig& optim) {
    return sample(domain, optim.eval_interior, optim.eval_boundary, optim.eval_seed);
}

TrainRecord train(const PenalizedProblem& problem, const Architecture& arch, const OptimConfig& optim,
                  std::uint64_t seed, const std::optional<ExactSolution>& reference) {
    problem.validate();
    optim.validate();
    arch.validate();
    if (arch.input_dim != problem.domain.dim()) {
        throw ConfigError("network input dimension " + std::to_string(arch.input_dim) +
                          " does not match domain dimension " + std::to_string(problem.domain.dim()));
    }
    const auto start = std::chrono::steady_clock::now();

    TrainRecord record;
    record.arch = arch;
    record.optim = optim;
    record.lambda = problem.lambda;
    record.seed = seed;
    record.trajectory.reserve(optim.max_steps);

    const SampleBatch eval = eval_batch_for(problem.domain, optim);
    Network net = init_network(arch, split_seed(seed, 0));
    Optimizer optimizer(optim, net.param_count());

    auto eval_objective = [&](const Network& candidate) { return objective(problem, candidate, eval); };

    double best = eval_objective(net);
    Network best_net = net;
    record.checkpoints.push_back({0, best});

    for (std::size_t step = 0; step < optim.max_steps; ++step) {
        const SampleBatch batch =
            sample(problem.domain, optim.batch_interior, optim.batch_boundary, split_seed(seed, step + 1));
        ObjectiveGradient og;
        try {
            og = objective_with_grad(problem, net, batch);
        } catch (const NumericError& e) {
            throw DivergenceError(step, std::numeric_limits<double>::quiet_NaN());
        }
        const double value = og.parts.total();
        if (!std::isfinite(value) || std::abs(value) > kDivergenceThreshold) throw DivergenceError(step, value);
        record.trajectory.push_back(value);
        optimizer.step(net.mutable_params(), og.grad, optim.step_size_at(step));

        const std::size_t done = step + 1;
        if (done % optim.checkpoint_every == 0 || done == optim.max_steps) {
            double current = 0.0;
            try {
                current = eval_objective(net);
            } catch (const NumericError&) {
                throw DivergenceError(step, std::numeric_limits<double>::quiet_NaN());
            }
            if (!std::isfinite(current) || std::abs(current) > kDivergenceThreshold) {
                throw DivergenceError(step, current);
            }
            record.checkpoints.push_back({done, current});
            if (current < best) {
                best = current;
                best_net = net;
                record.best_step = done;
            }
        }
    }
    record.steps = optim.max_steps;
    record.initial = evaluate_metrics(problem, init_network(arch, split_seed(seed, 0)), eval, reference);
    record.net = std::move(best_net);
    record.metrics = evaluate_metrics(problem, record.net, eval, reference);
    record.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

Architecture AnsatzSchedule::architecture(int width, int input_dim) const {
    const int layers = hidden_layers.value_or(relu_family_hidden_layers(input_dim));
    return Architecture{input_dim, std::vector<int>(static_cast<std::size_t>(layers), width), activation};
}

void AnsatzSchedule::validate() const {
    if (widths.empty()) throw ConfigError("width schedule is empty");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (widths[i] < 1) throw ConfigError("widths must be positive");
        if (i > 0 && widths[i] <= widths[i - 1]) throw ConfigError("widths must be strictly increasing");
    }
    if (hidden_layers && *hidden_layers < 1) throw ConfigError("hidden_layers must be positive");
}

SweepConfig SweepConfig::with_default_schedules(AnsatzSchedule ansatz, OptimConfig optim, double lambda_scale,
                                                std::size_t restarts) {
    SweepConfig s;
    for (int w : ansatz.widths) {
        s.lambdas.push_back(lambda_scale * w);
        s.deltas.push_back(1.0 / w);
    }
    s.ansatz = std::move(ansatz);
    s.optim = optim;
    s.restarts = restarts;
    return s;
}

void SweepConfig::validate() const {
    ansatz.validate();
    optim.validate();
    if (lambdas.size() != ansatz.widths.size() || deltas.size() != ansatz.widths.size()) {
        throw ConfigError("sweep lists (widths, lambdas, deltas) must share one length");
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!std::isfinite(lambdas[i]) || lambdas[i] < 0.0) throw ConfigError("lambdas must be finite and >= 0");
        if (deltas[i] < 0.0) throw ConfigError("deltas must be >= 0");
        if (i > 0 && lambdas[i] < lambdas[i - 1]) throw ConfigError("lambdas must be nondecreasing");
        if (i > 0 && deltas[i] > deltas[i - 1]) throw ConfigError("deltas must be nonincreasing");
    }
    if (restarts < 1) throw ConfigError("restarts must be at least 1");
    if (threads < 1) throw ConfigError("threads must be at least 1");
}

PenalizedProblem ProblemFamily::with_lambda(double lambda) const {
    PenalizedProblem p;
    p.energy = energy;
    p.rhs = rhs;
    p.lambda = lambda;
    p.penalty_exponent = penalty_exponent;
    p.domain = domain;
    return p;
}

SweepCell train_certified(const PenalizedProblem& problem, const Architecture& arch, const OptimConfig& optim,
                          std::uint64_t seed, std::size_t restarts, double delta,
                          const std::optional<ExactSolution>& reference) {
    if (restarts < 1) throw ConfigError("restarts must be at least 1");
    SweepCell cell;
    cell.seed = seed;
    cell.width = arch.hidden_widths.empty() ? 0 : arch.hidden_widths.front();
    cell.lambda = problem.lambda;
    cell.delta = delta;
    std::optional<TrainRecord> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        TrainRecord rec = train(problem, arch, optim, split_seed(seed, r), reference);
        cell.certificate.restart_objectives.push_back(rec.metrics.objective);
        if (!best || rec.metrics.objective < best->metrics.objective) best = std::move(rec);
    }
    const auto& objs = cell.certificate.restart_objectives;
    cell.certificate.best = *std::min_element(objs.begin(), objs.end());
    cell.certificate.returned = best->metrics.objective;
    cell.certificate.delta = delta;
    cell.certificate.certified = cell.certificate.returned <= cell.certificate.best + delta;
    cell.certificate.primary_within_delta = objs.front() <= cell.certificate.best + delta;
    cell.record = std::move(*best);
    return cell;
}

namespace {

struct CellJob {
    PenalizedProblem problem;
    Architecture arch;
    std::optional<ExactSolution> reference;
    SweepCell meta;
};

// Runs jobs (optionally in parallel) and merges by job index.
std::vector<SweepCell> run_jobs(const std::vector<CellJob>& jobs, const SweepConfig& sweep) {
    std::vector<std::optional<SweepCell>> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    auto run_one = [&](std::size_t i) {
        try {
            const auto& job = jobs[i];
            SweepCell cell = train_certified(job.problem, job.arch, sweep.optim, job.meta.seed, sweep.restarts,
                                             job.meta.delta, job.reference);
            cell.index = job.meta.index;
            cell.n = job.meta.n;
            cell.width = job.meta.width;
            cell.rhs_index = job.meta.rhs_index;
            results[i] = std::move(cell);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const std::size_t threads = std::min(sweep.threads, jobs.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            run_one(i);
            if (errors[i]) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
            });
        }
    }

    std::vector<SweepCell> cells;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (errors[i]) {
            std::string what = "unknown error";
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            throw SweepAborted(i, what, std::move(cells));
        }
        cells.push_back(std::move(*results[i]));
    }
    return cells;
}

}  // namespace

std::vector<SweepCell> gamma_sweep(const SweepConfig& sweep, const ProblemFamily& family,
                                   const std::optional<ExactSolution>& reference, std::uint64_t root_seed) {
    sweep.validate();
    std::vector<CellJob> jobs;
    for (std::size_t n = 0; n < sweep.ansatz.widths.size(); ++n) {
        CellJob job{family.with_lambda(sweep.lambdas[n]),
                    sweep.ansatz.architecture(sweep.ansatz.widths[n], family.domain.dim()), reference, {}};
        job.meta.index = n;
        job.meta.n = n;
        job.meta.width = sweep.ansatz.widths[n];
        job.meta.lambda = sweep.lambdas[n];
        job.meta.delta = sweep.deltas[n];
        job.meta.seed = split_seed(root_seed, n);
        jobs.push_back(std::move(job));
    }
    return run_jobs(jobs, sweep);
}

UniformSweepResult uniform_sweep(const SweepConfig& sweep, const ProblemFamily& family,
                                 const std::vector<RhsCase>& cases, std::uint64_t root_seed) {
    sweep.validate();
    if (cases.empty()) throw ConfigError("uniform sweep needs at least one right-hand side");
    for (std::size_t f = 0; f < cases.size(); ++f) {
        if (!cases[f].reference) {
            throw ConfigError("right-hand side " + std::to_string(f) + " has no reference solution");
        }
    }
    std::vector<CellJob> jobs;
    for (std::size_t n = 0; n < sweep.ansatz.widths.size(); ++n) {
        for (std::size_t f = 0; f < cases.size(); ++f) {
            ProblemFamily fam = family;
            fam.rhs = cases[f].rhs;
            CellJob job{fam.with_lambda(sweep.lambdas[n]),
                        sweep.ansatz.architecture(sweep.ansatz.widths[n], family.domain.dim()), cases[f].reference,
                        {}};
            job.meta.index = jobs.size();
            job.meta.n = n;
            job.meta.rhs_index = f;
            job.meta.width = sweep.ansatz.widths[n];
            job.meta.lambda = sweep.lambdas[n];
            job.meta.delta = sweep.deltas[n];
            job.meta.seed = split_seed(root_seed, job.meta.index);
            jobs.push_back(std::move(job));
        }
    }
    UniformSweepResult result;
    result.cells = run_jobs(jobs, sweep);
    result.errors.assign(sweep.ansatz.widths.size(), std::vector<double>(cases.size(), 0.0));
    result.sup_errors.assign(sweep.ansatz.widths.size(), 0.0);
    for (const auto& cell : result.cells) {
        const double e = cell.record.metrics.err_l2.value_or(0.0);
        result.errors[cell.n][cell.rhs_index] = e;
        result.sup_errors[cell.n] = std::max(result.sup_errors[cell.n], e);
    }
    return result;
}

std::vector<RhsCase> fourier_family(const std::vector<std::pair<int, int>>& modes, double norm,
                                    FourierNorm which) {
    std::vector<RhsCase> cases;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (const auto& [k, m] : modes) {
        // ||sin(k pi x) sin(m pi y)||_{L^2((0,1)^2)} = 1/2
        const double eigenvalue = (k * k + m * m) * pi2;
        const double a = which == FourierNorm::Solution ? 2.0 * norm : 2.0 * norm / eigenvalue;
        const double forcing_amplitude = a * eigenvalue;
        cases.push_back({FourierModeRhs{k, m, forcing_amplitude}, ExactSolution::poisson_fourier(k, m, a)});
    }
    return cases;
}

}  // namespace deepritz
