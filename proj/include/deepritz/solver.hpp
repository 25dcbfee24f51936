#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deepritz/energy.hpp"
#include "deepritz/errors.hpp"
#include "deepritz/network.hpp"
#include "deepritz/reference.hpp"

namespace deepritz {

enum class Algorithm { SGD, Adam };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct OptimConfig {
    Algorithm algorithm = Algorithm::Adam;
    double step_size = 1e-3;
    /// When positive, the step size decays geometrically to this value at max_steps.
    double final_step_size = 0.0;
    std::pair<double, double> adam_betas{0.9, 0.999};
    double adam_eps = 1e-8;
    std::size_t max_steps = 1000;
    std::size_t batch_interior = 256;
    std::size_t batch_boundary = 64;
    /// Pinned evaluation batch used for every reported metric.
    std::size_t eval_interior = 100000;
    std::size_t eval_boundary = 10000;
    std::uint64_t eval_seed = 20210527;
    std::size_t checkpoint_every = 500;
    double tolerance = 0.0;  ///< quasi-minimiser tolerance delta

    /// Throws ConfigError on step_size <= 0, max_steps == 0 and similar.
    void validate() const;
    double step_size_at(std::size_t step) const;
};

/// First-order update rules over a flat parameter vector.
class Optimizer {
public:
    explicit Optimizer(const OptimConfig& config, std::size_t n_params);
    void step(std::vector<double>& params, const std::vector<double>& grad, double step_size);

private:
    Algorithm algorithm_;
    double beta1_;
    double beta2_;
    double eps_;
    std::size_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

/// Metrics evaluated on the pinned batch.
struct Metrics {
    double objective = 0.0;
    double energy = 0.0;
    double force = 0.0;
    double penalty = 0.0;
    double boundary_l2 = 0.0;  ///< ||u||_{L^2(dOmega)}
    std::optional<double> err_l2;
    std::optional<double> err_w1p;
    std::optional<double> rel_err_l2;
};

Metrics evaluate_metrics(const PenalizedProblem& problem, const Network& net, const SampleBatch& eval_batch,
                         const std::optional<ExactSolution>& reference);

struct Checkpoint {
    std::size_t step = 0;
    double eval_objective = 0.0;
};

struct TrainRecord {
    Architecture arch;
    OptimConfig optim;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> trajectory;  ///< training-batch objective per step
    std::vector<Checkpoint> checkpoints;
    std::size_t best_step = 0;
    std::size_t steps = 0;
    Network net;  ///< best pinned-eval parameters seen
    Metrics initial;
    Metrics metrics;
    double wall_time = 0.0;  ///< seconds
};

SampleBatch eval_batch_for(const Domain& domain, const OptimConfig& optim);

/// Runs max_steps optimiser iterations on fresh Monte Carlo batches and
/// returns the checkpoint with the lowest pinned-eval objective. Throws
/// DivergenceError if the objective exceeds 1e12 or becomes non-finite.
TrainRecord train(const PenalizedProblem& problem, const Architecture& arch, const OptimConfig& optim,
                  std::uint64_t seed, const std::optional<ExactSolution>& reference = std::nullopt);

/// Width schedule for the nested ansatz families.
struct AnsatzSchedule {
    std::vector<int> widths;
    /// Hidden layer count; when empty the zero-boundary ReLU rule
    /// ceil(log2(d + 1)) is used.
    std::optional<int> hidden_layers;
    Activation activation = Activation::ReLU;

    Architecture architecture(int width, int input_dim) const;
    /// Throws ConfigError unless widths are positive and strictly increasing.
    void validate() const;
};

struct SweepConfig {
    AnsatzSchedule ansatz;
    std::vector<double> lambdas;  ///< nondecreasing
    std::vector<double> deltas;   ///< nonincreasing
    OptimConfig optim;
    std::size_t restarts = 5;
    std::size_t threads = 1;

    /// lambda_n = lambda_scale * width_n and delta_n = 1 / width_n.
    static SweepConfig with_default_schedules(AnsatzSchedule ansatz, OptimConfig optim, double lambda_scale = 10.0,
                                              std::size_t restarts = 5);
    void validate() const;
};

/// Energy, domain and penalty exponent shared by every cell of a sweep.
struct ProblemFamily {
    EnergySpec energy = EnergySpec::p_dirichlet(2.0);
    Rhs rhs = ConstantRhs{1.0};
    Domain domain = Domain::unit_disk();
    double penalty_exponent = 2.0;

    PenalizedProblem with_lambda(double lambda) const;
};

/// Best-of-restarts quasi-minimiser certificate.
struct Certificate {
    std::vector<double> restart_objectives;
    double best = 0.0;
    double returned = 0.0;
    double delta = 0.0;
    bool certified = false;             ///< returned <= best + delta
    bool primary_within_delta = false;  ///< restart 0 alone was within delta
};

struct SweepCell {
    std::size_t index = 0;
    std::size_t n = 0;  ///< position in the schedule (0-based)
    int width = 0;
    double lambda = 0.0;
    double delta = 0.0;
    std::size_t rhs_index = 0;
    std::uint64_t seed = 0;
    TrainRecord record;
    Certificate certificate;
};

/// A failing cell aborts the sweep; completed earlier cells are kept.
class SweepAborted : public Error {
public:
    SweepAborted(std::size_t cell, const std::string& what, std::vector<SweepCell> partial)
        : Error("sweep cell " + std::to_string(cell) + " failed: " + what), cell_(cell),
          partial_(std::move(partial)) {}
    std::size_t cell() const noexcept { return cell_; }
    const std::vector<SweepCell>& partial() const noexcept { return partial_; }

private:
    std::size_t cell_;
    std::vector<SweepCell> partial_;
};

/// Trains `restarts` independent runs and returns the best one together
/// with its certificate.
SweepCell train_certified(const PenalizedProblem& problem, const Architecture& arch, const OptimConfig& optim,
                          std::uint64_t seed, std::size_t restarts, double delta,
                          const std::optional<ExactSolution>& reference);

/// One certified training run per (width_n, lambda_n, delta_n).
std::vector<SweepCell> gamma_sweep(const SweepConfig& sweep, const ProblemFamily& family,
                                   const std::optional<ExactSolution>& reference, std::uint64_t root_seed);

struct RhsCase {
    Rhs rhs;
    std::optional<ExactSolution> reference;
};

struct UniformSweepResult {
    std::vector<SweepCell> cells;                ///< ordered by (n, rhs)
    std::vector<std::vector<double>> errors;     ///< errors[n][f] = ||u_n^f - u^f||_{L^2}
    std::vector<double> sup_errors;              ///< sup_f errors[n][f]
};

/// Cells (n, f) for every width and right-hand side. Throws ConfigError if a
/// case lacks a reference solution.
UniformSweepResult uniform_sweep(const SweepConfig& sweep, const ProblemFamily& family,
                                 const std::vector<RhsCase>& cases, std::uint64_t root_seed);

/// Which function of a Fourier case is scaled to the requested L^2 norm.
enum class FourierNorm { Solution, Forcing };

/// Fourier right-hand sides f = a (k^2 + m^2) pi^2 sin(k pi x) sin(m pi y)
/// with exact solutions u = a sin(k pi x) sin(m pi y), where a is chosen so
/// that ||u|| (or ||f||) in L^2((0,1)^2) equals norm.
std::vector<RhsCase> fourier_family(const std::vector<std::pair<int, int>>& modes, double norm,
                                    FourierNorm which = FourierNorm::Solution);

}  // namespace deepritz
