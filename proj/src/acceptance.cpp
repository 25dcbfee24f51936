#include "deepritz/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "deepritz/cpwl.hpp"
#include "deepritz/energy.hpp"
#include "deepritz/errors.hpp"
#include "deepritz/oracles.hpp"
#include "deepritz/reference.hpp"
#include "deepritz/rng.hpp"
#include "deepritz/solver.hpp"

namespace deepritz::acceptance {

namespace {

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

std::string join(const std::vector<double>& v, const char* format = "%.4g") {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(format, v[i]);
    return s + "]";
}

// v[i+1] <= (1 + slack) v[i] for all i.
bool nonincreasing(const std::vector<double>& v, double slack) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > (1.0 + slack) * v[i - 1]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Shared training setups

const Architecture kDiskNet{2, {16, 16, 16}, Activation::Tanh};

OptimConfig disk_optim(std::size_t steps) {
    OptimConfig o;
    o.step_size = 1e-3;
    o.max_steps = steps;
    o.batch_interior = 256;
    o.batch_boundary = 256;
    o.checkpoint_every = 500;
    return o;
}

PenalizedProblem disk_problem(double p, double lambda) {
    PenalizedProblem prob;
    prob.energy = EnergySpec::p_dirichlet(p);
    prob.rhs = ConstantRhs{1.0};
    prob.lambda = lambda;
    prob.domain = Domain::unit_disk();
    return prob;
}

// The p = 2 disk run is used by A1 and as the comparison profile in A2.
const TrainRecord& poisson_disk_run() {
    static std::optional<TrainRecord> cached;
    if (!cached) {
        cached = train(disk_problem(2.0, 250.0), kDiskNet, disk_optim(20000), 0,
                       ExactSolution::p_laplace_radial(2.0, 2));
    }
    return *cached;
}

// sup_r |mean_angle u(r, .) - C (1 - r)| over r in [0, 1].
double cone_distance(const Network& net, double c) {
    constexpr int radii = 201;
    constexpr int angles = 64;
    Eigen::MatrixXd pts(radii * angles, 2);
    for (int i = 0; i < radii; ++i) {
        const double r = static_cast<double>(i) / (radii - 1);
        for (int k = 0; k < angles; ++k) {
            const double a = 2.0 * std::numbers::pi * k / angles;
            pts.row(i * angles + k) << r * std::cos(a), r * std::sin(a);
        }
    }
    const Eigen::VectorXd u = net.evaluate(pts);
    double sup = 0.0;
    for (int i = 0; i < radii; ++i) {
        const double r = static_cast<double>(i) / (radii - 1);
        const double mean = u.segment(i * angles, angles).mean();
        sup = std::max(sup, std::abs(mean - c * (1.0 - r)));
    }
    return sup;
}

double value_at(const Network& net, double x, double y) {
    const double pt[2] = {x, y};
    return net(std::span<const double>(pt, 2));
}

// ---------------------------------------------------------------------------
// Criteria

CriterionResult a1(const Options&) {
    const TrainRecord& rec = poisson_disk_run();
    const double rel = rec.metrics.rel_err_l2.value();
    CriterionResult r;
    r.passed = rel <= 0.05 && rec.steps <= 20000;
    r.detail = "rel L2 " + fmt("%.4f", rel) + " <= 0.05 after " + std::to_string(rec.steps) + " Adam steps";
    return r;
}

CriterionResult a2(const Options&) {
    const double p = 10.0;
    const double c = p_laplace_constant(p, 2);
    // ReLU nets represent the cone-like tip far better than tanh here.
    const Architecture arch{2, {16, 16, 16}, Activation::ReLU};
    const TrainRecord rec =
        train(disk_problem(p, 250.0), arch, disk_optim(10000), 0, ExactSolution::p_laplace_radial(p, 2));
    const double u0 = value_at(rec.net, 0.0, 0.0);
    const double d10 = cone_distance(rec.net, c);
    const double d2 = cone_distance(poisson_disk_run().net, p_laplace_constant(2.0, 2));
    CriterionResult r;
    const bool centre = std::abs(u0 - c) <= 0.2 * c;
    r.passed = centre && d10 < d2;
    r.detail = "u(0) " + fmt("%.4f", u0) + " vs C " + fmt("%.4f", c) + "; cone distance p=10 " + fmt("%.4f", d10) +
               " < p=2 " + fmt("%.4f", d2);
    return r;
}

CriterionResult a3(const Options&) {
    const std::vector<double> lambdas{10.0, 50.0, 250.0, 1000.0};
    std::vector<double> boundary;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const TrainRecord rec = train(disk_problem(2.0, lambdas[i]), kDiskNet, disk_optim(5000), split_seed(3, i));
        boundary.push_back(rec.metrics.boundary_l2);
    }
    CriterionResult r;
    r.passed = nonincreasing(boundary, 0.1) && boundary.back() <= 0.05;
    r.detail = "boundary L2 over lambda {10,50,250,1000}: " + join(boundary);
    return r;
}

CriterionResult a4(const Options&) {
    AnsatzSchedule ansatz;
    ansatz.widths = {2, 4, 8, 16};
    ansatz.activation = Activation::ReLU;
    OptimConfig optim = disk_optim(3000);
    optim.batch_boundary = 128;
    optim.eval_interior = 20000;
    optim.eval_boundary = 4000;
    optim.checkpoint_every = 250;
    const SweepConfig sweep = SweepConfig::with_default_schedules(ansatz, optim, 10.0, 5);
    ProblemFamily family;
    const auto cells = gamma_sweep(sweep, family, ExactSolution::p_laplace_radial(2.0, 2), 4);
    std::vector<double> errors;
    bool certified = true;
    for (const auto& cell : cells) {
        errors.push_back(cell.record.metrics.err_l2.value());
        certified = certified && cell.certificate.certified;
    }
    CriterionResult r;
    r.passed = certified && nonincreasing(errors, 0.1) && errors.back() <= 0.5 * errors.front();
    r.detail = "L2 error over widths {2,4,8,16}: " + join(errors);
    return r;
}

CriterionResult a5(const Options&) {
    Rng rng(5);
    double worst = 0.0;
    constexpr int knots = 10;
    for (int inst = 0; inst < 100; ++inst) {
        // Breakpoints on a jittered grid over [-1, 1]; values in [-1, 1].
        std::vector<double> b(knots), v(knots);
        double x = -1.0;
        for (int k = 0; k < knots; ++k) {
            b[k] = x;
            x += 2.0 * rng.uniform(0.5, 1.5) / (knots - 1);
            v[k] = rng.uniform(-1.0, 1.0);
        }
        const Cpwl1D c(b, v);
        const Network net = cpwl_to_relu_1d(c);
        for (int i = 0; i < 1000; ++i) {
            const double t = rng.uniform(-1.5, b.back() + 0.5);
            worst = std::max(worst, std::abs(net(std::span<const double>(&t, 1)) - c(t)));
        }
    }
    // Max gadget on dyadic inputs: every intermediate value is exact.
    bool gadget = true;
    for (int k = 2; k <= 4; ++k) {
        const Network g = relu_max_gadget(k);
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> in(static_cast<std::size_t>(k));
            for (auto& e : in) e = std::ldexp(static_cast<double>(static_cast<int>(rng.next() % 2049) - 1024), -8);
            gadget = gadget && g(in) == *std::max_element(in.begin(), in.end());
        }
    }
    CriterionResult r;
    r.passed = worst <= 1e-12 && gadget;
    r.detail = "max |net - cpwl| " + fmt("%.2e", worst) + " <= 1e-12; max gadget exact for k=2..4: " +
               (gadget ? "yes" : "no");
    return r;
}

CriterionResult a6(const Options&) {
    // Hit-or-miss estimate of the disk area from the enclosing square.
    constexpr std::size_t n = 100000;
    int within = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const SampleBatch b = sample(Domain::square(0.0, 0.0, 2.0), n, 1, split_seed(6, s));
        Eigen::VectorXd chi(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < chi.size(); ++i) chi[i] = b.interior.row(i).squaredNorm() < 1.0 ? 1.0 : 0.0;
        const double est = mc_integral(chi, b.interior_measure);
        const double mean = chi.mean();
        const double sd = std::sqrt((chi.array() - mean).square().sum() / (static_cast<double>(n) - 1.0));
        const double bound = 3.0 * b.interior_measure * sd / std::sqrt(static_cast<double>(n));
        if (std::abs(est - std::numbers::pi) <= bound) ++within;
    }
    CriterionResult r;
    r.passed = within >= 47;
    r.detail = std::to_string(within) + "/50 seeds within 3 standard errors of pi (need 47)";
    return r;
}

// Library objective and gradient against central differences of the
// forward-mode value, and the value itself against a plain-loop evaluation.
CriterionResult a7(const Options&) {
    struct Case {
        EnergySpec energy;
        Domain domain;
        Rhs rhs;
        double lambda;
        double q;
    };
    const std::vector<Case> cases{
        {EnergySpec::p_dirichlet(2.0), Domain::unit_disk(), ConstantRhs{1.0}, 250.0, 2.0},
        {EnergySpec::p_dirichlet(1.5), Domain::unit_disk(), ConstantRhs{1.0}, 10.0, 1.5},
        {EnergySpec::p_dirichlet(10.0), Domain::unit_disk(), ConstantRhs{1.0}, 10.0, 2.0},
        {EnergySpec::phase_field(0.1), Domain::square(0.0, 0.0, 2.0), TwoBallsRhs{0.4}, 1.0, 2.0},
    };
    Rng rng(7);
    double worst_grad = 0.0;
    double worst_value = 0.0;
    int checked = 0;
    for (auto act : {Activation::ReLU, Activation::Tanh, Activation::GELU}) {
        for (int depth = 1; depth <= 3; ++depth) {
            for (const auto& cs : cases) {
                PenalizedProblem prob;
                prob.energy = cs.energy;
                prob.domain = cs.domain;
                prob.rhs = cs.rhs;
                prob.lambda = cs.lambda;
                prob.penalty_exponent = cs.q;
                const Architecture arch{2, std::vector<int>(static_cast<std::size_t>(depth), 6), act};
                Network net;
                SampleBatch batch;
                std::vector<double> theta;
                for (int attempt = 0;; ++attempt) {
                    if (attempt == 50) throw NumericError("A7", "no kink-free ReLU draw found");
                    net = init_network(arch, rng.next());
                    batch = sample(cs.domain, 24, 8, rng.next());
                    theta.assign(net.params().begin(), net.params().end());
                    if (act != Activation::ReLU) break;
                    Eigen::MatrixXd all(batch.interior.rows() + batch.boundary.rows(), 2);
                    all << batch.interior, batch.boundary;
                    if (oracle::activation_pattern_stable(arch, theta, all, 1e-6)) break;
                }
                const ObjectiveGradient og = objective_with_grad(prob, net, batch);
                const auto fd = oracle::param_gradient_fd(
                    [&](const std::vector<double>& th) { return objective(prob, Network(arch, th), batch); }, theta,
                    1e-6);
                worst_grad = std::max(worst_grad, oracle::relative_error(og.grad, fd));

                // Value: plain-loop force and penalty, FD energy for p = 2 only.
                if (cs.energy.kind() == EnergySpec::Kind::PDirichlet && cs.energy.p() == 2.0) {
                    double force = 0.0;
                    for (Eigen::Index i = 0; i < batch.interior.rows(); ++i) {
                        const std::vector<double> x{batch.interior(i, 0), batch.interior(i, 1)};
                        force += oracle::forward(arch, theta, x);
                    }
                    force *= batch.interior_measure / static_cast<double>(batch.interior.rows());
                    double pen = 0.0;
                    for (Eigen::Index i = 0; i < batch.boundary.rows(); ++i) {
                        const std::vector<double> x{batch.boundary(i, 0), batch.boundary(i, 1)};
                        pen += std::pow(std::abs(oracle::forward(arch, theta, x)), cs.q);
                    }
                    pen *= cs.lambda * batch.boundary_measure / static_cast<double>(batch.boundary.rows());
                    const double energy =
                        oracle::dirichlet_energy_fd(arch, theta, batch.interior, batch.interior_measure);
                    const double expected = energy - force + pen;
                    worst_value = std::max(worst_value, std::abs(og.parts.total() - expected) /
                                                            std::max(1.0, std::abs(expected)));
                }
                ++checked;
            }
        }
    }
    CriterionResult r;
    r.passed = worst_grad <= 1e-5 && worst_value <= 1e-6;
    r.detail = std::to_string(checked) + " cases; worst gradient rel error " + fmt("%.2e", worst_grad) +
               " <= 1e-5; worst value error " + fmt("%.2e", worst_value);
    return r;
}

CriterionResult a8(const Options&) {
    AnsatzSchedule ansatz;
    ansatz.widths = {4, 8, 16};
    ansatz.hidden_layers = 2;
    ansatz.activation = Activation::GELU;
    OptimConfig optim = disk_optim(10000);
    optim.step_size = 1e-2;
    optim.final_step_size = 1e-4;
    optim.eval_interior = 20000;
    optim.eval_boundary = 4000;
    optim.checkpoint_every = 250;
    // lambda_n = 5 n; at 10 n the (1,3) mode stalls near zero for width 16.
    const SweepConfig sweep = SweepConfig::with_default_schedules(ansatz, optim, 5.0, 1);
    ProblemFamily family;
    family.domain = Domain::unit_square();
    const auto cases = fourier_family({{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}}, 1.0, FourierNorm::Solution);
    const UniformSweepResult res = uniform_sweep(sweep, family, cases, 8);
    CriterionResult r;
    r.passed = nonincreasing(res.sup_errors, 0.1) && res.sup_errors.back() <= 0.1;
    r.detail = "sup_f L2 error over widths {4,8,16} (||u^f|| = 1): " + join(res.sup_errors);
    return r;
}

CriterionResult a9(const Options&) {
    auto run = [](double radius) {
        PenalizedProblem prob;
        prob.energy = EnergySpec::phase_field(0.01);
        prob.rhs = TwoBallsRhs{radius};
        prob.lambda = 0.0;
        prob.domain = Domain::square(0.0, 0.0, 2.0);
        OptimConfig o = disk_optim(4000);
        o.batch_interior = 512;
        o.batch_boundary = 1;
        o.eval_interior = 20000;
        o.eval_boundary = 1;
        return train(prob, kDiskNet, o, 9);
    };
    const TrainRecord big = run(0.4);
    const TrainRecord small = run(0.1);
    const SampleBatch eval = eval_batch_for(Domain::square(0.0, 0.0, 2.0), big.optim);
    const Eigen::VectorXd u = big.net.evaluate(eval.interior);
    const double inside =
        static_cast<double>((u.array() >= -0.1 && u.array() <= 1.1).count()) / static_cast<double>(u.size());
    const double drop = (big.initial.objective - big.metrics.objective) / std::abs(big.initial.objective);
    CriterionResult r;
    r.passed = inside >= 0.95 && drop >= 0.5 && small.metrics.energy <= big.metrics.energy;
    r.detail = fmt("%.1f%%", 100.0 * inside) + " of samples in [-0.1, 1.1]; objective drop " +
               fmt("%.1f%%", 100.0 * drop) + "; energy r=0.1 " + fmt("%.4f", small.metrics.energy) +
               " <= r=0.4 " + fmt("%.4f", big.metrics.energy);
    return r;
}

CriterionResult a10(const Options&) {
    const Architecture arch{2, {16, 16, 16}, Activation::ReLU};
    // Independent count: (2*16 + 16) + 2 * (16*16 + 16) + (16 + 1).
    const std::size_t by_hand = (2 * 16 + 16) + 2 * (16 * 16 + 16) + (16 + 1);
    const std::size_t counted = param_count(arch);
    const std::size_t allocated = init_network(arch, 0).param_count();
    CriterionResult r;
    r.passed = counted == 609 && allocated == 609 && by_hand == 609;
    r.detail = "parameter count " + std::to_string(counted) + " (allocated " + std::to_string(allocated) + ")";
    return r;
}

CriterionResult a11(const Options&) {
    const auto f = [](double x) { return std::sin(std::numbers::pi * x); };
    const auto df = [](double x) { return std::numbers::pi * std::cos(std::numbers::pi * x); };
    // Independent midpoint-rule value of the W^{1,2} error.
    auto midpoint = [&](const Cpwl1D& c) {
        constexpr int n = 200000;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = (i + 0.5) / n;
            s += (std::pow(c(x) - f(x), 2) + std::pow(c.derivative(x) - df(x), 2)) / n;
        }
        return std::sqrt(s);
    };
    std::vector<double> errors;
    double disagreement = 0.0;
    for (std::size_t cells : {8u, 16u, 32u, 64u, 128u}) {
        const Cpwl1D c = interpolate_1d(f, uniform_breakpoints(0.0, 1.0, cells));
        const double e = sobolev_error_1d(c, f, df, 2.0);
        disagreement = std::max(disagreement, std::abs(e - midpoint(c)) / e);
        errors.push_back(e);
    }
    std::vector<double> ratios;
    bool ok = disagreement <= 1e-4;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        ratios.push_back(errors[i - 1] / errors[i]);
        ok = ok && std::abs(ratios.back() - 2.0) <= 0.3;
    }
    CriterionResult r;
    r.passed = ok;
    r.detail = "W12 error ratios per halving " + join(ratios, "%.3f") + " within 2 +- 15%";
    return r;
}

// Weak-form Euler-Lagrange residual of the closed-form references. Runs
// with the (possibly corrupted) constant from the options.
CriterionResult weak_form(const Options& options) {
    Rng rng(12);
    const Box2D box{-0.6, 0.6, -0.6, 0.6};
    int total = 0;
    int within = 0;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 10.0}) {
        const auto u = ExactSolution::p_laplace_radial(p, 2, options.constant_scale);
        std::vector<SimplicialInterpolant2D> tests;
        for (int k = 0; k < 20; ++k) {
            SimplicialInterpolant2D v(box, 0.2);
            for (int j = 1; j < v.cells_y(); ++j) {
                for (int i = 1; i < v.cells_x(); ++i) v.vertex_value(i, j) = rng.uniform(-1.0, 1.0);
            }
            tests.push_back(std::move(v));
        }
        // Nonnegative bumps, so a wrong scale cannot average out.
        tests.push_back(SimplicialInterpolant2D::hat(Box2D{-0.5, 0.5, -0.5, 0.5}, 0.25, 2, 2));
        tests.push_back(SimplicialInterpolant2D::hat(Box2D{-0.5, 0.5, -0.5, 0.5}, 0.25, 1, 3));
        for (const auto& v : tests) {
            const ResidualEstimate res = weak_form_residual(u, v, 20000, rng.next());
            ++total;
            const double z = std::abs(res.value) / res.standard_error;
            worst = std::max(worst, z);
            if (z <= 3.0) ++within;
        }
    }
    CriterionResult r;
    r.passed = within == total;
    r.detail = std::to_string(within) + "/" + std::to_string(total) +
               " residuals within 3 standard errors (worst " + fmt("%.2f", worst) + " SE), constant scale " +
               fmt("%g", options.constant_scale);
    return r;
}

using Runner = CriterionResult (*)(const Options&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{
        {"W", weak_form}, {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},   {"A5", a5},
        {"A6", a6},       {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11},
    };
    return m;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> list{
        {"W", "weak-form residual of the reference solutions", false},
        {"A5", "CPWL to ReLU conversion is exact", false},
        {"A6", "Monte Carlo quadrature error bound", false},
        {"A7", "autodiff gradients match finite differences", false},
        {"A10", "parameter count of the 16x16x16 network", false},
        {"A11", "interpolation rate in W^{1,2}", false},
        {"A1", "Poisson on the disk", true},
        {"A2", "p-Laplace p=10 on the disk", true},
        {"A3", "penalty limit enforces zero trace", true},
        {"A4", "Gamma sweep over widths", true},
        {"A8", "uniform convergence over Fourier right-hand sides", true},
        {"A9", "phase field with two balls", true},
    };
    return list;
}

CriterionResult run_criterion(const std::string& id, const Options& options) {
    const auto it = runners().find(id);
    const auto info = std::find_if(criteria().begin(), criteria().end(), [&](const auto& c) { return c.id == id; });
    if (it == runners().end() || info == criteria().end()) throw ConfigError("unknown criterion '" + id + "'");
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = it->second(options);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = info->id;
    r.title = info->title;
    r.training = info->training;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> run_all(const Options& options) {
    for (const auto& id : options.only) {
        if (!runners().contains(id)) throw ConfigError("unknown criterion '" + id + "'");
    }
    std::vector<CriterionResult> results;
    for (const auto& c : criteria()) {
        if (options.fast && c.training) continue;
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) {
            continue;
        }
        results.push_back(run_criterion(c.id, options));
        if (options.on_result) options.on_result(results.back());
    }
    return results;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS " : "FAIL ") << r.id;
    for (std::size_t i = r.id.size(); i < 4; ++i) os << ' ';
    os << ' ' << r.title << " (" << fmt("%.1f", r.seconds) << " s): " << r.detail;
    return os.str();
}

}  // namespace deepritz::acceptance
