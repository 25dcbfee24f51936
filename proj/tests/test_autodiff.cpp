#include <doctest.h>

#include <cmath>
#include <limits>

#include "deepritz/autodiff.hpp"
#include "deepritz/errors.hpp"
#include "deepritz/oracles.hpp"
#include "deepritz/rng.hpp"

using namespace deepritz;

namespace {

Eigen::MatrixXd random_points(Rng& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd pts(n, d);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = rng.uniform(-1.0, 1.0);
    return pts;
}

// mean of (1/p)|grad u|^p + a u + b u^2 together with its adjoints.
Objective mixed_objective(double p, double a, double b) {
    return [=](const DualBatch& batch) {
        const Eigen::Index n = batch.values.size();
        TermAdjoint out;
        out.d_values.resize(n);
        out.d_input_grads.resize(n, batch.input_grads.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = batch.values[i];
            const double g2 = batch.input_grads.row(i).squaredNorm();
            const double gp = std::pow(g2, 0.5 * p);
            out.value += (gp / p + a * u + b * u * u) / static_cast<double>(n);
            out.d_values[i] = (a + 2.0 * b * u) / static_cast<double>(n);
            const double scale = g2 > 0.0 ? std::pow(g2, 0.5 * p - 1.0) : 0.0;
            out.d_input_grads.row(i) = scale * batch.input_grads.row(i) / static_cast<double>(n);
        }
        return out;
    };
}

double objective_value(const Architecture& arch, const std::vector<double>& params, const Eigen::MatrixXd& pts,
                       const Objective& j) {
    return j(forward_with_input_grad(Network(arch, params), pts)).value;
}

}  // namespace

TEST_CASE("affine and single-neuron examples") {
    const Network affine(Architecture{1, {}, Activation::Tanh}, {2.0, 1.0});
    Eigen::MatrixXd x(1, 1);
    x << 3.0;
    const DualBatch b = forward_with_input_grad(affine, x);
    CHECK(b.values[0] == 7.0);
    CHECK(b.input_grads(0, 0) == 2.0);

    // u(x) = 1 * ReLU(1 * x + 0) + 0
    const Network relu(Architecture{1, {1}, Activation::ReLU}, {1.0, 0.0, 1.0, 0.0});
    Eigen::MatrixXd pts(2, 1);
    pts << -1.0, 2.0;
    const DualBatch r = forward_with_input_grad(relu, pts);
    CHECK(r.values[0] == 0.0);
    CHECK(r.values[1] == 2.0);
    CHECK(r.input_grads(0, 0) == 0.0);
    CHECK(r.input_grads(1, 0) == 1.0);

    Eigen::MatrixXd zero(1, 1);
    zero << 0.0;
    CHECK(forward_with_input_grad(relu, zero).input_grads(0, 0) == 0.0);
}

TEST_CASE("parameter gradients of affine objectives") {
    const double w = 1.5, bias = -0.25;
    const Network net(Architecture{1, {}, Activation::Tanh}, {w, bias});
    Eigen::MatrixXd x(1, 1);
    x << 3.0;

    const ParamGradient value_grad = objective_param_grad(net, x, [](const DualBatch& b) {
        TermAdjoint t;
        t.value = b.values[0];
        t.d_values = Eigen::VectorXd::Ones(1);
        return t;
    });
    CHECK(value_grad.grad == std::vector<double>{3.0, 1.0});

    const ParamGradient energy_grad = objective_param_grad(net, x, [](const DualBatch& b) {
        TermAdjoint t;
        t.value = 0.5 * b.input_grads.squaredNorm();
        t.d_values = Eigen::VectorXd::Zero(1);
        t.d_input_grads = b.input_grads;
        return t;
    });
    CHECK(energy_grad.value == doctest::Approx(0.5 * w * w));
    CHECK(energy_grad.grad == std::vector<double>{w, 0.0});
}

TEST_CASE("input gradients match central differences") {
    Rng rng(17);
    for (auto act : {Activation::Tanh, Activation::GELU, Activation::ReLU}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Architecture arch{2, {9, 6}, act};
            Network net = init_network(arch, static_cast<std::uint64_t>(trial));
            for (auto& v : net.mutable_params()) v += 0.3 * rng.normal();
            const Eigen::MatrixXd pt = random_points(rng, 1, 2);
            const std::vector<double> x{pt(0, 0), pt(0, 1)};
            const auto params = std::vector<double>(net.params().begin(), net.params().end());
            if (act == Activation::ReLU) {
                // Skip points within h of a kink.
                std::vector<int> p0, p1, p2, p3, p4;
                oracle::forward(arch, params, {x[0] + 1e-5, x[1]}, &p1);
                oracle::forward(arch, params, {x[0] - 1e-5, x[1]}, &p2);
                oracle::forward(arch, params, {x[0], x[1] + 1e-5}, &p3);
                oracle::forward(arch, params, {x[0], x[1] - 1e-5}, &p4);
                oracle::forward(arch, params, x, &p0);
                if (p0 != p1 || p0 != p2 || p0 != p3 || p0 != p4) continue;
            }
            const auto fd = oracle::central_gradient(
                [&](const std::vector<double>& y) { return oracle::forward(arch, params, y); }, x, 1e-5);
            const DualBatch b = forward_with_input_grad(net, pt);
            CHECK(b.values[0] == doctest::Approx(oracle::forward(arch, params, x)).epsilon(1e-13));
            CHECK(oracle::relative_error({b.input_grads(0, 0), b.input_grads(0, 1)}, fd) <= 1e-6);
        }
    }
}

TEST_CASE("GELU energy gradient matches central differences over theta") {
    Rng rng(3);
    const Architecture arch{2, {8, 8, 8}, Activation::GELU};
    const Network net = init_network(arch, 4);
    const Eigen::MatrixXd pts = random_points(rng, 64, 2);
    const Objective energy = mixed_objective(2.0, 0.0, 0.0);
    const ParamGradient ad = objective_param_grad(net, pts, energy);
    const auto fd = oracle::param_gradient_fd(
        [&](const std::vector<double>& th) { return objective_value(arch, th, pts, energy); },
        std::vector<double>(net.params().begin(), net.params().end()), 1e-6);
    CHECK(ad.grad.size() == net.param_count());
    CHECK(oracle::relative_error(ad.grad, fd) <= 1e-5);
}

TEST_CASE("finite-difference consistency across activations and depths") {
    Rng rng(99);
    for (auto act : {Activation::ReLU, Activation::Tanh, Activation::GELU}) {
        for (int hidden = 0; hidden <= 3; ++hidden) {
            int draws = 0;
            int attempts = 0;
            while (draws < 3 && attempts < 50) {
                ++attempts;
                const int d = 1 + static_cast<int>(rng.next() % 3);
                std::vector<int> widths;
                for (int l = 0; l < hidden; ++l) widths.push_back(1 + static_cast<int>(rng.next() % 16));
                const Architecture arch{d, widths, act};
                Network net = init_network(arch, rng.next());
                for (auto& v : net.mutable_params()) v += 0.1 * rng.normal();
                const Eigen::MatrixXd pts = random_points(rng, 8, d);
                const std::vector<double> theta(net.params().begin(), net.params().end());
                if (act == Activation::ReLU && !oracle::activation_pattern_stable(arch, theta, pts, 1e-6)) continue;
                const Objective j = mixed_objective(hidden % 2 == 0 ? 2.0 : 3.0, 0.7, 0.3);
                const ParamGradient ad = objective_param_grad(net, pts, j);
                const auto fd = oracle::param_gradient_fd(
                    [&](const std::vector<double>& th) { return objective_value(arch, th, pts, j); }, theta, 1e-6);
                CAPTURE(hidden);
                CAPTURE(to_string(act));
                CHECK(oracle::relative_error(ad.grad, fd) <= 1e-5);
                ++draws;
            }
            CHECK(draws == 3);
        }
    }
}

TEST_CASE("gradient is linear in the objective") {
    Rng rng(8);
    const Network net = init_network(Architecture{2, {6, 6}, Activation::Tanh}, 2);
    const Eigen::MatrixXd pts = random_points(rng, 16, 2);
    const Objective j1 = mixed_objective(2.0, 1.0, 0.0);
    const Objective j2 = mixed_objective(3.0, 0.0, 1.0);
    const double a = 2.5, b = -0.75;
    const Objective combo = [&](const DualBatch& batch) {
        TermAdjoint t1 = j1(batch), t2 = j2(batch);
        TermAdjoint out;
        out.value = a * t1.value + b * t2.value;
        out.d_values = a * t1.d_values + b * t2.d_values;
        out.d_input_grads = a * t1.d_input_grads + b * t2.d_input_grads;
        return out;
    };
    const auto g1 = objective_param_grad(net, pts, j1).grad;
    const auto g2 = objective_param_grad(net, pts, j2).grad;
    const auto gc = objective_param_grad(net, pts, combo).grad;
    for (std::size_t i = 0; i < gc.size(); ++i) CHECK(std::abs(gc[i] - (a * g1[i] + b * g2[i])) <= 1e-12);
}

TEST_CASE("zero ReLU network") {
    Rng rng(1);
    const Network net(Architecture{2, {5, 5}, Activation::ReLU});
    const Eigen::MatrixXd pts = random_points(rng, 32, 2);
    const DualBatch b = forward_with_input_grad(net, pts);
    CHECK(b.values.isZero(0.0));
    CHECK(b.input_grads.isZero(0.0));
    const auto g = objective_param_grad(net, pts, mixed_objective(2.0, 0.0, 0.0)).grad;
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("errors") {
    const Network net = init_network(Architecture{2, {4}, Activation::Tanh}, 0);
    CHECK_THROWS_AS(forward_with_input_grad(net, Eigen::MatrixXd::Zero(3, 3)), ConfigError);

    Network bad = net;
    bad.mutable_params()[2] = std::numeric_limits<double>::quiet_NaN();
    try {
        forward_with_input_grad(bad, Eigen::MatrixXd::Zero(3, 2));
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.stage() == "parameters");
    }

    try {
        objective_param_grad(net, Eigen::MatrixXd::Zero(3, 2), [](const DualBatch& b) {
            TermAdjoint t;
            t.value = 0.0;
            t.d_values = Eigen::VectorXd::Constant(b.values.size(), std::numeric_limits<double>::infinity());
            return t;
        });
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.stage() == "objective adjoint");
    }
}

TEST_CASE("chunked evaluation agrees with single-batch evaluation") {
    Rng rng(4);
    const Network net = init_network(Architecture{2, {8, 8}, Activation::Tanh}, 5);
    const Eigen::MatrixXd pts = random_points(rng, 10000, 2);
    const DualBatch all = forward_with_input_grad(net, pts);
    const DualBatch tail = forward_with_input_grad(net, pts.bottomRows(100));
    CHECK((all.values.tail(100) - tail.values).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((all.input_grads.bottomRows(100) - tail.input_grads).cwiseAbs().maxCoeff() <= 1e-15);
}
