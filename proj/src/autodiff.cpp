#include "deepritz/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deepritz/errors.hpp"

namespace deepritz {

namespace {

// Column block k of a (rows x (d+1)N) matrix: block 0 holds values,
// blocks 1..d the tangents along each input coordinate.
auto block(Eigen::MatrixXd& m, Eigen::Index k, Eigen::Index n) { return m.middleCols(k * n, n); }
auto block(const Eigen::MatrixXd& m, Eigen::Index k, Eigen::Index n) { return m.middleCols(k * n, n); }

struct LayerCache {
    Eigen::MatrixXd input;  // [A | T] fed into this affine map
    Eigen::MatrixXd z;      // [Z | dZ] pre-activation values and tangents
    Eigen::MatrixXd d1;     // sigma'(Z), hidden layers only
    Eigen::MatrixXd d2;     // sigma''(Z), hidden layers only
};

struct Tape {
    Eigen::Index n = 0;
    Eigen::Index dim = 0;
    std::vector<LayerCache> layers;
};

void check_params(const Network& net) {
    for (double v : net.params()) {
        if (!std::isfinite(v)) throw NumericError("parameters", "non-finite network parameter");
    }
}

Tape record(const Network& net, const Eigen::MatrixXd& points) {
    if (points.cols() != net.input_dim()) {
        throw ConfigError("point dimension " + std::to_string(points.cols()) +
                          " does not match network input dimension " +
                          std::to_string(net.input_dim()));
    }
    check_params(net);

    Tape tape;
    tape.n = points.rows();
    tape.dim = points.cols();
    const Eigen::Index n = tape.n;
    const Eigen::Index d = tape.dim;
    const int depth = net.arch().depth();
    const Activation act = net.arch().activation;
    tape.layers.resize(static_cast<std::size_t>(depth));

    Eigen::MatrixXd input = Eigen::MatrixXd::Zero(d, (d + 1) * n);
    block(input, 0, n) = points.transpose();
    for (Eigen::Index k = 0; k < d; ++k) block(input, k + 1, n).row(k).setOnes();

    for (int l = 0; l < depth; ++l) {
        auto& cache = tape.layers[static_cast<std::size_t>(l)];
        cache.input = std::move(input);
        cache.z = net.weights(l) * cache.input;
        block(cache.z, 0, n).colwise() += net.bias(l);
        if (l + 1 == depth) break;

        const Eigen::Index width = cache.z.rows();
        cache.d1.resize(width, n);
        cache.d2.resize(width, n);
        input.resize(width, (d + 1) * n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < width; ++i) {
                const auto e = activate(act, cache.z(i, j));
                input(i, j) = e.value;
                cache.d1(i, j) = e.d1;
                cache.d2(i, j) = e.d2;
            }
        }
        for (Eigen::Index k = 1; k <= d; ++k) {
            block(input, k, n) = (block(cache.z, k, n).array() * cache.d1.array()).matrix();
        }
    }
    return tape;
}

DualBatch read_output(const Tape& tape) {
    const auto& out = tape.layers.back().z;
    DualBatch batch;
    batch.values = block(out, 0, tape.n).row(0).transpose();
    batch.input_grads.resize(tape.n, tape.dim);
    for (Eigen::Index k = 0; k < tape.dim; ++k) {
        batch.input_grads.col(k) = block(out, k + 1, tape.n).row(0).transpose();
    }
    if (!batch.values.allFinite() || !batch.input_grads.allFinite()) {
        throw NumericError("forward", "non-finite network output");
    }
    return batch;
}

}  // namespace

DualBatch forward_with_input_grad(const Network& net, const Eigen::MatrixXd& points) {
    constexpr Eigen::Index chunk = 4096;
    if (points.rows() <= chunk) return read_output(record(net, points));
    // Large batches are processed in chunks to bound the tape's memory.
    DualBatch out;
    out.values.resize(points.rows());
    out.input_grads.resize(points.rows(), points.cols());
    for (Eigen::Index begin = 0; begin < points.rows(); begin += chunk) {
        const Eigen::Index len = std::min(chunk, points.rows() - begin);
        const DualBatch part = read_output(record(net, points.middleRows(begin, len)));
        out.values.segment(begin, len) = part.values;
        out.input_grads.middleRows(begin, len) = part.input_grads;
    }
    return out;
}

ParamGradient objective_param_grad(const Network& net, const Eigen::MatrixXd& points,
                                   const Objective& objective) {
    Tape tape = record(net, points);
    const DualBatch batch = read_output(tape);
    const Eigen::Index n = tape.n;
    const Eigen::Index d = tape.dim;

    TermAdjoint adj = objective(batch);
    if (!std::isfinite(adj.value)) throw NumericError("objective", "non-finite objective value");
    if (adj.d_values.size() != n) {
        throw ConfigError("objective returned " + std::to_string(adj.d_values.size()) +
                          " value adjoints for " + std::to_string(n) + " points");
    }
    const bool has_grad_adjoint = adj.d_input_grads.size() != 0;
    if (has_grad_adjoint && (adj.d_input_grads.rows() != n || adj.d_input_grads.cols() != d)) {
        throw ConfigError("objective returned input-gradient adjoints of the wrong shape");
    }
    if (!adj.d_values.allFinite() || (has_grad_adjoint && !adj.d_input_grads.allFinite())) {
        throw NumericError("objective adjoint", "non-finite objective derivative");
    }

    ParamGradient result;
    result.value = adj.value;
    result.grad.assign(net.param_count(), 0.0);

    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(1, (d + 1) * n);
    block(upstream, 0, n).row(0) = adj.d_values.transpose();
    if (has_grad_adjoint) {
        for (Eigen::Index k = 0; k < d; ++k) block(upstream, k + 1, n).row(0) = adj.d_input_grads.col(k).transpose();
    }

    for (int l = net.arch().depth() - 1; l >= 0; --l) {
        const auto& cache = tape.layers[static_cast<std::size_t>(l)];
        const auto w = net.weights(l);

        const Eigen::MatrixXd grad_w = upstream * cache.input.transpose();
        const Eigen::VectorXd grad_b = block(upstream, 0, n).rowwise().sum();
        const std::size_t offset = net.weight_offset(l);
        // Row-major flat layout for the weight block.
        for (Eigen::Index r = 0; r < grad_w.rows(); ++r) {
            for (Eigen::Index c = 0; c < grad_w.cols(); ++c) {
                result.grad[offset + static_cast<std::size_t>(r * grad_w.cols() + c)] = grad_w(r, c);
            }
        }
        const std::size_t bias_offset = offset + static_cast<std::size_t>(grad_w.size());
        for (Eigen::Index r = 0; r < grad_b.size(); ++r) result.grad[bias_offset + static_cast<std::size_t>(r)] = grad_b[r];
        if (l == 0) break;

        // Adjoint of [A | T] of the previous hidden layer, then through the
        // activation: A = s(Z), T_k = s'(Z) dZ_k.
        const Eigen::MatrixXd down = w.transpose() * upstream;
        const auto& prev = tape.layers[static_cast<std::size_t>(l - 1)];
        Eigen::MatrixXd next(down.rows(), down.cols());
        Eigen::ArrayXXd z_bar = block(down, 0, n).array() * prev.d1.array();
        for (Eigen::Index k = 1; k <= d; ++k) {
            const auto t_bar = block(down, k, n).array();
            z_bar += t_bar * prev.d2.array() * block(prev.z, k, n).array();
            block(next, k, n) = (t_bar * prev.d1.array()).matrix();
        }
        block(next, 0, n) = z_bar.matrix();
        upstream = std::move(next);
        if (!upstream.allFinite()) {
            throw NumericError("backward layer " + std::to_string(l), "non-finite adjoint");
        }
    }
    return result;
}

}  // namespace deepritz
