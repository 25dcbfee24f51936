#pragma once

// Independent reference computations for tests and acceptance checks. Nothing here calls into the autodiff
// module: network values are recomputed by a plain loop over the flat
// parameter vector and derivatives by central differences.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "deepritz/network.hpp"

namespace deepritz::oracle {

inline double act(deepritz::Activation a, double x) {
    switch (a) {
        case deepritz::Activation::ReLU: return x > 0.0 ? x : 0.0;
        case deepritz::Activation::Tanh: return std::tanh(x);
        case deepritz::Activation::GELU: return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
    }
    return 0.0;
}

/// u_theta(x) from the flat layout (row-major weights, then bias, per layer).
/// When `pattern` is given, appends the sign of every hidden pre-activation.
inline double forward(const deepritz::Architecture& arch, const std::vector<double>& params,
                      const std::vector<double>& x, std::vector<int>* pattern = nullptr) {
    const auto sizes = arch.layer_sizes();
    std::vector<double> a = x;
    std::size_t offset = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        const int in = sizes[l - 1];
        const int out = sizes[l];
        std::vector<double> z(static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i) {
            double s = params[offset + static_cast<std::size_t>(in * out + i)];
            for (int j = 0; j < in; ++j) s += params[offset + static_cast<std::size_t>(i * in + j)] * a[static_cast<std::size_t>(j)];
            z[static_cast<std::size_t>(i)] = s;
        }
        offset += static_cast<std::size_t>(in * out + out);
        if (l + 1 < sizes.size()) {
            for (auto& v : z) {
                if (pattern) pattern->push_back(v > 0.0 ? 1 : 0);
                v = act(arch.activation, v);
            }
        }
        a = std::move(z);
    }
    return a[0];
}

inline double forward(const deepritz::Network& net, const std::vector<double>& x) {
    return forward(net.arch(), std::vector<double>(net.params().begin(), net.params().end()), x);
}

/// Central-difference gradient of `f` at `x`.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Central-difference gradient over the flat parameter vector.
inline std::vector<double> param_gradient_fd(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> params, double h) {
    return central_gradient(f, std::move(params), h);
}

/// True when no hidden pre-activation at any of `points` changes sign under
/// a +-h perturbation of any single parameter, so a central difference over
/// theta never straddles a ReLU kink.
inline bool activation_pattern_stable(const deepritz::Architecture& arch, std::vector<double> params,
                                      const Eigen::MatrixXd& points, double h) {
    auto patterns = [&](const std::vector<double>& theta) {
        std::vector<int> all;
        std::vector<double> x(static_cast<std::size_t>(points.cols()));
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            for (Eigen::Index k = 0; k < points.cols(); ++k) x[static_cast<std::size_t>(k)] = points(i, k);
            forward(arch, theta, x, &all);
        }
        return all;
    };
    const auto base = patterns(params);
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double v = params[j];
        for (double s : {h, -h}) {
            params[j] = v + s;
            if (patterns(params) != base) return false;
        }
        params[j] = v;
    }
    return true;
}

/// max_i |a_i - b_i| / max(max_i |b_i|, floor).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12) {
    double diff = 0.0;
    double scale = floor;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return diff / scale;
}

/// Monte Carlo p-Dirichlet energy (p = 2) minus nothing, evaluated by finite
/// differences in x on the plain forward pass: |Omega| mean(0.5 |grad u|^2).
inline double dirichlet_energy_fd(const deepritz::Architecture& arch, const std::vector<double>& params,
                                  const Eigen::MatrixXd& points, double measure, double hx = 1e-5) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        std::vector<double> x(static_cast<std::size_t>(points.cols()));
        for (Eigen::Index k = 0; k < points.cols(); ++k) x[static_cast<std::size_t>(k)] = points(i, k);
        const auto g = central_gradient([&](const std::vector<double>& y) { return forward(arch, params, y); }, x, hx);
        double n2 = 0.0;
        for (double v : g) n2 += v * v;
        sum += 0.5 * n2;
    }
    return measure * sum / static_cast<double>(points.rows());
}

}  // namespace deepritz::oracle
