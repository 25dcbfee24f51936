#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "deepritz/network.hpp"

namespace deepritz {

/// Network values and input-space gradients at a batch of points.
struct DualBatch {
    Eigen::VectorXd values;       ///< u(x_i), length N
    Eigen::MatrixXd input_grads;  ///< grad_x u(x_i), N x d
};

/// A scalar objective J(values, input_grads) together with its partial
/// derivatives. Returned by the closures passed to objective_param_grad.
struct TermAdjoint {
    double value = 0.0;
    Eigen::VectorXd d_values;       ///< dJ/du_i, length N
    Eigen::MatrixXd d_input_grads;  ///< dJ/d(grad u)_i, N x d; may be left empty
};

using Objective = std::function<TermAdjoint(const DualBatch&)>;

struct ParamGradient {
    double value = 0.0;        ///< objective value
    std::vector<double> grad;  ///< dJ/dtheta, length P
};

/// Forward pass carrying d tangent directions alongside the values.
/// Throws ConfigError on dimension mismatch and NumericError on non-finite
/// parameters.
DualBatch forward_with_input_grad(const Network& net, const Eigen::MatrixXd& points);

/// dJ/dtheta by reverse accumulation through the joint value/tangent
/// computation, so objectives depending on grad_x u are differentiated
/// including their mixed second-order terms.
ParamGradient objective_param_grad(const Network& net, const Eigen::MatrixXd& points,
                                   const Objective& objective);

}  // namespace deepritz
