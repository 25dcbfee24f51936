#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace deepritz {

enum class Activation { ReLU, Tanh, GELU };

std::string_view to_string(Activation a);
/// Accepts "relu", "tanh", "gelu" (case-insensitive). Throws ConfigError.
Activation parse_activation(std::string_view name);

/// Scalar activation with its first and second derivatives.
/// The ReLU derivative at 0 is taken to be 0. GELU is x * Phi(x) with the
/// exact (erf-based) normal CDF.
struct ActivationEval {
    double value;
    double d1;
    double d2;
};
ActivationEval activate(Activation a, double x) noexcept;

/// Fully connected scalar-output architecture: input_dim -> hidden... -> 1.
struct Architecture {
    int input_dim = 1;
    std::vector<int> hidden_widths;
    Activation activation = Activation::Tanh;

    /// Number of affine maps (hidden layers + output layer).
    int depth() const noexcept { return static_cast<int>(hidden_widths.size()) + 1; }
    /// Layer sizes N_0, ..., N_L with N_0 = input_dim and N_L = 1.
    std::vector<int> layer_sizes() const;
    std::size_t param_count() const;
    /// Throws ConfigError for non-positive dimensions.
    void validate() const;

    bool operator==(const Architecture&) const = default;
};

std::size_t param_count(const Architecture& arch);

/// Number of hidden layers of the zero-boundary ReLU ansatz family,
/// ceil(log2(d + 1)); the family's depth is this plus one.
int relu_family_hidden_layers(int input_dim);

/// Network function u_theta. Parameters are stored flat, layer by layer:
/// the weight matrix of layer l (N_l x N_{l-1}, row-major), then its bias.
class Network {
public:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using ConstWeights = Eigen::Map<const RowMatrix>;
    using ConstBias = Eigen::Map<const Eigen::VectorXd>;

    Network() = default;
    /// Throws ValidationError if `params.size()` does not match the architecture.
    Network(Architecture arch, std::vector<double> params);
    /// All-zero parameters.
    explicit Network(Architecture arch);

    const Architecture& arch() const noexcept { return arch_; }
    std::span<const double> params() const noexcept { return params_; }
    std::vector<double>& mutable_params() noexcept { return params_; }
    std::size_t param_count() const noexcept { return params_.size(); }
    int input_dim() const noexcept { return arch_.input_dim; }

    /// Weight matrix and bias of affine map `layer` (0-based).
    ConstWeights weights(int layer) const;
    ConstBias bias(int layer) const;
    /// Offset of the weight block of `layer` within params().
    std::size_t weight_offset(int layer) const { return offsets_.at(layer); }

    /// u_theta at a single point.
    double operator()(std::span<const double> x) const;
    /// u_theta at each row of `points` (N x d).
    Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;

    bool operator==(const Network& other) const {
        return arch_ == other.arch_ && params_ == other.params_;
    }

private:
    void compute_offsets();

    Architecture arch_;
    std::vector<double> params_;
    std::vector<std::size_t> offsets_;
};

/// Glorot-uniform weights on +-sqrt(6 / (N_{l-1} + N_l)), zero biases.
Network init_network(const Architecture& arch, std::uint64_t seed);

/// Network computing alpha * a + beta * b by stacking the hidden layers
/// block-diagonally. Both nets need equal input dim, depth and activation.
Network combine(const Network& a, const Network& b, double alpha, double beta);

/// Network computing t * u (scales the output layer).
Network scale(const Network& u, double t);

/// JSON document {input_dim, hidden_widths, activation, params}.
std::string serialize(const Network& net);
/// Throws ParseError (with line/column) on malformed JSON and
/// ValidationError on inconsistent contents.
Network deserialize(std::string_view text);

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace deepritz
