#include "deepritz/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "deepritz/errors.hpp"
#include "deepritz/rng.hpp"

namespace deepritz {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::GELU: return "gelu";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "relu") return Activation::ReLU;
    if (lower == "tanh") return Activation::Tanh;
    if (lower == "gelu") return Activation::GELU;
    throw ConfigError("unknown activation '" + std::string(name) + "' (expected relu, tanh or gelu)");
}

ActivationEval activate(Activation a, double x) noexcept {
    switch (a) {
        case Activation::ReLU:
            return x > 0.0 ? ActivationEval{x, 1.0, 0.0} : ActivationEval{0.0, 0.0, 0.0};
        case Activation::Tanh: {
            const double t = std::tanh(x);
            const double s = 1.0 - t * t;
            return {t, s, -2.0 * t * s};
        }
        case Activation::GELU: {
            const double cdf = 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
            const double pdf = std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
            return {x * cdf, cdf + x * pdf, pdf * (2.0 - x * x)};
        }
    }
    return {0.0, 0.0, 0.0};
}

std::vector<int> Architecture::layer_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(hidden_widths.size() + 2);
    sizes.push_back(input_dim);
    sizes.insert(sizes.end(), hidden_widths.begin(), hidden_widths.end());
    sizes.push_back(1);
    return sizes;
}

std::size_t Architecture::param_count() const {
    const auto sizes = layer_sizes();
    std::size_t count = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        count += static_cast<std::size_t>(sizes[l - 1]) * sizes[l] + sizes[l];
    }
    return count;
}

void Architecture::validate() const {
    if (input_dim < 1) throw ConfigError("architecture input_dim must be positive");
    for (int w : hidden_widths) {
        if (w < 1) throw ConfigError("architecture hidden widths must be positive");
    }
}

std::size_t param_count(const Architecture& arch) { return arch.param_count(); }

int relu_family_hidden_layers(int input_dim) {
    int layers = 0;
    while ((1 << layers) < input_dim + 1) ++layers;
    return layers;
}

Network::Network(Architecture arch, std::vector<double> params)
    : arch_(std::move(arch)), params_(std::move(params)) {
    arch_.validate();
    if (params_.size() != arch_.param_count()) {
        throw ValidationError("parameter vector has length " + std::to_string(params_.size()) +
                              " but the architecture needs " + std::to_string(arch_.param_count()));
    }
    compute_offsets();
}

Network::Network(Architecture arch) : arch_(std::move(arch)) {
    arch_.validate();
    params_.assign(arch_.param_count(), 0.0);
    compute_offsets();
}

void Network::compute_offsets() {
    const auto sizes = arch_.layer_sizes();
    offsets_.clear();
    std::size_t offset = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        offsets_.push_back(offset);
        offset += static_cast<std::size_t>(sizes[l - 1]) * sizes[l] + sizes[l];
    }
}

Network::ConstWeights Network::weights(int layer) const {
    const auto sizes = arch_.layer_sizes();
    return ConstWeights(params_.data() + offsets_.at(layer), sizes[layer + 1], sizes[layer]);
}

Network::ConstBias Network::bias(int layer) const {
    const auto sizes = arch_.layer_sizes();
    const std::size_t offset =
        offsets_.at(layer) + static_cast<std::size_t>(sizes[layer + 1]) * sizes[layer];
    return ConstBias(params_.data() + offset, sizes[layer + 1]);
}

double Network::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != arch_.input_dim) {
        throw ConfigError("point dimension " + std::to_string(x.size()) +
                          " does not match network input dimension " +
                          std::to_string(arch_.input_dim));
    }
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    const int depth = arch_.depth();
    for (int l = 0; l < depth; ++l) {
        Eigen::VectorXd z = weights(l) * a + bias(l);
        if (l + 1 < depth) {
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = activate(arch_.activation, z[i]).value;
        }
        a = std::move(z);
    }
    return a[0];
}

Eigen::VectorXd Network::evaluate(const Eigen::MatrixXd& points) const {
    if (points.cols() != arch_.input_dim) {
        throw ConfigError("point dimension " + std::to_string(points.cols()) +
                          " does not match network input dimension " +
                          std::to_string(arch_.input_dim));
    }
    Eigen::MatrixXd a = points.transpose();
    const int depth = arch_.depth();
    for (int l = 0; l < depth; ++l) {
        Eigen::MatrixXd z = weights(l) * a;
        z.colwise() += bias(l);
        if (l + 1 < depth) {
            z = z.unaryExpr([act = arch_.activation](double v) { return activate(act, v).value; });
        }
        a = std::move(z);
    }
    return a.row(0).transpose();
}

Network init_network(const Architecture& arch, std::uint64_t seed) {
    Network net(arch);
    Rng rng(seed);
    const auto sizes = arch.layer_sizes();
    auto& p = net.mutable_params();
    std::size_t offset = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        const double bound = std::sqrt(6.0 / (sizes[l - 1] + sizes[l]));
        const std::size_t n_weights = static_cast<std::size_t>(sizes[l - 1]) * sizes[l];
        for (std::size_t i = 0; i < n_weights; ++i) p[offset + i] = rng.uniform(-bound, bound);
        offset += n_weights + sizes[l];
    }
    return net;
}

Network combine(const Network& a, const Network& b, double alpha, double beta) {
    const auto& aa = a.arch();
    const auto& ab = b.arch();
    if (aa.input_dim != ab.input_dim || aa.depth() != ab.depth() || aa.activation != ab.activation) {
        throw ConfigError("combine: networks must share input dimension, depth and activation");
    }
    Architecture arch{aa.input_dim, {}, aa.activation};
    for (std::size_t i = 0; i < aa.hidden_widths.size(); ++i) {
        arch.hidden_widths.push_back(aa.hidden_widths[i] + ab.hidden_widths[i]);
    }
    Network out(arch);
    auto& p = out.mutable_params();
    const int depth = arch.depth();
    std::size_t offset = 0;
    for (int l = 0; l < depth; ++l) {
        const auto wa = a.weights(l);
        const auto wb = b.weights(l);
        const auto ba = a.bias(l);
        const auto bb = b.bias(l);
        const bool first = l == 0;
        const bool last = l + 1 == depth;
        const Eigen::Index rows = last ? 1 : wa.rows() + wb.rows();
        const Eigen::Index cols = first ? wa.cols() : wa.cols() + wb.cols();
        Network::RowMatrix w = Network::RowMatrix::Zero(rows, cols);
        Eigen::VectorXd bias = Eigen::VectorXd::Zero(rows);
        if (first && last) {
            w = alpha * wa + beta * wb;
            bias[0] = alpha * ba[0] + beta * bb[0];
        } else if (last) {
            w.block(0, 0, 1, wa.cols()) = alpha * wa;
            w.block(0, wa.cols(), 1, wb.cols()) = beta * wb;
            bias[0] = alpha * ba[0] + beta * bb[0];
        } else if (first) {
            w.topRows(wa.rows()) = wa;
            w.bottomRows(wb.rows()) = wb;
            bias << ba, bb;
        } else {
            w.topLeftCorner(wa.rows(), wa.cols()) = wa;
            w.bottomRightCorner(wb.rows(), wb.cols()) = wb;
            bias << ba, bb;
        }
        std::copy(w.data(), w.data() + w.size(), p.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += static_cast<std::size_t>(w.size());
        std::copy(bias.data(), bias.data() + bias.size(), p.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += static_cast<std::size_t>(bias.size());
    }
    return out;
}

Network scale(const Network& u, double t) {
    std::vector<double> params(u.params().begin(), u.params().end());
    const int last = u.arch().depth() - 1;
    const std::size_t begin = u.weight_offset(last);
    for (std::size_t i = begin; i < params.size(); ++i) params[i] *= t;
    return Network(u.arch(), std::move(params));
}

std::string serialize(const Network& net) {
    nlohmann::ordered_json doc;
    doc["input_dim"] = net.arch().input_dim;
    doc["hidden_widths"] = net.arch().hidden_widths;
    doc["activation"] = std::string(to_string(net.arch().activation));
    doc["params"] = std::vector<double>(net.params().begin(), net.params().end());
    return doc.dump(2) + "\n";
}

namespace {

// Byte offset -> (line, column), both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

Network deserialize(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(std::string("malformed network document: ") + e.what(), line, column);
    }
    if (!doc.is_object()) throw ValidationError("network document must be a JSON object");
    for (const char* key : {"input_dim", "hidden_widths", "activation", "params"}) {
        if (!doc.contains(key)) throw ValidationError(std::string("network document is missing '") + key + "'");
    }
    Architecture arch;
    try {
        arch.input_dim = doc.at("input_dim").get<int>();
        arch.hidden_widths = doc.at("hidden_widths").get<std::vector<int>>();
        arch.activation = parse_activation(doc.at("activation").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid network header: ") + e.what());
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }
    std::vector<double> params;
    try {
        params = doc.at("params").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid params array: ") + e.what());
    }
    try {
        arch.validate();
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }
    return Network(std::move(arch), std::move(params));
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write network file '" + path + "'");
    out << serialize(net);
}

Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read network file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str());
}

}  // namespace deepritz
