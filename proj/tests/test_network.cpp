#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "deepritz/errors.hpp"
#include "deepritz/network.hpp"
#include "deepritz/oracles.hpp"
#include "deepritz/rng.hpp"

using namespace deepritz;

TEST_CASE("parameter counts") {
    CHECK(param_count(Architecture{2, {16, 16, 16}, Activation::Tanh}) == 609);
    CHECK(param_count(Architecture{1, {}, Activation::ReLU}) == 2);
    CHECK(param_count(Architecture{2, {4}, Activation::ReLU}) == 17);
    CHECK(Architecture{2, {16, 16, 16}, Activation::Tanh}.depth() == 4);
    CHECK(relu_family_hidden_layers(1) == 1);
    CHECK(relu_family_hidden_layers(2) == 2);
    CHECK(relu_family_hidden_layers(3) == 2);
    CHECK(relu_family_hidden_layers(4) == 3);
}

TEST_CASE("invalid architectures are rejected") {
    CHECK_THROWS_AS(Architecture({0, {4}, Activation::ReLU}).validate(), ConfigError);
    CHECK_THROWS_AS(Architecture({2, {4, 0}, Activation::ReLU}).validate(), ConfigError);
    CHECK_THROWS_AS(Network(Architecture{2, {4}, Activation::ReLU}, std::vector<double>(16)), ValidationError);
    CHECK_THROWS_AS(parse_activation("sigmoid"), ConfigError);
    CHECK(parse_activation("GeLU") == Activation::GELU);
}

TEST_CASE("initialisation is deterministic and bounded") {
    const Architecture arch{2, {16, 16, 16}, Activation::Tanh};
    const Network a = init_network(arch, 0);
    const Network b = init_network(arch, 0);
    const Network c = init_network(arch, 1);
    CHECK(a == b);
    CHECK_FALSE(a == c);

    const double bound = std::sqrt(6.0 / 17.0);
    for (double w : a.params()) CHECK(std::abs(w) <= bound);
    // Each layer respects its own Glorot bound and has zero biases.
    const auto sizes = arch.layer_sizes();
    for (int l = 0; l < arch.depth(); ++l) {
        const double layer_bound = std::sqrt(6.0 / (sizes[static_cast<std::size_t>(l)] + sizes[static_cast<std::size_t>(l) + 1]));
        CHECK(a.weights(l).cwiseAbs().maxCoeff() <= layer_bound);
        CHECK(a.bias(l).isZero(0.0));
    }
}

TEST_CASE("evaluation matches the plain-loop oracle") {
    Rng rng(5);
    for (auto act : {Activation::ReLU, Activation::Tanh, Activation::GELU}) {
        const Architecture arch{3, {7, 5}, act};
        Network net = init_network(arch, 11);
        for (auto& b : net.mutable_params()) b += 0.1 * rng.normal();
        Eigen::MatrixXd pts(20, 3);
        for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = rng.uniform(-1.0, 1.0);
        const Eigen::VectorXd values = net.evaluate(pts);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            std::vector<double> x{pts(i, 0), pts(i, 1), pts(i, 2)};
            CHECK(values[i] == doctest::Approx(oracle::forward(net, x)).epsilon(1e-13));
            CHECK(net(x) == doctest::Approx(values[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("serialisation round trip is bit exact") {
    Network net = init_network(Architecture{2, {5, 3}, Activation::GELU}, 3);
    net.mutable_params()[0] = 0.1;  // not exactly representable in decimal
    net.mutable_params()[1] = -1.0 / 3.0;
    const Network back = deserialize(serialize(net));
    CHECK(back == net);
}

TEST_CASE("malformed documents") {
    const std::string doc = serialize(init_network(Architecture{2, {4}, Activation::ReLU}, 1));
    SUBCASE("truncated") {
        try {
            deserialize(doc.substr(0, doc.size() / 2));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() >= 1);
            CHECK(e.column() >= 1);
        }
    }
    SUBCASE("params length disagrees with header") {
        auto j = nlohmann::json::parse(doc);
        j["hidden_widths"] = {5};
        const std::string bad = j.dump();
        CHECK_THROWS_AS(deserialize(bad), ValidationError);
    }
    SUBCASE("missing field") {
        CHECK_THROWS_AS(deserialize(R"({"input_dim":2,"hidden_widths":[4],"params":[]})"), ValidationError);
    }
}

TEST_CASE("combine and scale") {
    Rng rng(9);
    const Network a = init_network(Architecture{2, {4, 3}, Activation::Tanh}, 1);
    const Network b = init_network(Architecture{2, {2, 5}, Activation::Tanh}, 2);
    const Network c = combine(a, b, 0.5, -2.0);
    const Network s = scale(a, 3.0);
    CHECK(c.arch().hidden_widths == std::vector<int>{6, 8});
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(c(x) == doctest::Approx(0.5 * a(x) - 2.0 * b(x)).epsilon(1e-12));
        CHECK(s(x) == doctest::Approx(3.0 * a(x)).epsilon(1e-12));
    }
    const Network la(Architecture{1, {}, Activation::ReLU}, {2.0, 1.0});
    const Network lb(Architecture{1, {}, Activation::ReLU}, {-1.0, 4.0});
    const Network lc = combine(la, lb, 1.0, 1.0);
    CHECK(lc(std::vector<double>{3.0}) == doctest::Approx(7.0 + 1.0));
}

TEST_CASE("ReLU networks are piecewise affine along segments") {
    Rng rng(2024);
    const Architecture arch{2, {8, 8}, Activation::ReLU};
    std::size_t checked = 0;
    for (int seg = 0; seg < 1000; ++seg) {
        Network net = init_network(arch, static_cast<std::uint64_t>(seg % 10));
        for (auto& v : net.mutable_params()) v += 0.2 * rng.normal();
        const std::vector<double> params(net.params().begin(), net.params().end());
        const double ax = rng.uniform(-1, 1), ay = rng.uniform(-1, 1);
        const double bx = rng.uniform(-1, 1), by = rng.uniform(-1, 1);
        constexpr int samples = 65;
        std::vector<double> u(samples);
        std::vector<std::vector<int>> pattern(samples);
        for (int i = 0; i < samples; ++i) {
            const double t = static_cast<double>(i) / (samples - 1);
            u[static_cast<std::size_t>(i)] = oracle::forward(arch, params, {ax + t * (bx - ax), ay + t * (by - ay)},
                                                             &pattern[static_cast<std::size_t>(i)]);
            // The library's evaluation agrees with the oracle.
            CHECK(net(std::vector<double>{ax + t * (bx - ax), ay + t * (by - ay)}) ==
                  doctest::Approx(u[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
        for (std::size_t i = 1; i + 1 < samples; ++i) {
            if (pattern[i - 1] != pattern[i] || pattern[i] != pattern[i + 1]) continue;
            const double scale = std::abs(u[i - 1]) + std::abs(u[i]) + std::abs(u[i + 1]) + 1.0;
            CHECK(std::abs(u[i - 1] - 2.0 * u[i] + u[i + 1]) <= 1e-12 * scale);
            ++checked;
        }
    }
    // Most triples lie inside a single linear region.
    CHECK(checked > 1000 * 63 / 2);
}
