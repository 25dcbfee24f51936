#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deepritz/cpwl.hpp"
#include "deepritz/errors.hpp"
#include "deepritz/rng.hpp"

using namespace deepritz;

namespace {

// Linear search and two-point interpolation, independent of Cpwl1D.
double piecewise_oracle(const std::vector<double>& b, const std::vector<double>& v, double x) {
    if (x <= b.front()) return v.front();
    if (x >= b.back()) return v.back();
    std::size_t i = 0;
    while (x > b[i + 1]) ++i;
    const double t = (x - b[i]) / (b[i + 1] - b[i]);
    return (1.0 - t) * v[i] + t * v[i + 1];
}

// Composite midpoint rule on a fine grid for the squared W^{1,2} error.
double w12_error_oracle(const Cpwl1D& c, double a, double b, std::size_t n) {
    const double pi = std::numbers::pi;
    const double h = (b - a) / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + (static_cast<double>(i) + 0.5) * h;
        const double dv = c(x) - std::sin(pi * x);
        const double dg = c.derivative(x) - pi * std::cos(pi * x);
        total += h * (dv * dv + dg * dg);
    }
    return std::sqrt(total);
}

// Jittered grid on [0, 1]: gaps uniform in [0.5, 1.5] / (k - 1).
std::vector<double> jittered_breakpoints(Rng& rng, std::size_t k) {
    std::vector<double> b(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) b[i] = b[i - 1] + rng.uniform(0.5, 1.5) / static_cast<double>(k - 1);
    return b;
}

std::vector<double> sorted_uniform(Rng& rng, std::size_t k) {
    std::vector<double> b(k);
    for (auto& x : b) x = rng.uniform(-1.0, 1.0);
    std::sort(b.begin(), b.end());
    return b;
}

double dyadic(Rng& rng) { return static_cast<double>(static_cast<std::int64_t>(rng.next() % 4001) - 2000) / 1024.0; }

}  // namespace

TEST_CASE("interpolation examples") {
    const Cpwl1D id = interpolate_1d([](double x) { return x; }, {0.0, 1.0});
    CHECK(id.values() == std::vector<double>{0.0, 1.0});
    for (double x : {0.0, 0.125, 0.3, 0.77, 1.0}) CHECK(id(x) == doctest::Approx(x).epsilon(1e-15));

    const auto grid = uniform_breakpoints(0.0, 1.0, 10);
    const Cpwl1D s = interpolate_1d([](double x) { return std::sin(std::numbers::pi * x); }, grid);
    for (std::size_t k = 0; k <= 10; ++k) CHECK(s.values()[k] == std::sin(std::numbers::pi * grid[k]));
    CHECK(s.zero_boundary() == false);  // sin(pi) is not exactly 0 in floating point

    CHECK_THROWS_AS(interpolate_1d([](double x) { return x; }, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(Cpwl1D({0.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(Cpwl1D({0.0, 1.0}, {1.0}), ConfigError);
}

TEST_CASE("W12 interpolation error halves with the grid spacing") {
    const double pi = std::numbers::pi;
    std::vector<double> errors;
    for (std::size_t cells : {8u, 16u, 32u, 64u, 128u}) {
        const Cpwl1D c = interpolate_1d([&](double x) { return std::sin(pi * x); }, uniform_breakpoints(0.0, 1.0, cells));
        const double lib = sobolev_error_1d(
            c, [&](double x) { return std::sin(pi * x); }, [&](double x) { return pi * std::cos(pi * x); }, 2.0);
        const double ref = w12_error_oracle(c, 0.0, 1.0, 200000);
        CHECK(lib == doctest::Approx(ref).epsilon(1e-5));
        errors.push_back(lib);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double ratio = errors[i - 1] / errors[i];
        CHECK(ratio >= 2.0 * 0.85);
        CHECK(ratio <= 2.0 * 1.15);
    }
}

TEST_CASE("CPWL to ReLU examples") {
    const Network hat = cpwl_to_relu_1d(Cpwl1D({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0}));
    CHECK(hat.arch().depth() == 2);
    CHECK(hat(std::vector<double>{0.5}) == 1.0);
    CHECK(hat(std::vector<double>{0.0}) == 0.0);
    CHECK(hat(std::vector<double>{1.0}) == 0.0);
    CHECK(hat(std::vector<double>{0.25}) == 0.5);

    const Network affine = cpwl_to_relu_1d(Cpwl1D({0.0, 1.0}, {1.0, 3.0}));
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(affine(std::vector<double>{x}) == doctest::Approx(2 * x + 1).epsilon(1e-15));
}

TEST_CASE("CPWL to ReLU agrees with direct evaluation") {
    Rng rng(42);
    double worst = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        const auto b = jittered_breakpoints(rng, 10);
        std::vector<double> v(10);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        const Cpwl1D c(b, v);
        const Network net = cpwl_to_relu_1d(c);
        CHECK(net.arch().hidden_widths.front() <= 11);
        Eigen::MatrixXd pts(1000, 1);
        for (Eigen::Index i = 0; i < 1000; ++i) pts(i, 0) = rng.uniform(b.front(), b.back());
        const Eigen::VectorXd u = net.evaluate(pts);
        for (Eigen::Index i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(u[i] - piecewise_oracle(b, v, pts(i, 0))));
        // Breakpoint values are reproduced too.
        for (std::size_t k = 0; k < b.size(); ++k) CHECK(std::abs(net(std::vector<double>{b[k]}) - v[k]) <= 1e-12);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("CPWL to ReLU error follows the rounding model for arbitrary breakpoints") {
    // With nearly coincident breakpoints the output weights grow like the
    // slopes, and so does the rounding error: |net - c| <= C eps sum_k |beta_k| |x - b_k|.
    Rng rng(43);
    for (int instance = 0; instance < 100; ++instance) {
        const auto b = sorted_uniform(rng, 10);
        std::vector<double> v(10);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        const Cpwl1D c(b, v);
        const Network net = cpwl_to_relu_1d(c);
        const auto beta = net.weights(1);
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(b.front(), b.back());
            double budget = std::abs(v.front());
            for (std::size_t k = 0; k < b.size(); ++k) budget += std::abs(beta(0, static_cast<Eigen::Index>(k))) * std::max(0.0, x - b[k]);
            CHECK(std::abs(net(std::vector<double>{x}) - piecewise_oracle(b, v, x)) <= 16.0 * 0x1.0p-52 * budget + 1e-15);
        }
    }
}

TEST_CASE("max gadget") {
    Rng rng(7);
    const Network m2 = relu_max_gadget(2);
    CHECK(m2(std::vector<double>{3.0, 5.0}) == 5.0);
    CHECK(m2(std::vector<double>{5.0, 3.0}) == 5.0);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.uniform(-10.0, 10.0);
        CHECK(m2(std::vector<double>{a, a}) == a);
    }
    for (int k = 2; k <= 4; ++k) {
        const Network m = relu_max_gadget(k);
        CHECK(m.arch().depth() == static_cast<int>(std::ceil(std::log2(k))) + 1);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(k));
            for (auto& v : x) v = dyadic(rng);
            CHECK(m(x) == *std::max_element(x.begin(), x.end()));
        }
        // Arbitrary reals: exact up to rounding of the differences.
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(k));
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            CHECK(std::abs(m(x) - *std::max_element(x.begin(), x.end())) <= 8e-16);
        }
    }
    CHECK_THROWS_AS(relu_max_gadget(1), ConfigError);
}

TEST_CASE("2D interpolation reproduces affine functions") {
    Rng rng(11);
    const auto target = [](const Eigen::Vector2d& x) { return x[0] + 2.0 * x[1]; };
    const auto s = interpolate_2d(target, 0.1, Box2D{0.0, 1.0, 0.0, 1.0});
    CHECK(s.cells_x() == 10);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Vector2d x(rng.uniform(), rng.uniform());
        CHECK(s(x) == doctest::Approx(target(x)).epsilon(1e-13));
        CHECK(s.gradient(x)[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.gradient(x)[1] == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK(s(Eigen::Vector2d(1.5, 0.5)) == 0.0);
    CHECK_THROWS_AS(interpolate_2d(target, 0.0, Box2D{}), ConfigError);
}

TEST_CASE("2D interpolation of a quadratic") {
    const double delta = 0.1;
    const auto target = [](const Eigen::Vector2d& x) { return x.squaredNorm(); };
    const auto s = interpolate_2d(target, delta, Box2D{0.0, 1.0, 0.0, 1.0});
    double sup = 0.0;
    constexpr int n = 400;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Eigen::Vector2d x(static_cast<double>(i) / n, static_cast<double>(j) / n);
            sup = std::max(sup, std::abs(s(x) - target(x)));
        }
    }
    CHECK(sup <= 2.0 * delta * delta);
    CHECK(sup > 0.0);
}

TEST_CASE("2D interpolant is continuous across triangle edges") {
    Rng rng(5);
    auto s = interpolate_2d([](const Eigen::Vector2d& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]); }, 0.125,
                            Box2D{0.0, 1.0, 0.0, 1.0});
    for (int i = 0; i < 2000; ++i) {
        const Eigen::Vector2d x(rng.uniform(), rng.uniform());
        const Eigen::Vector2d dx(1e-9, -1e-9);
        CHECK(std::abs(s(x) - s(Eigen::Vector2d(x + dx))) <= 1e-7);
    }
}

TEST_CASE("2D interpolant support stays within one cell of the bump support") {
    const Eigen::Vector2d centre(0.45, 0.55);
    const double radius = 0.3;
    const auto bump = [&](const Eigen::Vector2d& x) {
        const double r2 = (x - centre).squaredNorm() / (radius * radius);
        return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    };
    const double delta = 0.05;
    const auto s = interpolate_2d(bump, delta, Box2D{0.0, 1.0, 0.0, 1.0});
    constexpr int n = 300;
    int nonzero = 0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const Eigen::Vector2d x(static_cast<double>(i) / n, static_cast<double>(j) / n);
            if (s(x) != 0.0) {
                ++nonzero;
                CHECK((x - centre).norm() <= radius + delta * std::sqrt(2.0) + 1e-12);
            }
        }
    }
    CHECK(nonzero > 0);
    const Box2D box = s.support_box();
    CHECK(box.x0 >= centre[0] - radius - delta - 1e-12);
    CHECK(box.x1 <= centre[0] + radius + delta + 1e-12);
}

TEST_CASE("2D W1p error decreases over dyadic grids") {
    const double pi = std::numbers::pi;
    const auto target = [&](const Eigen::Vector2d& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    const auto grad = [&](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]), pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
    };
    double previous = std::numeric_limits<double>::infinity();
    for (double delta : {0.25, 0.125, 0.0625, 0.03125}) {
        const double e = sobolev_error_2d(interpolate_2d(target, delta, Box2D{}), target, grad, 2.0);
        CHECK(e < previous);
        previous = e;
    }
}

TEST_CASE("hat functions") {
    const auto h = SimplicialInterpolant2D::hat(Box2D{}, 0.25, 2, 1);
    CHECK(h(Eigen::Vector2d(0.5, 0.25)) == 1.0);
    CHECK(h(Eigen::Vector2d(0.0, 0.0)) == 0.0);
    const Box2D b = h.support_box();
    CHECK(b.x0 == 0.25);
    CHECK(b.x1 == 0.75);
    CHECK(b.y0 == 0.0);
    CHECK(b.y1 == 0.5);
    CHECK_THROWS_AS(SimplicialInterpolant2D::hat(Box2D{}, 0.25, 5, 0), ConfigError);
}
