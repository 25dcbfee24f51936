#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deepritz/errors.hpp"
#include "deepritz/geometry.hpp"
#include "deepritz/rng.hpp"

using namespace deepritz;

namespace {

// Mean and standard error of a sample, computed directly.
struct Moments {
    double mean;
    double se;
};

Moments moments(const Eigen::VectorXd& v) {
    const double n = static_cast<double>(v.size());
    const double mean = v.sum() / n;
    const double var = (v.array() - mean).square().sum() / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("domain measures") {
    CHECK(Domain::interval(0.0, 2.5).measure() == 2.5);
    CHECK(Domain::interval(0.0, 2.5).boundary_measure() == 2.0);
    CHECK(Domain::unit_disk().measure() == std::numbers::pi);
    CHECK(Domain::unit_disk().boundary_measure() == 2.0 * std::numbers::pi);
    CHECK(Domain::unit_square().measure() == 1.0);
    CHECK(Domain::unit_square().boundary_measure() == 4.0);
    CHECK(Domain::square(0.0, 0.0, 2.0).measure() == 4.0);
    CHECK(Domain::square(0.0, 0.0, 2.0).boundary_measure() == 8.0);
    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Domain::square(0.0, 0.0, -1.0), ConfigError);
}

TEST_CASE("samples lie in the domain and on its boundary") {
    SUBCASE("disk") {
        const auto b = sample(Domain::unit_disk(), 20000, 5000, 3);
        CHECK(b.interior.rowwise().norm().maxCoeff() < 1.0);
        CHECK((b.boundary.rowwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
    SUBCASE("centred square") {
        const Domain d = Domain::square(0.0, 0.0, 2.0);
        const auto b = sample(d, 20000, 5000, 3);
        CHECK(b.interior.cwiseAbs().maxCoeff() <= 1.0);
        for (Eigen::Index i = 0; i < b.boundary.rows(); ++i) {
            const double m = b.boundary.row(i).cwiseAbs().maxCoeff();
            CHECK(std::abs(m - 1.0) <= 1e-12);
            CHECK(d.boundary_distance(b.boundary.row(i).transpose()) <= 1e-12);
        }
    }
    SUBCASE("interval") {
        const auto b = sample(Domain::interval(-1.0, 3.0), 1000, 7, 3);
        CHECK(b.interior.minCoeff() >= -1.0);
        CHECK(b.interior.maxCoeff() <= 3.0);
        REQUIRE(b.boundary.rows() == 2);
        CHECK(b.boundary(0, 0) == -1.0);
        CHECK(b.boundary(1, 0) == 3.0);
    }
}

TEST_CASE("sampling is deterministic per seed") {
    const auto a = sample(Domain::unit_disk(), 1000, 100, 77);
    const auto b = sample(Domain::unit_disk(), 1000, 100, 77);
    const auto c = sample(Domain::unit_disk(), 1000, 100, 78);
    CHECK(a.interior == b.interior);
    CHECK(a.boundary == b.boundary);
    CHECK(a.interior != c.interior);
    CHECK_THROWS_AS(sample(Domain::unit_disk(), 0, 10, 1), ConfigError);
    CHECK_THROWS_AS(sample(Domain::unit_disk(), 10, 0, 1), ConfigError);
}

TEST_CASE("disk second moment") {
    const auto b = sample(Domain::unit_disk(), 100000, 1, 2021);
    const Eigen::VectorXd r2 = b.interior.rowwise().squaredNorm();
    const Moments m = moments(r2);
    CHECK(std::abs(m.mean - 0.5) <= 3.0 * m.se);
    // Uniform angle: first moments vanish.
    const Moments mx = moments(b.interior.col(0));
    CHECK(std::abs(mx.mean) <= 3.0 * mx.se);
}

TEST_CASE("Monte Carlo integrals") {
    const auto disk = sample(Domain::unit_disk(), 100000, 1, 5);
    CHECK(mc_integral(Eigen::VectorXd::Ones(disk.interior.rows()), disk.interior_measure) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(mc_standard_error(Eigen::VectorXd::Ones(disk.interior.rows()), disk.interior_measure) == 0.0);

    const auto line = sample(Domain::interval(0.0, 1.0), 100000, 2, 5);
    const Eigen::VectorXd x = line.interior.col(0);
    CHECK(std::abs(mc_integral(x, 1.0) - 0.5) <= 3.0 * mc_standard_error(x, 1.0));

    Eigen::VectorXd chi(disk.interior.rows());
    for (Eigen::Index i = 0; i < chi.size(); ++i) chi[i] = disk.interior.row(i).norm() < 0.4 ? 1.0 : 0.0;
    const double est = mc_integral(chi, disk.interior_measure);
    CHECK(std::abs(est - std::numbers::pi * 0.16) <= 3.0 * mc_standard_error(chi, disk.interior_measure));

    CHECK_THROWS_AS(mc_integral(Eigen::VectorXd(), 1.0), ConfigError);
}

TEST_CASE("Monte Carlo standard deviation scales like N^-1/2") {
    auto spread = [](std::size_t n) {
        Eigen::VectorXd estimates(50);
        for (int s = 0; s < 50; ++s) {
            const auto b = sample(Domain::unit_disk(), n, 1, split_seed(n, static_cast<std::uint64_t>(s)));
            Eigen::VectorXd g(b.interior.rows());
            for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = std::exp(b.interior(i, 0)) * std::cos(b.interior(i, 1));
            estimates[s] = mc_integral(g, b.interior_measure);
        }
        const double mean = estimates.mean();
        return std::sqrt((estimates.array() - mean).square().sum() / 49.0);
    };
    const double ratio = spread(2000) / spread(8000);
    CHECK(ratio >= 2.0 * 0.75);
    CHECK(ratio <= 2.0 * 1.25);
}

TEST_CASE("right-hand sides") {
    const Rhs two = TwoBallsRhs{0.4};
    CHECK(rhs_value(two, Eigen::Vector2d(0.0, -0.5)) == 1.0);
    CHECK(rhs_value(two, Eigen::Vector2d(0.0, 0.5)) == -1.0);
    CHECK(rhs_value(two, Eigen::Vector2d(0.0, 0.0)) == 0.0);
    // Strict membership: points on the sphere are outside.
    CHECK(rhs_value(TwoBallsRhs{0.25}, Eigen::Vector2d(0.0, 0.25)) == 0.0);
    const auto pts = sample(Domain::square(0.0, 0.0, 2.0), 5000, 1, 4).interior;
    for (double v : rhs_eval(two, pts)) CHECK((v == -1.0 || v == 0.0 || v == 1.0));

    CHECK(rhs_value(ConstantRhs{1.0}, Eigen::Vector2d(0.3, -7.0)) == 1.0);
    CHECK(rhs_value(FourierModeRhs{1, 1, 1.0}, Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
    const Rhs custom = CustomRhs{[](const Eigen::Ref<const Eigen::VectorXd>& x) { return 3.0 * x[0]; }, "3x"};
    CHECK(rhs_value(custom, Eigen::Vector2d(2.0, 0.0)) == 6.0);
    CHECK(describe(custom) == "3x");
}
