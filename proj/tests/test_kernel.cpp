#include <cmath>

#include <Eigen/Dense>
#include <doctest.h>

#include "blens/kernel.hpp"
#include "blens/waves.hpp"

using namespace blens;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("four point shell gives the closed form kernel") {
    auto shell = enumerate_shell(QuadraticForm::circle(2), 1);
    REQUIRE(shell.size() == 4);
    for (double a : {0.0, 0.7, 2.3}) {
        for (double b : {0.0, -1.1, 3.9}) {
            double expect = 0.5 * (std::cos(a) + std::cos(b));
            CHECK(std::abs(reproducing_kernel(shell, Polygon::Square, {a, b}) - expect) < 1e-15);
        }
    }
}

TEST_CASE("kernel normalization and symmetries") {
    for (long long mu : {5LL, 25LL, 65LL}) {
        auto shell = enumerate_shell(QuadraticForm::circle(2), mu);
        CHECK(reproducing_kernel(shell, Polygon::Square, {0.0, 0.0}) == 1.0);
        Vec2 w{1.3, -0.4};
        double k = reproducing_kernel(shell, Polygon::Square, w);
        CHECK(reproducing_kernel(shell, Polygon::Square, {-w[0], -w[1]}) == k);
        CHECK(std::abs(reproducing_kernel(shell, Polygon::Square, {w[1], w[0]}) - k) < 1e-15);
        CHECK(std::abs(reproducing_kernel(shell, Polygon::Square, {-w[0], w[1]}) - k) < 1e-15);
    }
    auto eshell = enumerate_shell(QuadraticForm::equilateral(), 28);
    CHECK(reproducing_kernel(eshell, Polygon::EquiTriangle, {0.0, 0.0}) == 1.0);
    // manual 12-term sum with directions (m, sqrt(3) n)/(2 sqrt(mu))
    Vec2 w{0.9, 1.7};
    double manual = 0.0;
    for (const auto& N : eshell.points) {
        double x1 = static_cast<double>(N[0]) / (2 * std::sqrt(7.0));
        double x2 = std::sqrt(3.0) * static_cast<double>(N[1]) / (2 * std::sqrt(7.0));
        manual += std::cos(x1 * w[0] + x2 * w[1]);
    }
    manual /= static_cast<double>(eshell.size());
    CHECK(std::abs(reproducing_kernel(eshell, Polygon::EquiTriangle, w) - manual) < 1e-15);
    for (const auto& xi : kernel_directions(eshell))
        CHECK(std::abs(xi[0] * xi[0] + xi[1] * xi[1] - 1.0) < 1e-12);
}

TEST_CASE("kernel approaches the Bessel kernel along prime product shells") {
    auto form = QuadraticForm::circle(2);
    auto mus = equidistributed_sequence(form, 5, SequenceStrategy::PrimeProducts);
    std::vector<double> sups;
    for (long long mu : mus)
        sups.push_back(kernel_vs_bessel(enumerate_shell(form, mu), Polygon::Square, 4.0, 40));
    for (std::size_t i = 1; i < sups.size(); ++i) CHECK(sups[i] < sups[i - 1]);
    CHECK(sups.back() <= sups.front() / 4.0);

    // axis-heavy mu=25 is worse than the split prime mu=65
    double bad = kernel_vs_bessel(enumerate_shell(form, 25), Polygon::Square, 4.0, 40);
    double good = kernel_vs_bessel(enumerate_shell(form, 65), Polygon::Square, 4.0, 40);
    CHECK(good < bad);

    CHECK(kernel_vs_bessel(enumerate_shell(form, 5), Polygon::Square, 1e-3, 8) < 1e-6);
}

TEST_CASE("derandomized eigenfunctions have unit norm") {
    auto u5 = derandomized_eigenfunction(5, BC::Dirichlet);
    REQUIRE(u5.terms.size() == 2);
    double expect = std::sqrt(2.0) * (std::sin(kPi * 0.3) * std::sin(2 * kPi * 0.8) +
                                      std::sin(2 * kPi * 0.3) * std::sin(kPi * 0.8));
    CHECK(std::abs(u5.value({0.3, 0.8}) - expect) < 1e-14);
    CHECK(std::abs(expansion_l2_norm_sq(u5) - 1.0) < 1e-12);

    auto u1 = derandomized_eigenfunction(1, BC::Neumann);
    REQUIRE(u1.terms.size() == 2);
    CHECK(std::abs(u1.value({0.2, 0.6}) - (std::cos(kPi * 0.2) + std::cos(kPi * 0.6))) < 1e-14);
    CHECK(std::abs(expansion_l2_norm_sq(u1) - 1.0) < 1e-12);

    for (long long mu : {25LL, 1105LL}) {
        for (BC bc : {BC::Dirichlet, BC::Neumann}) {
            auto u = derandomized_eigenfunction(mu, bc);
            CHECK(std::abs(expansion_l2_norm_sq(u) - 1.0) < 1e-12);
        }
    }

    // distinct eigenvalues stay orthogonal: joint expansion has additive norm
    auto u25 = derandomized_eigenfunction(25, BC::Dirichlet);
    EigenExpansion joint = u5;
    for (const auto& t : u25.terms) joint.terms.push_back(t);
    CHECK(std::abs(expansion_l2_norm_sq(joint) - 2.0) < 1e-12);
}

TEST_CASE("empirical covariance approaches the Bessel kernel") {
    auto u = derandomized_eigenfunction(1105, BC::Dirichlet);
    double var = empirical_covariance(u, 1200, {0, 0}, {0, 0});
    CHECK(std::abs(var - 1.0) < 0.1);

    Vec2 x{0.4, -0.2}, y{-0.8, 0.9};
    CHECK(empirical_covariance(u, 1000, x, y) == empirical_covariance(u, 1000, y, x));

    double r = std::hypot(x[0] - y[0], x[1] - y[1]);
    double dev_fine = std::abs(empirical_covariance(u, 1200, x, y) - bessel_j(0, r));
    auto coarse = derandomized_eigenfunction(65, BC::Dirichlet);
    double dev_coarse = std::abs(empirical_covariance(coarse, 1200, x, y) - bessel_j(0, r));
    CHECK(dev_fine < dev_coarse + 0.05);
    CHECK(dev_fine < 0.1);
}

TEST_CASE("stencil covariance matrix is positive semidefinite") {
    auto u = derandomized_eigenfunction(1105, BC::Neumann);
    double h = 1.2;
    std::vector<Vec2> pts = {{0, 0}, {h, 0}, {-h, 0}, {0, h}, {0, -h}};
    Eigen::MatrixXd C(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            C(i, j) = empirical_covariance(u, 900, pts[static_cast<std::size_t>(i)],
                                           pts[static_cast<std::size_t>(j)]);
    CHECK((C - C.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}
