#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"

#include "chq/grid.hpp"

using namespace chq;

namespace {

double ball_volume(int n, double radius) {
    return unit_sphere_area(n) * std::pow(radius, n) / n;
}

}  // namespace

TEST_CASE("build_grid validates its arguments") {
    CHECK_THROWS_AS(build_grid(0.0, 64, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 64, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 7, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 64, 1), std::invalid_argument);
}

TEST_CASE("grid nodes increase inside (0, R] and weights are positive") {
    for (GridScheme scheme : {GridScheme::uniform, GridScheme::graded}) {
        const auto grid = build_grid(5.0, 100, 3, scheme);
        double prev = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            CHECK(grid->nodes[i] > prev);
            CHECK(grid->nodes[i] <= 5.0);
            CHECK(grid->weights[i] > 0.0);
            prev = grid->nodes[i];
        }
    }
}

TEST_CASE("constant integrand reproduces the ball volume") {
    // N=3, R=1: 4 pi / 3.
    const auto grid = build_grid(1.0, 2048, 3);
    std::vector<double> ones(grid->size(), 1.0);
    CHECK(integrate(*grid, ones) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-6));

    const auto graded = build_grid(1.0, 2048, 3, GridScheme::graded);
    std::vector<double> gones(graded->size(), 1.0);
    CHECK(integrate(*graded, gones) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-6));
}

TEST_CASE("gaussian integrand matches the closed form") {
    // int_{R^3} exp(-|x|^2) = pi^{3/2}; R=8 truncation error is ~1e-28.
    const auto grid = build_grid(8.0, 512, 3);
    std::vector<double> g(grid->size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-grid->nodes[i] * grid->nodes[i]);
    CHECK(integrate(*grid, g) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-6));
}

TEST_CASE("zero integrand integrates to zero") {
    const auto grid = build_grid(1.0, 8, 2);
    std::vector<double> zeros(grid->size(), 0.0);
    CHECK(integrate(*grid, zeros) == 0.0);
}

TEST_CASE("linear radial integrand on the unit ball") {
    // 4 pi int_0^1 r^3 dr = pi.
    const auto grid = build_grid(1.0, 4096, 3);
    std::vector<double> g(grid->size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = grid->nodes[i];
    CHECK(integrate(*grid, g) == doctest::Approx(pi).epsilon(1e-6));
}

TEST_CASE("integrate rejects sample length mismatch") {
    const auto grid = build_grid(1.0, 16, 3);
    std::vector<double> g(8, 1.0);
    CHECK_THROWS_AS(integrate(*grid, g), std::invalid_argument);
}

TEST_CASE("integration is linear and positive") {
    const auto grid = build_grid(3.0, 64, 3);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> g(grid->size()), h(grid->size()), combo(grid->size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = dist(rng);
        h[i] = dist(rng) - 0.5;
        combo[i] = 2.5 * g[i] - 1.25 * h[i];
    }
    const double lhs = integrate(*grid, combo);
    const double rhs = 2.5 * integrate(*grid, g) - 1.25 * integrate(*grid, h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    CHECK(integrate(*grid, g) >= 0.0);
}

TEST_CASE("quadrature error drops at second order under refinement") {
    // 4 pi int_0^1 r^2 cos r dr; cos has nonzero boundary derivatives, so the
    // midpoint error constant does not degenerate.
    const double exact = 4.0 * pi * (2.0 * std::cos(1.0) - std::sin(1.0));
    auto quad_error = [&](int m, GridScheme scheme) {
        const auto grid = build_grid(1.0, m, 3, scheme);
        std::vector<double> g(grid->size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::cos(grid->nodes[i]);
        return std::abs(integrate(*grid, g) - exact);
    };
    for (GridScheme scheme : {GridScheme::uniform, GridScheme::graded}) {
        const double e1 = quad_error(64, scheme);
        const double e2 = quad_error(128, scheme);
        const double slope = std::log2(e1 / e2);
        CHECK(slope >= 1.9);
    }
}

TEST_CASE("derivative of a constant vanishes") {
    const auto grid = build_grid(4.0, 32, 3);
    RadialProfile u = make_profile(grid, std::vector<double>(grid->size(), 3.7));
    const RadialProfile du = differentiate(u);
    for (double v : du.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("derivative is exact for quadratics") {
    for (GridScheme scheme : {GridScheme::uniform, GridScheme::graded}) {
        const auto grid = build_grid(4.0, 64, 3, scheme);
        std::vector<double> vals(grid->size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = grid->nodes[i] * grid->nodes[i];
        const RadialProfile du = differentiate(make_profile(grid, vals));
        for (std::size_t i = 0; i < vals.size(); ++i)
            CHECK(du.values[i] == doctest::Approx(2.0 * grid->nodes[i]).epsilon(1e-11));
    }
}

TEST_CASE("derivative error for exp(-r) refines at second order") {
    auto max_error = [](int m) {
        const auto grid = build_grid(4.0, m, 3);
        std::vector<double> vals(grid->size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::exp(-grid->nodes[i]);
        const RadialProfile du = differentiate(make_profile(grid, vals));
        double worst = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            worst = std::max(worst, std::abs(du.values[i] + std::exp(-grid->nodes[i])));
        return worst;
    };
    const double e1 = max_error(64);
    const double e2 = max_error(128);
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("profile csv round-trips exactly") {
    const auto grid = build_grid(2.0, 32, 3);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> vals(grid->size());
    for (double& v : vals) v = dist(rng);
    const RadialProfile u = make_profile(grid, vals);

    const auto path = std::filesystem::temp_directory_path() / "chq-test-profile.csv";
    write_profile_csv(path.string(), u);
    const RadialProfile back = read_profile_csv(path.string(), grid);
    std::filesystem::remove(path);
    CHECK(back.values == u.values);
}

TEST_CASE("profile csv rejects grid mismatch") {
    const auto grid = build_grid(2.0, 32, 3);
    const RadialProfile u = make_profile(grid, std::vector<double>(grid->size(), 1.0));
    const auto path = std::filesystem::temp_directory_path() / "chq-test-mismatch.csv";
    write_profile_csv(path.string(), u);
    const auto other = build_grid(2.0, 64, 3);
    CHECK_THROWS_AS(read_profile_csv(path.string(), other), std::invalid_argument);
    std::filesystem::remove(path);
}
