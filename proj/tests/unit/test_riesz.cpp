#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"

#include "chq/riesz.hpp"

using namespace chq;

TEST_CASE("riesz constant matches gamma-function values") {
    // N=3, alpha=2: Gamma(1/2) / (Gamma(1) pi^{3/2} 4) = 1/(4 pi).
    CHECK(riesz_constant(3, 2.0) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-14));
    // N=4, alpha=2: 1/(4 pi^2).
    CHECK(riesz_constant(4, 2.0) == doctest::Approx(1.0 / (4.0 * pi * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(riesz_constant(3, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_constant(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_constant(3, -1.0), std::invalid_argument);
}

TEST_CASE("kernel entry at zero radius reduces to the point kernel") {
    // With one radius at the origin the angular integrand is constant, so the
    // entry collapses to A_{N,alpha} r^{-(N-alpha)}.
    for (double alpha : {1.5, 2.0, 2.5}) {
        const double a = riesz_constant(3, alpha);
        for (double r : {0.5, 1.0, 2.0}) {
            const double expected = a * std::pow(r, alpha - 3.0);
            CHECK(kernel_entry(3, alpha, 0.0, r, 512) == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("unit ball potential matches the closed form") {
    // Uniform density on the unit ball: (3 - r^2)/6 inside, 1/(3r) outside.
    const auto grid = build_grid(8.0, 128, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    std::vector<double> ball(grid->size());
    for (std::size_t i = 0; i < ball.size(); ++i) ball[i] = grid->nodes[i] < 1.0 ? 1.0 : 0.0;
    const std::vector<double> pot = op.apply(ball);
    double worst = 0.0;
    for (std::size_t i = 0; i < pot.size(); ++i) {
        const double r = grid->nodes[i];
        const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
        worst = std::max(worst, std::abs(pot[i] - exact) / exact);
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("zero input maps to zero output") {
    const auto grid = build_grid(4.0, 32, 3);
    const RieszOperator op = build_kernel(grid, 3, 1.5);
    const std::vector<double> zero(grid->size(), 0.0);
    for (double v : op.apply(zero)) CHECK(v == 0.0);
}

TEST_CASE("gaussian potential matches the error-function form") {
    // -Delta W = exp(-r^2) has W = (sqrt(pi)/4) erf(r)/r.
    const auto grid = build_grid(8.0, 256, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    std::vector<double> g(grid->size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-grid->nodes[i] * grid->nodes[i]);
    const std::vector<double> pot = op.apply(g);
    double worst = 0.0;
    for (std::size_t i = 0; i < pot.size(); ++i) {
        const double r = grid->nodes[i];
        const double exact = std::sqrt(pi) / 4.0 * std::erf(r) / r;
        worst = std::max(worst, std::abs(pot[i] - exact) / exact);
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("kernel is symmetric, nonnegative, finite") {
    const auto grid = build_grid(3.0, 48, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.5);
    for (std::size_t i = 0; i < grid->size(); ++i)
        for (std::size_t j = i; j < grid->size(); ++j) {
            CHECK(op.entry(i, j) == op.entry(j, i));
            CHECK(op.entry(i, j) >= 0.0);
            CHECK(std::isfinite(op.entry(i, j)));
        }
}

TEST_CASE("bilinear form is symmetric and the quadratic form nonnegative") {
    const auto grid = build_grid(3.0, 64, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> g(grid->size()), h(grid->size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = dist(rng);
            h[i] = dist(rng);
        }
        const auto kg = op.apply(g);
        const auto kh = op.apply(h);
        double gh = 0.0, hg = 0.0, gg = 0.0, norm_sq = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            gh += grid->weights[i] * kg[i] * h[i];
            hg += grid->weights[i] * kh[i] * g[i];
            gg += grid->weights[i] * kg[i] * g[i];
            norm_sq += grid->weights[i] * g[i] * g[i];
        }
        CHECK(std::abs(gh - hg) <= 1e-10 * std::max(1.0, std::abs(gh)));
        CHECK(gg >= -1e-12 * norm_sq);
    }
}

TEST_CASE("positivity: nonnegative input gives nonnegative potential") {
    const auto grid = build_grid(5.0, 64, 3);
    const RieszOperator op = build_kernel(grid, 3, 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    std::vector<double> g(grid->size());
    for (double& v : g) v = dist(rng);
    for (double v : op.apply(g)) CHECK(v >= 0.0);
}

TEST_CASE("alpha=2 potential inverts the radial laplacian") {
    // -Delta (I_2 * g) = g for smooth g away from the truncation radius.
    const auto grid = build_grid(8.0, 256, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    std::vector<double> g(grid->size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-grid->nodes[i] * grid->nodes[i]);
    const RadialProfile w{grid, op.apply(g)};
    const RadialProfile dw = differentiate(w);
    std::vector<double> flux(grid->size());
    for (std::size_t i = 0; i < flux.size(); ++i)
        flux[i] = grid->nodes[i] * grid->nodes[i] * dw.values[i];
    const RadialProfile dflux = differentiate(RadialProfile{grid, flux});
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->nodes[i];
        if (r < 0.2 || r > 4.0) continue;
        const double lap = dflux.values[i] / (r * r);
        worst = std::max(worst, std::abs(-lap - g[i]));
    }
    CHECK(worst < 1e-2);
}

TEST_CASE("build_kernel validates alpha and grid") {
    const auto grid = build_grid(4.0, 32, 3);
    CHECK_THROWS_AS(build_kernel(grid, 3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_kernel(grid, 3, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(build_kernel(grid, 4, 2.0), std::invalid_argument);
}

TEST_CASE("apply rejects grid mismatch") {
    const auto grid = build_grid(4.0, 32, 3);
    const auto other = build_grid(4.0, 48, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    const RadialProfile g = make_profile(other, std::vector<double>(other->size(), 1.0));
    CHECK_THROWS_AS(apply(op, g), std::invalid_argument);
}

TEST_CASE("kernel cache round-trips bit-exactly and detects corruption") {
    const auto grid = build_grid(4.0, 32, 3);
    const RieszOperator op = build_kernel(grid, 3, 2.0);
    const auto path = std::filesystem::temp_directory_path() / "chq-test-kernel.bin";
    save_kernel_cache(path.string(), op);

    const auto back = load_kernel_cache(path.string(), grid, 3, 2.0);
    REQUIRE(back.has_value());
    CHECK(back->kernel == op.kernel);
    CHECK(back->theta_panels == op.theta_panels);
    CHECK(back->grid->nodes == grid->nodes);

    // Key mismatch is a miss, not an error.
    CHECK_FALSE(load_kernel_cache(path.string(), grid, 3, 1.5).has_value());
    const auto other = build_grid(4.0, 48, 3);
    CHECK_FALSE(load_kernel_cache(path.string(), other, 3, 2.0).has_value());

    // Flip one payload byte: checksum must fail.
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(64);
        byte = char(byte ^ 0x10);
        f.write(&byte, 1);
    }
    CHECK_THROWS_AS(load_kernel_cache(path.string(), grid, 3, 2.0), cache_error);
    CHECK_THROWS_AS(check_kernel_cache(path.string()), cache_error);
    std::filesystem::remove(path);
    CHECK_FALSE(load_kernel_cache(path.string(), grid, 3, 2.0).has_value());
}
