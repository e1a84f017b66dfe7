#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "greenslab/grid.hpp"

using namespace greenslab;

TEST_CASE("make_grid 1d places interior nodes only", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 3);
    REQUIRE(g->dimension() == 1);
    REQUIRE(g->size() == 3);
    REQUIRE(g->spacing(0) == Catch::Approx(0.25).epsilon(1e-15));
    REQUIRE(g->node(0).x == Catch::Approx(0.25));
    REQUIRE(g->node(1).x == Catch::Approx(0.5));
    REQUIRE(g->node(2).x == Catch::Approx(0.75));
}

TEST_CASE("make_grid rejects tiny counts and inverted bounds", "[grid]") {
    REQUIRE_THROWS_AS(make_grid({0.0, 1.0}, 1), PreconditionError);
    REQUIRE_THROWS_AS(make_grid({0.0, 1.0}, 2), PreconditionError);
    REQUIRE_THROWS_AS(make_grid({1.0, 0.0}, 5), PreconditionError);
    REQUIRE_THROWS_AS(make_grid({0.0, 0.0}, 5), PreconditionError);
    REQUIRE_THROWS_AS(make_grid({0.0, 1.0}, 3, {1.0, 0.5}, 3), PreconditionError);
}

TEST_CASE("make_grid 2d is lexicographic, x-major", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 3, {0.0, 1.0}, 3);
    REQUIRE(g->size() == 9);
    REQUIRE(g->node(0).x == Catch::Approx(0.25));
    REQUIRE(g->node(0).y == Catch::Approx(0.25));
    // y varies fastest
    REQUIRE(g->node(1).x == Catch::Approx(0.25));
    REQUIRE(g->node(1).y == Catch::Approx(0.5));
    REQUIRE(g->node(3).x == Catch::Approx(0.5));
    REQUIRE(g->node(3).y == Catch::Approx(0.25));
    REQUIRE(g->index2d(1, 1) == 4);
}

TEST_CASE("quadrature weights are one cell volume per node", "[grid]") {
    const auto g1 = make_grid({0.0, 1.0}, 3);
    const Weights w1 = quadrature_weights(g1);
    REQUIRE(w1.w.size() == 3);
    for (int i = 0; i < 3; ++i) REQUIRE(w1.w[i] == Catch::Approx(0.25));
    REQUIRE(w1.w.sum() == Catch::Approx(0.75));

    const auto g2 = make_grid({0.0, 1.0}, 3, {0.0, 1.0}, 3);
    const Weights w2 = quadrature_weights(g2);
    for (int i = 0; i < 9; ++i) REQUIRE(w2.w[i] == Catch::Approx(0.0625));

    const auto g3 = make_grid({0.0, 2.0}, 7);
    const Weights w3 = quadrature_weights(g3);
    for (int i = 0; i < 7; ++i) REQUIRE(w3.w[i] == Catch::Approx(0.25));
}

TEST_CASE("weight sum converges to the domain volume from below", "[grid]") {
    double prev_gap = 1.0;
    for (const int n : {9, 19, 39, 79}) {
        const auto g = make_grid({0.0, 1.0}, n);
        const double sum = quadrature_weights(g).w.sum();
        REQUIRE(sum <= 1.0);
        const double gap = 1.0 - sum;
        REQUIRE(gap < prev_gap);
        prev_gap = gap;
    }
    // gap is exactly h at count n: O(h)
    const auto g = make_grid({0.0, 1.0}, 99);
    REQUIRE(1.0 - quadrature_weights(g).w.sum() == Catch::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("sample_field evaluates pointwise", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 3);
    const Field ones = sample_field(g, [](const Point&) { return 1.0; });
    REQUIRE(ones.values.isApproxToConstant(1.0));

    const Field lin = sample_field(g, [](const Point& p) { return p.x; });
    REQUIRE(lin.values[0] == Catch::Approx(0.25));
    REQUIRE(lin.values[1] == Catch::Approx(0.5));
    REQUIRE(lin.values[2] == Catch::Approx(0.75));

    const Field s = sample_field(g, [](const Point& p) { return std::sin(M_PI * p.x); });
    REQUIRE(s.values[0] == Catch::Approx(std::sin(M_PI / 4)));
    REQUIRE(s.values[1] == Catch::Approx(1.0));
    REQUIRE(s.values[2] == Catch::Approx(std::sin(3 * M_PI / 4)));

    // values at node i correspond to the function at node i exactly
    for (int i = 0; i < g->size(); ++i) REQUIRE(lin.values[i] == g->node(i).x);
}

TEST_CASE("sample_field rejects non-finite values", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 3);
    REQUIRE_THROWS_AS(
        sample_field(g, [](const Point& p) { return p.x == 0.5 ? INFINITY : 1.0; }),
        PreconditionError);
}

TEST_CASE("integrate sums weighted values", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 99);
    const Weights w = quadrature_weights(g);
    REQUIRE(integrate(constant_field(g, 1.0), w) == Catch::Approx(0.99).epsilon(1e-12));
    REQUIRE(integrate(constant_field(g, 0.0), w) == 0.0);

    const auto g199 = make_grid({0.0, 1.0}, 199);
    const Field f = sample_field(g199, [](const Point& p) { return p.x * (1.0 - p.x); });
    REQUIRE(std::abs(integrate(f, quadrature_weights(g199)) - 1.0 / 6.0) < 1e-4);
}

TEST_CASE("integrate rejects grid mismatch", "[grid]") {
    const auto a = make_grid({0.0, 1.0}, 9);
    const auto b = make_grid({0.0, 1.0}, 11);
    REQUIRE_THROWS_AS(integrate(constant_field(a, 1.0), quadrature_weights(b)),
                      GridMismatchError);
}

TEST_CASE("integrate is linear to machine precision", "[grid]") {
    const auto g = make_grid({0.0, 1.0}, 57);
    const Weights w = quadrature_weights(g);
    std::mt19937_64 rng(123);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 25; ++trial) {
        Field f{g, Vector(g->size())}, h{g, Vector(g->size())};
        for (int i = 0; i < g->size(); ++i) {
            f.values[i] = normal(rng);
            h.values[i] = normal(rng);
        }
        const double alpha = normal(rng), beta = normal(rng);
        Field combo{g, alpha * f.values + beta * h.values};
        const double lhs = integrate(combo, w);
        const double rhs = alpha * integrate(f, w) + beta * integrate(h, w);
        REQUIRE(std::abs(lhs - rhs) <= 1e-14 * (std::abs(lhs) + std::abs(rhs) + 1.0));
    }
}
