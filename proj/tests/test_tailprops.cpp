#include "doctest.h"

#include <cmath>

#include "mlmfit/tailprops.hpp"

using namespace mlmfit;

TEST_CASE("tail grid shape") {
    MlmParams p(2, -0.36, 30.5);
    auto g = tail_grid(p);
    REQUIRE(g.size() == 9);
    CHECK(g.front() == doctest::Approx(p.sigma * 1e2));
    CHECK(g.back() == doctest::Approx(p.sigma * 1e10));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("regular variation check") {
    // beta=0: ratio has the closed form ((sigma+tx)/(sigma+x))^{-alpha}
    MlmParams lomax(2, 0, 5);
    auto c = regular_variation_check(lomax, 2.0);
    CHECK(c.theoretical == doctest::Approx(0.25).epsilon(1e-14));
    for (auto [x, v] : c.evaluated) {
        double closed = std::pow((5 + 2 * x) / (5 + x), -2.0);
        CHECK(v == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(c.converged);

    auto c1 = regular_variation_check(lomax, 1.0);
    for (auto [x, v] : c1.evaluated) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    MlmParams p(2, -0.36, 30.5);
    auto c2 = regular_variation_check(p, 2.0);
    CHECK(c2.converged);
    CHECK(c2.evaluated.back().second == doctest::Approx(0.25).epsilon(1e-3));

    CHECK_THROWS(regular_variation_check(p, 0.0));
}

TEST_CASE("tail equivalence check") {
    MlmParams lomax(1.5, 0, 2);
    auto c = tail_equivalence_check(lomax);
    CHECK(c.theoretical == doctest::Approx(1.0));
    for (auto [x, v] : c.evaluated) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.converged);

    // constants for nonzero beta; convergence at sigma*1e10 is O(|ab|/log x),
    // so |alpha*beta| = 0.72 sits near 1e-2 while small |alpha*beta| passes 5e-3
    auto c2 = tail_equivalence_check(MlmParams(2, -0.36, 30.5));
    CHECK(c2.theoretical == doctest::Approx(std::exp(-0.72)).epsilon(1e-14));
    CHECK(c2.final_rel_err < 2e-2);

    auto c3 = tail_equivalence_check(MlmParams(1, 1, 1));
    CHECK(c3.theoretical == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    auto c4 = tail_equivalence_check(MlmParams(2, 0.1, 5));
    CHECK(c4.converged);
}

TEST_CASE("heavy tail check") {
    auto c = heavy_tail_check(MlmParams(2, 0, 1), 0.01);
    CHECK(c.converged);
    auto c2 = heavy_tail_check(MlmParams(1.2, 0.5, 3), 1.0);
    CHECK(c2.converged);
    CHECK_THROWS(heavy_tail_check(MlmParams(1, 0, 1), 0.0));

    // negative control: for Exponential(lambda') with lambda' > lambda the
    // same functional lambda*x + log S(x) = (lambda - lambda') x -> -inf
    double lambda = 0.01, lp = 0.02;
    double prev = 0;
    for (double x : {1e2, 1e4, 1e6}) {
        double v = lambda * x - lp * x;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("class D and class L checks") {
    MlmParams lomax(2, 0, 5);
    auto d = class_D_check(lomax);
    CHECK(d.theoretical == doctest::Approx(4.0));
    for (auto [x, v] : d.evaluated) {
        double closed = std::pow((5 + 2 * x) / (5 + x), 2.0);
        CHECK(v == doctest::Approx(closed).epsilon(1e-10));
    }
    CHECK(d.converged);

    MlmParams p(2, -0.36, 30.5);
    auto d2 = class_D_check(p);
    CHECK(d2.converged);
    CHECK(d2.evaluated.back().second == doctest::Approx(4.0).epsilon(1e-3));

    auto l = class_L_check(p, 1.0);
    CHECK(l.converged);
    CHECK(l.evaluated.back().second == doctest::Approx(1.0).epsilon(1e-6));

    auto l0 = class_L_check(p, 0.0);
    for (auto [x, v] : l0.evaluated) CHECK(v == 1.0);
}

TEST_CASE("von Mises check") {
    // Lomax: (1-F)/(xf) = (sigma+x)/(alpha x), so x d/dx of it = -sigma/(alpha x)
    MlmParams lomax(2, 0, 5);
    auto c = von_mises_check(lomax);
    for (auto [x, v] : c.evaluated)
        CHECK(v == doctest::Approx(-5.0 / (2 * x)).epsilon(1e-6));
    CHECK(c.converged);

    auto c2 = von_mises_check(MlmParams(1.5, 0.4, 2));
    CHECK(c2.converged);
    CHECK(std::fabs(c2.evaluated.back().second) < 1e-3);
    // magnitude shrinks along the tail
    CHECK(std::fabs(c2.evaluated.back().second) <
          std::fabs(c2.evaluated.front().second));
}

TEST_CASE("subexponential Monte Carlo") {
    MlmParams p(2, 0, 1);
    auto c = subexponential_check(p, 200000, 7);
    CHECK(c.theoretical == doctest::Approx(2.0));
    for (auto [x, v] : c.evaluated) CHECK(v >= 1.0);
    // deterministic given seed
    auto c2 = subexponential_check(p, 200000, 7);
    CHECK(c2.evaluated == c.evaluated);
    CHECK_THROWS(subexponential_check(p, 1000, 7));
}

TEST_CASE("all checks finite across the grid") {
    for (MlmParams p : {MlmParams(0.5, -0.9, 0.001), MlmParams(3, 5, 1e6),
                        MlmParams(2, -0.36, 30.5)}) {
        auto checks = run_all_tail_checks(p, 1, 100000);
        REQUIRE(checks.size() == 7);
        for (const auto& c : checks) {
            for (auto [x, v] : c.evaluated) {
                CHECK(std::isfinite(x));
                CHECK(std::isfinite(v));
            }
        }
    }
}
