#ifndef MLMFIT_TAILPROPS_HPP
#define MLMFIT_TAILPROPS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlmfit/distributions.hpp"

namespace mlmfit {

// One numerically evaluated limit along an increasing grid.
struct LimitCheck {
    std::string name;
    double theoretical = 0;
    std::vector<std::pair<double, double>> evaluated;  // (x, value)
    bool converged = false;
    bool inconclusive = false;
    double final_rel_err = 0;
};

// Default evaluation grid sigma * 10^{2..10}.
std::vector<double> tail_grid(const MlmParams& p);

// (1 - F(t x)) / (1 - F(x)) -> t^{-alpha}  (regular variation / Frechet MDA)
LimitCheck regular_variation_check(const MlmParams& p, double t,
                                   double tol = 1e-3);

// (1 - F(x)) * (1 + x/sigma)^alpha -> e^{alpha beta}  (tail equivalence)
LimitCheck tail_equivalence_check(const MlmParams& p, double tol = 5e-3);

// e^{lambda x} (1 - F(x)) -> inf; divergence proxy: log-survival + lambda x
// increasing and > 100 at the end of the grid.
LimitCheck heavy_tail_check(const MlmParams& p, double lambda);

// (1 - F(x)) / (1 - F(2x)) -> 2^alpha  (dominated variation, class D)
LimitCheck class_D_check(const MlmParams& p, double tol = 1e-3);

// (1 - F(x+y)) / (1 - F(x)) -> 1  (long tail, class L)
LimitCheck class_L_check(const MlmParams& p, double y = 1.0,
                         double tol = 1e-6);

// Monte Carlo convolution ratio P(X1+X2 > x) / P(X > x) -> 2 at high
// empirical quantiles of X. Deterministic given seed.
LimitCheck subexponential_check(const MlmParams& p, std::size_t n,
                                std::uint64_t seed);

// x d/dx [(1-F)/(x f)] -> 0  (Von Mises condition)
LimitCheck von_mises_check(const MlmParams& p, double tol = 1e-3);

// Everything at once, for the CLI report.
std::vector<LimitCheck> run_all_tail_checks(const MlmParams& p,
                                            std::uint64_t seed = 1,
                                            std::size_t subexp_n = 200000);

} // namespace mlmfit

#endif
