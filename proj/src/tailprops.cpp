#include "mlmfit/tailprops.hpp"

#include <algorithm>
#include <cmath>

namespace mlmfit {

namespace {

double survival_ratio(const MlmParams& p, double num_x, double den_x) {
    return std::exp(mlm_log_survival(p, num_x) - mlm_log_survival(p, den_x));
}

void finish(LimitCheck& c, double tol) {
    double scale = std::max(std::fabs(c.theoretical), 1e-300);
    c.final_rel_err = std::fabs(c.evaluated.back().second - c.theoretical) / scale;
    c.converged = c.final_rel_err <= tol;
}

} // namespace

std::vector<double> tail_grid(const MlmParams& p) {
    std::vector<double> g;
    for (int j = 2; j <= 10; ++j) g.push_back(p.sigma * std::pow(10.0, j));
    return g;
}

LimitCheck regular_variation_check(const MlmParams& p, double t, double tol) {
    if (!(t > 0)) throw std::invalid_argument("regular_variation_check: t must be > 0");
    LimitCheck c;
    c.name = "regular_variation(t=" + std::to_string(t) + ")";
    c.theoretical = std::pow(t, -p.alpha);
    for (double x : tail_grid(p))
        c.evaluated.emplace_back(x, survival_ratio(p, t * x, x));
    finish(c, tol);
    return c;
}

LimitCheck tail_equivalence_check(const MlmParams& p, double tol) {
    LimitCheck c;
    c.name = "tail_equivalence";
    c.theoretical = std::exp(p.alpha * p.beta);
    for (double x : tail_grid(p)) {
        double v = std::exp(mlm_log_survival(p, x) +
                            p.alpha * std::log1p(x / p.sigma));
        c.evaluated.emplace_back(x, v);
    }
    finish(c, tol);
    return c;
}

LimitCheck heavy_tail_check(const MlmParams& p, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("heavy_tail_check: lambda must be > 0");
    LimitCheck c;
    c.name = "heavy_tail(lambda=" + std::to_string(lambda) + ")";
    c.theoretical = std::numeric_limits<double>::infinity();
    bool increasing = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : tail_grid(p)) {
        double v = lambda * x + mlm_log_survival(p, x);  // log of e^{lx} S(x)
        if (v <= prev) increasing = false;
        prev = v;
        c.evaluated.emplace_back(x, v);
    }
    c.converged = increasing && prev > 100.0;
    c.final_rel_err = c.converged ? 0.0 : 1.0;
    return c;
}

LimitCheck class_D_check(const MlmParams& p, double tol) {
    LimitCheck c;
    c.name = "class_D";
    c.theoretical = std::pow(2.0, p.alpha);
    for (double x : tail_grid(p))
        c.evaluated.emplace_back(x, survival_ratio(p, x, 2 * x));
    finish(c, tol);
    return c;
}

LimitCheck class_L_check(const MlmParams& p, double y, double tol) {
    LimitCheck c;
    c.name = "class_L(y=" + std::to_string(y) + ")";
    c.theoretical = 1.0;
    for (double x : tail_grid(p))
        c.evaluated.emplace_back(x, survival_ratio(p, x + y, x));
    finish(c, tol);
    return c;
}

LimitCheck subexponential_check(const MlmParams& p, std::size_t n,
                                std::uint64_t seed) {
    if (n < 100000)
        throw std::invalid_argument("subexponential_check: n must be >= 1e5");
    LimitCheck c;
    c.name = "subexponential";
    c.theoretical = 2.0;
    std::mt19937_64 rng(seed);
    std::vector<double> x1 = mlm_sample(p, n, rng);
    std::vector<double> x2 = mlm_sample(p, n, rng);
    std::vector<double> all;
    all.reserve(2 * n);
    all.insert(all.end(), x1.begin(), x1.end());
    all.insert(all.end(), x2.begin(), x2.end());
    std::sort(all.begin(), all.end());

    double last_est = 0, last_se = 0;
    long long last_tail = 0;
    for (double q : {0.99, 0.999, 0.9999}) {
        double threshold = all[std::size_t(q * double(all.size() - 1))];
        long long sum_exceed = 0, single_exceed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (x1[i] + x2[i] > threshold) ++sum_exceed;
            if (x1[i] > threshold) ++single_exceed;
        }
        if (single_exceed == 0) continue;
        double ps = double(sum_exceed) / double(n);
        double px = double(single_exceed) / double(n);
        double est = ps / px;
        // delta-method SE of the ratio from two binomial proportions
        double se = est * std::sqrt((1 - ps) / (ps * double(n)) +
                                    (1 - px) / (px * double(n)));
        c.evaluated.emplace_back(threshold, est);
        last_est = est;
        last_se = se;
        last_tail = single_exceed;
    }
    if (last_tail < 30 || c.evaluated.empty()) {
        c.inconclusive = true;
        c.converged = false;
        c.final_rel_err = 1.0;
        return c;
    }
    c.final_rel_err = std::fabs(last_est - 2.0) / 2.0;
    c.converged =
        last_est + 3 * last_se >= 1.5 && last_est - 3 * last_se <= 2.5;
    return c;
}

LimitCheck von_mises_check(const MlmParams& p, double tol) {
    LimitCheck c;
    c.name = "von_mises";
    c.theoretical = 0.0;
    auto ratio = [&](double x) {
        // (1 - F)/(x f) in log space
        return std::exp(mlm_log_survival(p, x) - std::log(x) - mlm_logpdf(p, x));
    };
    const double k = 1.05;  // multiplicative step for the central difference
    for (double x : tail_grid(p)) {
        double drdx = (ratio(x * k) - ratio(x / k)) / (x * k - x / k);
        c.evaluated.emplace_back(x, x * drdx);
    }
    double scale = 1.0;  // limit is 0, compare absolutely
    c.final_rel_err = std::fabs(c.evaluated.back().second) / scale;
    c.converged = c.final_rel_err <= tol;
    return c;
}

std::vector<LimitCheck> run_all_tail_checks(const MlmParams& p,
                                            std::uint64_t seed,
                                            std::size_t subexp_n) {
    std::vector<LimitCheck> out;
    out.push_back(regular_variation_check(p, 2.0));
    out.push_back(tail_equivalence_check(p));
    out.push_back(heavy_tail_check(p, 0.01));
    out.push_back(class_D_check(p));
    out.push_back(class_L_check(p));
    out.push_back(von_mises_check(p));
    out.push_back(subexponential_check(p, std::max<std::size_t>(subexp_n, 100000), seed));
    return out;
}

} // namespace mlmfit
