// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// required failure. The real-data check (12) is optional and runs only when
// MLMFIT_EGO_TWITTER points at the downloaded edge list.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <vector>

#include "mlmfit/estimation.hpp"
#include "mlmfit/gof.hpp"
#include "mlmfit/graph_io.hpp"
#include "mlmfit/tailprops.hpp"

using namespace mlmfit;

namespace {

int failures = 0;

void report(int id, bool ok, const char* what) {
    std::printf("%s  criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, what);
    if (!ok) ++failures;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(la + (lb - la) * i / double(n - 1));
    return g;
}

DegreeHistogram discretize(const std::vector<double>& xs) {
    std::map<long long, long long> freq;
    for (double x : xs) ++freq[std::max(1LL, std::llround(x))];
    DegreeHistogram h;
    for (auto [d, c] : freq) {
        h.rows.push_back({d, c});
        h.n += c;
    }
    return h;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// 1. Lomax degeneracy
void criterion1() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ua(0.3, 3.0), us(0.2, 50.0);
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
        double a = ua(rng), s = us(rng);
        MlmParams p(a, 0, s);
        for (double x : log_grid(1e-3 * s, 1e6 * s, 1000)) {
            double lomax = 1.0 - std::exp(-a * std::log1p(x / s));
            if (std::fabs(mlm_cdf(p, x) - lomax) > 1e-12) { ok = false; break; }
        }
    }
    report(1, ok, "Lomax degeneracy |F_MLM(a,0,s) - F_Lomax| <= 1e-12");
}

// 2. score vs finite differences
void criterion2() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> ua(0.4, 2.5), ub(-0.8, 1.5), us(0.5, 30.0);
    bool ok = true;
    for (int rep = 0; rep < 50 && ok; ++rep) {
        MlmParams truth(ua(rng), ub(rng), us(rng));
        auto s = Sample::from_values(mlm_sample(truth, 100, rng));
        MlmParams q(ua(rng), ub(rng), us(rng));
        auto g = mlm_score(s, q);
        double th[3] = {q.alpha, q.beta, q.sigma};
        for (int j = 0; j < 3; ++j) {
            double h = 1e-6 * std::max(1.0, std::fabs(th[j]));
            double hi[3] = {th[0], th[1], th[2]}, lo[3] = {th[0], th[1], th[2]};
            hi[j] += h;
            lo[j] -= h;
            double fd = (mlm_loglik(s, MlmParams(hi[0], hi[1], hi[2])) -
                         mlm_loglik(s, MlmParams(lo[0], lo[1], lo[2]))) / (2 * h);
            if (std::fabs(g[j] - fd) / std::max(std::fabs(g[j]), 1e-3 * s.n) > 1e-6)
                ok = false;
        }
    }
    report(2, ok, "score components match central finite differences (rel 1e-6)");
}

// 3. information matrix vs numeric Hessian
void criterion3() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> ua(0.4, 2.5), ub(-0.7, 1.2), us(0.5, 30.0);
    bool ok = true;
    for (int rep = 0; rep < 10 && ok; ++rep) {
        MlmParams p(ua(rng), ub(rng), us(rng));
        auto s = Sample::from_values(mlm_sample(p, 200, rng));
        auto F = observed_information(s, p);
        if (F(0, 0) != s.n / (p.alpha * p.alpha)) ok = false;
        double th[3] = {p.alpha, p.beta, p.sigma};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double hi = 1e-4 * std::max(1.0, std::fabs(th[i]));
                double hj = 1e-4 * std::max(1.0, std::fabs(th[j]));
                auto at = [&](double di, double dj) {
                    double t[3] = {th[0], th[1], th[2]};
                    t[i] += di;
                    t[j] += dj;
                    return mlm_loglik(s, MlmParams(t[0], t[1], t[2]));
                };
                double d2 = (i == j)
                    ? (at(hi, 0) - 2 * at(0, 0) + at(-hi, 0)) / (hi * hi)
                    : (at(hi, hj) - at(hi, -hj) - at(-hi, hj) + at(-hi, -hj)) /
                          (4 * hi * hj);
                if (std::fabs(-d2 - F(i, j)) /
                        std::max(std::fabs(F(i, j)), 1e-6 * s.n) > 1e-4)
                    ok = false;
            }
        }
    }
    report(3, ok, "information matrix matches numeric Hessian; F[0][0] = n/a^2");
}

// 4. quantile round trip
void criterion4() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> ua(0.3, 3.0), ub(-0.9, 2.0), us(0.2, 50.0);
    bool ok = true;
    for (int rep = 0; rep < 50 && ok; ++rep) {
        MlmParams p(ua(rng), ub(rng), us(rng));
        for (double u : {1e-6, 0.01, 0.5, 0.99, 1 - 1e-6})
            if (std::fabs(mlm_cdf(p, mlm_quantile(p, u)) - u) > 1e-10) ok = false;
    }
    report(4, ok, "quantile round trip |F(Q(u)) - u| <= 1e-10");
}

// 5. parameter recovery and CI coverage
void criterion5() {
    MlmParams truth(2.0, -0.36, 30.5);
    const int runs = 100;
    std::vector<double> rel[3];
    int covered[3] = {0, 0, 0};
    int converged = 0;
    FitOptions opts;
    opts.restarts = 2;
    for (int r = 0; r < runs; ++r) {
        std::mt19937_64 rng(500 + r);
        auto s = Sample::from_values(mlm_sample(truth, 100000, rng));
        auto fit = fit_mlm(s, MlmParams(1, 0, 1), opts);
        if (!fit.converged) continue;
        ++converged;
        double tv[3] = {truth.alpha, truth.beta, truth.sigma};
        for (int j = 0; j < 3; ++j) {
            rel[j].push_back(std::fabs(fit.estimates[j] - tv[j]) / std::fabs(tv[j]));
            if (fit.intervals.size() == 3 && fit.intervals[j].first <= tv[j] &&
                tv[j] <= fit.intervals[j].second)
                ++covered[j];
        }
    }
    bool ok = converged == runs;
    for (int j = 0; j < 3; ++j) {
        ok = ok && median(rel[j]) <= 0.05;
        ok = ok && covered[j] >= 90 && covered[j] <= 99;
    }
    std::printf("      (n=100000, 100 seeds: median rel err %.4f/%.4f/%.4f, coverage %d/%d/%d)\n",
                median(rel[0]), median(rel[1]), median(rel[2]), covered[0],
                covered[1], covered[2]);
    report(5, ok, "parameter recovery: median rel err <= 5%, 95% CI coverage in [90,99]/100");
}

// 6. profile-likelihood limits
void criterion6() {
    auto s = Sample::from_values({1, 1, 2, 3, 5, 8, 13, 40, 100});
    double xbar = s.mean();
    double big = 1e8 * 100;
    bool ok = cv(s) > 1;
    double l0 = std::log(1.0 / xbar) - 1.0;
    ok = ok && std::fabs(lomax_profile_loglik(s, big) - l0) <= 1e-3 * std::fabs(l0);
    ok = ok && std::fabs(lomax_alpha_of_sigma(s, big) / big - 1.0 / xbar) <=
                   1e-3 / xbar;
    double sg = 1e6 * 100, h = 1e-3 * sg;
    double lp = (lomax_profile_loglik(s, sg + h) - lomax_profile_loglik(s, sg - h)) / (2 * h);
    double sx = 0, sxx = 0;
    for (double x : s.values) { sx += x; sxx += x * x; }
    double target = 0.5 * sxx / sx - xbar;
    ok = ok && std::fabs(-sg * sg * lp - target) <= 0.01 * target;
    report(6, ok, "profile-likelihood limits at small and large sigma");
}

// 7. existence gate
void criterion7() {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> ua(0.8, 2.5), ub(-0.6, 1.0), us(1.0, 40.0);
    bool ok = true;
    int done = 0;
    while (done < 50) {
        MlmParams truth(ua(rng), ub(rng), us(rng));
        auto s = Sample::from_values(mlm_sample(truth, 2000, rng));
        if (cv(s) <= 1) continue;
        ++done;
        auto fit = fit_mlm(s);
        ok = ok && fit.converged && fit.existence_ok;
        ok = ok && fit.grad_norm <= 1e-6 * s.n;
        for (double e : fit.estimates) ok = ok && std::isfinite(e) && e != 0;
        ok = ok && fit.estimates[0] > 0 && fit.estimates[1] > -1 && fit.estimates[2] > 0;
    }
    // low-variation sample must be flagged
    std::vector<double> flat;
    std::mt19937_64 r2(7);
    std::uniform_real_distribution<double> noise(9.5, 10.5);
    for (int i = 0; i < 500; ++i) flat.push_back(noise(r2));
    auto sf = Sample::from_values(flat);
    ok = ok && cv(sf) <= 1 && !mle_existence_check(sf).finite_max_guaranteed;
    report(7, ok, "existence gate: 50 CV>1 fits converge interior; CV<=1 flagged");
}

// 8. extreme-value limits at x = sigma*10^10
void criterion8() {
    std::mt19937_64 rng(108);
    // tail equivalence converges like |alpha*beta|/log(x/sigma); at the
    // pinned abscissa the 5e-3 tolerance bounds the draw range (see notes)
    std::uniform_real_distribution<double> ua(0.5, 2.0), ub(-0.15, 0.15), us(0.5, 50.0);
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        MlmParams p(ua(rng), ub(rng), us(rng));
        auto rv = class_D_check(p, 1e-3);  // (1-F(x))/(1-F(2x)) -> 2^alpha
        auto te = tail_equivalence_check(p, 5e-3);
        auto cl = class_L_check(p, 1.0, 1e-6);
        auto vm = von_mises_check(p, 1e-3);
        ok = ok && rv.converged && te.converged && cl.converged && vm.converged;
    }
    report(8, ok, "extreme-value limits at sigma*10^10 (class D, tail equivalence, class L, Von Mises)");
}

// 9. subexponentiality Monte Carlo
void criterion9() {
    auto c = subexponential_check(MlmParams(2, 0, 1), 1000000, 109);
    bool ok = !c.inconclusive && c.evaluated.size() >= 2;
    if (ok) {
        double at999 = c.evaluated[1].second;  // 0.999 quantile entry
        ok = at999 >= 1.5 && at999 <= 2.5;
        std::printf("      (convolution ratio at 0.999 quantile: %.3f)\n", at999);
    }
    report(9, ok, "subexponential convolution ratio in [1.5, 2.5] at n=10^6");
}

// 10. bootstrap calibration
void criterion10() {
    // a fitted MLM whose sub-integer mass is negligible, so the rounded
    // data genuinely follows the continuous null (see notes)
    std::mt19937_64 rng(99);
    auto h0 = discretize(mlm_sample(MlmParams(2, 0.5, 50), 2000, rng));
    auto f0 = fit_mlm(Sample::from_histogram(h0));
    MlmParams gen = std::get<Mlm>(f0.model).p;

    int pass = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 r(1000 + t);
        auto h = discretize(mlm_sample(gen, 2000, r));
        auto fit = fit_mlm(Sample::from_histogram(h));
        if (!fit.converged) continue;
        auto rep = bootstrap_pvalue(h, fit, 200, 9000 + t);
        if (rep.p_value >= 0.05) ++pass;
    }
    std::printf("      (p >= 0.05 in %d/%d trials)\n", pass, trials);
    report(10, pass >= int(0.9 * trials), "bootstrap calibration: p >= 0.05 in >= 90% of trials");
}

// 11. model ranking
void criterion11() {
    int kld_first = 0, err_le = 0;
    const int seeds = 10;
    for (int sd = 0; sd < seeds; ++sd) {
        std::mt19937_64 rng(1100 + sd);
        auto h = discretize(mlm_sample(MlmParams(2, 0.5, 50), 50000, rng));
        auto rep = compare_models(h, all_families());
        double kmlm = -1, rmlm = 0, mmlm = 0, rlomax = 0, mlomax = 0, ktop = -1;
        for (const auto& row : rep.rows) {
            if (row.ok && ktop < 0) ktop = row.kld;
            if (row.family == Family::Mlm && row.ok) {
                kmlm = row.kld;
                rmlm = row.rmse;
                mmlm = row.mae;
            }
            if (row.family == Family::Lomax && row.ok) {
                rlomax = row.rmse;
                mlomax = row.mae;
            }
        }
        if (kmlm >= 0 && kmlm <= ktop) ++kld_first;
        if (kmlm >= 0 && rmlm <= rlomax && mmlm <= mlomax) ++err_le;
    }
    std::printf("      (MLM first by KLD in %d/%d, RMSE/MAE <= Lomax in %d/%d)\n",
                kld_first, seeds, err_le, seeds);
    report(11, kld_first >= 8 && err_le >= 8,
           "model ranking on MLM data: KLD first and RMSE/MAE <= Lomax in >= 8/10 seeds");
}

// 12. optional real-data check
void criterion12() {
    const char* path = std::getenv("MLMFIT_EGO_TWITTER");
    if (!path || !*path) {
        std::printf("SKIP  criterion 12: optional ego-Twitter check (set MLMFIT_EGO_TWITTER to run)\n");
        return;
    }
    std::ifstream in(path);
    if (!in) {
        std::printf("SKIP  criterion 12: cannot open %s\n", path);
        return;
    }
    auto h = degree_histogram_stream(in, DegreeMode::In);
    auto s = Sample::from_histogram(h);
    double c = cv(s);
    auto fit = fit_mlm(s);
    bool ok = fit.converged;
    ok = ok && std::fabs(c - 2.6654) <= 0.01 * 2.6654;
    double ref[3] = {1.9922, -0.3591, 30.543};
    for (int j = 0; j < 3; ++j)
        ok = ok && std::fabs(fit.estimates[j] - ref[j]) <= 0.10 * std::fabs(ref[j]);
    std::printf("      (cv=%.4f, fit=(%.4f, %.4f, %.3f))\n", c, fit.estimates[0],
                fit.estimates[1], fit.estimates[2]);
    report(12, ok, "ego-Twitter: CV within 1%, parameters within 10% of published fit");
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
