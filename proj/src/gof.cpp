#include "mlmfit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace mlmfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t replicate_seed(std::uint64_t seed, int r, int attempt) {
    return splitmix64(splitmix64(seed ^ (std::uint64_t(r) << 20)) +
                      std::uint64_t(attempt));
}

Family family_of(const DistributionModel& m) {
    return static_cast<Family>(m.index());
}

} // namespace

BinScheme build_bins(const DegreeHistogram& h, const DistributionModel& m,
                     double min_expected) {
    if (h.rows.empty()) throw std::invalid_argument("build_bins: empty histogram");
    const double n = double(h.n);
    if (n < 2 * min_expected)
        throw std::invalid_argument("build_bins: total expected mass too small");

    BinScheme b;
    b.edges.push_back(0.5);
    const long long maxdeg = h.max_degree();
    std::size_t row = 0;
    // Sampling rounds with a floor of 1, so any model mass below 0.5 shows
    // up at degree 1; fold it into the first bin's expectation.
    double acc_exp = n * model_cdf(m, 0.5), acc_obs = 0;
    for (long long k = 1; k <= maxdeg; ++k) {
        acc_exp += n * interval_pmf(m, k);
        if (row < h.rows.size() && h.rows[row].degree == k)
            acc_obs += double(h.rows[row++].count);
        if (acc_exp >= min_expected) {
            b.edges.push_back(double(k) + 0.5);
            b.expected.push_back(acc_exp);
            b.observed.push_back(acc_obs);
            acc_exp = acc_obs = 0;
        }
    }
    // open tail bin from the last closed edge
    double last_edge = b.edges.back();
    double tail_exp = n * std::exp(model_log_survival(m, last_edge));
    double tail_obs = acc_obs;  // remaining rows already consumed above
    if (tail_exp >= min_expected || b.expected.empty()) {
        b.edges.push_back(kInf);
        b.expected.push_back(tail_exp);
        b.observed.push_back(tail_obs);
    } else {
        // merge into the previous bin
        b.edges.back() = kInf;
        b.expected.back() += tail_exp;
        b.observed.back() += tail_obs;
    }
    return b;
}

double chi_square_stat(const BinScheme& b) {
    double t = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        double e = b.expected[i];
        if (e <= 0) continue;
        double d = b.observed[i] - e;
        t += d * d / e;
    }
    return t;
}

namespace {

DegreeHistogram discretize_draws(const std::vector<double>& xs) {
    std::map<long long, long long> freq;
    for (double x : xs) {
        long long k = std::max(1LL, std::llround(x));
        ++freq[k];
    }
    DegreeHistogram h;
    for (auto [d, c] : freq) {
        h.rows.push_back({d, c});
        h.n += c;
    }
    return h;
}

} // namespace

GofReport bootstrap_pvalue(const DegreeHistogram& h, const FitResult& fit,
                           int B, std::uint64_t seed, bool refit, int threads,
                           double min_expected) {
    if (B < 99) throw std::invalid_argument("bootstrap_pvalue: B must be >= 99");
    if (!fit.converged)
        throw std::invalid_argument("bootstrap_pvalue: base fit did not converge");

    BinScheme obs_bins = build_bins(h, fit.model, min_expected);
    const double t_obs = chi_square_stat(obs_bins);
    const std::size_t n = std::size_t(h.n);
    const Family fam = family_of(fit.model);

    FitOptions refit_opts;
    refit_opts.restarts = 3;
    refit_opts.compute_covariance = false;

    const int max_redraws = std::max(1, B / 10);
    std::vector<double> stats(std::size_t(B),
                              std::numeric_limits<double>::quiet_NaN());
    std::vector<int> attempts(std::size_t(B), 0);

    auto run_replicate = [&](int r) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 25) return;  // leave NaN; counted as failure below
            std::mt19937_64 rng(replicate_seed(seed, r, attempt));
            std::vector<double> draws;
            try {
                draws = model_sample(fit.model, n, rng);
            } catch (const std::exception&) {
                attempts[std::size_t(r)] = attempt + 1;
                return;
            }
            DegreeHistogram hr = discretize_draws(draws);
            try {
                DistributionModel mr = fit.model;
                if (refit) {
                    Sample sr = Sample::from_histogram(hr);
                    FitResult fr = fit_model(sr, fam, refit_opts);
                    if (!fr.converged) { attempts[std::size_t(r)] = attempt + 1; continue; }
                    mr = fr.model;
                }
                BinScheme br = build_bins(hr, mr, min_expected);
                stats[std::size_t(r)] = chi_square_stat(br);
                attempts[std::size_t(r)] = attempt;
                return;
            } catch (const std::exception&) {
                attempts[std::size_t(r)] = attempt + 1;
                continue;
            }
        }
    };

    if (threads <= 1) {
        for (int r = 0; r < B; ++r) run_replicate(r);
    } else {
        std::vector<std::thread> pool;
        int nt = std::min(threads, B);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t]() {
                for (int r = t; r < B; r += nt) run_replicate(r);
            });
        for (auto& th : pool) th.join();
    }

    int redraws = 0;
    int exceed = 0;
    int done = 0;
    for (int r = 0; r < B; ++r) {
        redraws += attempts[std::size_t(r)];
        if (std::isnan(stats[std::size_t(r)])) continue;
        ++done;
        if (stats[std::size_t(r)] >= t_obs) ++exceed;
    }
    if (done < B || redraws > max_redraws)
        throw std::runtime_error(
            "bootstrap_pvalue: too many replicate refit failures");

    GofReport rep;
    rep.statistic = t_obs;
    rep.p_value = double(1 + exceed) / double(B + 1);
    rep.replicates = B;
    rep.refit_per_replicate = refit;
    rep.seed = seed;
    rep.bins = int(obs_bins.size());
    rep.redraws = redraws;
    return rep;
}

double kld(const DegreeHistogram& h, const DistributionModel& m) {
    if (h.rows.empty()) throw std::invalid_argument("kld: empty histogram");
    const double n = double(h.n);
    double qsum = 0;
    std::vector<double> q(h.rows.size());
    for (std::size_t i = 0; i < h.rows.size(); ++i) {
        q[i] = std::max(interval_pmf(m, h.rows[i].degree), 1e-12);
        qsum += q[i];
    }
    double d = 0;
    for (std::size_t i = 0; i < h.rows.size(); ++i) {
        double p = double(h.rows[i].count) / n;
        d += p * std::log(p / (q[i] / qsum));
    }
    return std::max(d, 0.0);
}

std::pair<double, double> rmse_mae(const DegreeHistogram& h,
                                   const DistributionModel& m) {
    if (h.rows.empty()) throw std::invalid_argument("rmse_mae: empty histogram");
    const double n = double(h.n);
    double se = 0, ae = 0;
    for (const auto& r : h.rows) {
        double pred = n * interval_pmf(m, r.degree);
        double d = double(r.count) - pred;
        se += d * d;
        ae += std::fabs(d);
    }
    double k = double(h.rows.size());
    return {std::sqrt(se / k), ae / k};
}

MetricsReport compare_models(const DegreeHistogram& h,
                             const std::vector<Family>& families,
                             const FitOptions& opts) {
    Sample s = Sample::from_histogram(h);
    MetricsReport rep;
    for (Family f : families) {
        MetricsRow row;
        row.family = f;
        try {
            row.fit = fit_model(s, f, opts);
            if (!row.fit.converged)
                throw std::runtime_error(row.fit.message.empty()
                                             ? "fit did not converge"
                                             : row.fit.message);
            row.kld = kld(h, row.fit.model);
            auto [r, a] = rmse_mae(h, row.fit.model);
            row.rmse = r;
            row.mae = a;
            row.loglik = row.fit.loglik;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rep.rows.push_back(std::move(row));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const MetricsRow& a, const MetricsRow& b) {
                         if (a.ok != b.ok) return a.ok;
                         return a.kld < b.kld;
                     });
    return rep;
}

} // namespace mlmfit
