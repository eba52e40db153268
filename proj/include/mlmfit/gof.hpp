#ifndef MLMFIT_GOF_HPP
#define MLMFIT_GOF_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mlmfit/distributions.hpp"
#include "mlmfit/estimation.hpp"
#include "mlmfit/graph_io.hpp"

namespace mlmfit {

// Adaptive integer-degree bins: consecutive degrees merged left-to-right
// until the model-expected count reaches min_expected; final bin open.
struct BinScheme {
    std::vector<double> edges;     // size bins+1, first >= 0.5, last = +inf
    std::vector<double> expected;  // model-expected count per bin
    std::vector<double> observed;  // observed count per bin
    std::size_t size() const { return expected.size(); }
};

BinScheme build_bins(const DegreeHistogram& h, const DistributionModel& m,
                     double min_expected = 5.0);

double chi_square_stat(const BinScheme& b);

struct GofReport {
    double statistic = 0;
    double p_value = 0;   // (1 + #{T_r >= T_obs}) / (B + 1)
    int replicates = 0;
    bool refit_per_replicate = true;
    std::uint64_t seed = 0;
    int bins = 0;
    int redraws = 0;      // replicates re-drawn after refit failure
};

// Parametric bootstrap: replicate r draws n values from the fitted model,
// rounds half-away-from-zero with floor 1, optionally refits, and rebuilds
// bins under the replicate's model. Deterministic given (seed, r) and
// independent of thread count.
GofReport bootstrap_pvalue(const DegreeHistogram& h, const FitResult& fit,
                           int B, std::uint64_t seed, bool refit = true,
                           int threads = 1, double min_expected = 5.0);

// KL divergence between the empirical PMF and the model interval PMF
// renormalized over the observed degrees (natural log, q floored at 1e-12).
double kld(const DegreeHistogram& h, const DistributionModel& m);

// Frequency-space errors over observed unique degrees; predictions are
// n * interval_pmf, un-renormalized.
std::pair<double, double> rmse_mae(const DegreeHistogram& h,
                                   const DistributionModel& m);

struct MetricsRow {
    Family family;
    bool ok = false;
    double kld = 0;
    double rmse = 0;
    double mae = 0;
    double loglik = 0;
    FitResult fit;
    std::string error;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;  // sorted by KLD ascending, failures last
};

MetricsReport compare_models(const DegreeHistogram& h,
                             const std::vector<Family>& families,
                             const FitOptions& opts = {});

} // namespace mlmfit

#endif
