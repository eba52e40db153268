#ifndef MLMFIT_ESTIMATION_HPP
#define MLMFIT_ESTIMATION_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mlmfit/distributions.hpp"
#include "mlmfit/graph_io.hpp"

namespace mlmfit {

// Weighted observations; a plain sample has unit weights, a degree
// histogram contributes each unique degree with its count. The two are
// algebraically identical for every likelihood quantity below.
struct Sample {
    std::vector<double> values;
    std::vector<double> weights;
    double n = 0;  // sum of weights

    static Sample from_values(std::vector<double> xs);
    static Sample from_histogram(const DegreeHistogram& h);

    double mean() const;
    bool degenerate() const;  // all values equal
};

// Population coefficient of variation s/mu with (1/n) variance.
double cv(const Sample& s);

struct ExistenceDiag {
    double cv_value;
    bool finite_max_guaranteed;  // CV > 1
    std::string note;
};

ExistenceDiag mle_existence_check(const Sample& s);

enum class Family {
    Mlm, Lomax, PowerLaw, Pareto, LogNormal, Exponential, PowerLawCutoff, Poisson
};

Family family_from_string(const std::string& s);
std::string family_name(Family f);
std::vector<Family> all_families();

struct FitOptions {
    int restarts = 5;
    int max_iterations = 500;
    double grad_tol = 1e-8;   // relative projected-gradient tolerance
    double step_tol = 1e-12;
    std::uint64_t seed = 12345;
    double ci_level = 0.95;
    bool compute_covariance = true;
};

struct FitResult {
    DistributionModel model = Exponential{1.0};
    std::vector<std::string> param_names;
    std::vector<double> estimates;
    double loglik = 0;  // total (sum over observations)
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0;  // natural-space score inf-norm
    double n = 0;
    Eigen::MatrixXd covariance;  // 0x0 when absent
    bool covariance_pseudo = false;  // pseudo-inverse fallback used
    double ci_level = 0;
    std::vector<std::pair<double, double>> intervals;  // per parameter
    double cv_value = 0;
    bool existence_ok = false;
    std::string message;
};

// --- MLM likelihood machinery -------------------------------------------

double mlm_loglik(const Sample& s, const MlmParams& p);

// Analytic gradient of the total log-likelihood w.r.t. (alpha, beta, sigma).
Eigen::Vector3d mlm_score(const Sample& s, const MlmParams& p);

// Observed information: negated analytic Hessian of the log-likelihood.
Eigen::Matrix3d observed_information(const Sample& s, const MlmParams& p);

// Quasi-Newton fit in (log a, log(1+b), log s) space with multistart.
// Throws std::invalid_argument on degenerate samples; numerical
// non-convergence is reported through FitResult::converged.
FitResult fit_mlm(const Sample& s, const MlmParams& init = MlmParams(1, 0, 1),
                  const FitOptions& opts = {});

// --- Lomax profile likelihood (per-observation convention) --------------

// alpha(sigma) = n / sum_i log(1 + x_i/sigma)
double lomax_alpha_of_sigma(const Sample& s, double sigma);

// l_p(sigma) = log alpha(sigma) - log sigma - 1 - 1/alpha(sigma)
double lomax_profile_loglik(const Sample& s, double sigma);

// --- Other families -------------------------------------------------------

FitResult fit_model(const Sample& s, Family family, const FitOptions& opts = {});

// (Re)computes CIs at level k from the stored covariance; fills
// fit.intervals and fit.ci_level. Requires a covariance.
std::vector<std::pair<double, double>> confidence_intervals(FitResult& fit,
                                                            double k = 0.05);

} // namespace mlmfit

#endif
