#ifndef MLMFIT_DISTRIBUTIONS_HPP
#define MLMFIT_DISTRIBUTIONS_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mlmfit {

// Parameters of the modified Lomax distribution.
// Survival S(x) = exp[-alpha * w^{beta+1} / (1+w)^beta], w = log(1 + x/sigma).
// beta = 0 recovers the Lomax distribution.
struct MlmParams {
    double alpha; // tail index, > 0
    double beta;  // nonlinearity shape, > -1
    double sigma; // scale, > 0

    MlmParams(double alpha_, double beta_, double sigma_);
};

// log S(x); the workhorse for tail computations, exact far past the
// point where S itself underflows.
double mlm_log_survival(const MlmParams& p, double x);

double mlm_cdf(const MlmParams& p, double x);
double mlm_pdf(const MlmParams& p, double x);
double mlm_logpdf(const MlmParams& p, double x);

// Numeric inverse of the CDF. Solves w^{beta+1}/(1+w)^beta = -log(1-u)/alpha
// by safeguarded Newton; round-trip |cdf(quantile(u)) - u| <= 1e-10.
double mlm_quantile(const MlmParams& p, double u);

// Inverse-transform sampling. Throws std::invalid_argument on n == 0.
std::vector<double> mlm_sample(const MlmParams& p, std::size_t n,
                               std::mt19937_64& rng);

// The exponent function m(x) = alpha * (log(1+x) / (1+log(1+x)))^beta.
struct HlmShapeFn {
    double alpha;
    double beta;

    HlmShapeFn(double alpha_, double beta_);

    double m(double x) const;
    double m_prime(double x) const;
};

struct HlmConditionReport {
    bool positive_ok;          // m(x) > 0 on the grid
    bool limit_ok;             // m -> alpha at the largest grid points
    bool derivative_ok;        // m'/m >= -1/((1+x) log(1+x)) everywhere
    double limit_rel_err;      // |m(x_max)/alpha - 1|
    double worst_margin;       // min over grid of m'/m + 1/((1+x)log(1+x))
    int approach_direction;    // +1 above, -1 below, 0 constant
    bool all_ok() const { return positive_ok && limit_ok && derivative_ok; }
};

HlmConditionReport hlm_conditions_check(const HlmShapeFn& s,
                                        const std::vector<double>& grid,
                                        double limit_tol = 1e-2);

// ---------------------------------------------------------------------------
// Competitor families. Standard continuous forms except Poisson.

struct Mlm { MlmParams p; };
struct Lomax { double alpha; double sigma; };                  // S = (1+x/sigma)^-alpha
struct PowerLaw { double alpha; double xmin; };                // p ~ x^-alpha on [xmin,inf), alpha > 1
struct Pareto { double alpha; double xm; };                    // Pareto I, p = a xm^a / x^{a+1}
struct LogNormal { double mu; double s; };
struct Exponential { double lambda; };
struct PowerLawCutoff { double alpha; double lambda; double xmin; }; // p ~ x^-a e^{-l x}
struct Poisson { double lambda; };

using DistributionModel = std::variant<Mlm, Lomax, PowerLaw, Pareto,
                                       LogNormal, Exponential,
                                       PowerLawCutoff, Poisson>;

// Validates parameter constraints; throws std::invalid_argument.
void validate_model(const DistributionModel& m);

std::string model_name(const DistributionModel& m);

// Lower edge of the support (0 for Lomax/Mlm/LogNormal/Exponential/Poisson,
// xmin/xm for the power laws).
double model_lower_support(const DistributionModel& m);

// Log density (log mass at round(x) for Poisson); -inf off support.
double model_logpdf(const DistributionModel& m, double x);

double model_cdf(const DistributionModel& m, double x);
double model_log_survival(const DistributionModel& m, double x);

std::vector<double> model_sample(const DistributionModel& m, std::size_t n,
                                 std::mt19937_64& rng);

// P(degree == k) under interval discretization: F(k+1/2) - F(max(k-1/2, lo))
// for continuous families, the exact PMF for Poisson. k >= 1.
double interval_pmf(const DistributionModel& m, long long k);

} // namespace mlmfit

#endif
