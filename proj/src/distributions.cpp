#include "mlmfit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlmfit/special.hpp"

namespace mlmfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// g(w) = w^{beta+1} / (1+w)^beta, strictly increasing for beta > -1.
double log_g(double w, double beta) {
    return (beta + 1) * std::log(w) - beta * std::log1p(w);
}

} // namespace

MlmParams::MlmParams(double alpha_, double beta_, double sigma_)
    : alpha(alpha_), beta(beta_), sigma(sigma_) {
    require(std::isfinite(alpha) && alpha > 0, "MlmParams: alpha must be finite and > 0");
    require(std::isfinite(beta) && beta > -1, "MlmParams: beta must be finite and > -1");
    require(std::isfinite(sigma) && sigma > 0, "MlmParams: sigma must be finite and > 0");
}

double mlm_log_survival(const MlmParams& p, double x) {
    if (!(x >= 0) || !std::isfinite(x))
        throw std::domain_error("mlm_log_survival: x must be finite and >= 0");
    if (x == 0) return 0.0;
    double w = std::log1p(x / p.sigma);
    return -p.alpha * std::exp(log_g(w, p.beta));
}

double mlm_cdf(const MlmParams& p, double x) {
    return -std::expm1(mlm_log_survival(p, x));
}

double mlm_logpdf(const MlmParams& p, double x) {
    if (!std::isfinite(x)) throw std::domain_error("mlm_logpdf: x must be finite");
    if (x <= 0) return -kInf;
    double w = std::log1p(x / p.sigma);
    return std::log(p.alpha) + std::log(p.beta + 1 + w) + p.beta * std::log(w) -
           std::log(p.sigma) - std::log1p(x / p.sigma) -
           (p.beta + 1) * std::log1p(w) - p.alpha * std::exp(log_g(w, p.beta));
}

double mlm_pdf(const MlmParams& p, double x) {
    if (!std::isfinite(x)) throw std::domain_error("mlm_pdf: x must be finite");
    if (x <= 0) return 0.0;  // open support (0, inf)
    return std::exp(mlm_logpdf(p, x));
}

double mlm_quantile(const MlmParams& p, double u) {
    if (!(u > 0 && u < 1))
        throw std::domain_error("mlm_quantile: u must be in (0,1)");
    const double log_target = std::log(-std::log1p(-u) / p.alpha);
    // bracket: g(w) ~ w^{beta+1} near 0, ~ w - beta at infinity
    double lo = 1e-300, hi = std::max(1.0, std::exp(log_target) + std::fabs(p.beta) + 1);
    while (log_g(hi, p.beta) < log_target) hi *= 2;
    double w = std::exp(log_target / (p.beta + 1));  // exact when beta-term absent
    if (!(w > lo && w < hi)) w = std::sqrt(lo) * std::sqrt(hi);
    bool done = false;
    for (int it = 0; it < 200; ++it) {
        double phi = log_g(w, p.beta) - log_target;
        if (std::fabs(phi) <= 1e-13 * std::max(1.0, std::fabs(log_target))) {
            done = true;
            break;
        }
        if (phi > 0) hi = w; else lo = w;
        double dphi = (p.beta + 1 + w) / (w * (1 + w));
        double wn = w - phi / dphi;
        // the root can sit hundreds of decades below 1 (beta near -1, small
        // u), so an out-of-bracket step falls back to geometric bisection
        if (!(wn > lo && wn < hi)) wn = std::sqrt(lo) * std::sqrt(hi);
        double step = std::fabs(wn - w);
        w = wn;
        if (step <= 1e-15 * w) { done = true; break; }
    }
    if (!done)
        throw std::runtime_error("mlm_quantile: iteration did not converge");
    return p.sigma * std::expm1(w);
}

std::vector<double> mlm_sample(const MlmParams& p, std::size_t n,
                               std::mt19937_64& rng) {
    require(n >= 1, "mlm_sample: n must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) {
        double u;
        do { u = unif(rng); } while (u <= 0.0 || u >= 1.0);
        v = mlm_quantile(p, u);
    }
    return out;
}

// --- HLM shape function ---------------------------------------------------

HlmShapeFn::HlmShapeFn(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    require(std::isfinite(alpha) && alpha > 0, "HlmShapeFn: alpha must be > 0");
    require(std::isfinite(beta) && beta > -1, "HlmShapeFn: beta must be > -1");
}

double HlmShapeFn::m(double x) const {
    double L = std::log1p(x);
    return alpha * std::pow(L / (1 + L), beta);
}

double HlmShapeFn::m_prime(double x) const {
    double L = std::log1p(x);
    return alpha * beta / (1 + x) * std::pow(L / (1 + L), beta - 1) /
           ((1 + L) * (1 + L));
}

HlmConditionReport hlm_conditions_check(const HlmShapeFn& s,
                                        const std::vector<double>& grid,
                                        double limit_tol) {
    require(!grid.empty(), "hlm_conditions_check: grid must be nonempty");
    HlmConditionReport rep{};
    rep.positive_ok = true;
    rep.derivative_ok = true;
    rep.worst_margin = kInf;
    for (double x : grid) {
        require(x > 0, "hlm_conditions_check: grid values must be positive");
        double mx = s.m(x);
        if (!(mx > 0)) rep.positive_ok = false;
        double bound = -1.0 / ((1 + x) * std::log1p(x));
        double margin = s.m_prime(x) / mx - bound;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -1e-12) rep.derivative_ok = false;
    }
    double x_max = *std::max_element(grid.begin(), grid.end());
    double m_end = s.m(x_max);
    rep.limit_rel_err = std::fabs(m_end / s.alpha - 1.0);
    rep.limit_ok = rep.limit_rel_err <= limit_tol;
    double diff = m_end - s.alpha;
    rep.approach_direction =
        std::fabs(diff) <= 1e-15 * s.alpha ? 0 : (diff > 0 ? 1 : -1);
    return rep;
}

// --- competitor families --------------------------------------------------

void validate_model(const DistributionModel& m) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Mlm>) {
                (void)v;  // MlmParams validates on construction
            } else if constexpr (std::is_same_v<T, Lomax>) {
                require(v.alpha > 0 && v.sigma > 0, "Lomax: alpha, sigma must be > 0");
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                require(v.alpha > 1, "PowerLaw: alpha must be > 1");
                require(v.xmin >= 1, "PowerLaw: xmin must be >= 1");
            } else if constexpr (std::is_same_v<T, Pareto>) {
                require(v.alpha > 0 && v.xm > 0, "Pareto: alpha, xm must be > 0");
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                require(std::isfinite(v.mu) && v.s > 0, "LogNormal: s must be > 0");
            } else if constexpr (std::is_same_v<T, Exponential>) {
                require(v.lambda > 0, "Exponential: lambda must be > 0");
            } else if constexpr (std::is_same_v<T, PowerLawCutoff>) {
                require(std::isfinite(v.alpha) && v.lambda > 0,
                        "PowerLawCutoff: lambda must be > 0");
                require(v.xmin >= 1, "PowerLawCutoff: xmin must be >= 1");
            } else if constexpr (std::is_same_v<T, Poisson>) {
                require(v.lambda > 0, "Poisson: lambda must be > 0");
            }
        },
        m);
}

std::string model_name(const DistributionModel& m) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Mlm>) return "mlm";
            else if constexpr (std::is_same_v<T, Lomax>) return "lomax";
            else if constexpr (std::is_same_v<T, PowerLaw>) return "powerlaw";
            else if constexpr (std::is_same_v<T, Pareto>) return "pareto";
            else if constexpr (std::is_same_v<T, LogNormal>) return "lognormal";
            else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
            else if constexpr (std::is_same_v<T, PowerLawCutoff>) return "powerlaw_cutoff";
            else return "poisson";
        },
        m);
}

double model_lower_support(const DistributionModel& m) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PowerLaw>) return v.xmin;
            else if constexpr (std::is_same_v<T, Pareto>) return v.xm;
            else if constexpr (std::is_same_v<T, PowerLawCutoff>) return v.xmin;
            else return 0.0;
        },
        m);
}

namespace {

double plc_log_norm(const PowerLawCutoff& v) {
    // Z = lambda^{alpha-1} Gamma(1-alpha, lambda xmin)
    return (v.alpha - 1) * std::log(v.lambda) +
           log_upper_incomplete_gamma(1 - v.alpha, v.lambda * v.xmin);
}

double poisson_logpmf(double lambda, long long k) {
    if (k < 0) return -kInf;
    return k * std::log(lambda) - lambda - std::lgamma(double(k) + 1);
}

double poisson_cdf(double lambda, double x) {
    if (x < 0) return 0.0;
    long long kmax = static_cast<long long>(std::floor(x));
    if (double(kmax) <= lambda + 10 * std::sqrt(lambda) + 50) {
        double sum = 0;
        for (long long j = 0; j <= kmax; ++j)
            sum += std::exp(poisson_logpmf(lambda, j));
        return std::min(sum, 1.0);
    }
    // deep right tail: accumulate the survival instead
    double tail = 0;
    for (long long j = kmax + 1;; ++j) {
        double t = std::exp(poisson_logpmf(lambda, j));
        tail += t;
        if (t < tail * 1e-16 || t < 1e-300) break;
    }
    return std::max(0.0, 1.0 - tail);
}

} // namespace

double model_logpdf(const DistributionModel& m, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Mlm>) {
                return x > 0 ? mlm_logpdf(v.p, x) : -kInf;
            } else if constexpr (std::is_same_v<T, Lomax>) {
                if (x < 0) return -kInf;
                return std::log(v.alpha) - std::log(v.sigma) -
                       (v.alpha + 1) * std::log1p(x / v.sigma);
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                if (x < v.xmin) return -kInf;
                return std::log(v.alpha - 1) - std::log(v.xmin) -
                       v.alpha * std::log(x / v.xmin);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x < v.xm) return -kInf;
                return std::log(v.alpha) + v.alpha * std::log(v.xm) -
                       (v.alpha + 1) * std::log(x);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0) return -kInf;
                double z = (std::log(x) - v.mu) / v.s;
                return -0.5 * z * z - std::log(x * v.s) - 0.5 * std::log(2 * M_PI);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (x < 0) return -kInf;
                return std::log(v.lambda) - v.lambda * x;
            } else if constexpr (std::is_same_v<T, PowerLawCutoff>) {
                if (x < v.xmin) return -kInf;
                return -v.alpha * std::log(x) - v.lambda * x - plc_log_norm(v);
            } else {
                return poisson_logpmf(v.lambda, std::llround(x));
            }
        },
        m);
}

double model_log_survival(const DistributionModel& m, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Mlm>) {
                return mlm_log_survival(v.p, std::max(x, 0.0));
            } else if constexpr (std::is_same_v<T, Lomax>) {
                if (x <= 0) return 0.0;
                return -v.alpha * std::log1p(x / v.sigma);
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                if (x <= v.xmin) return 0.0;
                return (1 - v.alpha) * std::log(x / v.xmin);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x <= v.xm) return 0.0;
                return -v.alpha * std::log(x / v.xm);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0) return 0.0;
                double z = (std::log(x) - v.mu) / (v.s * std::sqrt(2.0));
                return std::log(0.5 * std::erfc(z));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return x <= 0 ? 0.0 : -v.lambda * x;
            } else if constexpr (std::is_same_v<T, PowerLawCutoff>) {
                if (x <= v.xmin) return 0.0;
                return log_upper_incomplete_gamma(1 - v.alpha, v.lambda * x) -
                       log_upper_incomplete_gamma(1 - v.alpha, v.lambda * v.xmin);
            } else {
                double c = poisson_cdf(v.lambda, x);
                return c >= 1.0 ? -kInf : std::log1p(-c);
            }
        },
        m);
}

double model_cdf(const DistributionModel& m, double x) {
    if (std::holds_alternative<Poisson>(m))
        return poisson_cdf(std::get<Poisson>(m).lambda, x);
    double c = -std::expm1(model_log_survival(m, x));
    return std::clamp(c, 0.0, 1.0);
}

std::vector<double> model_sample(const DistributionModel& m, std::size_t n,
                                 std::mt19937_64& rng) {
    require(n >= 1, "model_sample: n must be >= 1");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw_u = [&]() {
        double u;
        do { u = unif(rng); } while (u <= 0.0 || u >= 1.0);
        return u;
    };
    return std::visit(
        [&](const auto& v) -> std::vector<double> {
            using T = std::decay_t<decltype(v)>;
            std::vector<double> out(n);
            if constexpr (std::is_same_v<T, Mlm>) {
                return mlm_sample(v.p, n, rng);
            } else if constexpr (std::is_same_v<T, Lomax>) {
                for (auto& o : out)
                    o = v.sigma * std::expm1(-std::log1p(-draw_u()) / v.alpha);
            } else if constexpr (std::is_same_v<T, PowerLaw>) {
                for (auto& o : out)
                    o = v.xmin * std::exp(-std::log1p(-draw_u()) / (v.alpha - 1));
            } else if constexpr (std::is_same_v<T, Pareto>) {
                for (auto& o : out)
                    o = v.xm * std::exp(-std::log1p(-draw_u()) / v.alpha);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                for (auto& o : out)
                    o = std::exp(v.mu + v.s * normal_quantile(draw_u()));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                for (auto& o : out) o = -std::log1p(-draw_u()) / v.lambda;
            } else if constexpr (std::is_same_v<T, PowerLawCutoff>) {
                // Rejection sampling. alpha > 1: power-law proposal with
                // acceptance e^{-lambda (x - xmin)} (expected acceptance
                // roughly (alpha-1) e^{lambda xmin} E_alpha-ish, near 1 for
                // lambda xmin << 1). 0 <= alpha <= 1: shifted-exponential
                // proposal with acceptance (x/xmin)^{-alpha}.
                if (v.alpha < 0)
                    throw std::invalid_argument(
                        "model_sample: powerlaw_cutoff sampling requires alpha >= 0");
                for (auto& o : out) {
                    for (;;) {
                        double x;
                        double log_acc;
                        if (v.alpha > 1) {
                            x = v.xmin * std::exp(-std::log1p(-draw_u()) / (v.alpha - 1));
                            log_acc = -v.lambda * (x - v.xmin);
                        } else {
                            x = v.xmin - std::log1p(-draw_u()) / v.lambda;
                            log_acc = -v.alpha * std::log(x / v.xmin);
                        }
                        if (std::log(draw_u()) < log_acc) { o = x; break; }
                    }
                }
            } else {
                std::poisson_distribution<long long> pois(v.lambda);
                for (auto& o : out) o = double(pois(rng));
            }
            return out;
        },
        m);
}

double interval_pmf(const DistributionModel& m, long long k) {
    require(k >= 1, "interval_pmf: k must be >= 1");
    if (std::holds_alternative<Poisson>(m))
        return std::exp(poisson_logpmf(std::get<Poisson>(m).lambda, k));
    double lo = model_lower_support(m);
    double a = std::max(double(k) - 0.5, lo);
    double b = double(k) + 0.5;
    if (b <= a) return 0.0;
    double p = std::exp(model_log_survival(m, a)) -
               std::exp(model_log_survival(m, b));
    return std::max(p, 0.0);
}

} // namespace mlmfit
