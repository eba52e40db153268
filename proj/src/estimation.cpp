#include "mlmfit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "mlmfit/special.hpp"
#include "optimize.hpp"

namespace mlmfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sample(const Sample& s) {
    if (s.values.size() < 1 || s.n < 3)
        throw std::invalid_argument("Sample: needs n >= 3 observations");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!(s.values[i] > 0) || !std::isfinite(s.values[i]))
            throw std::invalid_argument("Sample: values must be positive and finite");
        if (!(s.weights[i] > 0))
            throw std::invalid_argument("Sample: weights must be positive");
    }
}

} // namespace

Sample Sample::from_values(std::vector<double> xs) {
    Sample s;
    s.n = double(xs.size());
    s.weights.assign(xs.size(), 1.0);
    s.values = std::move(xs);
    check_sample(s);
    return s;
}

Sample Sample::from_histogram(const DegreeHistogram& h) {
    Sample s;
    for (const auto& r : h.rows) {
        s.values.push_back(double(r.degree));
        s.weights.push_back(double(r.count));
        s.n += double(r.count);
    }
    check_sample(s);
    return s;
}

double Sample::mean() const {
    double sx = 0;
    for (std::size_t i = 0; i < values.size(); ++i) sx += weights[i] * values[i];
    return sx / n;
}

bool Sample::degenerate() const {
    for (double v : values)
        if (v != values.front()) return false;
    return true;
}

double cv(const Sample& s) {
    // two-pass, population (1/n) variance
    double mu = s.mean();
    if (!(mu > 0)) throw std::invalid_argument("cv: sample mean must be > 0");
    double ss = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double d = s.values[i] - mu;
        ss += s.weights[i] * d * d;
    }
    return std::sqrt(ss / s.n) / mu;
}

ExistenceDiag mle_existence_check(const Sample& s) {
    ExistenceDiag d;
    d.cv_value = cv(s);
    d.finite_max_guaranteed = d.cv_value > 1.0;
    d.note = d.finite_max_guaranteed
                 ? "CV > 1: profile likelihood has a global maximum at a finite point"
                 : "CV <= 1: no finite-maximum guarantee; the likelihood may "
                   "increase toward the sigma -> infinity boundary";
    return d;
}

Family family_from_string(const std::string& s) {
    if (s == "mlm") return Family::Mlm;
    if (s == "lomax") return Family::Lomax;
    if (s == "powerlaw") return Family::PowerLaw;
    if (s == "pareto") return Family::Pareto;
    if (s == "lognormal") return Family::LogNormal;
    if (s == "exponential") return Family::Exponential;
    if (s == "powerlaw_cutoff" || s == "plc") return Family::PowerLawCutoff;
    if (s == "poisson") return Family::Poisson;
    throw std::invalid_argument("unknown model family: " + s);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Mlm: return "mlm";
        case Family::Lomax: return "lomax";
        case Family::PowerLaw: return "powerlaw";
        case Family::Pareto: return "pareto";
        case Family::LogNormal: return "lognormal";
        case Family::Exponential: return "exponential";
        case Family::PowerLawCutoff: return "powerlaw_cutoff";
        case Family::Poisson: return "poisson";
    }
    return "?";
}

std::vector<Family> all_families() {
    return {Family::Mlm,         Family::Lomax,       Family::PowerLaw,
            Family::Pareto,      Family::LogNormal,   Family::Exponential,
            Family::PowerLawCutoff, Family::Poisson};
}

// --- MLM likelihood -------------------------------------------------------

double mlm_loglik(const Sample& s, const MlmParams& p) {
    double ll = 0;
    const double la = std::log(p.alpha);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double x = s.values[i], c = s.weights[i];
        double w = std::log1p(x / p.sigma);
        double A = std::exp((p.beta + 1) * std::log(w) - p.beta * std::log1p(w));
        double t = la - std::log(p.sigma + x) + std::log(p.beta + 1 + w) +
                   p.beta * std::log(w) - (p.beta + 1) * std::log1p(w) -
                   p.alpha * A;
        if (!std::isfinite(t)) return -kInf;
        ll += c * t;
    }
    return ll;
}

Eigen::Vector3d mlm_score(const Sample& s, const MlmParams& p) {
    double da = s.n / p.alpha, db = 0, ds = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double x = s.values[i], c = s.weights[i];
        double w = std::log1p(x / p.sigma);
        double A = std::exp((p.beta + 1) * std::log(w) - p.beta * std::log1p(w));
        double lr = std::log(w) - std::log1p(w);  // log(w/(1+w))
        double q = x / (p.sigma * (p.sigma + x));
        double B = (1 + p.beta + w) * A / (w * (1 + w));
        da -= c * A;
        db += c * (1.0 / (1 + p.beta + w) + lr * (1 - p.alpha * A));
        ds += c * (-1.0 / (p.sigma + x) +
                   q * ((p.beta + 1) / (1 + w) - p.beta / w -
                        1.0 / (1 + p.beta + w)) +
                   p.alpha * q * B);
    }
    return {da, db, ds};
}

Eigen::Matrix3d observed_information(const Sample& s, const MlmParams& p) {
    const double a = p.alpha, b = p.beta, sg = p.sigma;
    double h_aa = -s.n / (a * a);
    double h_ab = 0, h_as = 0, h_bb = 0, h_bs = 0, h_ss = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double x = s.values[i], c = s.weights[i];
        double w = std::log1p(x / sg);
        double A = std::exp((b + 1) * std::log(w) - b * std::log1p(w));
        double lr = std::log(w) - std::log1p(w);
        double q = x / (sg * (sg + x));
        double B = (1 + b + w) * A / (w * (1 + w));
        double u = 1 + b + w;
        h_ab += c * (-lr) * A;
        h_as += c * q * B;
        h_bb += c * (-(1.0 / (u * u)) - a * lr * lr * A);
        h_bs += c * q * (1.0 / (u * u) - (1 - a * A) / (w * (1 + w)) + a * B * lr);
        double x2 = x * x;
        double denom = sg * sg * (sg + x) * (sg + x);
        double t1 = 1.0 / ((sg + x) * (sg + x));
        double t2 = x2 / denom *
                    ((b + 1) / ((1 + w) * (1 + w)) - b / (w * w) - 1.0 / (u * u));
        double t3 = x * (2 * sg + x) / denom * (b / w + 1.0 / u - (b + 1) / (1 + w));
        double wbm1 = std::exp((b - 1) * std::log(w));
        double t4 = -a * x2 * (1 + b) / denom *
                    (wbm1 * (b + w) / std::exp((b + 1) * std::log1p(w)));
        double t5 = -a * x / denom *
                    (std::exp(b * std::log(w)) * u *
                     ((2 * sg + x) * (1 + w) - x * (b + 1)) /
                     std::exp((b + 2) * std::log1p(w)));
        h_ss += c * (t1 + t2 + t3 + t4 + t5);
    }
    Eigen::Matrix3d F;
    F << -h_aa, -h_ab, -h_as,
         -h_ab, -h_bb, -h_bs,
         -h_as, -h_bs, -h_ss;
    return F;
}

// --- covariance / CI helpers ---------------------------------------------

namespace {

// Inverts a symmetric information matrix; falls back to a pseudo-inverse
// when the condition number exceeds 1e12 or the LLT fails.
Eigen::MatrixXd invert_information(const Eigen::MatrixXd& F, bool& pseudo) {
    pseudo = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    const auto& ev = es.eigenvalues();
    double emax = ev.cwiseAbs().maxCoeff();
    double emin = ev.cwiseAbs().minCoeff();
    if (ev.minCoeff() > 0 && emax / std::max(emin, 1e-300) < 1e12) {
        return F.llt().solve(Eigen::MatrixXd::Identity(F.rows(), F.cols()));
    }
    pseudo = true;
    Eigen::VectorXd inv = ev;
    for (int i = 0; i < inv.size(); ++i)
        inv[i] = std::fabs(ev[i]) > 1e-12 * emax ? 1.0 / ev[i] : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// Central-difference Hessian of a scalar function (used for the
// non-MLM families where no analytic Hessian is written out).
Eigen::MatrixXd numeric_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x, double rel_step = 1e-4) {
    int d = int(x.size());
    Eigen::VectorXd h(d);
    for (int i = 0; i < d; ++i) h[i] = rel_step * std::max(1.0, std::fabs(x[i]));
    Eigen::MatrixXd H(d, d);
    double f0 = f(x);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        H(i, i) = (f(xp) - 2 * f0 + f(xm)) / (h[i] * h[i]);
        for (int j = i + 1; j < d; ++j) {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h[i]; xpp[j] += h[j];
            xpm[i] += h[i]; xpm[j] -= h[j];
            xmp[i] -= h[i]; xmp[j] += h[j];
            xmm[i] -= h[i]; xmm[j] -= h[j];
            H(i, j) = H(j, i) =
                (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h[i] * h[j]);
        }
    }
    return H;
}

double numeric_grad_norm(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& x) {
    double gmax = 0;
    for (int i = 0; i < x.size(); ++i) {
        double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        gmax = std::max(gmax, std::fabs((f(xp) - f(xm)) / (2 * h)));
    }
    return gmax;
}

void attach_diag(FitResult& fit, const Sample& s) {
    auto d = mle_existence_check(s);
    fit.cv_value = d.cv_value;
    fit.existence_ok = d.finite_max_guaranteed;
    fit.n = s.n;
}

void attach_covariance(FitResult& fit,
                       const std::function<double(const Eigen::VectorXd&)>& loglik,
                       double ci_level) {
    Eigen::VectorXd th = Eigen::Map<const Eigen::VectorXd>(fit.estimates.data(),
                                                           long(fit.estimates.size()));
    Eigen::MatrixXd F = -numeric_hessian(loglik, th);
    fit.covariance = invert_information(F, fit.covariance_pseudo);
    if (ci_level > 0) confidence_intervals(fit, 1 - ci_level);
}

} // namespace

std::vector<std::pair<double, double>> confidence_intervals(FitResult& fit,
                                                            double k) {
    if (fit.covariance.size() == 0)
        throw std::invalid_argument("confidence_intervals: no covariance available");
    double z = normal_quantile(1 - k / 2);
    fit.intervals.clear();
    for (std::size_t i = 0; i < fit.estimates.size(); ++i) {
        double var = std::max(fit.covariance(long(i), long(i)), 0.0);
        double half = z * std::sqrt(var);
        fit.intervals.emplace_back(fit.estimates[i] - half, fit.estimates[i] + half);
    }
    fit.ci_level = 1 - k;
    return fit.intervals;
}

// --- MLM fit --------------------------------------------------------------

FitResult fit_mlm(const Sample& s, const MlmParams& init, const FitOptions& opts) {
    check_sample(s);
    if (s.degenerate())
        throw std::invalid_argument("fit_mlm: degenerate sample (all values equal)");

    // optimize in u = (log alpha, log(1+beta), log sigma)
    auto unpack = [](const Eigen::VectorXd& u) {
        return MlmParams(std::exp(u[0]), std::expm1(u[1]), std::exp(u[2]));
    };
    auto objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) -> double {
        for (int i = 0; i < 3; ++i)
            if (std::fabs(u[i]) > 500) return kInf;  // transform overflow guard
        if (u[1] < -30) return kInf;  // expm1 would round to beta == -1
        MlmParams p = unpack(u);
        double ll = mlm_loglik(s, p);
        if (!std::isfinite(ll)) return kInf;
        Eigen::Vector3d sc = mlm_score(s, p);
        if (!sc.allFinite()) return kInf;
        g.resize(3);
        g[0] = -sc[0] * p.alpha;
        g[1] = -sc[1] * std::exp(u[1]);  // d beta / d u1 = 1 + beta
        g[2] = -sc[2] * p.sigma;
        return -ll;
    };

    Eigen::VectorXd u0(3);
    u0 << std::log(init.alpha), std::log1p(init.beta), std::log(init.sigma);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-std::log(1.5), std::log(1.5));

    detail::OptimResult best;
    best.f = kInf;
    int restarts = std::max(1, opts.restarts);
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd u = u0;
        if (r > 0)
            for (int i = 0; i < 3; ++i) u[i] += jitter(rng);
        auto res = detail::bfgs_minimize(objective, u, opts.max_iterations,
                                         opts.grad_tol, opts.step_tol);
        bool better = std::isfinite(res.f) &&
                      (res.f < best.f - 1e-12 ||
                       (res.converged && !best.converged && res.f <= best.f + 1e-9));
        if (better) best = res;
    }

    FitResult fit;
    attach_diag(fit, s);
    if (!std::isfinite(best.f)) {
        fit.model = Mlm{init};
        fit.param_names = {"alpha", "beta", "sigma"};
        fit.estimates = {init.alpha, init.beta, init.sigma};
        fit.loglik = -kInf;
        fit.converged = false;
        fit.message = "all starts failed to produce a finite likelihood";
        return fit;
    }
    MlmParams p = unpack(best.x);
    fit.model = Mlm{p};
    fit.param_names = {"alpha", "beta", "sigma"};
    fit.estimates = {p.alpha, p.beta, p.sigma};
    fit.loglik = -best.f;
    fit.iterations = best.iterations;
    Eigen::Vector3d sc = mlm_score(s, p);
    fit.grad_norm = sc.lpNorm<Eigen::Infinity>();
    fit.converged = best.converged && sc.allFinite();
    if (!fit.converged) fit.message = "optimizer did not meet the gradient tolerance";

    if (opts.compute_covariance && fit.converged) {
        Eigen::Matrix3d F = observed_information(s, p);
        if (F.allFinite()) {
            fit.covariance = invert_information(F, fit.covariance_pseudo);
            confidence_intervals(fit, 1 - opts.ci_level);
        }
    }
    return fit;
}

// --- Lomax profile likelihood --------------------------------------------

double lomax_alpha_of_sigma(const Sample& s, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("lomax_alpha_of_sigma: sigma must be > 0");
    double sum = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        sum += s.weights[i] * std::log1p(s.values[i] / sigma);
    return s.n / sum;
}

double lomax_profile_loglik(const Sample& s, double sigma) {
    double a = lomax_alpha_of_sigma(s, sigma);
    return std::log(a) - std::log(sigma) - 1.0 - 1.0 / a;
}

// --- other families -------------------------------------------------------

namespace {

double generic_loglik(const Sample& s, const DistributionModel& m) {
    double ll = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double t = model_logpdf(m, s.values[i]);
        if (!std::isfinite(t)) return -kInf;
        ll += s.weights[i] * t;
    }
    return ll;
}

FitResult closed_form_result(const Sample& s, DistributionModel model,
                             std::vector<std::string> names,
                             std::vector<double> est, const FitOptions& opts,
                             const std::function<double(const Eigen::VectorXd&)>& ll_of) {
    FitResult fit;
    attach_diag(fit, s);
    fit.model = std::move(model);
    fit.param_names = std::move(names);
    fit.estimates = std::move(est);
    fit.loglik = generic_loglik(s, fit.model);
    fit.converged = std::isfinite(fit.loglik);
    fit.grad_norm = fit.converged ? numeric_grad_norm(ll_of,
        Eigen::Map<const Eigen::VectorXd>(fit.estimates.data(), long(fit.estimates.size())))
                                  : kInf;
    if (opts.compute_covariance && fit.converged)
        attach_covariance(fit, ll_of, opts.ci_level);
    return fit;
}

} // namespace

FitResult fit_model(const Sample& s, Family family, const FitOptions& opts) {
    check_sample(s);
    double xbar = s.mean();
    double xmin = *std::min_element(s.values.begin(), s.values.end());

    switch (family) {
        case Family::Mlm:
            return fit_mlm(s, MlmParams(1, 0, 1), opts);

        case Family::Exponential: {
            double lam = 1.0 / xbar;
            return closed_form_result(
                s, Exponential{lam}, {"lambda"}, {lam}, opts,
                [&s](const Eigen::VectorXd& th) {
                    return th[0] > 0 ? generic_loglik(s, Exponential{th[0]}) : -kInf;
                });
        }
        case Family::Poisson: {
            double lam = xbar;
            return closed_form_result(
                s, Poisson{lam}, {"lambda"}, {lam}, opts,
                [&s](const Eigen::VectorXd& th) {
                    return th[0] > 0 ? generic_loglik(s, Poisson{th[0]}) : -kInf;
                });
        }
        case Family::LogNormal: {
            double mu = 0, ss = 0;
            for (std::size_t i = 0; i < s.values.size(); ++i)
                mu += s.weights[i] * std::log(s.values[i]);
            mu /= s.n;
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                double d = std::log(s.values[i]) - mu;
                ss += s.weights[i] * d * d;
            }
            double sd = std::sqrt(ss / s.n);
            if (!(sd > 0))
                throw std::invalid_argument("fit_model: degenerate sample for lognormal");
            return closed_form_result(
                s, LogNormal{mu, sd}, {"mu", "s"}, {mu, sd}, opts,
                [&s](const Eigen::VectorXd& th) {
                    return th[1] > 0 ? generic_loglik(s, LogNormal{th[0], th[1]}) : -kInf;
                });
        }
        case Family::Pareto: {
            double sum = 0;
            for (std::size_t i = 0; i < s.values.size(); ++i)
                sum += s.weights[i] * std::log(s.values[i] / xmin);
            if (!(sum > 0))
                throw std::invalid_argument("fit_model: degenerate sample for pareto");
            double a = s.n / sum;
            return closed_form_result(
                s, Pareto{a, xmin}, {"alpha"}, {a}, opts,
                [&s, xmin](const Eigen::VectorXd& th) {
                    return th[0] > 0 ? generic_loglik(s, Pareto{th[0], xmin}) : -kInf;
                });
        }
        case Family::PowerLaw: {
            double sum = 0;
            for (std::size_t i = 0; i < s.values.size(); ++i)
                sum += s.weights[i] * std::log(s.values[i] / xmin);
            if (!(sum > 0))
                throw std::invalid_argument("fit_model: degenerate sample for powerlaw");
            double a = 1.0 + s.n / sum;
            return closed_form_result(
                s, PowerLaw{a, xmin}, {"alpha"}, {a}, opts,
                [&s, xmin](const Eigen::VectorXd& th) {
                    return th[0] > 1 ? generic_loglik(s, PowerLaw{th[0], xmin}) : -kInf;
                });
        }
        case Family::Lomax: {
            if (s.degenerate())
                throw std::invalid_argument("fit_model: degenerate sample for lomax");
            double xmax = *std::max_element(s.values.begin(), s.values.end());
            double lo = std::log(1e-6 * xmin), hi = std::log(1e6 * xmax);
            double t = detail::golden_maximize(
                [&](double lt) { return lomax_profile_loglik(s, std::exp(lt)); },
                lo, hi, 1e-12, 300);
            double sg = std::exp(t);
            double a = lomax_alpha_of_sigma(s, sg);
            FitResult fit = closed_form_result(
                s, Lomax{a, sg}, {"alpha", "sigma"}, {a, sg}, opts,
                [&s](const Eigen::VectorXd& th) {
                    return (th[0] > 0 && th[1] > 0)
                               ? generic_loglik(s, Lomax{th[0], th[1]})
                               : -kInf;
                });
            // profile search at the bracket edge means no interior maximum
            if (t <= lo + 1e-6 || t >= hi - 1e-6) {
                fit.converged = false;
                fit.message = "profile maximum at the search boundary";
            }
            return fit;
        }
        case Family::PowerLawCutoff: {
            if (s.degenerate())
                throw std::invalid_argument("fit_model: degenerate sample for powerlaw_cutoff");
            double S1 = 0, S2 = 0;
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                S1 += s.weights[i] * std::log(s.values[i]);
                S2 += s.weights[i] * s.values[i];
            }
            auto ll_of = [&, xmin](const Eigen::VectorXd& th) -> double {
                double a = th[0], lam = th[1];
                if (!(lam > 0) || !std::isfinite(a)) return -kInf;
                double lz;
                try {
                    lz = (a - 1) * std::log(lam) +
                         log_upper_incomplete_gamma(1 - a, lam * xmin);
                } catch (const std::exception&) {
                    return -kInf;
                }
                return -a * S1 - lam * S2 - s.n * lz;
            };
            // BFGS over (alpha, log lambda) with finite-difference gradient
            auto obj = [&](const Eigen::VectorXd& u, Eigen::VectorXd& g) -> double {
                Eigen::VectorXd th(2);
                th << u[0], std::exp(u[1]);
                double f = -ll_of(th);
                if (!std::isfinite(f)) return kInf;
                g.resize(2);
                for (int i = 0; i < 2; ++i) {
                    double h = 1e-7 * std::max(1.0, std::fabs(u[i]));
                    Eigen::VectorXd up = u, um = u;
                    up[i] += h;
                    um[i] -= h;
                    Eigen::VectorXd tp(2), tm(2);
                    tp << up[0], std::exp(up[1]);
                    tm << um[0], std::exp(um[1]);
                    g[i] = (-ll_of(tp) + ll_of(tm)) / (2 * h);
                }
                return f;
            };
            double sum = 0;
            for (std::size_t i = 0; i < s.values.size(); ++i)
                sum += s.weights[i] * std::log(s.values[i] / xmin);
            double a0 = sum > 0 ? 1.0 + s.n / sum : 1.5;
            Eigen::VectorXd u0(2);
            u0 << a0, std::log(1.0 / xbar);
            auto res = detail::bfgs_minimize(obj, u0, opts.max_iterations,
                                             opts.grad_tol, opts.step_tol);
            FitResult fit;
            attach_diag(fit, s);
            double a = res.x[0], lam = std::exp(res.x[1]);
            fit.model = PowerLawCutoff{a, lam, xmin};
            fit.param_names = {"alpha", "lambda"};
            fit.estimates = {a, lam};
            fit.loglik = -res.f;
            fit.iterations = res.iterations;
            fit.converged = res.converged && std::isfinite(res.f);
            Eigen::VectorXd th(2);
            th << a, lam;
            fit.grad_norm = std::isfinite(res.f) ? numeric_grad_norm(ll_of, th) : kInf;
            if (!fit.converged) fit.message = "optimizer did not converge";
            if (opts.compute_covariance && fit.converged)
                attach_covariance(fit, ll_of, opts.ci_level);
            return fit;
        }
    }
    throw std::logic_error("fit_model: unreachable");
}

} // namespace mlmfit
