#ifndef MLMFIT_OPTIMIZE_HPP
#define MLMFIT_OPTIMIZE_HPP

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace mlmfit::detail {

struct OptimResult {
    Eigen::VectorXd x;
    double f = 0;                 // minimized value
    Eigen::VectorXd grad;
    int iterations = 0;
    bool converged = false;
};

// Minimizes f via BFGS with Armijo backtracking. The objective returns
// the value and fills the gradient; it may return +inf / NaN to signal an
// infeasible point, which the line search backtracks away from.
// Convergence: ||grad||_inf <= grad_tol * max(1, |f|) or step < step_tol.
inline OptimResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
    Eigen::VectorXd x0, int max_iter = 500, double grad_tol = 1e-8,
    double step_tol = 1e-12) {
    const int d = int(x0.size());
    OptimResult res;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);  // inverse Hessian
    Eigen::VectorXd g(d), gn(d);
    double f = fn(x0, g);
    if (!std::isfinite(f)) {
        res.x = x0;
        res.f = f;
        res.grad = g;
        return res;
    }
    Eigen::VectorXd x = x0;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= grad_tol * std::max(1.0, std::fabs(f))) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd p = -H * g;
        double slope = g.dot(p);
        if (!(slope < 0)) {  // reset curvature
            H.setIdentity();
            p = -g;
            slope = g.dot(p);
        }
        double t = 1.0;
        double fn_val = std::numeric_limits<double>::infinity();
        Eigen::VectorXd xn;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + t * p;
            fn_val = fn(xn, gn);
            if (std::isfinite(fn_val) && fn_val <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        Eigen::VectorXd s = xn - x;
        Eigen::VectorXd y = gn - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
            double rho = 1.0 / sy;
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                rho * s * s.transpose();
        }
        double step = s.lpNorm<Eigen::Infinity>();
        x = xn;
        f = fn_val;
        g = gn;
        if (step < step_tol) {
            res.converged =
                g.lpNorm<Eigen::Infinity>() <= 1e3 * grad_tol * std::max(1.0, std::fabs(f));
            break;
        }
    }
    if (it == max_iter)
        res.converged = g.lpNorm<Eigen::Infinity>() <= grad_tol * std::max(1.0, std::fabs(f));
    res.x = x;
    res.f = f;
    res.grad = g;
    res.iterations = it;
    return res;
}

// Golden-section maximization of a unimodal-ish 1-d function on [a, b].
inline double golden_maximize(const std::function<double(double)>& f, double a,
                              double b, double tol = 1e-10, int max_iter = 200) {
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol * (std::fabs(a) + std::fabs(b) + 1e-12); ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace mlmfit::detail

#endif
