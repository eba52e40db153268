#ifndef MLMFIT_SPECIAL_HPP
#define MLMFIT_SPECIAL_HPP

namespace mlmfit {

// Quantile of the standard normal distribution, |error| < 1e-9 after
// one Halley refinement step.
double normal_quantile(double p);

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt for
// real a (any sign) and x > 0. Relative error <= 1e-10 in the regimes
// exercised by the power-law-cutoff normalizer.
double upper_incomplete_gamma(double a, double x);

// log Gamma(a, x); the integral is positive for all real a, x > 0.
double log_upper_incomplete_gamma(double a, double x);

} // namespace mlmfit

#endif
