#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace revlab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double residual_variance = 0.0;  // weighted, per degree of freedom
    std::size_t n = 0;
};

// Weighted least squares y ~ intercept + slope * x with weights w (1/variance).
LinearFit wls_linear(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& w);

LinearFit ols_linear(const std::vector<double>& x, const std::vector<double>& y);

struct WilsonInterval {
    double center = 0.0;
    double half_width = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion at confidence z (1.96 = 95%).
WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z = 1.96);

// Empirical quantile (linear interpolation); q in [0, 1]; sorts a copy.
double quantile(std::vector<double> values, double q);

// One-sample Kolmogorov-Smirnov test against a CDF; returns asymptotic p-value.
double ks_test_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov asymptotic p-value.
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

}  // namespace revlab
