#include "revlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "revlab/errors.hpp"

namespace revlab {

LinearFit wls_linear(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
        throw ConfigError("wls_linear: need >= 2 matching points");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0.0) throw NumericalError("wls_linear: singular design");
    LinearFit f;
    f.n = x.size();
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += w[i] * r * r;
    }
    const double dof = static_cast<double>(x.size()) - 2.0;
    f.residual_variance = dof > 0 ? rss / dof : 0.0;
    // scale parameter covariance by residual variance (conservative when the
    // supplied weights already represent 1/sigma^2)
    const double scale = std::max(f.residual_variance, 1.0);
    f.slope_stderr = std::sqrt(scale * sw / det);
    f.intercept_stderr = std::sqrt(scale * swxx / det);
    return f;
}

LinearFit ols_linear(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> w(x.size(), 1.0);
    auto f = wls_linear(x, y, w);
    // plain OLS standard errors use the residual variance directly
    double sw = static_cast<double>(x.size()), swx = 0, swxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        swx += x[i];
        swxx += x[i] * x[i];
    }
    const double det = sw * swxx - swx * swx;
    f.slope_stderr = std::sqrt(std::max(f.residual_variance, 0.0) * sw / det);
    f.intercept_stderr = std::sqrt(std::max(f.residual_variance, 0.0) * swxx / det);
    return f;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z) {
    WilsonInterval out;
    if (n == 0) return out;
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    out.center = (p + z2 / (2.0 * n)) / denom;
    out.half_width = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    out.lo = std::max(0.0, out.center - out.half_width);
    out.hi = std::min(1.0, out.center + out.half_width);
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

namespace {
// Kolmogorov distribution tail Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}
}  // namespace

double ks_test_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double x = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    return kolmogorov_tail(x);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ConfigError("ks_test: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    const double x = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    return kolmogorov_tail(x);
}

}  // namespace revlab
