#include "revlab/special_functions.hpp"

#include <cmath>

#include "revlab/errors.hpp"

namespace revlab {

namespace {

using cd = std::complex<double>;

constexpr double kEulerGamma = 0.5772156649015328606;

// Ascending series, NIST 10.2.2:  J_n(z) = (z/2)^n sum_m (-z^2/4)^m / (m! (n+m)!)
cd series_j(int n, cd z) {
    const cd q = -0.25 * z * z;
    cd term = 1.0;
    for (int m = 1; m <= n; ++m) term /= static_cast<double>(m);  // 1/n!
    cd sum = term;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * static_cast<double>(m + n));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return std::pow(0.5 * z, n) * sum;
}

// Ascending series for Y_n, integer n in {0, 1}, NIST 10.8.1:
// Y_n(z) = -( (z/2)^{-n} / pi ) sum_{m<n} ((n-m-1)!/m!) (z^2/4)^m
//          + (2/pi) ln(z/2) J_n(z)
//          - ( (z/2)^n / pi ) sum_m (psi(m+1)+psi(n+m+1)) (-z^2/4)^m / (m!(n+m)!)
cd series_y(int n, cd z) {
    const cd q = -0.25 * z * z;
    const cd lnhalf = std::log(0.5 * z);

    cd finite = 0.0;
    if (n == 1) finite = 1.0;  // (n-m-1)!/m! at m=0 for n=1
    finite *= std::pow(0.5 * z, -n) / M_PI;

    // psi-series
    double psi1 = -kEulerGamma;           // psi(m+1) at m=0
    double psi2 = -kEulerGamma;           // psi(n+m+1) at m=0
    for (int j = 1; j <= n; ++j) psi2 += 1.0 / j;
    cd fact = 1.0;
    for (int m = 1; m <= n; ++m) fact /= static_cast<double>(m);  // 1/(n+m)! at m=0 -> 1/n!
    cd term = fact;
    cd sum = (psi1 + psi2) * term;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * static_cast<double>(m + n));
        psi1 += 1.0 / m;
        psi2 += 1.0 / (n + m);
        const cd contrib = (psi1 + psi2) * term;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }

    return -finite + (2.0 / M_PI) * lnhalf * series_j(n, z) -
           std::pow(0.5 * z, n) / M_PI * sum;
}

// Large-argument expansion, NIST 10.17.5:
// H1_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_m i^m a_m(nu) / z^m
cd asymptotic_h1(int nu, cd z) {
    const double mu = 4.0 * nu * nu;
    cd sum = 1.0;
    cd term = 1.0;
    double prev = 1e300;
    for (int m = 1; m < 40; ++m) {
        const double num = mu - (2.0 * m - 1.0) * (2.0 * m - 1.0);
        term *= cd(0.0, 1.0) * num / (8.0 * static_cast<double>(m) * z);
        const double mag = std::abs(term);
        if (mag > prev) break;  // divergent tail reached
        sum += term;
        prev = mag;
        if (mag < 1e-18) break;
    }
    const cd phase = z - cd(0.5 * M_PI * nu + 0.25 * M_PI);
    return std::sqrt(2.0 / (M_PI * z)) * std::exp(cd(0.0, 1.0) * phase) * sum;
}

cd h1_base(int n, cd z) {
    if (std::abs(z) <= 10.0) return series_j(n, z) + cd(0.0, 1.0) * series_y(n, z);
    return asymptotic_h1(n, z);
}

}  // namespace

std::complex<double> bessel_j01(int n, std::complex<double> z) {
    if (n != 0 && n != 1) throw ConfigError("bessel_j01: order must be 0 or 1");
    return series_j(n, z);
}

std::complex<double> bessel_y01(int n, std::complex<double> z) {
    if (n != 0 && n != 1) throw ConfigError("bessel_y01: order must be 0 or 1");
    return series_y(n, z);
}

std::vector<std::complex<double>> hankel1_ladder(int nu_max, std::complex<double> z) {
    if (nu_max < 0) throw ConfigError("hankel1_ladder: nu_max >= 0");
    if (!(z.real() > 0.0) && std::abs(z) == 0.0)
        throw NumericalError("hankel1_ladder: z = 0");
    std::vector<cd> out(static_cast<std::size_t>(nu_max) + 1);
    out[0] = h1_base(0, z);
    if (nu_max == 0) return out;
    out[1] = h1_base(1, z);
    for (int nu = 1; nu < nu_max; ++nu)
        out[static_cast<std::size_t>(nu) + 1] =
            (2.0 * nu / z) * out[static_cast<std::size_t>(nu)] -
            out[static_cast<std::size_t>(nu) - 1];
    return out;
}

std::complex<double> hankel1(int nu, std::complex<double> z) {
    return hankel1_ladder(nu, z)[static_cast<std::size_t>(nu)];
}

std::complex<double> hankel1_derivative(int nu, std::complex<double> z) {
    if (nu == 0) return -hankel1(1, z);
    const auto l = hankel1_ladder(nu, z);
    return l[static_cast<std::size_t>(nu) - 1] -
           (static_cast<double>(nu) / z) * l[static_cast<std::size_t>(nu)];
}

}  // namespace revlab
