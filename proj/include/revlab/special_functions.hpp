#pragma once

#include <complex>
#include <vector>

namespace revlab {

// Hankel functions of the first kind for integer orders and complex argument
// with Re z > 0.  Orders 0 and 1 come from ascending series (|z| <= 10) or the
// large-argument asymptotic expansion (|z| > 10); higher orders by upward
// recurrence, which tracks the dominant solution and keeps relative accuracy.
std::complex<double> hankel1(int nu, std::complex<double> z);

// H^{(1)}_0 .. H^{(1)}_{nu_max} in one sweep.
std::vector<std::complex<double>> hankel1_ladder(int nu_max, std::complex<double> z);

// Derivative via the ladder: H'_nu = H_{nu-1} - (nu/z) H_nu  (H'_0 = -H_1).
std::complex<double> hankel1_derivative(int nu, std::complex<double> z);

// Bessel J_n / Y_n for complex argument, orders 0 and 1 (building blocks,
// exposed for the cross-validation tests).
std::complex<double> bessel_j01(int n, std::complex<double> z);
std::complex<double> bessel_y01(int n, std::complex<double> z);

}  // namespace revlab
