#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revlab/geodesic_flow.hpp"
#include "revlab/geometry.hpp"
#include "revlab/rng.hpp"

namespace revlab {

// Monte Carlo estimate of V(t) = mu_L(S*M cap T(t)) on a time grid, with 95%
// binomial confidence half-widths.  One trajectory integration serves all grid
// times (common random numbers across the grid).
struct VolumeCurve {
    std::vector<double> t;
    std::vector<double> v;       // Liouville volume units
    std::vector<double> ci;      // 95% half-width
    std::vector<std::int64_t> hits;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double total_mass = 0.0;     // V(0)
    std::string manifold;
};

VolumeCurve estimate_volume_curve(const Manifold& m, const std::vector<double>& t_grid,
                                  std::size_t n_samples, std::uint64_t seed, int workers = 0);

// Rejection sampler from the Liouville measure restricted to S*M over B:
// radial weight alpha(r)^{d-1}, direction polar angle with density ~ sin^{d-2}.
class LiouvilleSampler {
public:
    explicit LiouvilleSampler(const Manifold& m);
    ReducedState draw(Rng& rng) const;

private:
    const Manifold& m_;
    double weight_max_;
};

struct FitResult {
    double value = 0.0;   // slope / rate
    double stderr_ = 0.0;
    double intercept = 0.0;
    double residual_variance = 0.0;  // weighted, per dof
    std::size_t points = 0;
};

// Weighted least squares of log V on log t over the window [t_lo, t_hi].
// Grid points with V = 0 are skipped.  Returns the log-log slope.
FitResult fit_power_law(const VolumeCurve& c, double t_lo, double t_hi);

enum class DecayModel { Exponential, PowerLaw };

struct RateFit {
    double gamma = 0.0;          // 0 when the power-law model wins
    double gamma_stderr = 0.0;
    double exp_rate = 0.0;       // exponential-model rate regardless of winner
    double exp_stderr = 0.0;
    double power_slope = 0.0;
    double power_stderr = 0.0;
    DecayModel model = DecayModel::Exponential;
    double t_lo = 0.0, t_hi = 0.0;
};

// gamma = -limsup (1/t) log V(t), estimated on a finite window.  Chooses
// between exponential and power-law tails by weighted residual variance.
RateFit fit_escape_rate(const VolumeCurve& c, double t_lo, double t_hi);

struct LambdaFit {
    double lambda = 0.0;
    double stderr_ = 0.0;
    std::size_t n_trapped = 0;
};

// Maximal expansion rate: slope of max-over-trapped-samples log ||J(t)||
// against t on the late half of [0, t_fit].
LambdaFit estimate_lambda_max(const Manifold& m, double t_fit, std::size_t n_samples,
                              std::uint64_t seed, int workers = 0);

// t_e = log(R) / (2 Lambda); Lambda must be positive (substitute a small
// positive effective rate when the fitted rate vanishes).
double ehrenfest_time(double R, double lambda_eff);

// Weyl exponent m(beta, gamma): d-1-(gamma-beta)/Lambda for beta <= gamma/2,
// d-1-gamma/(2 Lambda) beyond; continuous at the knee.
double weyl_exponent_m(int d, double beta, double gamma, double lambda);

// Hyperbolic-quotient reference exponent m'(beta, delta) = min(2 delta + 2 beta + 1 - d, delta).
double weyl_exponent_mprime(int d, double beta, double delta);

struct ExponentCurve {
    std::vector<double> beta;
    std::vector<double> m;
    std::vector<double> m_prime;
    int d = 2;
    double gamma = 0.0, lambda = 1.0, delta = 0.0;
};

ExponentCurve exponent_curve(int d, double gamma, double lambda, double delta,
                             const std::vector<double>& beta_grid);

// log-linear interpolation of the volume curve (throws if the needed range is
// not covered by positive estimates).
double interpolate_volume(const VolumeCurve& c, double t);

// R^{d-1} * min[ V((1-eps) t_e), exp(2 beta t_e) V(2(1-eps) t_e) ] with C = 1.
double weyl_bound_rhs(int d, double R, double beta, double eps, const VolumeCurve& c,
                      double lambda_eff);

// High-probability decay envelope: exp(-gamma t/2 + eps t) up to 2 t_e, then
// the plateau R^{-gamma/(2 Lambda) + eps}.
double decay_envelope(double t, double R, double gamma, double lambda, double eps,
                      double alpha_param);

// Scaling of the trapped island for the degenerate profile: largest admissible
// r(0) and rho(0) among forward-trapped-for-t starts with p0 >= 1 - tau.
struct IslandScaling {
    std::vector<double> t;
    std::vector<double> max_r0;
    std::vector<double> max_rho0;
    double exponent_r = 0.0, exponent_r_stderr = 0.0;
    double exponent_rho = 0.0, exponent_rho_stderr = 0.0;
    double tau = 0.0;
};

IslandScaling island_scaling(const Manifold& m, const std::vector<double>& t_grid,
                             double tau = 0.3);

}  // namespace revlab
