#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revlab/geometry.hpp"

namespace revlab {

// Uniform Dirichlet grid on [-L, L]: interior points r_i = -L + (i+1) dr.
struct RadialGrid {
    double half_length = 0.0;
    std::size_t n_interior = 0;
    double dr = 0.0;
    double point(std::size_t i) const { return -half_length + dr * static_cast<double>(i + 1); }
};

// Half-density radial operator of angular mode k on a surface of revolution
// (d = 2):  -d^2/dr^2 + W_k,  W_k = k^2/alpha^2 + alpha''/(2 alpha) - (alpha'/(2 alpha))^2.
// Symmetric tridiagonal with second-order central differences.
struct ModeOperator {
    int k = 0;
    RadialGrid grid;
    std::vector<double> potential;  // W_k at interior points
    std::vector<double> diag, offdiag;
};

double mode_potential(const Profile& p, int k, double r);

ModeOperator build_mode_operator(const Manifold& m, int k, double domain_half_length,
                                 std::size_t n_grid);

// Eigenpairs, ascending; eigenvectors orthonormal in the grid inner product
// dr * sum(u v).  Residual guarantee: ||P v - mu v|| <= 1e-8 ||v||.
struct EigenBasis {
    int k = 0;
    RadialGrid grid;
    std::vector<double> values;      // mu_j
    Eigen::MatrixXd vectors;         // column j
    std::size_t index_offset = 0;    // 0-based global index of values[0]
};

EigenBasis dirichlet_eigensystem(const ModeOperator& op);
EigenBasis dirichlet_eigensystem_in_range(const ModeOperator& op, double mu_lo, double mu_hi);

// Eigenvalue count #{mu <= x} by Sturm bisection (no vectors).
std::size_t eigenvalue_count_below(const ModeOperator& op, double x);

// Frequency window I_R = {(k, j): sqrt(mu_{k,j}) in R[1-eps', 1+eps']}.
struct WindowEntry {
    int k = 0;          // k >= 0; multiplicity 2 for k >= 1 (modes +-k)
    std::size_t j = 0;  // 1-based index within the mode's ascending spectrum
    double lambda = 0.0;
};

struct WindowedBasis {
    double R = 0.0;
    double eps_prime = 0.0;
    std::vector<WindowEntry> entries;
    std::size_t dimension = 0;  // N_R, counting the +-k degeneracy
};

// Builds the window from per-mode B-domain operators; mode range is derived
// from the potential barrier: W_k > R^2 (1+eps')^2 on B for k beyond it.
WindowedBasis frequency_window(const Manifold& m, double R, double eps_prime,
                               std::size_t n_grid_per_mode, int workers = 0);

int window_mode_limit(const Manifold& m, double R, double eps_prime);

// Smooth compactly supported cutoff exp(1 - 1/(1 - (r/r_psi)^2)) on |r| < r_psi.
double bump_cutoff(double r, double r_psi);

// Spectral half-wave propagator plan for one frequency band.  Everything is
// reduced per retained mode k to the captured big-domain eigenpairs:
//   M: window-basis -> big-eigenbasis coefficients of psi * (zero-extended u)
//   G: Gram matrix of psi * big-eigenvectors (both weighted by dr)
// The plan evaluates ||psi U(t) psi u|| exactly over the captured band; the
// dropped spectral mass per basis element is tracked in `capture_defect`.
struct PlanMode {
    int k = 0;
    int multiplicity = 1;
    std::vector<double> mu;               // captured big-domain eigenvalues
    std::vector<double> window_lambda;    // sqrt(mu) of the mode's I_R entries
    std::vector<std::size_t> window_j;    // 1-based radial indices
    Eigen::MatrixXd embed;                // M: q x m
    Eigen::MatrixXd gram;                 // G: q x q
    std::vector<double> capture_defect;   // 1 - ||captured part||^2 / ||psi e||^2 per element
    // derived (not serialized): omega = sqrt(mu); HS kernel G .* (M M^T)
    Eigen::VectorXd omega;
    Eigen::MatrixXd hs_kernel;
    void finalize();
};

struct PropagatorPlan {
    double R = 0.0;
    double eps_prime = 0.0;
    double capture_rel_width = 0.0;  // captured mu-window half width, relative to R^2
    double half_length = 0.0;        // L
    std::size_t n_grid = 0;          // interior points of the big domain
    double dr = 0.0;
    double t_valid = 0.0;
    double r1 = 0.0;
    double r_psi = 0.0;
    std::vector<PlanMode> modes;
    std::size_t dimension = 0;  // N_R

    std::size_t coefficient_count() const;  // sum over modes of multiplicity * m_k
};

struct PlanOptions {
    double capture_rel_width = 0.35;   // capture mu in R^2 [1-w, 1+w]
    double margin = 1.0;               // safety margin subtracted from 2(L - r1)
    std::size_t points_per_inverse_frequency = 10;  // dr <= 1/(ppif * R(1+eps'))
    bool flat_cutoff = false;          // psi = indicator of B instead of the bump
    int workers = 0;
    std::string cache_dir;             // empty: no on-disk cache
};

// Builds (or loads from cache) the propagator plan.  t_max determines the big
// domain size: L = r1 + t_max/2 + 1, T_valid = 2(L - r1) - margin >= t_max.
PropagatorPlan build_propagator_plan(const Manifold& m, double R, double eps_prime,
                                     double t_max, const PlanOptions& opts = {});

// exp(-i t sqrt(mu)) phase multiplication on captured coefficients of one mode.
void half_wave_apply(const PlanMode& mode, std::vector<std::complex<double>>& coeffs,
                     double t, double t_valid);

// || psi U(t) psi u ||_{L^2} for u given by coefficients over the plan's window
// entries (canonical order: modes as stored; within a mode, +k block then -k
// block for k >= 1).  t <= t_valid enforced.
double embed_and_measure(const PropagatorPlan& plan,
                         const Eigen::VectorXcd& coefficients, double t);

// Hilbert-Schmidt norm of psi U(t) psi Pi_R: sum over window basis elements of
// ||psi U(t) psi e||^2, exact over the captured band.  Returns {HS^2, HS^2/N_R}.
struct HsNorm {
    double hs_squared = 0.0;
    double normalized = 0.0;  // HS^2 / N_R
};
HsNorm hs_norm_cutoff_propagator(const PropagatorPlan& plan, double t);

// Max capture defect over all window elements (energy-localization diagnostic).
double max_capture_defect(const PropagatorPlan& plan);

// Exact spectral evolution of a grid function through a full eigenbasis
// (test oracle; use with dirichlet_eigensystem of a small domain).
Eigen::VectorXcd evolve_grid_function(const EigenBasis& basis, const Eigen::VectorXcd& u,
                                      double t);

}  // namespace revlab
