#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revlab/mode_spectral.hpp"
#include "revlab/trapped_volume.hpp"

namespace revlab {

// One random point of the unit sphere in coefficient space: i.i.d. standard
// complex Gaussians, normalized.  Each trial owns an Rng substream, so results
// are independent of trial scheduling.
Eigen::VectorXcd sample_sphere(std::size_t n, std::uint64_t seed, std::uint64_t trial);

struct DecayCurve {
    std::vector<double> t;
    Eigen::MatrixXd norms;  // n_trials x n_t, ||psi U(t) psi u_R||
    std::vector<double> q50, q90, q99;
    double R = 0.0;
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
};

// Runs the random-data decay experiment on a prebuilt propagator plan.
DecayCurve decay_experiment(const PropagatorPlan& plan, const std::vector<double>& t_grid,
                            std::size_t n_trials, std::uint64_t seed, int workers = 0);

struct EnvelopeRow {
    double m = 0.0;
    double pass_fraction = 0.0;  // trials satisfying the bound at *all* grid times
};

// Fraction of trials with ||psi U(t) psi u|| <= m sqrt(V((1-eps) min(t, 2 t_e)))
// simultaneously over the grid, per m.
std::vector<EnvelopeRow> envelope_check(const DecayCurve& decay, const VolumeCurve& volume,
                                        double eps, double lambda_eff,
                                        const std::vector<double>& m_grid);

// Test operator for the concentration suite: reports ||A u|| for a coefficient
// vector u of dimension N, plus its Hilbert-Schmidt norm.
struct OperatorSpec {
    std::string name;
    std::size_t dim = 0;
    double hs_norm = 0.0;
    std::function<double(const Eigen::VectorXcd&)> apply_norm;
};

OperatorSpec make_identity_operator(std::size_t n);
OperatorSpec make_rank_one_projector(std::size_t n);
OperatorSpec make_diagonal_operator(std::vector<double> diagonal);
// A = psi U(t) psi Pi_R acting on window coefficients.
OperatorSpec make_propagator_operator(const PropagatorPlan& plan, double t);

struct ConcentrationRow {
    double m = 0.0;
    double empirical = 0.0;      // P(||A u|| > m N^{-1/2} ||A||_HS)
    double wilson_half = 0.0;
    double bound = 0.0;          // 2 exp(-m^2/16)
    bool pass = false;           // empirical <= bound + CI
};

struct ConcentrationReport {
    std::string operator_name;
    std::size_t dim = 0;
    double hs_norm = 0.0;
    std::size_t n_trials = 0;
    std::vector<ConcentrationRow> rows;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

ConcentrationReport concentration_test(const OperatorSpec& op, const std::vector<double>& m_grid,
                                       std::size_t n_trials, std::uint64_t seed, int workers = 0);

struct MeanIdentityReport {
    std::string operator_name;
    double empirical_mean = 0.0;  // E ||A u||^2
    double exact = 0.0;           // ||A||_HS^2 / N
    double stderr_ = 0.0;
    bool pass = false;            // |diff| <= 3 stderr
};

MeanIdentityReport mean_identity_check(const OperatorSpec& op, std::size_t n_trials,
                                       std::uint64_t seed, int workers = 0);

}  // namespace revlab
