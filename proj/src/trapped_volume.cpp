#include "revlab/trapped_volume.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"
#include "revlab/rng.hpp"
#include "revlab/stats.hpp"

namespace revlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_alpha_on_b(const Manifold& m) {
    double amax = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double r = -m.r1() + 2.0 * m.r1() * i / 2048.0;
        amax = std::max(amax, m.profile().eval(r).value);
    }
    return amax;
}
}  // namespace

LiouvilleSampler::LiouvilleSampler(const Manifold& m)
    : m_(m), weight_max_(std::pow(max_alpha_on_b(m), m.dim() - 1)) {}

ReducedState LiouvilleSampler::draw(Rng& rng) const {
    const Profile& p = m_.profile();
    const int d = m_.dim();
    double r = 0.0;
    for (;;) {
        r = rng.uniform(-m_.r1(), m_.r1());
        const double w = std::pow(p.eval(r).value, d - 1);
        if (rng.uniform() * weight_max_ <= w) break;
    }
    double rho = 0.0;
    if (d == 2) {
        rho = std::cos(rng.uniform(0.0, 2.0 * M_PI));
    } else {
        // polar angle density ~ sin^{d-2}(phi):  x = cos(phi) ~ (1-x^2)^{(d-3)/2}
        const double expo = 0.5 * (d - 3);
        for (;;) {
            const double x = rng.uniform(-1.0, 1.0);
            if (std::log(rng.uniform() + 1e-300) <= expo * std::log1p(-x * x)) {
                rho = x;
                break;
            }
        }
    }
    return state_on_sphere(p, r, rho);
}

VolumeCurve estimate_volume_curve(const Manifold& m, const std::vector<double>& t_grid,
                                  std::size_t n_samples, std::uint64_t seed, int workers) {
    if (t_grid.empty()) throw ConfigError("estimate_volume_curve: empty grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]) || t_grid[0] < 0.0)
            throw ConfigError("estimate_volume_curve: grid must be nonnegative increasing");
    if (n_samples < 1000) throw ConfigError("estimate_volume_curve: n_samples >= 1e3");

    const double t_max = t_grid.back();
    const std::size_t ngrid = t_grid.size();
    const int nworkers = resolve_workers(workers);
    const LiouvilleSampler sampler(m);
    std::atomic<std::size_t> failures{0};
    std::vector<std::vector<std::int64_t>> counts;
    std::mutex counts_mutex;

    StepControl ctl;
    parallel_for_chunks(n_samples, nworkers, 4096, [&](std::size_t begin, std::size_t end) {
        std::vector<std::int64_t> local(ngrid, 0);
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(seed, i);
            const ReducedState s = sampler.draw(rng);
            double exit = kInf;
            try {
                exit = forward_exit_time(m.profile(), m.r1(), s, t_max, ctl);
            } catch (const NumericalError&) {
                failures.fetch_add(1);
                continue;
            }
            for (std::size_t j = 0; j < ngrid; ++j)
                if (exit > t_grid[j]) ++local[j];
        }
        std::lock_guard<std::mutex> lock(counts_mutex);
        counts.push_back(std::move(local));
    });

    if (failures.load() * 10000 > n_samples)
        throw NumericalError("estimate_volume_curve: >0.01% integration failures (" +
                             std::to_string(failures.load()) + " of " +
                             std::to_string(n_samples) + ")");

    VolumeCurve out;
    out.t = t_grid;
    out.n_samples = n_samples;
    out.seed = seed;
    out.total_mass = liouville_total_mass(m);
    out.manifold = m.describe();
    out.v.resize(ngrid);
    out.ci.resize(ngrid);
    out.hits.assign(ngrid, 0);
    for (const auto& local : counts)
        for (std::size_t j = 0; j < ngrid; ++j) out.hits[j] += local[j];
    for (std::size_t j = 0; j < ngrid; ++j) {
        const auto w = wilson_interval(static_cast<std::size_t>(out.hits[j]), n_samples);
        out.v[j] = out.total_mass * static_cast<double>(out.hits[j]) /
                   static_cast<double>(n_samples);
        out.ci[j] = out.total_mass * w.half_width;
    }
    return out;
}

namespace {
// collect log-curve points with V > 0 inside the window; weights from CI
void window_points(const VolumeCurve& c, double t_lo, double t_hi, bool log_t,
                   std::vector<double>& x, std::vector<double>& y, std::vector<double>& w) {
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        if (c.t[i] < t_lo || c.t[i] > t_hi || c.v[i] <= 0.0) continue;
        if (log_t && c.t[i] <= 0.0) continue;
        const double sigma_log = c.ci[i] / 1.96 / c.v[i];  // delta method
        x.push_back(log_t ? std::log(c.t[i]) : c.t[i]);
        y.push_back(std::log(c.v[i]));
        w.push_back(1.0 / std::max(sigma_log * sigma_log, 1e-12));
    }
}
}  // namespace

FitResult fit_power_law(const VolumeCurve& c, double t_lo, double t_hi) {
    std::vector<double> x, y, w;
    window_points(c, t_lo, t_hi, true, x, y, w);
    if (x.size() < 3) throw NumericalError("fit_power_law: fewer than 3 positive points");
    const auto f = wls_linear(x, y, w);
    return {f.slope, f.slope_stderr, f.intercept, f.residual_variance, f.n};
}

RateFit fit_escape_rate(const VolumeCurve& c, double t_lo, double t_hi) {
    std::vector<double> xe, ye, we, xp, yp, wp;
    window_points(c, t_lo, t_hi, false, xe, ye, we);
    window_points(c, t_lo, t_hi, true, xp, yp, wp);
    if (xe.size() < 3) throw NumericalError("fit_escape_rate: fewer than 3 positive points");
    const auto fe = wls_linear(xe, ye, we);
    const auto fp = wls_linear(xp, yp, wp);
    RateFit out;
    out.exp_rate = -fe.slope;
    out.exp_stderr = fe.slope_stderr;
    out.power_slope = fp.slope;
    out.power_stderr = fp.slope_stderr;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    if (fp.residual_variance < fe.residual_variance) {
        out.model = DecayModel::PowerLaw;
        out.gamma = 0.0;
        out.gamma_stderr = 0.0;
    } else {
        out.model = DecayModel::Exponential;
        out.gamma = -fe.slope;
        out.gamma_stderr = fe.slope_stderr;
    }
    return out;
}

LambdaFit estimate_lambda_max(const Manifold& m, double t_fit, std::size_t n_samples,
                              std::uint64_t seed, int workers) {
    if (t_fit < 10.0) throw ConfigError("estimate_lambda_max: t_fit >= 10 required");
    // pass 1: survivors of T(t_fit)
    std::vector<std::uint8_t> survived(n_samples, 0);
    const LiouvilleSampler sampler(m);
    StepControl ctl;
    parallel_for_chunks(n_samples, workers, 4096, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(seed, i);
            const ReducedState s = sampler.draw(rng);
            const double exit = forward_exit_time(m.profile(), m.r1(), s, t_fit, ctl);
            survived[i] = std::isfinite(exit) ? 0 : 1;
        }
    });
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n_samples; ++i)
        if (survived[i]) idx.push_back(i);
    if (idx.empty())
        throw NumericalError("estimate_lambda_max: no trapped samples; enlarge n_samples");

    const std::size_t ng = 33;
    std::vector<double> grid(ng);
    for (std::size_t j = 0; j < ng; ++j)
        grid[j] = t_fit * static_cast<double>(j) / static_cast<double>(ng - 1);

    // pass 2: tangent growth along survivors; max over samples per grid time
    std::vector<double> peak(ng, -kInf);
    std::mutex merge_mutex;
    parallel_for_chunks(idx.size(), workers, 1, [&](std::size_t begin, std::size_t end) {
        std::vector<double> local(ng, -kInf);
        for (std::size_t q = begin; q < end; ++q) {
            Rng rng(seed, idx[q]);
            const ReducedState s = sampler.draw(rng);
            const auto curve = tangent_growth_curve(m.profile(), s, grid, ctl);
            for (std::size_t j = 0; j < ng; ++j) local[j] = std::max(local[j], curve[j]);
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t j = 0; j < ng; ++j) peak[j] = std::max(peak[j], local[j]);
    });

    std::vector<double> x, y;
    for (std::size_t j = 0; j < ng; ++j) {
        if (grid[j] < 0.5 * t_fit) continue;
        x.push_back(grid[j]);
        y.push_back(peak[j]);
    }
    const auto f = ols_linear(x, y);
    return {f.slope, f.slope_stderr, idx.size()};
}

double ehrenfest_time(double R, double lambda_eff) {
    if (!(R > 1.0)) throw ConfigError("ehrenfest_time: R > 1 required");
    if (!(lambda_eff > 0.0)) throw ConfigError("ehrenfest_time: Lambda_eff > 0 required");
    return std::log(R) / (2.0 * lambda_eff);
}

double weyl_exponent_m(int d, double beta, double gamma, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("weyl_exponent_m: Lambda > 0 required");
    if (beta < 0.0 || gamma < 0.0 || d < 2) throw ConfigError("weyl_exponent_m: bad arguments");
    if (beta <= 0.5 * gamma) return d - 1 - (gamma - beta) / lambda;
    return d - 1 - gamma / (2.0 * lambda);
}

double weyl_exponent_mprime(int d, double beta, double delta) {
    return std::min(2.0 * delta + 2.0 * beta + 1.0 - d, delta);
}

ExponentCurve exponent_curve(int d, double gamma, double lambda, double delta,
                             const std::vector<double>& beta_grid) {
    ExponentCurve out;
    out.d = d;
    out.gamma = gamma;
    out.lambda = lambda;
    out.delta = delta;
    out.beta = beta_grid;
    for (double b : beta_grid) {
        out.m.push_back(weyl_exponent_m(d, b, gamma, lambda));
        out.m_prime.push_back(weyl_exponent_mprime(d, b, delta));
    }
    return out;
}

double interpolate_volume(const VolumeCurve& c, double t) {
    if (c.t.empty()) throw ConfigError("interpolate_volume: empty curve");
    if (t <= c.t.front()) {
        if (c.v.front() <= 0.0) throw NumericalError("interpolate_volume: nonpositive head");
        return c.v.front();
    }
    for (std::size_t i = 1; i < c.t.size(); ++i) {
        if (t <= c.t[i]) {
            if (c.v[i - 1] <= 0.0 || c.v[i] <= 0.0)
                throw NumericalError("interpolate_volume: nonpositive estimate in range");
            const double u = (t - c.t[i - 1]) / (c.t[i] - c.t[i - 1]);
            return std::exp((1.0 - u) * std::log(c.v[i - 1]) + u * std::log(c.v[i]));
        }
    }
    throw NumericalError("interpolate_volume: curve too short for t=" + std::to_string(t));
}

double weyl_bound_rhs(int d, double R, double beta, double eps, const VolumeCurve& c,
                      double lambda_eff) {
    const double te = ehrenfest_time(R, lambda_eff);
    const double v1 = interpolate_volume(c, (1.0 - eps) * te);
    const double v2 = interpolate_volume(c, 2.0 * (1.0 - eps) * te);
    const double branch2 = std::exp(2.0 * beta * te) * v2;
    return std::pow(R, d - 1) * std::min(v1, branch2);
}

double decay_envelope(double t, double R, double gamma, double lambda, double eps,
                      double alpha_param) {
    if (t < alpha_param * std::log(R) - 1e-12)
        throw ConfigError("decay_envelope: t below the validity window");
    const double te = ehrenfest_time(R, lambda);
    if (t <= 2.0 * te) return std::exp(-0.5 * gamma * t + eps * t);
    return std::pow(R, -gamma / (2.0 * lambda) + eps);
}

IslandScaling island_scaling(const Manifold& m, const std::vector<double>& t_grid, double tau) {
    const Profile& p = m.profile();
    IslandScaling out;
    out.t = t_grid;
    out.tau = tau;
    StepControl ctl;

    // forward-trapped predicate of the island conditions:
    // start (r0 >= 0, rho0 >= 0) with p0 >= 1 - tau and r(t) <= tau
    auto trapped = [&](double r0, double rho0, double t) {
        const ReducedState s{r0, rho0,
                             std::max(0.0, std::pow(p.eval(r0).value, 2) * (1.0 - rho0 * rho0))};
        if (s.p0 < 1.0 - tau) return false;
        const double exit = forward_exit_time(p, tau, s, t, ctl);
        return !std::isfinite(exit);
    };

    for (double t : t_grid) {
        // max r(0): bisect on the rho0 = 0 ray (slowest escape), cross-checked
        // against a coarse sweep over rho0 > 0
        double lo = 0.0, hi = tau;
        if (!trapped(0.0, 0.0, t))
            throw NumericalError("island_scaling: center escapes; tau too small");
        for (int it = 0; it < 48; ++it) {
            const double mid = 0.5 * (lo + hi);
            (trapped(mid, 0.0, t) ? lo : hi) = mid;
        }
        double best_r = lo;

        // max rho(0): sweep r0 in [0, best_r], bisect on rho0
        double best_rho = 0.0;
        const int nr = 24;
        for (int i = 0; i <= nr; ++i) {
            const double r0 = best_r * i / nr;
            const double a = p.eval(r0).value;
            const double rho_cap = std::sqrt(std::max(0.0, 1.0 - (1.0 - tau) / (a * a)));
            double rlo = 0.0, rhi = rho_cap;
            if (!trapped(r0, 0.0, t)) continue;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (rlo + rhi);
                (trapped(r0, mid, t) ? rlo : rhi) = mid;
            }
            best_rho = std::max(best_rho, rlo);
        }
        out.max_r0.push_back(best_r);
        out.max_rho0.push_back(best_rho);
    }

    std::vector<double> lt, lr, lrho;
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        lt.push_back(std::log(out.t[i]));
        lr.push_back(std::log(out.max_r0[i]));
        lrho.push_back(std::log(out.max_rho0[i]));
    }
    const auto fr = ols_linear(lt, lr);
    const auto frho = ols_linear(lt, lrho);
    out.exponent_r = fr.slope;
    out.exponent_r_stderr = fr.slope_stderr;
    out.exponent_rho = frho.slope;
    out.exponent_rho_stderr = frho.slope_stderr;
    return out;
}

}  // namespace revlab
