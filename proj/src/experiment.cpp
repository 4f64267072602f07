#include "revlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "revlab/errors.hpp"
#include "revlab/geometry.hpp"
#include "revlab/io_csv.hpp"
#include "revlab/parallel.hpp"
#include "revlab/mode_spectral.hpp"
#include "revlab/random_decay.hpp"
#include "revlab/resonances.hpp"
#include "revlab/rng.hpp"
#include "revlab/svg.hpp"
#include "revlab/trapped_volume.hpp"

namespace revlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

void require_keys(const json& j, const std::string& where,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
    for (const auto& k : required)
        if (!j.contains(k))
            throw ConfigError("config: missing required field '" + k + "' in " + where);
    std::set<std::string> allowed(required.begin(), required.end());
    allowed.insert(optional.begin(), optional.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
}

Profile parse_profile(const json& j) {
    require_keys(j, "profile", {"family"}, {"n", "a"});
    const std::string family = j.at("family");
    if (family == "cylindrical") return Profile::cylindrical();
    if (family == "degenerate") {
        if (!j.contains("n")) throw ConfigError("config: degenerate profile needs 'n'");
        return Profile::degenerate(j.at("n").get<int>());
    }
    if (family == "neck") {
        if (!j.contains("a")) throw ConfigError("config: neck profile needs 'a'");
        return Profile::neck(j.at("a").get<double>());
    }
    throw ConfigError("config: unknown profile family '" + family + "'");
}

Manifold parse_manifold(const json& j) {
    require_keys(j, "manifold", {"profile", "d", "r1"}, {"r0"});
    Profile p = parse_profile(j.at("profile"));
    const int d = j.at("d").get<int>();
    const double r1 = j.at("r1").get<double>();
    if (j.contains("r0")) {
        const double r0 = j.at("r0").get<double>();
        if (r1 > r0 && r0 >= p.end_radius()) return Manifold(p, d, r0, r1);
    }
    return Manifold::with_b_radius(p, d, r1);
}

std::uint64_t config_hash(const json& j) { return fnv1a_str(j.dump()); }

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[65536];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0)
        h = fnv1a(buf, static_cast<std::size_t>(is.gcount()), h);
    return h;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g;
    for (std::size_t i = 0; i < points; ++i)
        g.push_back(lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(points - 1));
    return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    std::vector<double> g;
    for (std::size_t i = 0; i < points; ++i)
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) /
                                  static_cast<double>(points - 1)));
    return g;
}

struct Context {
    json cfg;
    std::string kind;
    std::uint64_t hash = 0;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string cache_dir;
    std::vector<std::string> outputs;

    std::string header() const {
        return "config_hash=" + hash_hex(hash) + " kind=" + kind +
               " seed=" + std::to_string(seed) + " version=" + kVersion;
    }
    std::string path(const std::string& name) { return out_dir + "/" + name; }
    void produced(const std::string& p) { outputs.push_back(p); }
};

void ensure_validated(const Manifold& m) {
    const auto report = validate_profile(m);
    if (!report.all_pass()) {
        std::string bad;
        for (const auto& e : report.entries)
            if (!e.pass) bad += e.name + " ";
        throw NumericalError("profile validation failed: " + bad);
    }
}

// ---------------------------------------------------------------- validate
void run_validate(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    const auto report = validate_profile(m);
    CsvWriter csv(ctx.path("validation.csv"), ctx.header(),
                  {"check", "pass", "witness_r", "residual"});
    for (const auto& e : report.entries) {
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%d,%.12g,%.12g", e.name.c_str(), e.pass ? 1 : 0,
                      e.witness_r, e.residual);
        csv.raw_row(line);
        std::cout << (e.pass ? "[pass] " : "[FAIL] ") << e.name << " residual=" << e.residual
                  << " witness r=" << e.witness_r << "\n";
    }
    ctx.produced(ctx.path("validation.csv"));
}

// ------------------------------------------------------------------ volume
VolumeCurve volume_from_config(Context& ctx, const Manifold& m, const json& v) {
    require_keys(v, "volume", {"t_min", "t_max", "points", "n_samples"},
                 {"log_spacing", "include_zero", "fit_window"});
    const bool logsp = v.value("log_spacing", true);
    std::vector<double> grid = logsp ? log_grid(v.at("t_min"), v.at("t_max"), v.at("points"))
                                     : linear_grid(v.at("t_min"), v.at("t_max"), v.at("points"));
    if (v.value("include_zero", true)) grid.insert(grid.begin(), 0.0);
    return estimate_volume_curve(m, grid, v.at("n_samples").get<std::size_t>(), ctx.seed,
                                 ctx.workers);
}

void write_volume_csv(Context& ctx, const std::string& name, const VolumeCurve& c) {
    CsvWriter csv(ctx.path(name), ctx.header(), {"t", "V_hat", "ci", "n"});
    for (std::size_t i = 0; i < c.t.size(); ++i)
        csv.row({c.t[i], c.v[i], c.ci[i], static_cast<double>(c.n_samples)});
    ctx.produced(ctx.path(name));
}

void run_volume(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    ensure_validated(m);
    const json& v = ctx.cfg.at("volume");
    const VolumeCurve curve = volume_from_config(ctx, m, v);
    write_volume_csv(ctx, "volume.csv", curve);

    double fit_lo = curve.t.size() > 1 ? curve.t[1] : curve.t[0], fit_hi = curve.t.back();
    if (v.contains("fit_window")) {
        fit_lo = v.at("fit_window").at(0);
        fit_hi = v.at("fit_window").at(1);
    }
    const auto pf = fit_power_law(curve, fit_lo, fit_hi);
    const auto rf = fit_escape_rate(curve, fit_lo, fit_hi);
    {
        CsvWriter csv(ctx.path("volume_fit.csv"), ctx.header(),
                      {"power_slope", "power_stderr", "gamma", "gamma_stderr", "model_is_exp",
                       "fit_lo", "fit_hi"});
        csv.row({pf.value, pf.stderr_, rf.gamma, rf.gamma_stderr,
                 rf.model == DecayModel::Exponential ? 1.0 : 0.0, fit_lo, fit_hi});
        ctx.produced(ctx.path("volume_fit.csv"));
    }
    std::cout << "volume: power-law slope " << pf.value << " +- " << pf.stderr_
              << ", gamma " << rf.gamma << " +- " << rf.gamma_stderr << " ("
              << (rf.model == DecayModel::Exponential ? "exponential" : "power-law")
              << " tail)\n";

    SvgPlot plot("trapped volume", "t", "V(t)", true, true);
    std::vector<double> tpos, vpos;
    for (std::size_t i = 0; i < curve.t.size(); ++i)
        if (curve.t[i] > 0 && curve.v[i] > 0) {
            tpos.push_back(curve.t[i]);
            vpos.push_back(curve.v[i]);
        }
    plot.add_scatter(tpos, vpos, "V(t)", "#1f77b4");
    std::vector<double> fx = tpos, fy;
    for (double t : fx) fy.push_back(std::exp(pf.intercept) * std::pow(t, pf.value));
    plot.add_line(fx, fy, "power fit", "#d62728");
    plot.write(ctx.path("volume.svg"));
    ctx.produced(ctx.path("volume.svg"));
}

// ------------------------------------------------------------------- rates
void run_rates(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    ensure_validated(m);
    const json& v = ctx.cfg.at("volume");
    const VolumeCurve curve = volume_from_config(ctx, m, v);
    write_volume_csv(ctx, "volume.csv", curve);

    double fit_lo = v.at("fit_window").at(0), fit_hi = v.at("fit_window").at(1);
    const auto rf = fit_escape_rate(curve, fit_lo, fit_hi);

    const json& l = ctx.cfg.at("lambda");
    require_keys(l, "lambda", {"t_fit", "n_samples"}, {});
    const auto lf = estimate_lambda_max(m, l.at("t_fit"), l.at("n_samples").get<std::size_t>(),
                                        ctx.seed ^ 0x9e37u, ctx.workers);

    CsvWriter csv(ctx.path("rates.csv"), ctx.header(),
                  {"gamma", "gamma_stderr", "model_is_exp", "lambda", "lambda_stderr",
                   "n_trapped"});
    csv.row({rf.gamma, rf.gamma_stderr, rf.model == DecayModel::Exponential ? 1.0 : 0.0,
             lf.lambda, lf.stderr_, static_cast<double>(lf.n_trapped)});
    ctx.produced(ctx.path("rates.csv"));
    std::cout << "rates: gamma " << rf.gamma << " +- " << rf.gamma_stderr << ", Lambda "
              << lf.lambda << " +- " << lf.stderr_ << " (" << lf.n_trapped
              << " trapped samples)\n";

    if (ctx.cfg.contains("island")) {
        const json& isl = ctx.cfg.at("island");
        require_keys(isl, "island", {"t_grid", "tau"}, {});
        const auto scal = island_scaling(m, isl.at("t_grid").get<std::vector<double>>(),
                                         isl.at("tau"));
        CsvWriter icsv(ctx.path("island.csv"), ctx.header(), {"t", "max_r0", "max_rho0"});
        for (std::size_t i = 0; i < scal.t.size(); ++i)
            icsv.row({scal.t[i], scal.max_r0[i], scal.max_rho0[i]});
        ctx.produced(ctx.path("island.csv"));
        std::cout << "island: r0 exponent " << scal.exponent_r << " +- "
                  << scal.exponent_r_stderr << ", rho0 exponent " << scal.exponent_rho
                  << " +- " << scal.exponent_rho_stderr << "\n";
    }
}

// --------------------------------------------------------------- exponents
void run_exponents(Context& ctx) {
    const json& e = ctx.cfg.at("exponents");
    require_keys(e, "exponents", {"d", "gamma", "lambda", "delta"},
                 {"beta_max", "beta_points"});
    const int d = e.at("d");
    const double gamma = e.at("gamma"), lambda = e.at("lambda"), delta = e.at("delta");
    const double beta_max = e.value("beta_max", std::max(1.0, gamma));
    const std::size_t points = e.value("beta_points", std::size_t{201});
    const auto curve = exponent_curve(d, gamma, lambda, delta,
                                      linear_grid(0.0, beta_max, points));
    CsvWriter csv(ctx.path("figure1a.csv"), ctx.header(), {"beta", "m", "m_prime"});
    for (std::size_t i = 0; i < curve.beta.size(); ++i)
        csv.row({curve.beta[i], curve.m[i], curve.m_prime[i]});
    ctx.produced(ctx.path("figure1a.csv"));

    SvgPlot plot("Weyl exponents", "beta", "exponent", false, false);
    plot.add_line(curve.beta, curve.m, "m(beta,gamma)", "#1f77b4");
    plot.add_line(curve.beta, curve.m_prime, "m'(beta,delta)", "#2ca02c");
    plot.add_line({curve.beta.front(), curve.beta.back()},
                  {static_cast<double>(d - 1), static_cast<double>(d - 1)}, "d-1",
                  "#7f7f7f");
    plot.write(ctx.path("figure1a.svg"));
    ctx.produced(ctx.path("figure1a.svg"));
}

// ---------------------------------------------------------------- spectrum
void run_spectrum(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    ensure_validated(m);
    const json& s = ctx.cfg.at("spectrum");
    require_keys(s, "spectrum", {"R_list", "eps_prime"}, {"points_per_inverse_frequency"});
    const double epsp = s.at("eps_prime");
    const std::size_t ppif = s.value("points_per_inverse_frequency", std::size_t{10});

    CsvWriter counts(ctx.path("spectrum_counts.csv"), ctx.header(), {"R", "N_R"});
    for (double R : s.at("R_list").get<std::vector<double>>()) {
        const auto n_grid = static_cast<std::size_t>(
            std::ceil(2.0 * m.r1() * static_cast<double>(ppif) * R * (1.0 + epsp)));
        const auto wb = frequency_window(m, R, epsp, n_grid, ctx.workers);
        counts.row({R, static_cast<double>(wb.dimension)});
        char name[64];
        std::snprintf(name, sizeof(name), "eigs_R%g.csv", R);
        CsvWriter eigs(ctx.path(name), ctx.header(), {"k", "j", "lambda"});
        for (const auto& w : wb.entries)
            eigs.row({static_cast<double>(w.k), static_cast<double>(w.j), w.lambda});
        ctx.produced(ctx.path(name));
        std::cout << "spectrum: R=" << R << " N_R=" << wb.dimension << "\n";
    }
    ctx.produced(ctx.path("spectrum_counts.csv"));
}

// ------------------------------------------------------------------- decay
void run_decay(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    ensure_validated(m);
    const json& d = ctx.cfg.at("decay");
    require_keys(d, "decay",
                 {"R_list", "eps_prime", "n_trials", "t_points", "lambda_eff", "eps"},
                 {"alpha_param", "t_max_factor", "capture_rel_width", "m_grid"});
    const double epsp = d.at("eps_prime");
    const double lambda_eff = d.at("lambda_eff");
    const double eps = d.at("eps");
    const double alpha_param = d.value("alpha_param", 1.0);
    const double t_max_factor = d.value("t_max_factor", 6.0);
    const std::size_t n_trials = d.at("n_trials").get<std::size_t>();

    const VolumeCurve vol = volume_from_config(ctx, m, ctx.cfg.at("volume"));
    write_volume_csv(ctx, "volume.csv", vol);

    SvgPlot plot("random-data decay", "t", "median ||psi U psi u||", false, true);
    int color_idx = 0;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    for (double R : d.at("R_list").get<std::vector<double>>()) {
        const double te = ehrenfest_time(R, lambda_eff);
        const double t_lo = alpha_param * std::log(R);
        const double t_max = t_max_factor * te;
        PlanOptions opts;
        opts.workers = ctx.workers;
        opts.cache_dir = ctx.cache_dir;
        if (d.contains("capture_rel_width")) opts.capture_rel_width = d.at("capture_rel_width");
        const auto plan = build_propagator_plan(m, R, epsp, t_max, opts);
        const auto grid = linear_grid(t_lo, std::min(t_max, plan.t_valid),
                                      d.at("t_points").get<std::size_t>());
        const auto decay = decay_experiment(plan, grid, n_trials, ctx.seed, ctx.workers);

        char name[64];
        std::snprintf(name, sizeof(name), "decay_R%g.csv", R);
        CsvWriter csv(ctx.path(name), ctx.header(), {"t", "q50", "q90", "q99", "envelope"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double env = std::sqrt(
                interpolate_volume(vol, (1.0 - eps) * std::min(grid[i], 2.0 * te)));
            csv.row({grid[i], decay.q50[i], decay.q90[i], decay.q99[i], env});
        }
        ctx.produced(ctx.path(name));

        // Hilbert-Schmidt companion (desk-scale Lemma analogue data)
        std::snprintf(name, sizeof(name), "hs_R%g.csv", R);
        CsvWriter hs(ctx.path(name), ctx.header(), {"t", "hs_normalized", "v_interp"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto h = hs_norm_cutoff_propagator(plan, grid[i]);
            double vv = 0.0;
            try {
                vv = interpolate_volume(vol, 2.0 * (1.0 - eps) * grid[i]);
            } catch (const NumericalError&) {
                vv = 0.0;
            }
            hs.row({grid[i], h.normalized, vv});
        }
        ctx.produced(ctx.path(name));

        std::cout << "decay: R=" << R << " N_R=" << plan.dimension
                  << " capture defect=" << max_capture_defect(plan) << "\n";
        plot.add_line(grid, decay.q50, "R=" + std::to_string(static_cast<int>(R)),
                      colors[color_idx % 4]);
        ++color_idx;

        if (d.contains("m_grid")) {
            const auto rows = envelope_check(decay, vol, eps, lambda_eff,
                                             d.at("m_grid").get<std::vector<double>>());
            std::snprintf(name, sizeof(name), "envelope_R%g.csv", R);
            CsvWriter env(ctx.path(name), ctx.header(), {"m", "pass_fraction"});
            for (const auto& r : rows) env.row({r.m, r.pass_fraction});
            ctx.produced(ctx.path(name));
        }
    }
    plot.write(ctx.path("decay.svg"));
    ctx.produced(ctx.path("decay.svg"));
}

// ----------------------------------------------------------- concentration
void run_concentration(Context& ctx) {
    const json& c = ctx.cfg.at("concentration");
    require_keys(c, "concentration", {"N", "n_trials", "m_grid"}, {"operators"});
    const std::size_t N = c.at("N").get<std::size_t>();
    const std::size_t n_trials = c.at("n_trials").get<std::size_t>();
    const auto m_grid = c.at("m_grid").get<std::vector<double>>();
    std::vector<std::string> ops =
        c.value("operators", std::vector<std::string>{"identity", "projector", "diagonal_half"});

    CsvWriter csv(ctx.path("concentration.csv"), ctx.header(),
                  {"operator", "m", "empirical", "wilson_half", "bound", "pass"});
    CsvWriter mcsv(ctx.path("mean_identity.csv"), ctx.header(),
                   {"operator", "empirical", "exact", "stderr", "pass"});
    for (const auto& name : ops) {
        OperatorSpec spec;
        if (name == "identity") spec = make_identity_operator(N);
        else if (name == "projector") spec = make_rank_one_projector(N);
        else if (name == "diagonal_half") {
            std::vector<double> diag(N, 0.0);
            for (std::size_t i = 0; i < N / 2; ++i) diag[i] = 1.0;
            spec = make_diagonal_operator(std::move(diag));
        } else
            throw ConfigError("config: unknown operator '" + name + "'");
        const auto rep = concentration_test(spec, m_grid, n_trials, ctx.seed, ctx.workers);
        for (const auto& row : rep.rows) {
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%.12g,%.12g,%.12g,%.12g,%d",
                          name.c_str(), row.m, row.empirical, row.wilson_half, row.bound,
                          row.pass ? 1 : 0);
            csv.raw_row(line);
        }
        const auto mi = mean_identity_check(spec, std::min<std::size_t>(n_trials, 20000),
                                            ctx.seed ^ 0x77u, ctx.workers);
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%.12g,%.12g,%.12g,%d", name.c_str(),
                      mi.empirical_mean, mi.exact, mi.stderr_, mi.pass ? 1 : 0);
        mcsv.raw_row(line);
        std::cout << "concentration: " << name << (rep.all_pass() ? " pass" : " FAIL")
                  << ", mean identity " << (mi.pass ? "pass" : "FAIL") << "\n";
    }
    ctx.produced(ctx.path("concentration.csv"));
    ctx.produced(ctx.path("mean_identity.csv"));
}

// -------------------------------------------------------------- resonances
void run_resonances(Context& ctx) {
    const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
    ensure_validated(m);
    const json& r = ctx.cfg.at("resonances");
    require_keys(r, "resonances", {"theta", "beta", "R_list"},
                 {"half_length", "points_per_inverse_frequency", "mode_limit"});
    const double theta = r.at("theta");
    const double beta = r.at("beta");
    const double L = r.value("half_length", 10.0);
    const std::size_t ppif = r.value("points_per_inverse_frequency", std::size_t{12});
    const auto scaling = make_scaling_profile(theta, m.r1());

    CsvWriter csv(ctx.path("resonances.csv"), ctx.header(),
                  {"k", "Re_omega", "Im_omega", "residual", "theta"});
    CsvWriter counts(ctx.path("resonance_counts.csv"), ctx.header(), {"R", "beta", "count"});
    std::vector<double> xs, ys;
    for (double R : r.at("R_list").get<std::vector<double>>()) {
        const int klim = r.contains("mode_limit") ? r.at("mode_limit").get<int>()
                                                  : resonance_mode_limit(m, R);
        const auto n = static_cast<std::size_t>(
            std::ceil(2.0 * L * static_cast<double>(ppif) * (R + 1.0)));
        const auto rc = count_resonances(m, R, beta, scaling, klim, L, n, ctx.workers);
        counts.row({R, beta, static_cast<double>(rc.count)});
        for (const auto& res : rc.resonances) {
            csv.row({static_cast<double>(res.k), res.omega.real(), res.omega.imag(),
                     res.residual, res.theta});
            xs.push_back(res.omega.real());
            ys.push_back(res.omega.imag());
        }
        std::cout << "resonances: N(" << R << ", " << beta << ") = " << rc.count << "\n";
    }
    ctx.produced(ctx.path("resonances.csv"));
    ctx.produced(ctx.path("resonance_counts.csv"));

    SvgPlot plot("resonances", "Re omega", "Im omega", false, false);
    plot.add_scatter(xs, ys, "resonances", "#1f77b4");
    plot.write(ctx.path("resonances.svg"));
    ctx.produced(ctx.path("resonances.svg"));
}

Context make_context(const std::string& config_path, const RunOverrides& overrides) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config " + config_path);
    Context ctx;
    try {
        is >> ctx.cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    require_keys(ctx.cfg, "top level", {"kind", "output_dir"},
                 {"seed", "workers", "cache_dir", "manifold", "volume", "lambda", "island",
                  "exponents", "spectrum", "decay", "concentration", "resonances"});
    ctx.kind = ctx.cfg.at("kind");
    const std::set<std::string> kinds = {"validate", "volume",       "rates",     "exponents",
                                         "spectrum", "decay",        "concentration",
                                         "resonances"};
    if (!kinds.count(ctx.kind)) throw ConfigError("config: unknown kind '" + ctx.kind + "'");
    const std::set<std::string> stochastic = {"volume", "rates", "decay", "concentration"};
    if (stochastic.count(ctx.kind)) {
        if (!ctx.cfg.contains("seed"))
            throw ConfigError("config: missing required field 'seed' for kind '" + ctx.kind +
                              "'");
        ctx.seed = ctx.cfg.at("seed").get<std::uint64_t>();
    } else {
        ctx.seed = ctx.cfg.value("seed", std::uint64_t{0});
    }
    ctx.hash = config_hash(ctx.cfg);
    ctx.out_dir = ctx.cfg.at("output_dir");
    ctx.workers = overrides.workers > 0 ? overrides.workers : ctx.cfg.value("workers", 0);
    ctx.cache_dir = !overrides.cache_dir.empty()
                        ? overrides.cache_dir
                        : ctx.cfg.value("cache_dir", std::string{});
    if (const char* env = std::getenv("REVLAB_CACHE_DIR"); env && ctx.cache_dir.empty())
        ctx.cache_dir = env;
    return ctx;
}

void write_manifest(Context& ctx) {
    json manifest;
    manifest["config_hash"] = hash_hex(ctx.hash);
    manifest["version"] = kVersion;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    manifest["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now).count();
    json files = json::array();
    for (const auto& p : ctx.outputs) {
        json f;
        f["path"] = fs::path(p).filename().string();
        f["fnv64"] = hash_hex(file_hash(p));
        files.push_back(f);
    }
    manifest["outputs"] = files;
    std::ofstream os(ctx.out_dir + "/manifest.json", std::ios::trunc);
    os << manifest.dump(2) << "\n";
}

}  // namespace

std::vector<std::string> run_experiment(const std::string& config_path,
                                        const RunOverrides& overrides) {
    Context ctx = make_context(config_path, overrides);
    fs::create_directories(ctx.out_dir);
    if (ctx.kind == "validate") run_validate(ctx);
    else if (ctx.kind == "volume") run_volume(ctx);
    else if (ctx.kind == "rates") run_rates(ctx);
    else if (ctx.kind == "exponents") run_exponents(ctx);
    else if (ctx.kind == "spectrum") run_spectrum(ctx);
    else if (ctx.kind == "decay") run_decay(ctx);
    else if (ctx.kind == "concentration") run_concentration(ctx);
    else if (ctx.kind == "resonances") run_resonances(ctx);
    write_manifest(ctx);
    return ctx.outputs;
}

void describe_experiment(const std::string& config_path) {
    Context ctx = make_context(config_path, {});
    std::cout << "kind: " << ctx.kind << "\nconfig hash: " << hash_hex(ctx.hash)
              << "\nworkers: " << resolve_workers(ctx.workers) << "\n";
    if (ctx.kind == "volume" || ctx.kind == "rates") {
        const json& v = ctx.cfg.at("volume");
        const auto n = v.at("n_samples").get<std::size_t>();
        std::cout << "samples: " << n << " in " << (n + 4095) / 4096 << " batches of 4096\n"
                  << "time grid: " << v.at("points").get<std::size_t>() << " points up to t="
                  << v.at("t_max").get<double>() << "\n";
    } else if (ctx.kind == "spectrum" || ctx.kind == "decay") {
        const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
        const json& blk = ctx.cfg.at(ctx.kind);
        const double epsp = blk.at("eps_prime");
        for (double R : blk.at("R_list").get<std::vector<double>>()) {
            const int klim = window_mode_limit(m, R, epsp);
            const double dr = 1.0 / (10.0 * R * (1.0 + epsp));
            const auto nB = static_cast<std::size_t>(2.0 * m.r1() / dr);
            std::cout << "R=" << R << ": modes |k| <= " << klim << ", B-grid " << nB
                      << " points per mode";
            if (ctx.kind == "decay") {
                const double te = ehrenfest_time(R, blk.at("lambda_eff").get<double>());
                const double L = m.r1() + 0.5 * 6.0 * te + 1.0;
                const auto nL = static_cast<std::size_t>(2.0 * L / dr);
                const double mem_gb = static_cast<double>(nL) * 400.0 * 8.0 / 1e9;
                std::cout << ", big-grid " << nL << " points, trials "
                          << blk.at("n_trials").get<std::size_t>() << ", est. peak "
                          << mem_gb << " GB/mode-buffer";
            }
            std::cout << "\n";
        }
    } else if (ctx.kind == "resonances") {
        const Manifold m = parse_manifold(ctx.cfg.at("manifold"));
        const json& blk = ctx.cfg.at("resonances");
        const double L = blk.value("half_length", 10.0);
        for (double R : blk.at("R_list").get<std::vector<double>>()) {
            const int klim = blk.contains("mode_limit") ? blk.at("mode_limit").get<int>()
                                                        : resonance_mode_limit(m, R);
            const auto n = static_cast<std::size_t>(2.0 * L * 12.0 * (R + 1.0));
            std::cout << "R=" << R << ": contour " << n << " points, modes 0.." << klim
                      << ", ~" << 10 * (klim + 1) << " shift-invert factorizations\n";
        }
    } else if (ctx.kind == "concentration") {
        const json& c = ctx.cfg.at("concentration");
        std::cout << "N=" << c.at("N").get<std::size_t>() << ", trials "
                  << c.at("n_trials").get<std::size_t>() << ", m grid size "
                  << c.at("m_grid").size() << "\n";
    } else {
        std::cout << "no heavy resources\n";
    }
}

}  // namespace revlab
