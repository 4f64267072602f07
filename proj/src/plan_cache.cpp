#include "revlab/plan_cache.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "revlab/errors.hpp"
#include "revlab/mode_spectral.hpp"
#include "revlab/rng.hpp"

namespace revlab {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'P', 'L'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t plan_key(const Manifold& m, const PropagatorPlan& p) {
    std::uint64_t h = m.profile().hash();
    auto mix = [&h](double v) { h = fnv1a(&v, sizeof(v), h); };
    mix(m.r1());
    mix(p.R);
    mix(p.eps_prime);
    mix(p.capture_rel_width);
    mix(p.half_length);
    mix(static_cast<double>(p.n_grid));
    mix(p.r_psi);
    return h;
}

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return bool(is);
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
    put<std::uint64_t>(os, v.size());
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

bool get_vec(std::istream& is, std::vector<double>& v) {
    std::uint64_t n = 0;
    if (!get(is, n)) return false;
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    return bool(is);
}

void put_mat(std::ostream& os, const Eigen::MatrixXd& m) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
}

bool get_mat(std::istream& is, Eigen::MatrixXd& m) {
    std::uint64_t r = 0, c = 0;
    if (!get(is, r) || !get(is, c)) return false;
    m.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    return bool(is);
}

}  // namespace

std::string plan_cache_path(const std::string& dir, const Manifold& m,
                            const PropagatorPlan& proto) {
    std::ostringstream os;
    os << dir << "/plan_" << std::hex << plan_key(m, proto) << ".bin";
    return os.str();
}

bool plan_cache_load(const std::string& dir, const Manifold& m, const PropagatorPlan& proto,
                     PropagatorPlan& out) {
    const std::string path = plan_cache_path(dir, m, proto);
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char magic[4];
    is.read(magic, 4);
    std::uint32_t version = 0;
    if (!is || std::memcmp(magic, kMagic, 4) != 0 || !get(is, version) || version != kVersion)
        return false;
    std::uint64_t key = 0;
    if (!get(is, key) || key != plan_key(m, proto)) return false;

    out = proto;
    out.modes.clear();
    std::uint64_t nmodes = 0;
    if (!get(is, out.R) || !get(is, out.eps_prime) || !get(is, out.capture_rel_width) ||
        !get(is, out.half_length) || !get(is, out.n_grid) || !get(is, out.dr) ||
        !get(is, out.t_valid) || !get(is, out.r1) || !get(is, out.r_psi) ||
        !get(is, out.dimension) || !get(is, nmodes))
        return false;
    for (std::uint64_t i = 0; i < nmodes; ++i) {
        PlanMode pm;
        std::uint64_t nj = 0;
        if (!get(is, pm.k) || !get(is, pm.multiplicity)) return false;
        if (!get_vec(is, pm.mu) || !get_vec(is, pm.window_lambda)) return false;
        if (!get(is, nj)) return false;
        pm.window_j.resize(nj);
        is.read(reinterpret_cast<char*>(pm.window_j.data()),
                static_cast<std::streamsize>(nj * sizeof(std::size_t)));
        if (!is) return false;
        if (!get_mat(is, pm.embed) || !get_mat(is, pm.gram)) return false;
        if (!get_vec(is, pm.capture_defect)) return false;
        pm.finalize();
        out.modes.push_back(std::move(pm));
    }
    return bool(is);
}

void plan_cache_store(const std::string& dir, const Manifold& m, const PropagatorPlan& plan) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string path = plan_cache_path(dir, m, plan);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw NumericalError("plan cache: cannot write " + tmp);
        os.write(kMagic, 4);
        put(os, kVersion);
        put(os, plan_key(m, plan));
        put(os, plan.R);
        put(os, plan.eps_prime);
        put(os, plan.capture_rel_width);
        put(os, plan.half_length);
        put(os, plan.n_grid);
        put(os, plan.dr);
        put(os, plan.t_valid);
        put(os, plan.r1);
        put(os, plan.r_psi);
        put(os, plan.dimension);
        put<std::uint64_t>(os, plan.modes.size());
        for (const auto& pm : plan.modes) {
            put(os, pm.k);
            put(os, pm.multiplicity);
            put_vec(os, pm.mu);
            put_vec(os, pm.window_lambda);
            put<std::uint64_t>(os, pm.window_j.size());
            os.write(reinterpret_cast<const char*>(pm.window_j.data()),
                     static_cast<std::streamsize>(pm.window_j.size() * sizeof(std::size_t)));
            put_mat(os, pm.embed);
            put_mat(os, pm.gram);
            put_vec(os, pm.capture_defect);
        }
        if (!os) throw NumericalError("plan cache: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw NumericalError("plan cache: rename failed: " + ec.message());
}

}  // namespace revlab
