#include "revlab/tridiag.hpp"

#include <cmath>
#include <lapacke.h>

#include "revlab/errors.hpp"

namespace revlab {

std::size_t tridiag_count_below(const std::vector<double>& diag,
                                const std::vector<double>& offdiag, double x) {
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double off2 = i == 0 ? 0.0 : offdiag[i - 1] * offdiag[i - 1];
        d = diag[i] - x - (i == 0 ? 0.0 : off2 / d);
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

namespace {

TridiagEigs run_stemr(const std::vector<double>& diag, const std::vector<double>& offdiag,
                      char range, double vl, double vu, bool want_vectors) {
    const auto n = static_cast<lapack_int>(diag.size());
    if (n == 0) return {};
    std::vector<double> d(diag);
    std::vector<double> e(offdiag);
    e.resize(static_cast<std::size_t>(n), 0.0);  // stemr wants n entries of workspace

    TridiagEigs out;
    std::vector<double> w(static_cast<std::size_t>(n));
    lapack_int m = 0;
    lapack_int nzc = range == 'A' ? n : n;  // upper bound on columns
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max<lapack_int>(1, n)));
    lapack_int tryrac = 1;

    Eigen::MatrixXd z;
    double* zptr = nullptr;
    lapack_int ldz = 1;
    if (want_vectors) {
        z.resize(n, nzc);
        zptr = z.data();
        ldz = n;
    }

    const lapack_int info = LAPACKE_dstemr(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', range, n, d.data(), e.data(), vl, vu,
        /*il=*/1, /*iu=*/n, &m, w.data(), zptr, ldz, nzc, isuppz.data(), &tryrac);
    if (info != 0)
        throw NumericalError("dstemr failed with info=" + std::to_string(info));

    out.values.assign(w.begin(), w.begin() + m);
    if (want_vectors) out.vectors = z.leftCols(m);
    if (range == 'V' && m > 0) {
        // global index of the first returned eigenvalue (spectrum is simple:
        // Jacobi matrix with nonzero off-diagonals)
        const double v0 = out.values.front();
        out.index_offset =
            tridiag_count_below(diag, offdiag, v0 - 1e-10 * std::max(1.0, std::abs(v0)));
    }
    return out;
}

}  // namespace

TridiagEigs tridiag_eigs_all(const std::vector<double>& diag,
                             const std::vector<double>& offdiag, bool want_vectors) {
    return run_stemr(diag, offdiag, 'A', 0.0, 0.0, want_vectors);
}

TridiagEigs tridiag_eigs_in_range(const std::vector<double>& diag,
                                  const std::vector<double>& offdiag, double vl, double vu,
                                  bool want_vectors) {
    return run_stemr(diag, offdiag, 'V', vl, vu, want_vectors);
}

}  // namespace revlab
