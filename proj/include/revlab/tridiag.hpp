#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace revlab {

// Number of eigenvalues of the symmetric tridiagonal (diag, offdiag) strictly
// below x (Sturm / LDL^T sign count).
std::size_t tridiag_count_below(const std::vector<double>& diag,
                                const std::vector<double>& offdiag, double x);

struct TridiagEigs {
    std::vector<double> values;       // ascending
    Eigen::MatrixXd vectors;          // column j <-> values[j]; empty if not requested
    std::size_t index_offset = 0;     // global ascending index of values[0]
};

// All eigenvalues (and optionally eigenvectors) via LAPACK dstemr.
TridiagEigs tridiag_eigs_all(const std::vector<double>& diag,
                             const std::vector<double>& offdiag, bool want_vectors);

// Eigenpairs with eigenvalue in (vl, vu].
TridiagEigs tridiag_eigs_in_range(const std::vector<double>& diag,
                                  const std::vector<double>& offdiag, double vl, double vu,
                                  bool want_vectors);

}  // namespace revlab
