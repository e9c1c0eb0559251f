#pragma once

#include <optional>
#include <vector>

namespace ksym {

/// Determinant of a dense row-major n x n matrix, LU with partial pivoting.
double lu_det(std::vector<double> a, int n);

/// Solve a x = b for a dense row-major n x n matrix. Returns nothing when a
/// pivot falls below pivot_tol in absolute value.
std::optional<std::vector<double>> lu_solve(std::vector<double> a, std::vector<double> b, int n,
                                            double pivot_tol = 1e-12);

/// Minimum-norm solution of the underdetermined full-row-rank system
/// m x = b (rows <= cols, m row-major rows x cols) via the Gram system
/// m m^T y = b, x = m^T y. Throws RankDeficiencyUnexpected when the Gram
/// matrix is numerically singular.
std::vector<double> min_norm_solve(const std::vector<double>& m, const std::vector<double>& b,
                                   int rows, int cols);

}  // namespace ksym
