#include "ksym/linalg.hpp"

#include <cmath>

#include "ksym/errors.hpp"

namespace ksym {

namespace {

// In-place LU with partial pivoting. Returns the pivot sign, or 0 when a
// pivot column is exactly empty; smallest absolute pivot goes to *min_pivot.
int lu_factor(std::vector<double>& a, std::vector<int>& perm, int n, double* min_pivot) {
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  double smallest = HUGE_VAL;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[best * n + col])) best = r;
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[best * n + c]);
      std::swap(perm[col], perm[best]);
      sign = -sign;
    }
    double pivot = a[col * n + col];
    smallest = std::min(smallest, std::abs(pivot));
    if (pivot == 0.0) {
      if (min_pivot) *min_pivot = 0.0;
      return 0;
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / pivot;
      a[r * n + col] = f;
      for (int c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  if (min_pivot) *min_pivot = smallest;
  return sign;
}

}  // namespace

double lu_det(std::vector<double> a, int n) {
  if ((int)a.size() != n * n) throw DimensionMismatch("lu_det: matrix size mismatch");
  std::vector<int> perm;
  int sign = lu_factor(a, perm, n, nullptr);
  if (sign == 0) return 0.0;
  double det = sign;
  for (int i = 0; i < n; ++i) det *= a[i * n + i];
  return det;
}

std::optional<std::vector<double>> lu_solve(std::vector<double> a, std::vector<double> b, int n,
                                            double pivot_tol) {
  if ((int)a.size() != n * n || (int)b.size() != n)
    throw DimensionMismatch("lu_solve: size mismatch");
  std::vector<int> perm;
  double min_pivot = 0.0;
  int sign = lu_factor(a, perm, n, &min_pivot);
  if (sign == 0 || min_pivot < pivot_tol) return std::nullopt;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= a[i * n + j] * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= a[i * n + j] * x[j];
    x[i] /= a[i * n + i];
  }
  return x;
}

std::vector<double> min_norm_solve(const std::vector<double>& m, const std::vector<double>& b,
                                   int rows, int cols) {
  if ((int)m.size() != rows * cols || (int)b.size() != rows)
    throw DimensionMismatch("min_norm_solve: size mismatch");
  if (rows > cols) throw DimensionMismatch("min_norm_solve: more rows than columns");
  std::vector<double> gram(rows * rows, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int s = 0; s < rows; ++s) {
      double acc = 0.0;
      for (int c = 0; c < cols; ++c) acc += m[r * cols + c] * m[s * cols + c];
      gram[r * rows + s] = acc;
    }
  auto y = lu_solve(std::move(gram), b, rows);
  if (!y) throw RankDeficiencyUnexpected("minimum-norm solve: coefficient rows are rank deficient");
  std::vector<double> x(cols, 0.0);
  for (int c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < rows; ++r) acc += m[r * cols + c] * (*y)[r];
    x[c] = acc;
  }
  return x;
}

}  // namespace ksym
