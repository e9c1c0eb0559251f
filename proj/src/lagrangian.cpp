#include "ksym/lagrangian.hpp"

#include <cmath>
#include <string>

#include "ksym/linalg.hpp"

namespace ksym {

namespace {

constexpr double kRegularityMinDet = 1e-9;
constexpr double kSolveResidualTol = 1e-10;

}  // namespace

LagrangianForms::LagrangianForms(const Dims& dims_)
    : dims(dims_), theta((std::size_t)dims.k * dims.n),
      omega_qq((std::size_t)dims.k * dims.n * dims.n),
      omega_qv((std::size_t)dims.k * dims.n * dims.k * dims.n) {}

HessianBlocks::HessianBlocks(const Dims& dims_)
    : dims(dims_), H((std::size_t)dims.n * dims.k * dims.n * dims.k) {}

std::vector<double> HessianBlocks::eval_at(std::span<const double> coords) const {
  std::vector<double> m(H.size());
  for (std::size_t idx = 0; idx < H.size(); ++idx) m[idx] = eval(H[idx], coords);
  return m;
}

LagrangianForms forms(const Lagrangian& L) {
  const Dims dims = L.dims;
  LagrangianForms f(dims);
  for (int A = 1; A <= dims.k; ++A)
    for (int i = 1; i <= dims.n; ++i) {
      const ScalarExpr dLdv = diff(L.L, Var::velocity(i, A));
      f.theta[(A - 1) * dims.n + (i - 1)] = simplify(dLdv);
      for (int j = 1; j <= dims.n; ++j)
        f.omega_qq[((A - 1) * dims.n + (i - 1)) * dims.n + (j - 1)] =
            simplify(diff(dLdv, Var::base(j)));
      for (int B = 1; B <= dims.k; ++B)
        for (int j = 1; j <= dims.n; ++j)
          f.omega_qv[(((A - 1) * dims.n + (i - 1)) * dims.k + (B - 1)) * dims.n + (j - 1)] =
              simplify(diff(dLdv, Var::velocity(j, B)));
    }
  return f;
}

ScalarExpr energy(const Lagrangian& L) {
  ScalarExpr acc;
  for (int A = 1; A <= L.dims.k; ++A)
    for (int i = 1; i <= L.dims.n; ++i)
      acc = acc + ScalarExpr::variable(Var::velocity(i, A), L.dims) *
                      diff(L.L, Var::velocity(i, A));
  return simplify(acc - L.L);
}

HessianBlocks hessian(const Lagrangian& L) {
  const Dims dims = L.dims;
  HessianBlocks h(dims);
  for (int A = 1; A <= dims.k; ++A)
    for (int i = 1; i <= dims.n; ++i) {
      const ScalarExpr dLdv = diff(L.L, Var::velocity(i, A));
      for (int B = 1; B <= dims.k; ++B)
        for (int j = 1; j <= dims.n; ++j)
          h.at(i, A, j, B) = simplify(diff(dLdv, Var::velocity(j, B)));
    }
  return h;
}

RegularityReport regularity(const Lagrangian& L,
                            const std::vector<std::vector<double>>& probes) {
  const HessianBlocks h = hessian(L);
  const int m = L.dims.n * L.dims.k;
  RegularityReport out;
  out.min_abs_det = HUGE_VAL;
  for (const auto& p : probes)
    out.min_abs_det = std::min(out.min_abs_det, std::abs(lu_det(h.eval_at(p), m)));
  if (probes.empty()) out.min_abs_det = 0.0;
  out.regular = out.min_abs_det > kRegularityMinDet;
  return out;
}

std::vector<double> el_residual(const Lagrangian& L, const Sopde& s, const BundlePoint& p) {
  if (L.dims != s.dims || L.dims != p.dims)
    throw DimensionMismatch("el_residual: mismatched chart dimensions");
  const Dims dims = L.dims;
  const std::vector<double> coords = p.coords();
  const HessianBlocks h = hessian(L);
  std::vector<double> r(dims.n, 0.0);
  for (int i = 1; i <= dims.n; ++i) {
    double acc = -eval(diff(L.L, Var::base(i)), coords);
    for (int A = 1; A <= dims.k; ++A) {
      const ScalarExpr dLdv = diff(L.L, Var::velocity(i, A));
      for (int j = 1; j <= dims.n; ++j)
        acc += eval(diff(dLdv, Var::base(j)), coords) * p.vel(j, A);
      for (int B = 1; B <= dims.k; ++B)
        for (int j = 1; j <= dims.n; ++j)
          acc += eval(h.at(i, A, j, B), coords) * eval(s.at(A, j, B), coords);
    }
    r[i - 1] = acc;
  }
  return r;
}

ElSolution solve_el_coefficients(const Lagrangian& L, const BundlePoint& p, bool symmetrize) {
  if (L.dims != p.dims)
    throw DimensionMismatch("solve_el_coefficients: point on a different chart");
  const Dims dims = L.dims;
  const int n = dims.n, k = dims.k;
  const std::vector<double> coords = p.coords();
  const HessianBlocks h = hessian(L);

  // Right-hand side: dL/dq^i - d2L/(dq^j dv^i_A) v^j_A.
  std::vector<double> rhs(n, 0.0);
  for (int i = 1; i <= n; ++i) {
    double acc = eval(diff(L.L, Var::base(i)), coords);
    for (int A = 1; A <= k; ++A) {
      const ScalarExpr dLdv = diff(L.L, Var::velocity(i, A));
      for (int j = 1; j <= n; ++j)
        acc -= eval(diff(dLdv, Var::base(j)), coords) * p.vel(j, A);
    }
    rhs[i - 1] = acc;
  }

  // Unknowns: the coefficients (xi_A)^j_B, optionally identified in (A,B)
  // pairs. Columns of the system matrix follow `unknowns`.
  struct Unknown {
    int A, j, B;
  };
  std::vector<Unknown> unknowns;
  for (int A = 1; A <= k; ++A)
    for (int j = 1; j <= n; ++j)
      for (int B = 1; B <= k; ++B) {
        if (symmetrize && B < A) continue;
        unknowns.push_back({A, j, B});
      }
  const int cols = (int)unknowns.size();
  std::vector<double> M((std::size_t)n * cols, 0.0);
  for (int i = 1; i <= n; ++i)
    for (int cidx = 0; cidx < cols; ++cidx) {
      const Unknown& u = unknowns[cidx];
      double entry = eval(h.at(i, u.A, u.j, u.B), coords);
      if (symmetrize && u.A != u.B) entry += eval(h.at(i, u.B, u.j, u.A), coords);
      M[(i - 1) * cols + cidx] = entry;
    }

  ElSolution out;
  std::vector<double> x;
  if (k == 1) {
    const double det = lu_det(M, n);
    auto solved = lu_solve(M, rhs, n);
    if (!solved || std::abs(det) <= kRegularityMinDet)
      throw SingularHessian("velocity Hessian is singular at the requested point (|det| = " +
                                format_double(std::abs(det)) + ")",
                            det);
    x = *solved;
    out.rank = n;
  } else {
    x = min_norm_solve(M, rhs, n, cols);
    out.rank = n;
  }

  out.xi.assign((std::size_t)k * n * k, 0.0);
  for (int cidx = 0; cidx < cols; ++cidx) {
    const Unknown& u = unknowns[cidx];
    out.xi[xi_index(u.A, u.j, u.B, dims)] = x[cidx];
    if (symmetrize && u.A != u.B) out.xi[xi_index(u.B, u.j, u.A, dims)] = x[cidx];
  }
  for (int i = 1; i <= n; ++i) {
    double acc = -rhs[i - 1];
    for (int A = 1; A <= k; ++A)
      for (int j = 1; j <= n; ++j)
        for (int B = 1; B <= k; ++B)
          acc += eval(h.at(i, A, j, B), coords) * out.xi[xi_index(A, j, B, dims)];
    out.residual = std::max(out.residual, std::abs(acc));
  }
  if (out.residual > kSolveResidualTol)
    throw RankDeficiencyUnexpected(
        "Euler-Lagrange solve left residual " + format_double(out.residual));
  return out;
}

}  // namespace ksym
