#pragma once

#include "ksym/sopde.hpp"

namespace ksym {

/// A Lagrangian function on T^1_k Q.
struct Lagrangian {
  Dims dims;
  ScalarExpr L;

  Lagrangian(const Dims& dims_, ScalarExpr L_) : dims(dims_), L(std::move(L_)) {}
};

/// Coefficient families of the Lagrangian one- and two-forms:
/// theta^A = dL/dv^i_A dq^i,
/// omega^A = d2L/(dq^j dv^i_A) dq^i ^ dq^j + d2L/(dv^j_B dv^i_A) dq^i ^ dv^j_B.
struct LagrangianForms {
  Dims dims;
  std::vector<ScalarExpr> theta;     // (A-1)*n + (i-1)
  std::vector<ScalarExpr> omega_qq;  // ((A-1)*n + (i-1))*n + (j-1)
  std::vector<ScalarExpr> omega_qv;  // (((A-1)*n + (i-1))*k + (B-1))*n + (j-1)

  explicit LagrangianForms(const Dims& dims_);

  const ScalarExpr& theta_at(int A, int i) const { return theta[(A - 1) * dims.n + (i - 1)]; }
  const ScalarExpr& qq_at(int A, int i, int j) const {
    return omega_qq[((A - 1) * dims.n + (i - 1)) * dims.n + (j - 1)];
  }
  const ScalarExpr& qv_at(int A, int i, int B, int j) const {
    return omega_qv[(((A - 1) * dims.n + (i - 1)) * dims.k + (B - 1)) * dims.n + (j - 1)];
  }
};

/// The velocity Hessian d2L/(dv^i_A dv^j_B) as an (n*k) x (n*k) block,
/// rows and columns in vel_index layout.
struct HessianBlocks {
  Dims dims;
  std::vector<ScalarExpr> H;

  explicit HessianBlocks(const Dims& dims_);

  const ScalarExpr& at(int i, int A, int j, int B) const {
    return H[(std::size_t)vel_index(i, A, dims) * dims.n * dims.k + vel_index(j, B, dims)];
  }
  ScalarExpr& at(int i, int A, int j, int B) {
    return H[(std::size_t)vel_index(i, A, dims) * dims.n * dims.k + vel_index(j, B, dims)];
  }

  /// Dense numeric matrix at a chart point.
  std::vector<double> eval_at(std::span<const double> coords) const;
};

struct RegularityReport {
  bool regular = false;
  double min_abs_det = 0.0;
};

/// Solution of the Euler-Lagrange coefficient system at one point.
struct ElSolution {
  std::vector<double> xi;  // xi_index layout
  int rank = 0;
  double residual = 0.0;
};

LagrangianForms forms(const Lagrangian& L);

/// Energy E_L = Delta(L) - L = v^i_A dL/dv^i_A - L, simplified.
ScalarExpr energy(const Lagrangian& L);

HessianBlocks hessian(const Lagrangian& L);

/// Regular iff |det| of the velocity Hessian stays above 1e-9 on the probes.
RegularityReport regularity(const Lagrangian& L, const std::vector<std::vector<double>>& probes);

/// Pointwise residual of the Euler-Lagrange system along a SOPDE:
/// r_i = d2L/(dq^j dv^i_A) v^j_A + d2L/(dv^i_A dv^j_B) (xi_A)^j_B - dL/dq^i.
std::vector<double> el_residual(const Lagrangian& L, const Sopde& s, const BundlePoint& p);

/// Solve the Euler-Lagrange system for the coefficients (xi_A)^j_B at p.
/// k = 1 solves the square Hessian system (SingularHessian when it is not
/// invertible); k > 1 returns the minimum-norm solution, optionally
/// restricted to coefficients symmetric in (A,B).
ElSolution solve_el_coefficients(const Lagrangian& L, const BundlePoint& p,
                                 bool symmetrize = false);

}  // namespace ksym
