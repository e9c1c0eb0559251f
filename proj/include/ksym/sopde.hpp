#pragma once

#include <optional>

#include "ksym/connection.hpp"

namespace ksym {

/// Index of the coefficient (xi_A)^i_B inside a flat k*n*k block.
inline int xi_index(int A, int i, int B, const Dims& dims) {
  return ((A - 1) * dims.n + (i - 1)) * dims.k + (B - 1);
}

/// A k-tuple of vector fields X_A on T^1_k Q, each with a base part
/// (X_A)^i d/dq^i and a velocity part (X_A)^i_B d/dv^i_B.
struct KVectorField {
  Dims dims;
  std::vector<ScalarExpr> q_part;  // (A-1)*n + (i-1)
  std::vector<ScalarExpr> v_part;  // xi_index

  explicit KVectorField(const Dims& dims_);

  const ScalarExpr& base_at(int A, int i) const { return q_part[(A - 1) * dims.n + (i - 1)]; }
  ScalarExpr& base_at(int A, int i) { return q_part[(A - 1) * dims.n + (i - 1)]; }
  const ScalarExpr& vel_at(int A, int i, int B) const { return v_part[xi_index(A, i, B, dims)]; }
  ScalarExpr& vel_at(int A, int i, int B) { return v_part[xi_index(A, i, B, dims)]; }
};

/// Second-order partial differential equation field: the k-tuple whose base
/// parts are forced to v^i_A, so only the coefficients (xi_A)^i_B remain.
struct Sopde {
  Dims dims;
  std::vector<ScalarExpr> xi;  // xi_index

  explicit Sopde(const Dims& dims_);

  const ScalarExpr& at(int A, int i, int B) const { return xi[xi_index(A, i, B, dims)]; }
  ScalarExpr& at(int A, int i, int B) { return xi[xi_index(A, i, B, dims)]; }
};

/// A SOPDE whose coefficients are affine in the chart coordinates:
/// (xi_A)^j_B = Acoef^{C,m} v^m_C + Bcoef^m q^m + Ccoef.
struct LinearSopde {
  Dims dims;
  std::vector<double> Acoef;  // xi_index(A,j,B) * (n*k) + vel_index(m,C)
  std::vector<double> Bcoef;  // xi_index(A,j,B) * n + (m-1)
  std::vector<double> Ccoef;  // xi_index(A,j,B)

  explicit LinearSopde(const Dims& dims_);

  double a(int A, int j, int B, int C, int m) const {
    return Acoef[(std::size_t)xi_index(A, j, B, dims) * dims.n * dims.k + vel_index(m, C, dims)];
  }
  double& a(int A, int j, int B, int C, int m) {
    return Acoef[(std::size_t)xi_index(A, j, B, dims) * dims.n * dims.k + vel_index(m, C, dims)];
  }
  double b(int A, int j, int B, int m) const {
    return Bcoef[(std::size_t)xi_index(A, j, B, dims) * dims.n + (m - 1)];
  }
  double& b(int A, int j, int B, int m) {
    return Bcoef[(std::size_t)xi_index(A, j, B, dims) * dims.n + (m - 1)];
  }
  double c(int A, int j, int B) const { return Ccoef[xi_index(A, j, B, dims)]; }
  double& c(int A, int j, int B) { return Ccoef[xi_index(A, j, B, dims)]; }
};

/// Outcome of a probe-set predicate; `where` is empty when it holds.
struct ProbeCheck {
  bool ok = true;
  double max_residual = 0.0;
  std::string where;  // first or worst failing component and probe
};

/// Residual breakdown of a fixed-point test, per coefficient.
struct FixedPointReport {
  bool ok = true;
  double max_residual = 0.0;
  std::vector<double> component_max;  // per xi_index (or connection index)
  std::string where;
};

/// The SOPDE as a plain k-vector field, base parts set to v^i_A.
KVectorField as_kvector(const Sopde& s);

/// Probe check that every base part of X_A equals v^i_A; equivalent to
/// J^A(X_A(p)) = Delta_A(p) at each probe.
ProbeCheck is_sopde(const KVectorField& X, const ProbeOptions& opts = {});

/// Connection induced by the SOPDE:
/// N^i_{Bj} = -1/(k+1) sum_A d(xi_A)^i_B / dv^j_A.
Connection connection_from_sopde(const Sopde& s);

/// Canonical horizontal SOPDE of a connection: (xi_A)^j_B = -N^j_{Bi} v^i_A.
Sopde sopde_from_connection(const Connection& c);

/// Does s reproduce itself through connection_from_sopde followed by
/// sopde_from_connection? Checks
/// (xi_A)^j_B = 1/(k+1) sum_C d(xi_C)^j_B/dv^i_C v^i_A at the probes.
FixedPointReport check_sopde_fixed_point(const Sopde& s, const ProbeOptions& opts = {});

/// Does c reproduce itself through sopde_from_connection followed by
/// connection_from_sopde? Checks N^j_{Bi} = v^l_A dN^j_{Bl}/dv^i_A.
FixedPointReport check_connection_fixed_point(const Connection& c, const ProbeOptions& opts = {});

/// Necessary condition for integral sections: (xi_A)^i_B = (xi_B)^i_A at
/// the probes. Vacuously true for k = 1.
ProbeCheck integrability_symmetry(const Sopde& s, const ProbeOptions& opts = {});

/// Exact affine reconstruction by interpolation at the origin and the unit
/// coordinate points, verified on a probe set. Returns nothing when some
/// coefficient is genuinely non-affine.
std::optional<LinearSopde> linearize(const Sopde& s, const ProbeOptions& opts = {});

/// Expression form of an affine SOPDE.
Sopde to_sopde(const LinearSopde& ls);

/// For an affine SOPDE the induced connection has constant components and
/// its curvature vanishes; verified on the probe set. Throws
/// PreconditionViolated when s is not affine.
bool curvature_vanishes_for_linear(const Sopde& s, const ProbeOptions& opts = {});

}  // namespace ksym
