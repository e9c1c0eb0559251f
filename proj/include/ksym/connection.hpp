#pragma once

#include "ksym/bundle.hpp"
#include "ksym/probe.hpp"

namespace ksym {

/// Nonlinear connection on T^1_k Q, given by its components N^j_{Ai}:
/// j labels the velocity row, A the slot, i the base direction the
/// horizontal lift is taken along.
struct Connection {
  Dims dims;
  std::vector<ScalarExpr> N;  // ((j-1)*k + (A-1))*n + (i-1)

  explicit Connection(const Dims& dims_);

  const ScalarExpr& at(int j, int A, int i) const {
    return N[((j - 1) * dims.k + (A - 1)) * dims.n + (i - 1)];
  }
  ScalarExpr& at(int j, int A, int i) {
    return N[((j - 1) * dims.k + (A - 1)) * dims.n + (i - 1)];
  }

  static Connection zero(const Dims& dims);
};

/// Curvature components Omega^j_{A,ik}, antisymmetric in (i,k) by
/// construction: the (k,i) entry is stored as the negation of the (i,k) one.
struct Curvature {
  Dims dims;
  std::vector<ScalarExpr> Omega;  // (((j-1)*k + (A-1))*n + (i-1))*n + (kk-1)

  explicit Curvature(const Dims& dims_);

  const ScalarExpr& at(int j, int A, int i, int kk) const {
    return Omega[(((j - 1) * dims.k + (A - 1)) * dims.n + (i - 1)) * dims.n + (kk - 1)];
  }
  ScalarExpr& at(int j, int A, int i, int kk) {
    return Omega[(((j - 1) * dims.k + (A - 1)) * dims.n + (i - 1)) * dims.n + (kk - 1)];
  }
};

/// Horizontal lift of the base vector u at p:
/// z = u, zv^j_A = -N^j_{Ai}(p) u^i.
TangentVector horizontal_map(const Connection& c, const BundlePoint& p, std::span<const double> u);

/// h = (d/dq^i - N^j_{Ai} d/dv^j_A) (x) dq^i as a (1,1) tensor field.
Tensor11Field horizontal_projector(const Connection& c);

/// v = 1 - h.
Tensor11Field vertical_projector(const Connection& c);

/// Almost product structure Gamma = 2h - 1; its velocity-from-base block
/// carries Gamma^j_{Ai} = -2 N^j_{Ai}.
Tensor11Field almost_product(const Connection& c);

/// Recover the connection from an almost product structure. The tensor must
/// satisfy J^A o G = J^A and G o J^A = -J^A at every probe point; otherwise
/// NotAConnectionTensor reports the first failing probe and identity.
Connection connection_from_gamma(const Tensor11Field& G, const ProbeOptions& opts = {});

/// Horizontal lift of a base vector field (n expressions in the q^i only;
/// velocity dependence is refused) evaluated at p.
TangentVector horizontal_lift(const Connection& c, const std::vector<ScalarExpr>& X,
                              const BundlePoint& p);

/// Curvature of the connection,
/// Omega^j_{A,ik} = 1/2 (dN^j_{Ak}/dq^i - dN^j_{Ai}/dq^k
///                       + N^m_{Bk} dN^j_{Ai}/dv^m_B - N^m_{Bi} dN^j_{Ak}/dv^m_B).
Curvature curvature(const Connection& c);

/// Largest |Omega^j_{A,ik}| over the probe set.
double max_abs_curvature(const Curvature& omega, const std::vector<std::vector<double>>& probes);

}  // namespace ksym
