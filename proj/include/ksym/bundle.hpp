#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ksym/expr.hpp"

namespace ksym {

/// Index of v^i_A inside an n*k velocity block, slots grouped by A.
inline int vel_index(int i, int A, const Dims& dims) { return (A - 1) * dims.n + (i - 1); }

/// A point of T^1_k Q in the global chart: base coordinates q^i and one
/// velocity column v^i_A per slot A.
struct BundlePoint {
  Dims dims;
  std::vector<double> q;  // n
  std::vector<double> v;  // n*k, layout vel_index

  BundlePoint(const Dims& dims_, std::vector<double> q_, std::vector<double> v_);

  double vel(int i, int A) const { return v[vel_index(i, A, dims)]; }
  double& vel(int i, int A) { return v[vel_index(i, A, dims)]; }

  /// Flat chart coordinates (q-block, then the velocity blocks A = 1..k).
  std::vector<double> coords() const;

  static BundlePoint from_coords(const Dims& dims, std::span<const double> coords);
};

/// Tangent vector to T^1_k Q at `base`, components in the coordinate frame
/// (z^i along the q-block, zv^i_A along the velocity blocks).
struct TangentVector {
  BundlePoint base;
  std::vector<double> z;   // n
  std::vector<double> zv;  // n*k, layout vel_index

  TangentVector(BundlePoint base_, std::vector<double> z_, std::vector<double> zv_);

  /// Flat component vector, same ordering as chart coordinates.
  std::vector<double> components() const;

  static TangentVector from_components(BundlePoint base, std::span<const double> comps);

  static TangentVector zero(const BundlePoint& at);
};

/// A (1,1) tensor field on T^1_k Q with expression-valued entries, stored
/// as a dense (n+nk) x (n+nk) matrix acting on tangent components.
struct Tensor11Field {
  Dims dims;
  std::vector<ScalarExpr> entries;  // row-major

  explicit Tensor11Field(const Dims& dims_);

  const ScalarExpr& at(int row, int col) const { return entries[row * dims.total() + col]; }
  ScalarExpr& at(int row, int col) { return entries[row * dims.total() + col]; }

  static Tensor11Field zero(const Dims& dims);
  static Tensor11Field identity(const Dims& dims);
};

/// Canonical inclusion of a velocity block: the vertical vector with
/// zv = w at p. w uses the vel_index layout.
TangentVector map_i(const BundlePoint& p, std::span<const double> w);

/// Canonical projection onto the base tangent: keeps the base point and the
/// q-block of the components.
std::pair<BundlePoint, std::vector<double>> map_j(const TangentVector& Z);

/// Slot inclusion: places the base vector u into velocity column A of an
/// otherwise empty n x k block.
std::vector<double> map_kA(int A, std::span<const double> u, const Dims& dims);

/// Liouville field at p: the vertical vector with zv = p.v.
TangentVector liouville(const BundlePoint& p);

/// Slot-A Liouville field: only column A of p.v survives.
TangentVector liouville_A(int A, const BundlePoint& p);

/// k-tangent structure J^A: copies the q-block of a tangent vector into
/// velocity block A and kills everything else.
Tensor11Field ktangent(int A, const Dims& dims);

/// Evaluate all entries at a chart point, row-major dense matrix.
std::vector<double> eval_entries(const Tensor11Field& T, std::span<const double> coords);

/// Apply the tensor to a tangent vector; entries are evaluated at Z's base.
TangentVector apply(const Tensor11Field& T, const TangentVector& Z);

/// Symbolic composition: (T after S) as one tensor field.
Tensor11Field compose(const Tensor11Field& T, const Tensor11Field& S);

}  // namespace ksym
