#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ksym/bundle.hpp"
#include "ksym/errors.hpp"
#include "ksym/sopde.hpp"

namespace ksym {

/// One uniform grid axis with `count` nodes spanning [lo, hi].
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 0;

  double step() const { return (hi - lo) / (count - 1); }
  double node(int idx) const { return lo + idx * step(); }
};

/// Sampled map phi: R^k -> R^n on a rectangular grid. Values are stored
/// row-major over the axes with t^1 outermost, n doubles per node.
struct GridMap {
  int n = 0;
  std::vector<GridAxis> axes;
  std::vector<double> values;

  int k() const { return (int)axes.size(); }
  long node_count() const;
  long flat_index(const std::vector<int>& idx) const;
  double value(const std::vector<int>& idx, int i) const;
  double& value(const std::vector<int>& idx, int i);
  /// The source point (t^1, ..., t^k) of a node.
  std::vector<double> node_point(const std::vector<int>& idx) const;
  /// True when idx keeps one node of margin on every axis.
  bool interior(const std::vector<int>& idx) const;
  /// Largest axis step, the h in the O(h^2) stencil error.
  double max_step() const;
  /// Throws GridTooSmall (< 5 nodes on an axis) or InvalidParameter.
  void validate() const;
};

/// Zero-filled grid; validates the axes.
GridMap make_grid(int n, std::vector<GridAxis> axes);

/// Walks all multi-indexes in storage order. Returns false after the last.
bool next_index(std::vector<int>& idx, const GridMap& g);

/// A grid map together with its first derivatives d(phi^i)/d(t^A) per node,
/// stored in the same layout as BundlePoint velocities. When
/// `interior_only` is set the boundary-node velocities are zero filler.
struct Prolongation {
  GridMap base;
  std::vector<double> velocities;
  bool interior_only = true;

  double vel(const std::vector<int>& idx, int i, int A) const;
  /// Chart coordinates (q, v) of the prolonged point at a node.
  std::vector<double> coords(const std::vector<int>& idx) const;
};

/// First prolongation by central differences; boundary velocities are left 0.
Prolongation prolong(const GridMap& g);

/// Worst offender for one (A, B) slot of the residual check.
struct WorstNode {
  std::vector<int> idx;
  int i = 1;
  double residual = 0.0;
};

/// Result of comparing grid second differences against a SOPDE.
struct SectionReport {
  double max_residual = 0.0;
  long interior_nodes = 0;
  double max_step = 0.0;
  /// Indexed by (A-1)*k + (B-1).
  std::vector<WorstNode> worst;
};

/// Checks d2(phi^i)/dt^A dt^B = xi_A^i_B(prolonged point) at every interior
/// node with second-order central stencils.
SectionReport section_residual(const Sopde& s, const GridMap& g);

/// Classical RK4 on the k=1 system dq = v dt, dv = xi(q, v) dt from `start`.
/// The returned velocities come from the integrator state, not differences.
/// Throws NonFiniteState if any coordinate leaves [-1e12, 1e12].
Prolongation integrate_k1(const Sopde& s, const BundlePoint& start, double t_end, int steps);

/// The SOPDE whose integral sections prolong solutions of the heat equation
/// (1/kappa) dphi/dt = d2phi/dx2 on n=1, k=2. Requires kappa > 0, lambda != 0.
Sopde heat_sopde(double kappa, double lambda);

/// Samples phi(t, x) = amplitude * exp(-(kappa/lambda^2) t) * sin(x/lambda + delta)
/// on the given axes. Every member of this family solves the heat equation.
GridMap heat_solution(double amplitude, double delta, double kappa, double lambda,
                      const GridAxis& t_axis, const GridAxis& x_axis);

/// CSV with header t1,...,tk,phi1,...,phin, one node per line, t^1 outermost.
void write_csv(const GridMap& g, std::ostream& out);
void write_csv(const GridMap& g, const std::string& path);

/// Reads the format written by write_csv; reconstructs and validates the
/// axes (uniform steps, complete lattice). Throws CsvError on anything off.
GridMap read_csv(std::istream& in);
GridMap read_csv(const std::string& path);

}  // namespace ksym
