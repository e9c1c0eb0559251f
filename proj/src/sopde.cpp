#include "ksym/sopde.hpp"

#include <cmath>
#include <string>

namespace ksym {

namespace {

constexpr double kPredicateTol = 1e-10;
constexpr double kCurvatureTol = 1e-12;

std::string at_probe(int idx) { return " at probe " + std::to_string(idx); }

}  // namespace

KVectorField::KVectorField(const Dims& dims_)
    : dims(dims_), q_part((std::size_t)dims.k * dims.n),
      v_part((std::size_t)dims.k * dims.n * dims.k) {}

Sopde::Sopde(const Dims& dims_) : dims(dims_), xi((std::size_t)dims.k * dims.n * dims.k) {}

LinearSopde::LinearSopde(const Dims& dims_)
    : dims(dims_), Acoef((std::size_t)dims.k * dims.n * dims.k * dims.n * dims.k, 0.0),
      Bcoef((std::size_t)dims.k * dims.n * dims.k * dims.n, 0.0),
      Ccoef((std::size_t)dims.k * dims.n * dims.k, 0.0) {}

KVectorField as_kvector(const Sopde& s) {
  KVectorField X(s.dims);
  for (int A = 1; A <= s.dims.k; ++A)
    for (int i = 1; i <= s.dims.n; ++i)
      X.base_at(A, i) = ScalarExpr::variable(Var::velocity(i, A), s.dims);
  X.v_part = s.xi;
  return X;
}

ProbeCheck is_sopde(const KVectorField& X, const ProbeOptions& opts) {
  const auto probes = make_probes(X.dims, opts);
  ProbeCheck out;
  for (std::size_t pi = 0; pi < probes.size(); ++pi)
    for (int A = 1; A <= X.dims.k; ++A)
      for (int i = 1; i <= X.dims.n; ++i) {
        const double want = probes[pi][X.dims.n + vel_index(i, A, X.dims)];
        const double got = eval(X.base_at(A, i), probes[pi]);
        const double r = std::abs(got - want);
        if (r > out.max_residual) out.max_residual = r;
        if (r > kPredicateTol && out.ok) {
          out.ok = false;
          out.where = "base part of X_" + std::to_string(A) + " component " + std::to_string(i) +
                      " != v" + std::to_string(i) + "_" + std::to_string(A) + at_probe(pi);
        }
      }
  return out;
}

Connection connection_from_sopde(const Sopde& s) {
  const Dims dims = s.dims;
  Connection c(dims);
  const ScalarExpr scale = ScalarExpr::constant(-1.0 / (dims.k + 1));
  for (int i = 1; i <= dims.n; ++i)
    for (int B = 1; B <= dims.k; ++B)
      for (int j = 1; j <= dims.n; ++j) {
        ScalarExpr acc;
        for (int A = 1; A <= dims.k; ++A)
          acc = acc + diff(s.at(A, i, B), Var::velocity(j, A));
        c.at(i, B, j) = simplify(scale * acc);
      }
  return c;
}

Sopde sopde_from_connection(const Connection& c) {
  const Dims dims = c.dims;
  Sopde s(dims);
  for (int A = 1; A <= dims.k; ++A)
    for (int j = 1; j <= dims.n; ++j)
      for (int B = 1; B <= dims.k; ++B) {
        ScalarExpr acc;
        for (int i = 1; i <= dims.n; ++i)
          acc = acc - c.at(j, B, i) * ScalarExpr::variable(Var::velocity(i, A), dims);
        s.at(A, j, B) = acc;
      }
  return s;
}

FixedPointReport check_sopde_fixed_point(const Sopde& s, const ProbeOptions& opts) {
  const Dims dims = s.dims;
  const auto probes = make_probes(dims, opts);
  FixedPointReport out;
  out.component_max.assign(s.xi.size(), 0.0);
  // Reconstructed coefficient: 1/(k+1) sum_C d(xi_C)^j_B/dv^i_C * v^i_A.
  for (int A = 1; A <= dims.k; ++A)
    for (int j = 1; j <= dims.n; ++j)
      for (int B = 1; B <= dims.k; ++B) {
        ScalarExpr rebuilt;
        for (int C = 1; C <= dims.k; ++C)
          for (int i = 1; i <= dims.n; ++i)
            rebuilt = rebuilt + diff(s.at(C, j, B), Var::velocity(i, C)) *
                                    ScalarExpr::variable(Var::velocity(i, A), dims);
        rebuilt = ScalarExpr::constant(1.0 / (dims.k + 1)) * rebuilt;
        const int idx = xi_index(A, j, B, dims);
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
          const double r = std::abs(eval(s.at(A, j, B), probes[pi]) - eval(rebuilt, probes[pi]));
          out.component_max[idx] = std::max(out.component_max[idx], r);
          if (r > out.max_residual) {
            out.max_residual = r;
            out.where = "(xi_" + std::to_string(A) + ")^" + std::to_string(j) + "_" +
                        std::to_string(B) + at_probe(pi);
          }
        }
      }
  out.ok = out.max_residual <= kPredicateTol;
  if (out.ok) out.where.clear();
  return out;
}

FixedPointReport check_connection_fixed_point(const Connection& c, const ProbeOptions& opts) {
  const Dims dims = c.dims;
  const auto probes = make_probes(dims, opts);
  FixedPointReport out;
  out.component_max.assign(c.N.size(), 0.0);
  // Reconstructed component: v^l_A dN^j_{Bl}/dv^i_A.
  for (int j = 1; j <= dims.n; ++j)
    for (int B = 1; B <= dims.k; ++B)
      for (int i = 1; i <= dims.n; ++i) {
        ScalarExpr rebuilt;
        for (int A = 1; A <= dims.k; ++A)
          for (int l = 1; l <= dims.n; ++l)
            rebuilt = rebuilt + ScalarExpr::variable(Var::velocity(l, A), dims) *
                                    diff(c.at(j, B, l), Var::velocity(i, A));
        const int idx = ((j - 1) * dims.k + (B - 1)) * dims.n + (i - 1);
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
          const double r = std::abs(eval(c.at(j, B, i), probes[pi]) - eval(rebuilt, probes[pi]));
          out.component_max[idx] = std::max(out.component_max[idx], r);
          if (r > out.max_residual) {
            out.max_residual = r;
            out.where = "N^" + std::to_string(j) + "_{" + std::to_string(B) + "," +
                        std::to_string(i) + "}" + at_probe(pi);
          }
        }
      }
  out.ok = out.max_residual <= kPredicateTol;
  if (out.ok) out.where.clear();
  return out;
}

ProbeCheck integrability_symmetry(const Sopde& s, const ProbeOptions& opts) {
  ProbeCheck out;
  if (s.dims.k == 1) return out;  // nothing to compare
  const auto probes = make_probes(s.dims, opts);
  for (int A = 1; A <= s.dims.k; ++A)
    for (int B = A + 1; B <= s.dims.k; ++B)
      for (int i = 1; i <= s.dims.n; ++i)
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
          const double r =
              std::abs(eval(s.at(A, i, B), probes[pi]) - eval(s.at(B, i, A), probes[pi]));
          if (r > out.max_residual) {
            out.max_residual = r;
            out.where = "(xi_" + std::to_string(A) + ")^" + std::to_string(i) + "_" +
                        std::to_string(B) + " vs (xi_" + std::to_string(B) + ")^" +
                        std::to_string(i) + "_" + std::to_string(A) + at_probe(pi);
          }
        }
  out.ok = out.max_residual <= kPredicateTol;
  if (out.ok) out.where.clear();
  return out;
}

std::optional<LinearSopde> linearize(const Sopde& s, const ProbeOptions& opts) {
  const Dims dims = s.dims;
  LinearSopde ls(dims);
  std::vector<double> origin(dims.total(), 0.0);
  std::vector<double> point(dims.total(), 0.0);
  for (int A = 1; A <= dims.k; ++A)
    for (int j = 1; j <= dims.n; ++j)
      for (int B = 1; B <= dims.k; ++B) {
        const ScalarExpr& e = s.at(A, j, B);
        const double c0 = eval(e, origin);
        ls.c(A, j, B) = c0;
        for (int m = 1; m <= dims.n; ++m) {
          point.assign(dims.total(), 0.0);
          point[m - 1] = 1.0;
          ls.b(A, j, B, m) = eval(e, point) - c0;
        }
        for (int C = 1; C <= dims.k; ++C)
          for (int m = 1; m <= dims.n; ++m) {
            point.assign(dims.total(), 0.0);
            point[dims.n + vel_index(m, C, dims)] = 1.0;
            ls.a(A, j, B, C, m) = eval(e, point) - c0;
          }
      }
  // The interpolation is exact iff the coefficients really are affine.
  const Sopde affine = to_sopde(ls);
  const auto probes = make_probes(dims, opts);
  for (std::size_t idx = 0; idx < s.xi.size(); ++idx)
    for (const auto& p : probes)
      if (std::abs(eval(s.xi[idx], p) - eval(affine.xi[idx], p)) > kPredicateTol)
        return std::nullopt;
  return ls;
}

Sopde to_sopde(const LinearSopde& ls) {
  const Dims dims = ls.dims;
  Sopde s(dims);
  for (int A = 1; A <= dims.k; ++A)
    for (int j = 1; j <= dims.n; ++j)
      for (int B = 1; B <= dims.k; ++B) {
        ScalarExpr acc = ScalarExpr::constant(ls.c(A, j, B));
        for (int m = 1; m <= dims.n; ++m)
          acc = acc + ScalarExpr::constant(ls.b(A, j, B, m)) *
                          ScalarExpr::variable(Var::base(m), dims);
        for (int C = 1; C <= dims.k; ++C)
          for (int m = 1; m <= dims.n; ++m)
            acc = acc + ScalarExpr::constant(ls.a(A, j, B, C, m)) *
                            ScalarExpr::variable(Var::velocity(m, C), dims);
        s.at(A, j, B) = acc;
      }
  return s;
}

bool curvature_vanishes_for_linear(const Sopde& s, const ProbeOptions& opts) {
  if (!linearize(s, opts))
    throw PreconditionViolated(
        "curvature_vanishes_for_linear: SOPDE coefficients are not affine");
  const Connection c = connection_from_sopde(s);
  const Curvature omega = curvature(c);
  return max_abs_curvature(omega, make_probes(s.dims, opts)) <= kCurvatureTol;
}

}  // namespace ksym
