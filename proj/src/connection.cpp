#include "ksym/connection.hpp"

#include <cmath>
#include <string>

namespace ksym {

Connection::Connection(const Dims& dims_)
    : dims(dims_), N((std::size_t)dims.n * dims.k * dims.n) {}

Connection Connection::zero(const Dims& dims) { return Connection(dims); }

Curvature::Curvature(const Dims& dims_)
    : dims(dims_), Omega((std::size_t)dims.n * dims.k * dims.n * dims.n) {}

TangentVector horizontal_map(const Connection& c, const BundlePoint& p,
                             std::span<const double> u) {
  if (c.dims != p.dims)
    throw DimensionMismatch("horizontal_map: connection and point live on different charts");
  if ((int)u.size() != c.dims.n)
    throw DimensionMismatch("horizontal_map: u must have n components");
  const std::vector<double> coords = p.coords();
  std::vector<double> z(u.begin(), u.end());
  std::vector<double> zv((std::size_t)c.dims.n * c.dims.k, 0.0);
  for (int j = 1; j <= c.dims.n; ++j)
    for (int A = 1; A <= c.dims.k; ++A) {
      double acc = 0.0;
      for (int i = 1; i <= c.dims.n; ++i) acc -= eval(c.at(j, A, i), coords) * u[i - 1];
      zv[vel_index(j, A, c.dims)] = acc;
    }
  return TangentVector(p, std::move(z), std::move(zv));
}

Tensor11Field horizontal_projector(const Connection& c) {
  const Dims dims = c.dims;
  Tensor11Field h(dims);
  for (int i = 1; i <= dims.n; ++i) h.at(i - 1, i - 1) = ScalarExpr::constant(1.0);
  for (int j = 1; j <= dims.n; ++j)
    for (int A = 1; A <= dims.k; ++A)
      for (int i = 1; i <= dims.n; ++i)
        h.at(dims.n + vel_index(j, A, dims), i - 1) = -c.at(j, A, i);
  return h;
}

Tensor11Field vertical_projector(const Connection& c) {
  const Dims dims = c.dims;
  Tensor11Field v(dims);
  for (int r = dims.n; r < dims.total(); ++r) v.at(r, r) = ScalarExpr::constant(1.0);
  for (int j = 1; j <= dims.n; ++j)
    for (int A = 1; A <= dims.k; ++A)
      for (int i = 1; i <= dims.n; ++i)
        v.at(dims.n + vel_index(j, A, dims), i - 1) = c.at(j, A, i);
  return v;
}

Tensor11Field almost_product(const Connection& c) {
  const Dims dims = c.dims;
  Tensor11Field g(dims);
  for (int i = 1; i <= dims.n; ++i) g.at(i - 1, i - 1) = ScalarExpr::constant(1.0);
  for (int r = dims.n; r < dims.total(); ++r) g.at(r, r) = ScalarExpr::constant(-1.0);
  for (int j = 1; j <= dims.n; ++j)
    for (int A = 1; A <= dims.k; ++A)
      for (int i = 1; i <= dims.n; ++i)
        g.at(dims.n + vel_index(j, A, dims), i - 1) = ScalarExpr::constant(-2.0) * c.at(j, A, i);
  return g;
}

Connection connection_from_gamma(const Tensor11Field& G, const ProbeOptions& opts) {
  const Dims dims = G.dims;
  const int d = dims.total();
  const auto probes = make_probes(dims, opts);
  // J^A o G = J^A and G o J^A = -J^A, checked pointwise on the probe set.
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const std::vector<double> g = eval_entries(G, probes[pi]);
    for (int A = 1; A <= dims.k; ++A) {
      const std::vector<double> j = eval_entries(ktangent(A, dims), probes[pi]);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          double jg = 0.0, gj = 0.0;
          for (int m = 0; m < d; ++m) {
            jg += j[r * d + m] * g[m * d + c];
            gj += g[r * d + m] * j[m * d + c];
          }
          if (std::abs(jg - j[r * d + c]) > 1e-10)
            throw NotAConnectionTensor(
                "J^" + std::to_string(A) + " o G != J^" + std::to_string(A) + " at probe " +
                std::to_string(pi) + ", entry (" + std::to_string(r) + "," + std::to_string(c) +
                ")");
          if (std::abs(gj + j[r * d + c]) > 1e-10)
            throw NotAConnectionTensor(
                "G o J^" + std::to_string(A) + " != -J^" + std::to_string(A) + " at probe " +
                std::to_string(pi) + ", entry (" + std::to_string(r) + "," + std::to_string(c) +
                ")");
        }
    }
  }
  Connection c(dims);
  const ScalarExpr minus_half = ScalarExpr::constant(-0.5);
  for (int j = 1; j <= dims.n; ++j)
    for (int A = 1; A <= dims.k; ++A)
      for (int i = 1; i <= dims.n; ++i)
        c.at(j, A, i) = minus_half * G.at(dims.n + vel_index(j, A, dims), i - 1);
  return c;
}

TangentVector horizontal_lift(const Connection& c, const std::vector<ScalarExpr>& X,
                              const BundlePoint& p) {
  if ((int)X.size() != c.dims.n)
    throw DimensionMismatch("horizontal_lift: field must have n components");
  for (int i = 0; i < c.dims.n; ++i)
    if (depends_on_velocity(X[i]))
      throw VelocityDependence("horizontal_lift: component " + std::to_string(i + 1) +
                               " depends on a velocity: " + to_string(X[i]));
  const std::vector<double> coords = p.coords();
  std::vector<double> u(c.dims.n);
  for (int i = 0; i < c.dims.n; ++i) u[i] = eval(X[i], coords);
  return horizontal_map(c, p, u);
}

Curvature curvature(const Connection& c) {
  const Dims dims = c.dims;
  Curvature omega(dims);
  const ScalarExpr half = ScalarExpr::constant(0.5);
  for (int j = 1; j <= dims.n; ++j)
    for (int A = 1; A <= dims.k; ++A)
      for (int i = 1; i <= dims.n; ++i) {
        omega.at(j, A, i, i) = ScalarExpr::constant(0.0);
        for (int kk = i + 1; kk <= dims.n; ++kk) {
          ScalarExpr acc = diff(c.at(j, A, kk), Var::base(i)) - diff(c.at(j, A, i), Var::base(kk));
          for (int m = 1; m <= dims.n; ++m)
            for (int B = 1; B <= dims.k; ++B) {
              const Var vmB = Var::velocity(m, B);
              acc = acc + c.at(m, B, kk) * diff(c.at(j, A, i), vmB) -
                    c.at(m, B, i) * diff(c.at(j, A, kk), vmB);
            }
          omega.at(j, A, i, kk) = half * acc;
          omega.at(j, A, kk, i) = -omega.at(j, A, i, kk);
        }
      }
  return omega;
}

double max_abs_curvature(const Curvature& omega, const std::vector<std::vector<double>>& probes) {
  return max_abs_on(omega.Omega, probes);
}

}  // namespace ksym
