// Acceptance gate: every release-blocking property in one binary, one
// PASS/FAIL line per criterion, nonzero exit when anything fails.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ksym/cli.hpp"
#include "ksym/connection.hpp"
#include "ksym/lagrangian.hpp"
#include "ksym/linalg.hpp"
#include "ksym/sections.hpp"
#include "ksym/sopde.hpp"

using namespace ksym;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "PASS" : "FAIL") << ": " << name;
  if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
  std::cout << '\n';
  if (!ok) ++failures;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (rng() >> 11) * 0x1.0p-53 * (hi - lo);
}

ScalarExpr coord_expr(const Dims& dims, int flat) {
  if (flat < dims.n) return ScalarExpr::variable(Var::base(flat + 1), dims);
  const int rem = flat - dims.n;
  return ScalarExpr::variable(Var::velocity(rem % dims.n + 1, rem / dims.n + 1), dims);
}

ScalarExpr random_poly(const Dims& dims, std::mt19937_64& rng) {
  const int total = dims.total();
  const int x = (int)(rng() % (unsigned)total);
  const int y = (int)(rng() % (unsigned)total);
  ScalarExpr e = ScalarExpr::constant(uniform(rng, -1, 1));
  e = e + ScalarExpr::constant(uniform(rng, -1, 1)) * coord_expr(dims, x);
  e = e + ScalarExpr::constant(uniform(rng, -1, 1)) * coord_expr(dims, x) * coord_expr(dims, y);
  return e;
}

Connection random_connection(const Dims& dims, std::mt19937_64& rng) {
  Connection c(dims);
  for (auto& e : c.N) e = random_poly(dims, rng);
  return c;
}

std::vector<double> random_coords(const Dims& dims, std::mt19937_64& rng) {
  std::vector<double> p(dims.total());
  for (auto& x : p) x = uniform(rng, -2, 2);
  return p;
}

double max_abs_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void projector_algebra() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Dims d(1 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    const Connection c = random_connection(d, rng);
    const Tensor11Field h = horizontal_projector(c);
    const Tensor11Field v = vertical_projector(c);
    const Tensor11Field G = almost_product(c);
    for (int s = 0; s < 100; ++s) {
      const BundlePoint p = BundlePoint::from_coords(d, random_coords(d, rng));
      const TangentVector Z = TangentVector::from_components(p, random_coords(d, rng));
      const TangentVector hZ = apply(h, Z);
      const TangentVector vZ = apply(v, Z);
      worst = std::max(worst, max_abs_gap(apply(h, hZ).components(), hZ.components()));
      worst = std::max(worst, max_abs_gap(apply(v, vZ).components(), vZ.components()));
      worst = std::max(worst, max_abs_gap(apply(h, vZ).components(),
                                          std::vector<double>(d.total(), 0.0)));
      worst = std::max(worst, max_abs_gap(apply(G, apply(G, Z)).components(), Z.components()));
    }
  }
  report("projector algebra h^2 = h, v^2 = v, hv = 0, Gamma^2 = 1 on 20 random connections",
         worst <= 1e-12, "max residual " + format_double(worst));
}

void almost_product_identities() {
  std::mt19937_64 rng(101);  // same draw as projector_algebra
  double worst = 0.0;
  double round_trip = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Dims d(1 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    const Connection c = random_connection(d, rng);
    const Tensor11Field G = almost_product(c);
    const auto probes = make_probes(d, {.count = 10, .seed = (std::uint64_t)t});
    for (int A = 1; A <= d.k; ++A) {
      const Tensor11Field J = ktangent(A, d);
      const Tensor11Field JG = compose(J, G);
      const Tensor11Field GJ = compose(G, J);
      for (const auto& p : probes) {
        const auto j = eval_entries(J, p);
        worst = std::max(worst, max_abs_gap(eval_entries(JG, p), j));
        auto neg = j;
        for (auto& x : neg) x = -x;
        worst = std::max(worst, max_abs_gap(eval_entries(GJ, p), neg));
      }
    }
    const Connection back = connection_from_gamma(G);
    std::vector<ScalarExpr> diffs;
    for (std::size_t i = 0; i < c.N.size(); ++i) diffs.push_back(c.N[i] - back.N[i]);
    round_trip = std::max(round_trip, max_abs_on(diffs, probes));
  }
  report("almost product identities J G = J, G J = -J and Gamma round-trip",
         worst <= 1e-12 && round_trip <= 1e-12,
         "identities " + format_double(worst) + ", round-trip " + format_double(round_trip));
}

void vertical_exactness() {
  std::mt19937_64 rng(103);
  bool exact = true;
  for (int t = 0; t < 1000 && exact; ++t) {
    const Dims d(1 + (int)(rng() % 3), 1 + (int)(rng() % 3));
    const BundlePoint p = BundlePoint::from_coords(d, random_coords(d, rng));
    std::vector<double> w(d.n * d.k);
    for (auto& x : w) x = uniform(rng, -2, 2);
    for (double x : map_j(map_i(p, w)).second)
      if (x != 0.0) exact = false;
  }
  report("base projection annihilates vertical inclusions on 1000 samples", exact);
}

void heat_model() {
  const Sopde s = heat_sopde(1.0, 1.0);
  const Dims d = s.dims;
  const Connection c = connection_from_sopde(s);
  bool ok = true;
  std::string detail;

  if (!c.at(1, 1, 1).is_constant() ||
      std::abs(c.at(1, 1, 1).constant_value() - 2.0 / 3.0) > 1e-15) {
    ok = false;
    detail = "N^1_{1,1} = " + to_string(c.at(1, 1, 1));
  }
  if (!c.at(1, 2, 1).is_constant() || c.at(1, 2, 1).constant_value() != 0.0) {
    ok = false;
    detail = "N^1_{2,1} = " + to_string(c.at(1, 2, 1));
  }

  const auto probes = make_probes(d, {.count = 100, .seed = 0});
  const double curv = max_abs_curvature(curvature(c), probes);
  if (curv > 1e-12) {
    ok = false;
    detail = "curvature " + format_double(curv);
  }
  if (!integrability_symmetry(s).ok) {
    ok = false;
    detail = "integrability symmetry failed";
  }

  const FixedPointReport fp = check_sopde_fixed_point(s);
  double third = 0.0;
  for (const auto& p : make_probes(d, {})) third = std::max(third, std::abs(p[1]) / 3.0);
  if (fp.ok || std::abs(fp.component_max[xi_index(1, 1, 1, d)] - third) > 1e-14) {
    ok = false;
    detail = "fixed point residual " + format_double(fp.component_max[xi_index(1, 1, 1, d)]) +
             " expected " + format_double(third);
  }
  report("heat model: connection 2/3, flat, slot-symmetric, off the sopde fixed point", ok,
         detail);
}

void heat_solution_residual() {
  const Sopde s = heat_sopde(1.0, 1.0);
  const double pi = std::acos(-1.0);
  const GridMap g32 = heat_solution(1.0, 0.0, 1.0, 1.0, {0, 1, 32}, {0, 2 * pi, 32});
  const GridMap g64 = heat_solution(1.0, 0.0, 1.0, 1.0, {0, 1, 64}, {0, 2 * pi, 64});
  const double r32 = section_residual(s, g32).max_residual;
  const double r64 = section_residual(s, g64).max_residual;
  const double ratio = r32 / r64;
  report("heat solution residual 0.02 at 32x32 and 4x drop at 64x64",
         r32 <= 0.02 && ratio > 3.4 && ratio < 4.6,
         "residual " + format_double(r32) + ", ratio " + format_double(ratio));
}

void wave_model() {
  const Dims d(1, 3);
  const Lagrangian L{d, parse("(1/2)*(v1_1^2 - (v1_2^2 + v1_3^2))", d)};
  bool ok = true;
  std::string detail;

  // the velocity Hessian has |det| = 1 at every probe
  const HessianBlocks H = hessian(L);
  const auto probes = make_probes(d, {});
  for (const auto& p : probes) {
    const double det = lu_det(H.eval_at(p), d.n * d.k);
    if (std::abs(std::abs(det) - 1.0) > 1e-12) {
      ok = false;
      detail = "det " + format_double(det);
    }
  }

  // the solved coefficients satisfy the trace field equation
  std::mt19937_64 rng(107);
  for (bool symmetrize : {false, true})
    for (int t = 0; t < 5; ++t) {
      const BundlePoint p = BundlePoint::from_coords(d, random_coords(d, rng));
      const ElSolution sol = solve_el_coefficients(L, p, symmetrize);
      const double trace = sol.xi[xi_index(1, 1, 1, d)] - sol.xi[xi_index(2, 1, 2, d)] -
                           sol.xi[xi_index(3, 1, 3, d)];
      if (std::abs(trace) > 1e-10 || sol.residual > 1e-10) {
        ok = false;
        detail = "trace " + format_double(trace);
      }
    }

  // plane wave phi = sin(kappa . t) with the dispersion relation
  // kappa_1^2 = kappa_2^2 + kappa_3^2 rides a symmetric trace-compatible
  // SOPDE (xi_A)^1_B = -kappa_A kappa_B q1
  const double kappa[3] = {std::sqrt(2.0), -1.0, -1.0};
  if (std::abs(kappa[0] * kappa[0] - (kappa[1] * kappa[1] + kappa[2] * kappa[2])) > 1e-12) {
    ok = false;
    detail = "dispersion relation violated";
  }
  Sopde s(d);
  std::string model_text = "n = 1\nk = 3\n";
  for (int A = 1; A <= 3; ++A)
    for (int B = 1; B <= 3; ++B) {
      const double cAB = -kappa[A - 1] * kappa[B - 1];
      s.at(A, 1, B) = ScalarExpr::constant(cAB) * parse("q1", d);
      model_text += "xi[" + std::to_string(A) + "][1][" + std::to_string(B) +
                    "] = " + format_double(cAB) + "*q1\n";
    }

  auto sample_wave = [&](int m) {
    GridMap g = make_grid(1, {{0, 1, m}, {0, 1, m}, {0, 1, m}});
    std::vector<int> idx(3, 0);
    do {
      const auto t = g.node_point(idx);
      g.value(idx, 1) = std::sin(kappa[0] * t[0] + kappa[1] * t[1] + kappa[2] * t[2]);
    } while (next_index(idx, g));
    return g;
  };
  const GridMap g24 = sample_wave(24);
  const GridMap g48 = sample_wave(48);

  // through the command line, like a user would run it
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path model_path = dir / "acceptance_wave.model";
  const fs::path csv_path = dir / "acceptance_wave.csv";
  {
    std::ofstream f(model_path);
    f << model_text;
  }
  write_csv(g24, csv_path.string());
  std::ostringstream cli_out, cli_err;
  const int code = run_cli({"verify-section", model_path.string(), "--grid", csv_path.string()},
                           cli_out, cli_err);
  fs::remove(model_path);
  fs::remove(csv_path);
  if (code != 0) {
    ok = false;
    detail = "verify-section exited " + std::to_string(code);
  }

  // and the stencil error drops at second order under refinement
  const double r24 = section_residual(s, g24).max_residual;
  const double r48 = section_residual(s, g48).max_residual;
  const double order = std::log(r24 / r48) / std::log(47.0 / 23.0);
  if (order < 1.7 || order > 2.3) {
    ok = false;
    detail = "refinement order " + format_double(order);
  }

  report("wave model: unit Hessian, solved field equation, plane wave section", ok, detail);
}

void k1_reductions() {
  const Dims d(1, 1);
  bool ok = true;
  std::string detail;

  Sopde spray(d);
  spray.at(1, 1, 1) = parse("-v1_1^2", d);
  const Connection c = connection_from_sopde(spray);
  if (c.at(1, 1, 1) != parse("v1_1", d)) {
    ok = false;
    detail = "N = " + to_string(c.at(1, 1, 1));
  }
  if (!check_sopde_fixed_point(spray).ok) {
    ok = false;
    detail = "spray left the fixed point";
  }

  Sopde osc(d);
  osc.at(1, 1, 1) = parse("-q1", d);
  BundlePoint h0(d, {1.0}, {0.0});
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const int steps = r == 0 ? 50 : 100;
    const Prolongation p = integrate_k1(osc, h0, 1.0, steps);
    err[r] = std::abs(p.base.value({steps}, 1) - std::cos(1.0));
  }
  const double order = std::log2(err[0] / err[1]);
  if (order < 3.7 || order > 4.3) {
    ok = false;
    detail = "rk4 order " + format_double(order);
  }

  report("k = 1: spray connection N = v, sopde fixed point, fourth-order integrator", ok,
         detail);
}

/// Random expression whose divisions cannot hit zero and whose magnitude
/// stays moderate on [-2, 2] coordinates.
ScalarExpr random_expr(const Dims& dims, std::mt19937_64& rng, int depth) {
  if (depth == 0) {
    if (rng() % 3 == 0) return ScalarExpr::constant(uniform(rng, -2, 2));
    return coord_expr(dims, (int)(rng() % (unsigned)dims.total()));
  }
  const ScalarExpr a = random_expr(dims, rng, depth - 1);
  switch (rng() % 8) {
    case 0: return a + random_expr(dims, rng, depth - 1);
    case 1: return a - random_expr(dims, rng, depth - 1);
    case 2: return a * random_expr(dims, rng, depth - 1);
    case 3: {
      const ScalarExpr b = random_expr(dims, rng, depth - 1);
      return a / (ScalarExpr::constant(2.0) + b * b);
    }
    case 4: return sin(a);
    case 5: return cos(a);
    case 6: return exp(coord_expr(dims, (int)(rng() % (unsigned)dims.total())));
    default: return pow(a, (int)(rng() % 3) + 1);
  }
}

void derivative_oracles() {
  std::mt19937_64 rng(109);
  const Dims d(2, 2);
  double sym_gap = 0.0, fd_gap = 0.0;
  long checked = 0;
  for (int t = 0; t < 500; ++t) {
    const ScalarExpr e = random_expr(d, rng, 3 + (int)(t % 2));
    const int flat = (int)(rng() % (unsigned)d.total());
    const Var x = flat < d.n ? Var::base(flat + 1)
                             : Var::velocity((flat - d.n) % d.n + 1, (flat - d.n) / d.n + 1);
    const ScalarExpr de = diff(e, x);
    const int ci = coord_index(x, d);
    for (int s = 0; s < 4; ++s) {
      const auto p = random_coords(d, rng);
      const double value = eval(e, p);
      const DualNumber dual = eval_dual(e, p, x);
      if (!std::isfinite(value) || !std::isfinite(dual.deriv) || std::abs(value) > 1e3 ||
          std::abs(dual.deriv) > 1e3)
        continue;
      const double sym = eval(de, p);
      sym_gap = std::max(sym_gap,
                         std::abs(sym - dual.deriv) / std::max(1.0, std::abs(dual.deriv)));
      const double h = 1e-6 * std::max(1.0, std::abs(p[ci]));
      auto pp = p, pm = p;
      pp[ci] += h;
      pm[ci] -= h;
      const double fd = (eval(e, pp) - eval(e, pm)) / (2 * h);
      fd_gap = std::max(fd_gap, std::abs(dual.deriv - fd));
      ++checked;
    }
  }
  report("symbolic vs dual vs central differences on 500 random expressions",
         sym_gap <= 1e-10 && fd_gap <= 1e-6 && checked >= 1500,
         "sym " + format_double(sym_gap) + ", fd " + format_double(fd_gap) + ", points " +
             std::to_string(checked));
}

void affine_flatness() {
  std::mt19937_64 rng(113);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Dims d(1 + (int)(rng() % 2), 1 + (int)(rng() % 2));
    LinearSopde ls(d);
    for (auto& x : ls.Acoef) x = uniform(rng, -1, 1);
    for (auto& x : ls.Bcoef) x = uniform(rng, -1, 1);
    for (auto& x : ls.Ccoef) x = uniform(rng, -1, 1);
    const Connection c = connection_from_sopde(to_sopde(ls));
    const auto probes = make_probes(d, {.count = 16, .seed = (std::uint64_t)t});
    worst = std::max(worst, max_abs_curvature(curvature(c), probes));
  }
  report("50 random affine equations induce flat connections", worst <= 1e-12,
         "max curvature " + format_double(worst));
}

}  // namespace

int main() {
  projector_algebra();
  almost_product_identities();
  vertical_exactness();
  heat_model();
  heat_solution_residual();
  wave_model();
  k1_reductions();
  derivative_oracles();
  affine_flatness();
  return failures == 0 ? 0 : 1;
}
