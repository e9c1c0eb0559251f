#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ksym/errors.hpp"
#include "ksym/sections.hpp"
#include "ksym/sopde.hpp"
#include "test_util.hpp"

using namespace ksym;

namespace {

/// Quadratic spray on n = k = 1: xi = -c v^2, straight-line motion of
/// q(t) = q0 + log(1 + c v0 t) / c.
Sopde spray(double c) {
  const Dims d(1, 1);
  Sopde s(d);
  s.at(1, 1, 1) = ScalarExpr::constant(-c) * pow(parse("v1_1", d), 2);
  return s;
}

}  // namespace

TEST_CASE("as_kvector and is_sopde recognise second-order fields") {
  const Sopde heat = heat_sopde(1.0, 1.0);
  const KVectorField X = as_kvector(heat);
  CHECK(X.base_at(1, 1) == parse("v1_1", heat.dims));
  CHECK(X.base_at(2, 1) == parse("v1_2", heat.dims));
  CHECK(is_sopde(X).ok);

  KVectorField Y = X;
  Y.base_at(1, 1) = parse("v1_2", heat.dims);  // wrong slot
  const ProbeCheck bad = is_sopde(Y);
  CHECK(!bad.ok);
  CHECK(bad.max_residual > 0.1);
  CHECK(bad.where.find("X_1") != std::string::npos);
  CHECK(bad.where.find("component 1") != std::string::npos);
}

TEST_CASE("connection_from_sopde reproduces the heat connection") {
  const Connection c = connection_from_sopde(heat_sopde(1.0, 1.0));
  REQUIRE(c.at(1, 1, 1).is_constant());
  CHECK(std::abs(c.at(1, 1, 1).constant_value() - 2.0 / 3.0) <= 1e-15);
  REQUIRE(c.at(1, 2, 1).is_constant());
  CHECK(c.at(1, 2, 1).constant_value() == 0.0);
}

TEST_CASE("connection_from_sopde on the quadratic spray gives N = c v") {
  const Connection c1 = connection_from_sopde(spray(1.0));
  CHECK(c1.at(1, 1, 1) == parse("v1_1", c1.dims));

  const Connection c2 = connection_from_sopde(spray(2.0));
  const auto probes = make_probes(c2.dims, {.count = 16, .seed = 2});
  std::vector<ScalarExpr> diff_expr{c2.at(1, 1, 1) - parse("2*v1_1", c2.dims)};
  CHECK(max_abs_on(diff_expr, probes) <= 1e-12);
}

TEST_CASE("constant coefficients induce the zero connection") {
  const Dims d(2, 2);
  Sopde s(d);
  std::mt19937_64 rng(3);
  for (auto& e : s.xi) e = ScalarExpr::constant(testutil::uniform(rng, -1, 1));
  const Connection c = connection_from_sopde(s);
  for (const auto& e : c.N) {
    REQUIRE(e.is_constant());
    CHECK(e.constant_value() == 0.0);
  }
}

TEST_CASE("sopde_from_connection builds the canonical horizontal SOPDE") {
  const Dims d(1, 2);
  const Connection z = Connection::zero(d);
  for (const auto& e : sopde_from_connection(z).xi) {
    REQUIRE(e.is_constant());
    CHECK(e.constant_value() == 0.0);
  }

  // heat connection: (xi_A)^1_B = -N^1_{B,1} v^1_A, so only B = 1 survives
  const Connection c = connection_from_sopde(heat_sopde(1.0, 1.0));
  const Sopde s = sopde_from_connection(c);
  const auto probes = make_probes(d, {.count = 16, .seed = 6});
  std::vector<ScalarExpr> diffs{
      s.at(1, 1, 1) - parse("-(2/3)*v1_1", d), s.at(2, 1, 1) - parse("-(2/3)*v1_2", d),
      s.at(1, 1, 2), s.at(2, 1, 2)};
  CHECK(max_abs_on(diffs, probes) <= 1e-12);

  // the round trip recovers the spray exactly: -(c v) v = -c v^2
  const Sopde sp = spray(1.5);
  const Sopde back = sopde_from_connection(connection_from_sopde(sp));
  const Dims d11(1, 1);
  const auto probes11 = make_probes(d11, {.count = 16, .seed = 6});
  std::vector<ScalarExpr> gap{back.at(1, 1, 1) - sp.at(1, 1, 1)};
  CHECK(max_abs_on(gap, probes11) <= 1e-12);
}

TEST_CASE("sopde fixed point holds for sprays and fails for heat") {
  CHECK(check_sopde_fixed_point(spray(1.0)).ok);
  CHECK(check_sopde_fixed_point(spray(1.0)).max_residual <= 1e-12);

  const Dims d(1, 2);
  Sopde zero(d);
  CHECK(check_sopde_fixed_point(zero).ok);

  const Sopde heat = heat_sopde(1.0, 1.0);
  const FixedPointReport fp = check_sopde_fixed_point(heat);
  CHECK(!fp.ok);
  // the (xi_1)^1_1 residual is exactly |v^1_1| / 3 at each probe
  const auto probes = make_probes(d, {});
  double expect = 0.0;
  for (const auto& p : probes) expect = std::max(expect, std::abs(p[1]) / 3.0);
  CHECK(std::abs(fp.component_max[xi_index(1, 1, 1, d)] - expect) <= 1e-14);
  CHECK(fp.where.find("(xi_") != std::string::npos);
}

TEST_CASE("connection fixed point needs symmetric degree-1 coefficients") {
  const Dims d(2, 2);
  Connection sym = Connection::zero(d);
  for (int j = 1; j <= d.n; ++j)
    for (int B = 1; B <= d.k; ++B)
      for (int i = 1; i <= d.n; ++i)
        sym.at(j, B, i) = ScalarExpr::constant(0.7) *
                          ScalarExpr::variable(Var::velocity(i, B), d);
  CHECK(check_connection_fixed_point(sym).ok);

  CHECK(check_connection_fixed_point(Connection::zero(d)).ok);

  Connection c = Connection::zero(d);
  c.at(1, 1, 1) = ScalarExpr::constant(0.9);  // constant, degree 0
  const FixedPointReport fp = check_connection_fixed_point(c);
  CHECK(!fp.ok);
  CHECK(fp.max_residual == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("integrability_symmetry checks the slot swap") {
  CHECK(integrability_symmetry(heat_sopde(1.0, 1.0)).ok);
  CHECK(integrability_symmetry(spray(1.0)).ok);  // k = 1 is vacuous

  const Dims d(1, 2);
  Sopde s(d);
  s.at(1, 1, 2) = ScalarExpr::constant(1.0);
  s.at(2, 1, 1) = ScalarExpr::constant(-1.0);
  const ProbeCheck pc = integrability_symmetry(s);
  CHECK(!pc.ok);
  CHECK(pc.max_residual == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(!pc.where.empty());
}

TEST_CASE("linearize recovers affine coefficients exactly") {
  const Sopde heat = heat_sopde(1.0, 1.0);
  const auto ls = linearize(heat);
  REQUIRE(ls.has_value());
  const Dims d = heat.dims;
  CHECK(ls->a(1, 1, 1, 1, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ls->a(1, 1, 2, 2, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ls->a(2, 1, 1, 2, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ls->a(2, 1, 2, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  // every other A entry, and all B and C entries, vanish
  double off = 0.0;
  for (int A = 1; A <= d.k; ++A)
    for (int j = 1; j <= d.n; ++j)
      for (int B = 1; B <= d.k; ++B) {
        for (int C = 1; C <= d.k; ++C)
          for (int m = 1; m <= d.n; ++m) {
            const bool named = (A == 1 && B == 1 && C == 1) || (A == 1 && B == 2 && C == 2) ||
                               (A == 2 && B == 1 && C == 2) || (A == 2 && B == 2 && C == 1);
            if (!named) off = std::max(off, std::abs(ls->a(A, j, B, C, m)));
          }
        for (int m = 1; m <= d.n; ++m) off = std::max(off, std::abs(ls->b(A, j, B, m)));
        off = std::max(off, std::abs(ls->c(A, j, B)));
      }
  CHECK(off <= 1e-14);

  // expression form evaluates identically to the original
  const Sopde back = to_sopde(*ls);
  const auto probes = make_probes(d, {.count = 20, .seed = 10});
  std::vector<ScalarExpr> diffs;
  for (std::size_t i = 0; i < back.xi.size(); ++i) diffs.push_back(back.xi[i] - heat.xi[i]);
  CHECK(max_abs_on(diffs, probes) <= 1e-12);
}

TEST_CASE("linearize rejects genuinely nonlinear coefficients") {
  CHECK(!linearize(spray(1.0)).has_value());

  const Dims d(1, 1);
  Sopde s(d);
  s.at(1, 1, 1) = sin(parse("q1", d));
  CHECK(!linearize(s).has_value());

  // constants are affine with A = B = 0
  Sopde c(d);
  c.at(1, 1, 1) = ScalarExpr::constant(0.25);
  const auto ls = linearize(c);
  REQUIRE(ls.has_value());
  CHECK(ls->c(1, 1, 1) == 0.25);
  CHECK(ls->a(1, 1, 1, 1, 1) == 0.0);
  CHECK(ls->b(1, 1, 1, 1) == 0.0);
}

TEST_CASE("affine SOPDEs always induce flat connections") {
  CHECK(curvature_vanishes_for_linear(heat_sopde(1.0, 1.0)));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Dims d(1 + (int)(rng() % 2), 1 + (int)(rng() % 2));
    LinearSopde ls(d);
    for (auto& x : ls.Acoef) x = testutil::uniform(rng, -1, 1);
    for (auto& x : ls.Bcoef) x = testutil::uniform(rng, -1, 1);
    for (auto& x : ls.Ccoef) x = testutil::uniform(rng, -1, 1);
    CHECK(curvature_vanishes_for_linear(to_sopde(ls)));
  }

  CHECK_THROWS_AS(curvature_vanishes_for_linear(spray(1.0)), PreconditionViolated);
}

TEST_CASE("fixed point identities tie the two constructions together") {
  // degree-1 connections with slot-matched coefficients survive the loop
  const Dims d(2, 2);
  Connection c = Connection::zero(d);
  for (int j = 1; j <= d.n; ++j)
    for (int B = 1; B <= d.k; ++B)
      for (int i = 1; i <= d.n; ++i)
        c.at(j, B, i) = ScalarExpr::constant(0.3 * j - 0.1 * i) *
                        ScalarExpr::variable(Var::velocity(i, B), d);
  const Connection back = connection_from_sopde(sopde_from_connection(c));
  const auto probes = make_probes(d, {.count = 16, .seed = 14});
  std::vector<ScalarExpr> diffs;
  for (std::size_t i = 0; i < c.N.size(); ++i) diffs.push_back(c.N[i] - back.N[i]);
  CHECK(max_abs_on(diffs, probes) <= 1e-12);
}
