#include "ksym/cli.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>

#include "ksym/bundle.hpp"
#include "ksym/connection.hpp"
#include "ksym/errors.hpp"
#include "ksym/lagrangian.hpp"
#include "ksym/linalg.hpp"
#include "ksym/model.hpp"
#include "ksym/probe.hpp"
#include "ksym/sections.hpp"
#include "ksym/sopde.hpp"

namespace ksym {

namespace {

constexpr double kPredicateTol = 1e-10;
constexpr double kAlgebraTol = 1e-12;

struct Options {
  std::string model_path;
  int probes = 32;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool tol_set = false;
  std::string point;
  std::string grid_path;
  std::string out_path;
  double t_end = 1.0;
  int steps = 100;
  bool symmetrize = false;

  ProbeOptions probe_options() const { return ProbeOptions{probes, seed, -2.0, 2.0}; }
  double check_tol(double fallback) const { return tol_set ? tol : fallback; }
};

void header(std::ostream& out, const char* cmd, const Options& o) {
  out << "command: " << cmd << ' ' << o.model_path << '\n'
      << "seed: " << o.seed << '\n'
      << "probes: " << o.probes << '\n';
}

/// Collects check lines and the overall verdict.
struct Checks {
  std::ostream& out;
  bool all_pass = true;

  void line(const std::string& name, double residual, double tol) {
    const bool pass = residual <= tol;
    out << "check " << name << ": " << (pass ? "PASS" : "FAIL") << " max-residual "
        << format_double(residual) << " tol " << format_double(tol) << '\n';
    all_pass = all_pass && pass;
  }

  int finish() {
    out << "status: " << (all_pass ? "PASS" : "FAIL") << '\n';
    return all_pass ? 0 : 1;
  }
};

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, int d) {
  std::vector<double> c((std::size_t)d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      const double ail = a[i * d + l];
      if (ail == 0.0) continue;
      for (int j = 0; j < d; ++j) c[i * d + j] += ail * b[l * d + j];
    }
  return c;
}

std::vector<double> parse_point(const std::string& text, const Dims& dims) {
  std::vector<double> coords(dims.total(), 0.0);
  if (text.empty()) return coords;
  std::vector<double> given;
  std::size_t begin = 0;
  const std::string_view sv(text);
  while (begin <= sv.size()) {
    std::size_t comma = sv.find(',', begin);
    if (comma == std::string_view::npos) comma = sv.size();
    std::string_view field = sv.substr(begin, comma - begin);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
      throw InvalidParameter("--point entry \"" + std::string(field) + "\" is not a number");
    given.push_back(v);
    begin = comma + 1;
  }
  if ((int)given.size() != dims.total())
    throw InvalidParameter("--point needs " + std::to_string(dims.total()) +
                           " comma-separated coordinates, got " + std::to_string(given.size()));
  return given;
}

int cmd_check(const ModelFile& model, const Options& o, std::ostream& out) {
  if (!model.sopde && !model.connection)
    throw ModelError("model has neither a SOPDE nor a connection; nothing to check");
  header(out, "check", o);
  const auto probes = make_probes(model.dims, o.probe_options());
  Checks checks{out};

  if (model.sopde) {
    const ProbeCheck form = is_sopde(as_kvector(*model.sopde), o.probe_options());
    checks.line("sopde-form", form.max_residual, o.check_tol(kPredicateTol));
    const ProbeCheck sym = integrability_symmetry(*model.sopde, o.probe_options());
    checks.line("integrability-symmetry", sym.max_residual, o.check_tol(kPredicateTol));
  }

  const Connection* conn = model.connection ? &*model.connection : nullptr;
  Connection derived(model.dims);
  if (!conn && model.sopde) {
    derived = connection_from_sopde(*model.sopde);
    conn = &derived;
  }
  if (conn) {
    const int d = model.dims.total();
    const Tensor11Field H = horizontal_projector(*conn);
    const Tensor11Field V = vertical_projector(*conn);
    const Tensor11Field G = almost_product(*conn);
    std::vector<std::vector<double>> J(model.dims.k);
    for (int A = 1; A <= model.dims.k; ++A)
      J[A - 1] = eval_entries(ktangent(A, model.dims), probes.front());

    double projector = 0.0, conex = 0.0;
    for (const auto& p : probes) {
      const std::vector<double> h = eval_entries(H, p);
      const std::vector<double> v = eval_entries(V, p);
      const std::vector<double> g = eval_entries(G, p);
      const std::vector<double> hh = matmul(h, h, d);
      const std::vector<double> vv = matmul(v, v, d);
      const std::vector<double> hv = matmul(h, v, d);
      const std::vector<double> gg = matmul(g, g, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          const int e = r * d + c;
          projector = std::max(projector, std::abs(hh[e] - h[e]));
          projector = std::max(projector, std::abs(vv[e] - v[e]));
          projector = std::max(projector, std::abs(hv[e]));
          projector = std::max(projector, std::abs(gg[e] - (r == c ? 1.0 : 0.0)));
        }
      for (int A = 1; A <= model.dims.k; ++A) {
        const std::vector<double> jg = matmul(J[A - 1], g, d);
        const std::vector<double> gj = matmul(g, J[A - 1], d);
        for (int e = 0; e < d * d; ++e) {
          conex = std::max(conex, std::abs(jg[e] - J[A - 1][e]));
          conex = std::max(conex, std::abs(gj[e] + J[A - 1][e]));
        }
      }
    }
    checks.line("projector-algebra", projector, o.check_tol(kAlgebraTol));
    checks.line("almost-product-identities", conex, o.check_tol(kAlgebraTol));

    const Connection back = connection_from_gamma(G, o.probe_options());
    std::vector<ScalarExpr> diffs;
    for (std::size_t e = 0; e < conn->N.size(); ++e) diffs.push_back(back.N[e] - conn->N[e]);
    checks.line("gamma-round-trip", max_abs_on(diffs, probes), o.check_tol(kAlgebraTol));
  }
  return checks.finish();
}

int cmd_connection(const ModelFile& model, const Options& o, std::ostream& out) {
  const Sopde& s = model.need_sopde();
  header(out, "connection", o);
  const Connection conn = connection_from_sopde(s);
  const auto probes = make_probes(model.dims, o.probe_options());
  for (int j = 1; j <= model.dims.n; ++j)
    for (int A = 1; A <= model.dims.k; ++A)
      for (int i = 1; i <= model.dims.n; ++i) {
        const ScalarExpr& e = conn.at(j, A, i);
        out << "N[" << j << "][" << A << "][" << i << "] = " << to_string(e)
            << " | max-abs-at-probes " << format_double(max_abs_on({e}, probes)) << '\n';
      }
  out << "status: PASS\n";
  return 0;
}

int cmd_curvature(const ModelFile& model, const Options& o, std::ostream& out) {
  const Connection* conn = model.connection ? &*model.connection : nullptr;
  Connection derived(model.dims);
  if (!conn) {
    derived = connection_from_sopde(model.need_sopde());
    conn = &derived;
  }
  header(out, "curvature", o);
  const Curvature omega = curvature(*conn);
  const auto probes = make_probes(model.dims, o.probe_options());
  for (int j = 1; j <= model.dims.n; ++j)
    for (int A = 1; A <= model.dims.k; ++A)
      for (int i = 1; i <= model.dims.n; ++i)
        for (int kk = i + 1; kk <= model.dims.n; ++kk)
          out << "Omega[" << j << "][" << A << "][" << i << "][" << kk
              << "] = " << to_string(omega.at(j, A, i, kk)) << '\n';
  const double max_abs = max_abs_curvature(omega, probes);
  const double tol = o.check_tol(kAlgebraTol);
  out << "max-abs-curvature: " << format_double(max_abs) << '\n'
      << "vanishes: " << (max_abs <= tol ? "yes" : "no") << " (tol " << format_double(tol)
      << ")\n"
      << "status: PASS\n";
  return 0;
}

int cmd_el(const ModelFile& model, const Options& o, std::ostream& out) {
  const Lagrangian& L = model.need_lagrangian();
  header(out, "el", o);
  const auto probes = make_probes(model.dims, o.probe_options());
  const RegularityReport reg = regularity(L, probes);
  out << "regularity: " << (reg.regular ? "PASS" : "FAIL") << " min-abs-det "
      << format_double(reg.min_abs_det) << '\n';

  const HessianBlocks h = hessian(L);
  const int m = model.dims.n * model.dims.k;
  double det_lo = HUGE_VAL, det_hi = -HUGE_VAL;
  for (const auto& p : probes) {
    const double det = lu_det(h.eval_at(p), m);
    det_lo = std::min(det_lo, det);
    det_hi = std::max(det_hi, det);
  }
  out << "hessian-det-range: " << format_double(det_lo) << " .. " << format_double(det_hi)
      << '\n';

  const BundlePoint p = BundlePoint::from_coords(model.dims, parse_point(o.point, model.dims));
  const ElSolution sol = solve_el_coefficients(L, p, o.symmetrize);
  for (int A = 1; A <= model.dims.k; ++A)
    for (int j = 1; j <= model.dims.n; ++j)
      for (int B = 1; B <= model.dims.k; ++B)
        out << "xi[" << A << "][" << j << "][" << B
            << "] = " << format_double(sol.xi[xi_index(A, j, B, model.dims)]) << '\n';
  out << "rank: " << sol.rank << '\n'
      << "residual: " << format_double(sol.residual) << '\n'
      << "status: " << (reg.regular ? "PASS" : "FAIL") << '\n';
  return reg.regular ? 0 : 1;
}

int cmd_verify_section(const ModelFile& model, const Options& o, std::ostream& out) {
  const Sopde& s = model.need_sopde();
  if (o.grid_path.empty()) throw InvalidParameter("verify-section needs --grid file.csv");
  const GridMap g = read_csv(o.grid_path);
  header(out, "verify-section", o);
  const SectionReport report = section_residual(s, g);
  const double tol = o.tol_set ? o.tol : 10.0 * report.max_step * report.max_step;
  out << "grid: " << o.grid_path << '\n' << "axes:";
  for (const GridAxis& ax : g.axes)
    out << ' ' << format_double(ax.lo) << ".." << format_double(ax.hi) << '/' << ax.count;
  out << '\n'
      << "interior-nodes: " << report.interior_nodes << '\n'
      << "tol: " << format_double(tol)
      << (o.tol_set ? " (from --tol)\n"
                    : " (10 h^2 with h = " + format_double(report.max_step) + ")\n");
  for (int A = 1; A <= g.k(); ++A)
    for (int B = 1; B <= g.k(); ++B) {
      const WorstNode& w = report.worst[(A - 1) * g.k() + (B - 1)];
      out << "worst[" << A << "][" << B << "]: residual " << format_double(w.residual)
          << " component " << w.i << " node";
      for (int idx : w.idx) out << ' ' << idx;
      out << '\n';
    }
  out << "max-residual: " << format_double(report.max_residual) << '\n'
      << "status: " << (report.max_residual <= tol ? "PASS" : "FAIL") << '\n';
  return report.max_residual <= tol ? 0 : 1;
}

int cmd_integrate(const ModelFile& model, const Options& o, std::ostream& out) {
  const Sopde& s = model.need_sopde();
  const BundlePoint start =
      BundlePoint::from_coords(model.dims, parse_point(o.point, model.dims));
  const Prolongation traj = integrate_k1(s, start, o.t_end, o.steps);
  if (o.out_path.empty()) {
    write_csv(traj.base, out);
    return 0;
  }
  write_csv(traj.base, o.out_path);
  out << "command: integrate " << o.model_path << '\n'
      << "t-end: " << format_double(o.t_end) << '\n'
      << "steps: " << o.steps << '\n'
      << "wrote: " << o.out_path << " (" << traj.base.node_count() << " nodes)\n";
  std::vector<int> last{traj.base.axes[0].count - 1};
  for (int i = 1; i <= model.dims.n; ++i)
    out << "final q" << i << ": " << format_double(traj.base.value(last, i)) << '\n';
  for (int i = 1; i <= model.dims.n; ++i)
    out << "final v" << i << "_1: " << format_double(traj.vel(last, i, 1)) << '\n';
  out << "status: PASS\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nonlinear connections, SOPDEs and k-symplectic Lagrangian systems"};
  app.name("ksym");
  app.require_subcommand(1);

  Options o;
  auto add_common = [&](CLI::App* sub, bool with_probes = true) {
    sub->add_option("model", o.model_path, "model file")->required();
    if (with_probes) {
      sub->add_option("--probes", o.probes, "number of probe points")->capture_default_str();
      sub->add_option("--seed", o.seed, "probe RNG seed")->capture_default_str();
    }
    sub->add_option("--tol", o.tol, "override the per-check tolerance");
    return sub;
  };

  CLI::App* c_check = add_common(app.add_subcommand("check", "run the invariant suite"));
  CLI::App* c_conn =
      add_common(app.add_subcommand("connection", "connection induced by the SOPDE"));
  CLI::App* c_curv = add_common(app.add_subcommand("curvature", "curvature of the connection"));
  CLI::App* c_el =
      add_common(app.add_subcommand("el", "solve the Euler-Lagrange coefficients"));
  c_el->add_option("--point", o.point, "chart point, comma-separated coordinates (default 0)");
  c_el->add_flag("--symmetrize", o.symmetrize, "restrict to slot-symmetric coefficients");
  CLI::App* c_verify = add_common(
      app.add_subcommand("verify-section", "check a sampled map against the SOPDE"));
  c_verify->add_option("--grid", o.grid_path, "grid CSV file")->required();
  CLI::App* c_int = add_common(
      app.add_subcommand("integrate", "integrate a k = 1 SOPDE with RK4"), false);
  c_int->add_option("--point", o.point, "start point, comma-separated coordinates (default 0)");
  c_int->add_option("--t-end", o.t_end, "integration end time")->capture_default_str();
  c_int->add_option("--steps", o.steps, "number of RK4 steps")->capture_default_str();
  c_int->add_option("--out", o.out_path, "write the trajectory CSV here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  for (CLI::App* sub : {c_check, c_conn, c_curv, c_el, c_verify, c_int})
    if (sub->parsed() && sub->count("--tol")) o.tol_set = true;

  try {
    const ModelFile model = load_model(o.model_path);
    if (c_check->parsed()) return cmd_check(model, o, out);
    if (c_conn->parsed()) return cmd_connection(model, o, out);
    if (c_curv->parsed()) return cmd_curvature(model, o, out);
    if (c_el->parsed()) return cmd_el(model, o, out);
    if (c_verify->parsed()) return cmd_verify_section(model, o, out);
    if (c_int->parsed()) return cmd_integrate(model, o, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const SingularHessian& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NonFiniteState& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NotAConnectionTensor& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const RankDeficiencyUnexpected& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DivisionByZero& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ksym
