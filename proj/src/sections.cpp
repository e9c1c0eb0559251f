#include "ksym/sections.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ksym {

namespace {

constexpr double kStateLimit = 1e12;
constexpr double kLatticeTol = 1e-9;

bool lattice_close(double got, double expected) {
  return std::abs(got - expected) <= kLatticeTol * std::max(1.0, std::abs(expected));
}

}  // namespace

long GridMap::node_count() const {
  long total = 1;
  for (const GridAxis& ax : axes) total *= ax.count;
  return total;
}

long GridMap::flat_index(const std::vector<int>& idx) const {
  if ((int)idx.size() != k())
    throw DimensionMismatch("grid index has " + std::to_string(idx.size()) +
                            " entries for a k = " + std::to_string(k()) + " grid");
  long flat = 0;
  for (int a = 0; a < k(); ++a) {
    if (idx[a] < 0 || idx[a] >= axes[a].count)
      throw IndexOutOfRange("grid index " + std::to_string(idx[a]) + " outside axis t" +
                            std::to_string(a + 1));
    flat = flat * axes[a].count + idx[a];
  }
  return flat;
}

double GridMap::value(const std::vector<int>& idx, int i) const {
  if (i < 1 || i > n) throw IndexOutOfRange("component " + std::to_string(i) + " outside 1..n");
  return values[flat_index(idx) * n + (i - 1)];
}

double& GridMap::value(const std::vector<int>& idx, int i) {
  if (i < 1 || i > n) throw IndexOutOfRange("component " + std::to_string(i) + " outside 1..n");
  return values[flat_index(idx) * n + (i - 1)];
}

std::vector<double> GridMap::node_point(const std::vector<int>& idx) const {
  flat_index(idx);
  std::vector<double> t(k());
  for (int a = 0; a < k(); ++a) t[a] = axes[a].node(idx[a]);
  return t;
}

bool GridMap::interior(const std::vector<int>& idx) const {
  for (int a = 0; a < k(); ++a)
    if (idx[a] < 1 || idx[a] > axes[a].count - 2) return false;
  return true;
}

double GridMap::max_step() const {
  double h = 0.0;
  for (const GridAxis& ax : axes) h = std::max(h, ax.step());
  return h;
}

void GridMap::validate() const {
  if (n < 1) throw InvalidParameter("grid needs n >= 1 value components");
  if (axes.empty()) throw InvalidParameter("grid needs at least one axis");
  for (int a = 0; a < k(); ++a) {
    const GridAxis& ax = axes[a];
    if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi) || !(ax.lo < ax.hi))
      throw InvalidParameter("axis t" + std::to_string(a + 1) + " must have finite lo < hi");
    if (ax.count < 5)
      throw GridTooSmall("axis t" + std::to_string(a + 1) + " has " +
                         std::to_string(ax.count) + " nodes; need at least 5");
  }
  if ((long)values.size() != node_count() * n)
    throw DimensionMismatch("grid stores " + std::to_string(values.size()) +
                            " values; expected " + std::to_string(node_count() * n));
}

GridMap make_grid(int n, std::vector<GridAxis> axes) {
  GridMap g;
  g.n = n;
  g.axes = std::move(axes);
  long total = 1;
  for (const GridAxis& ax : g.axes) total *= std::max(ax.count, 0);
  g.values.assign(total * std::max(n, 0), 0.0);
  g.validate();
  return g;
}

bool next_index(std::vector<int>& idx, const GridMap& g) {
  for (int a = g.k() - 1; a >= 0; --a) {
    if (++idx[a] < g.axes[a].count) return true;
    idx[a] = 0;
  }
  return false;
}

double Prolongation::vel(const std::vector<int>& idx, int i, int A) const {
  const int n = base.n, k = base.k();
  if (A < 1 || A > k) throw IndexOutOfRange("velocity slot " + std::to_string(A));
  if (i < 1 || i > n) throw IndexOutOfRange("component " + std::to_string(i));
  return velocities[base.flat_index(idx) * (n * k) + (A - 1) * n + (i - 1)];
}

std::vector<double> Prolongation::coords(const std::vector<int>& idx) const {
  const int n = base.n, k = base.k();
  const long flat = base.flat_index(idx);
  std::vector<double> c(n + n * k);
  for (int i = 0; i < n; ++i) c[i] = base.values[flat * n + i];
  for (int j = 0; j < n * k; ++j) c[n + j] = velocities[flat * (n * k) + j];
  return c;
}

Prolongation prolong(const GridMap& g) {
  g.validate();
  const int n = g.n, k = g.k();
  Prolongation p;
  p.base = g;
  p.velocities.assign(g.node_count() * (long)(n * k), 0.0);
  p.interior_only = true;

  std::vector<int> idx(k, 0), up, down;
  do {
    if (!g.interior(idx)) continue;
    const long flat = g.flat_index(idx);
    for (int A = 1; A <= k; ++A) {
      up = idx;
      down = idx;
      ++up[A - 1];
      --down[A - 1];
      const double two_h = 2.0 * g.axes[A - 1].step();
      for (int i = 1; i <= n; ++i)
        p.velocities[flat * (n * k) + (A - 1) * n + (i - 1)] =
            (g.value(up, i) - g.value(down, i)) / two_h;
    }
  } while (next_index(idx, g));
  return p;
}

SectionReport section_residual(const Sopde& s, const GridMap& g) {
  if (s.dims.n != g.n || s.dims.k != g.k())
    throw DimensionMismatch("SOPDE on n = " + std::to_string(s.dims.n) +
                            ", k = " + std::to_string(s.dims.k) + " checked against an n = " +
                            std::to_string(g.n) + ", k = " + std::to_string(g.k()) + " grid");
  const Prolongation p = prolong(g);
  const int n = g.n, k = g.k();

  SectionReport report;
  report.max_step = g.max_step();
  report.worst.assign((std::size_t)k * k, WorstNode{});

  std::vector<int> idx(k, 0), shifted;
  do {
    if (!g.interior(idx)) continue;
    ++report.interior_nodes;
    const std::vector<double> coords = p.coords(idx);
    for (int A = 1; A <= k; ++A)
      for (int B = 1; B <= k; ++B) {
        const double hA = g.axes[A - 1].step();
        const double hB = g.axes[B - 1].step();
        for (int i = 1; i <= n; ++i) {
          double second;
          if (A == B) {
            shifted = idx;
            ++shifted[A - 1];
            const double fp = g.value(shifted, i);
            shifted[A - 1] -= 2;
            const double fm = g.value(shifted, i);
            second = (fp - 2.0 * g.value(idx, i) + fm) / (hA * hA);
          } else {
            shifted = idx;
            ++shifted[A - 1];
            ++shifted[B - 1];
            const double fpp = g.value(shifted, i);
            shifted[B - 1] -= 2;
            const double fpm = g.value(shifted, i);
            shifted[A - 1] -= 2;
            const double fmm = g.value(shifted, i);
            shifted[B - 1] += 2;
            const double fmp = g.value(shifted, i);
            second = (fpp - fpm - fmp + fmm) / (4.0 * hA * hB);
          }
          const double r = std::abs(second - eval(s.at(A, i, B), coords));
          report.max_residual = std::max(report.max_residual, r);
          WorstNode& w = report.worst[(A - 1) * k + (B - 1)];
          if (w.idx.empty() || r > w.residual) w = WorstNode{idx, i, r};
        }
      }
  } while (next_index(idx, g));
  return report;
}

namespace {

void check_state(std::span<const double> y, double t) {
  for (double x : y)
    if (!std::isfinite(x) || std::abs(x) > kStateLimit)
      throw NonFiniteState("trajectory left the trusted range near t = " + format_double(t));
}

}  // namespace

Prolongation integrate_k1(const Sopde& s, const BundlePoint& start, double t_end, int steps) {
  if (s.dims.k != 1) throw DimensionMismatch("integrate_k1 needs a k = 1 SOPDE");
  if (s.dims != start.dims) throw DimensionMismatch("start point on a different chart");
  if (!std::isfinite(t_end) || t_end <= 0.0)
    throw InvalidParameter("integrate_k1 needs t_end > 0");
  if (steps < 4)
    throw GridTooSmall("integrate_k1 needs at least 4 steps for a usable grid");
  const int n = s.dims.n;
  const double h = t_end / steps;

  // State layout matches the chart coordinates: q then v.
  std::vector<double> y = start.coords();
  check_state(y, 0.0);

  auto deriv = [&](const std::vector<double>& state) {
    std::vector<double> d(2 * n);
    for (int i = 0; i < n; ++i) d[i] = state[n + i];
    for (int i = 1; i <= n; ++i) d[n + i - 1] = eval(s.at(1, i, 1), state);
    return d;
  };

  Prolongation out;
  out.base = make_grid(n, {GridAxis{0.0, t_end, steps + 1}});
  out.velocities.assign((long)(steps + 1) * n, 0.0);
  out.interior_only = false;

  auto record = [&](int node) {
    for (int i = 0; i < n; ++i) {
      out.base.values[(long)node * n + i] = y[i];
      out.velocities[(long)node * n + i] = y[n + i];
    }
  };
  record(0);

  std::vector<double> stage(2 * n);
  for (int step = 0; step < steps; ++step) {
    const std::vector<double> k1 = deriv(y);
    for (int j = 0; j < 2 * n; ++j) stage[j] = y[j] + 0.5 * h * k1[j];
    const std::vector<double> k2 = deriv(stage);
    for (int j = 0; j < 2 * n; ++j) stage[j] = y[j] + 0.5 * h * k2[j];
    const std::vector<double> k3 = deriv(stage);
    for (int j = 0; j < 2 * n; ++j) stage[j] = y[j] + h * k3[j];
    const std::vector<double> k4 = deriv(stage);
    for (int j = 0; j < 2 * n; ++j)
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    check_state(y, (step + 1) * h);
    record(step + 1);
  }
  return out;
}

Sopde heat_sopde(double kappa, double lambda) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw InvalidParameter("heat_sopde needs kappa > 0");
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw InvalidParameter("heat_sopde needs lambda != 0");
  const Dims dims(1, 2);
  const ScalarExpr decay = ScalarExpr::constant(-kappa / (lambda * lambda));
  const ScalarExpr diffusion = ScalarExpr::constant(1.0 / kappa);
  const ScalarExpr v1 = ScalarExpr::variable(Var::velocity(1, 1), dims);
  const ScalarExpr v2 = ScalarExpr::variable(Var::velocity(1, 2), dims);

  Sopde s(dims);
  s.at(1, 1, 1) = decay * v1;
  s.at(1, 1, 2) = decay * v2;
  s.at(2, 1, 1) = decay * v2;
  s.at(2, 1, 2) = diffusion * v1;
  return s;
}

GridMap heat_solution(double amplitude, double delta, double kappa, double lambda,
                      const GridAxis& t_axis, const GridAxis& x_axis) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw InvalidParameter("heat_solution needs kappa > 0");
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw InvalidParameter("heat_solution needs lambda != 0");
  GridMap g = make_grid(1, {t_axis, x_axis});
  const double rate = kappa / (lambda * lambda);
  for (int it = 0; it < t_axis.count; ++it) {
    const double t = t_axis.node(it);
    for (int ix = 0; ix < x_axis.count; ++ix) {
      const double x = x_axis.node(ix);
      g.values[(long)it * x_axis.count + ix] =
          amplitude * std::exp(-rate * t) * std::sin(x / lambda + delta);
    }
  }
  return g;
}

// ------------------------------------------------------------------- CSV I/O

void write_csv(const GridMap& g, std::ostream& out) {
  g.validate();
  for (int a = 1; a <= g.k(); ++a) out << (a == 1 ? "t" : ",t") << a;
  for (int i = 1; i <= g.n; ++i) out << ",phi" << i;
  out << '\n';
  std::vector<int> idx(g.k(), 0);
  do {
    const std::vector<double> t = g.node_point(idx);
    const long flat = g.flat_index(idx);
    for (int a = 0; a < g.k(); ++a) out << (a == 0 ? "" : ",") << format_double(t[a]);
    for (int i = 0; i < g.n; ++i) out << ',' << format_double(g.values[flat * g.n + i]);
    out << '\n';
  } while (next_index(idx, g));
}

void write_csv(const GridMap& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open " + path + " for writing");
  write_csv(g, out);
  out.flush();
  if (!out) throw CsvError("write to " + path + " failed");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, int line_no) {
  field = trim(field);
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw CsvError("line " + std::to_string(line_no) + ": \"" + std::string(field) +
                   "\" is not a number");
  return v;
}

}  // namespace

GridMap read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header row");
  std::vector<std::string_view> header = split_fields(line);
  for (auto& f : header) f = trim(f);

  int k = 0;
  while (k < (int)header.size() && header[k] == "t" + std::to_string(k + 1)) ++k;
  if (k == 0) throw CsvError("header must begin with t1");
  const int n = (int)header.size() - k;
  if (n == 0) throw CsvError("header lists no phi columns");
  for (int i = 1; i <= n; ++i)
    if (header[k + i - 1] != "phi" + std::to_string(i))
      throw CsvError("header column " + std::to_string(k + i) + " should be phi" +
                     std::to_string(i));

  std::vector<double> coords;  // k per row
  std::vector<double> phi;     // n per row
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);
    if ((int)fields.size() != k + n)
      throw CsvError("line " + std::to_string(line_no) + ": expected " +
                     std::to_string(k + n) + " fields, got " + std::to_string(fields.size()));
    for (int c = 0; c < k; ++c) coords.push_back(parse_field(fields[c], line_no));
    for (int c = 0; c < n; ++c) phi.push_back(parse_field(fields[k + c], line_no));
  }
  const long rows = (long)phi.size() / n;
  if (rows == 0) throw CsvError("no data rows");

  // Recover the per-axis node lists. Rows run row-major with t^1 outermost,
  // so axis k cycles fastest; sample every `stride` rows from the inside out.
  std::vector<std::vector<double>> nodes(k);
  long stride = 1;
  for (int a = k; a >= 1; --a) {
    for (long r = 0; r * stride < rows; ++r) {
      const double* row = &coords[r * stride * k];
      bool leading_match = true;
      for (int c = 0; c + 1 < a; ++c)
        if (!lattice_close(row[c], coords[c])) {
          leading_match = false;
          break;
        }
      if (!leading_match) break;
      nodes[a - 1].push_back(row[a - 1]);
    }
    stride *= (long)nodes[a - 1].size();
  }
  if (stride != rows)
    throw CsvError(std::to_string(rows) + " rows do not fill a complete lattice");

  GridMap g;
  g.n = n;
  g.axes.resize(k);
  for (int a = 0; a < k; ++a) {
    const std::vector<double>& ns = nodes[a];
    GridAxis& ax = g.axes[a];
    ax.lo = ns.front();
    ax.hi = ns.back();
    ax.count = (int)ns.size();
    if (ax.count >= 2) {
      for (int j = 0; j < ax.count; ++j)
        if (!lattice_close(ns[j], ax.node(j)))
          throw CsvError("axis t" + std::to_string(a + 1) + " is not uniformly spaced");
    }
  }

  // Every row must sit exactly where the reconstructed lattice says it does.
  for (long r = 0; r < rows; ++r) {
    long rest = r;
    for (int a = k; a >= 1; --a) {
      const int j = (int)(rest % g.axes[a - 1].count);
      rest /= g.axes[a - 1].count;
      if (!lattice_close(coords[r * k + (a - 1)], g.axes[a - 1].node(j)))
        throw CsvError("row " + std::to_string(r + 2) + " is out of lattice order");
    }
  }

  g.values = std::move(phi);
  g.validate();
  return g;
}

GridMap read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return read_csv(in);
}

}  // namespace ksym
