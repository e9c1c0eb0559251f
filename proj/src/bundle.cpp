#include "ksym/bundle.hpp"

#include <string>

namespace ksym {

namespace {

void check_size(const char* what, std::size_t got, std::size_t want) {
  if (got != want)
    throw DimensionMismatch(std::string(what) + ": got " + std::to_string(got) +
                            " components, expected " + std::to_string(want));
}

}  // namespace

BundlePoint::BundlePoint(const Dims& dims_, std::vector<double> q_, std::vector<double> v_)
    : dims(dims_), q(std::move(q_)), v(std::move(v_)) {
  check_size("BundlePoint q", q.size(), dims.n);
  check_size("BundlePoint v", v.size(), (std::size_t)dims.n * dims.k);
}

std::vector<double> BundlePoint::coords() const {
  std::vector<double> c(q);
  c.insert(c.end(), v.begin(), v.end());
  return c;
}

BundlePoint BundlePoint::from_coords(const Dims& dims, std::span<const double> coords) {
  check_size("BundlePoint coords", coords.size(), dims.total());
  return BundlePoint(dims, {coords.begin(), coords.begin() + dims.n},
                     {coords.begin() + dims.n, coords.end()});
}

TangentVector::TangentVector(BundlePoint base_, std::vector<double> z_, std::vector<double> zv_)
    : base(std::move(base_)), z(std::move(z_)), zv(std::move(zv_)) {
  check_size("TangentVector z", z.size(), base.dims.n);
  check_size("TangentVector zv", zv.size(), (std::size_t)base.dims.n * base.dims.k);
}

std::vector<double> TangentVector::components() const {
  std::vector<double> c(z);
  c.insert(c.end(), zv.begin(), zv.end());
  return c;
}

TangentVector TangentVector::from_components(BundlePoint base, std::span<const double> comps) {
  const Dims dims = base.dims;
  check_size("TangentVector components", comps.size(), dims.total());
  return TangentVector(std::move(base), {comps.begin(), comps.begin() + dims.n},
                       {comps.begin() + dims.n, comps.end()});
}

TangentVector TangentVector::zero(const BundlePoint& at) {
  return TangentVector(at, std::vector<double>(at.dims.n, 0.0),
                       std::vector<double>((std::size_t)at.dims.n * at.dims.k, 0.0));
}

Tensor11Field::Tensor11Field(const Dims& dims_)
    : dims(dims_), entries((std::size_t)dims.total() * dims.total()) {}

Tensor11Field Tensor11Field::zero(const Dims& dims) { return Tensor11Field(dims); }

Tensor11Field Tensor11Field::identity(const Dims& dims) {
  Tensor11Field t(dims);
  for (int r = 0; r < dims.total(); ++r) t.at(r, r) = ScalarExpr::constant(1.0);
  return t;
}

TangentVector map_i(const BundlePoint& p, std::span<const double> w) {
  check_size("map_i w", w.size(), (std::size_t)p.dims.n * p.dims.k);
  return TangentVector(p, std::vector<double>(p.dims.n, 0.0), {w.begin(), w.end()});
}

std::pair<BundlePoint, std::vector<double>> map_j(const TangentVector& Z) {
  return {Z.base, Z.z};
}

std::vector<double> map_kA(int A, std::span<const double> u, const Dims& dims) {
  if (A < 1 || A > dims.k)
    throw IndexOutOfRange("map_kA: slot " + std::to_string(A) + " outside 1.." +
                          std::to_string(dims.k));
  check_size("map_kA u", u.size(), dims.n);
  std::vector<double> w((std::size_t)dims.n * dims.k, 0.0);
  for (int i = 1; i <= dims.n; ++i) w[vel_index(i, A, dims)] = u[i - 1];
  return w;
}

TangentVector liouville(const BundlePoint& p) {
  return TangentVector(p, std::vector<double>(p.dims.n, 0.0), p.v);
}

TangentVector liouville_A(int A, const BundlePoint& p) {
  if (A < 1 || A > p.dims.k)
    throw IndexOutOfRange("liouville_A: slot " + std::to_string(A) + " outside 1.." +
                          std::to_string(p.dims.k));
  std::vector<double> zv((std::size_t)p.dims.n * p.dims.k, 0.0);
  for (int i = 1; i <= p.dims.n; ++i) zv[vel_index(i, A, p.dims)] = p.vel(i, A);
  return TangentVector(p, std::vector<double>(p.dims.n, 0.0), std::move(zv));
}

Tensor11Field ktangent(int A, const Dims& dims) {
  if (A < 1 || A > dims.k)
    throw IndexOutOfRange("ktangent: slot " + std::to_string(A) + " outside 1.." +
                          std::to_string(dims.k));
  Tensor11Field t(dims);
  for (int i = 1; i <= dims.n; ++i)
    t.at(dims.n + vel_index(i, A, dims), i - 1) = ScalarExpr::constant(1.0);
  return t;
}

std::vector<double> eval_entries(const Tensor11Field& T, std::span<const double> coords) {
  const int d = T.dims.total();
  check_size("eval_entries coords", coords.size(), d);
  std::vector<double> m((std::size_t)d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m[r * d + c] = eval(T.at(r, c), coords);
  return m;
}

TangentVector apply(const Tensor11Field& T, const TangentVector& Z) {
  if (T.dims != Z.base.dims)
    throw DimensionMismatch("apply: tensor and tangent vector live on different charts");
  const int d = T.dims.total();
  const std::vector<double> coords = Z.base.coords();
  const std::vector<double> m = eval_entries(T, coords);
  const std::vector<double> in = Z.components();
  std::vector<double> out(d, 0.0);
  for (int r = 0; r < d; ++r) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) acc += m[r * d + c] * in[c];
    out[r] = acc;
  }
  return TangentVector::from_components(Z.base, out);
}

Tensor11Field compose(const Tensor11Field& T, const Tensor11Field& S) {
  if (T.dims != S.dims)
    throw DimensionMismatch("compose: tensors live on different charts");
  const int d = T.dims.total();
  Tensor11Field out(T.dims);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      ScalarExpr acc;
      for (int m = 0; m < d; ++m) acc = acc + T.at(r, m) * S.at(m, c);
      out.at(r, c) = acc;
    }
  return out;
}

}  // namespace ksym
