#include "ksym/probe.hpp"

#include <cmath>
#include <random>

namespace ksym {

std::vector<std::vector<double>> make_probes(const Dims& dims, const ProbeOptions& opts) {
  if (opts.count < 1) throw InvalidParameter("probe count must be positive");
  if (!(opts.lo < opts.hi)) throw InvalidParameter("probe range must satisfy lo < hi");
  std::mt19937_64 rng(opts.seed);
  // Map the top 53 bits to [0,1) by hand; the standard distributions are
  // not bit-identical across library implementations.
  auto unit = [&]() { return (rng() >> 11) * 0x1.0p-53; };
  std::vector<std::vector<double>> points(opts.count);
  for (auto& p : points) {
    p.resize(dims.total());
    for (double& c : p) c = opts.lo + (opts.hi - opts.lo) * unit();
  }
  return points;
}

double max_abs_on(const std::vector<ScalarExpr>& exprs,
                  const std::vector<std::vector<double>>& probes) {
  double worst = 0.0;
  for (const auto& e : exprs)
    for (const auto& p : probes) worst = std::max(worst, std::abs(eval(e, p)));
  return worst;
}

}  // namespace ksym
