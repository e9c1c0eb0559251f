#pragma once

#include <cstdint>
#include <vector>

#include "ksym/expr.hpp"

namespace ksym {

/// Sampling plan for probe-based checks. The same dims/count/seed always
/// produce the same points, on every platform.
struct ProbeOptions {
  int count = 32;
  std::uint64_t seed = 0;
  double lo = -2.0;
  double hi = 2.0;
};

/// Deterministic probe points, uniform in [lo, hi]^(n + n*k).
std::vector<std::vector<double>> make_probes(const Dims& dims, const ProbeOptions& opts = {});

/// Largest |eval(e, p)| over the probe set.
double max_abs_on(const std::vector<ScalarExpr>& exprs,
                  const std::vector<std::vector<double>>& probes);

}  // namespace ksym
