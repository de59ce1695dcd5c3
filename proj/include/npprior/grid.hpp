#pragma once

#include "npprior/errors.hpp"

namespace npprior {

/// Uniform bin-centered grid on [min, max). Bin i (0-indexed) covers
/// [min + i*h, min + (i+1)*h) with h = (max-min)/n; its center is
/// min + (i+0.5)*h.
struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int n = 1024;

  double width() const { return (max - min) / n; }
  double center(int i) const { return min + (i + 0.5) * width(); }

  bool operator==(const GridSpec&) const = default;
};

inline void validate(const GridSpec& g) {
  if (!(g.min < g.max)) throw InvalidParameter("GridSpec: min must be < max");
  if (g.n < 2) throw InvalidParameter("GridSpec: n must be >= 2");
}

}  // namespace npprior
