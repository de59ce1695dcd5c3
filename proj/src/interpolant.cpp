#include "npprior/interpolant.hpp"

#include <cassert>
#include <cmath>

#include "npprior/parallel.hpp"

namespace npprior {

namespace detail {

std::vector<double> index_convolution(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  std::vector<double> conv(2 * n - 1, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* out = conv.data() + i;
    for (std::int64_t j = 0; j < n; ++j) out[j] += ai * b[j];
  }
  return conv;
}

std::vector<double> midpoint_rebin(const std::vector<double>& conv, int n) {
  assert(static_cast<int>(conv.size()) == 2 * n - 1);
  std::vector<double> q(n, 0.0);
  for (int k = 0; k < n; ++k) q[k] = conv[2 * k];
  for (int s = 1; s < 2 * n - 1; s += 2) {
    const double half = 0.5 * conv[s];
    q[(s - 1) / 2] += half;
    q[(s + 1) / 2] += half;
  }
  return q;
}

std::vector<double> midpoint_mass(const std::vector<double>& p) {
  return midpoint_rebin(index_convolution(p, p), static_cast<int>(p.size()));
}

std::vector<double> interpolant_mass(const std::vector<double>& p, double lambda) {
  const std::int64_t n = static_cast<std::int64_t>(p.size());
  constexpr std::int64_t kRowChunk = 64;
  const std::int64_t chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<std::vector<double>> partial(chunks);

  for_each_chunk(n, kRowChunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    std::vector<double> acc(n, 0.0);
    for (std::int64_t i = b; i < e; ++i) {
      const double pi = p[i];
      if (pi == 0.0) continue;
      const double base = (1.0 - lambda) * static_cast<double>(i);
      for (std::int64_t j = 0; j < n; ++j) {
        const double w = pi * p[j];
        // position in index units: u = (1-lambda)*i + lambda*j in [0, n-1]
        const double u = base + lambda * static_cast<double>(j);
        const std::int64_t k = static_cast<std::int64_t>(u);
        if (k >= n - 1) {
          acc[n - 1] += w;
        } else {
          const double frac = u - static_cast<double>(k);
          acc[k] += w * (1.0 - frac);
          acc[k + 1] += w * frac;
        }
      }
    }
    partial[c] = std::move(acc);
  });

  std::vector<double> out(n, 0.0);
  for (std::int64_t c = 0; c < chunks; ++c)
    for (std::int64_t k = 0; k < n; ++k) out[k] += partial[c][k];
  return out;
}

}  // namespace detail

BinnedDensity interpolant_density(const BinnedDensity& f, double lambda) {
  validate(f);
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidParameter("interpolant_density: lambda must lie in (0,1)");
  return BinnedDensity{f.grid, detail::interpolant_mass(f.mass, lambda)};
}

BinnedDensity midpoint_density(const BinnedDensity& f) {
  validate(f);
  return BinnedDensity{f.grid, detail::midpoint_mass(f.mass)};
}

MismatchProfile mismatch_profile(const BinnedDensity& f, const std::vector<double>& lambdas,
                                 DivergenceKind kind, double eps) {
  validate(f);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0 && lambdas[k] < 1.0))
      throw InvalidParameter("mismatch_profile: every lambda must lie in (0,1)");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1]))
      throw InvalidParameter("mismatch_profile: lambdas must be strictly increasing");
  }
  MismatchProfile prof;
  prof.lambdas = lambdas;
  prof.kind = kind;
  prof.values.reserve(lambdas.size());
  for (double lam : lambdas)
    prof.values.push_back(divergence(kind, f, interpolant_density(f, lam), eps));
  return prof;
}

}  // namespace npprior
