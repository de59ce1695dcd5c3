#pragma once

#include "npprior/density.hpp"

namespace npprior {

/// Divergence between a density and its interpolant distribution, evaluated
/// on a grid of lambda values.
struct MismatchProfile {
  std::vector<double> lambdas;
  std::vector<double> values;  // nats
  DivergenceKind kind = DivergenceKind::KL_PQ;
};

/// Distribution of (1-lambda)*x1 + lambda*x2 for two independent draws from
/// f, rebinned conservatively onto f's grid. Mass and mean are preserved;
/// rebinning can add at most h^2/4 of variance.
BinnedDensity interpolant_density(const BinnedDensity& f, double lambda);

/// The lambda = 0.5 case via the index-convolution fast path. Even center
/// sums land on a bin center, odd sums land on a bin edge and are split
/// 50/50 between the adjacent bins.
BinnedDensity midpoint_density(const BinnedDensity& f);

MismatchProfile mismatch_profile(const BinnedDensity& f, const std::vector<double>& lambdas,
                                 DivergenceKind kind, double eps = kKlFloor);

namespace detail {

/// Full linear convolution conv[s] = sum_{i+j=s} a_i * b_j, length 2n-1.
std::vector<double> index_convolution(const std::vector<double>& a, const std::vector<double>& b);

/// Maps a 2n-1 sum-index mass vector onto n midpoint bins:
/// q_k = conv[2k] + 0.5*(conv[2k-1] + conv[2k+1]).
std::vector<double> midpoint_rebin(const std::vector<double>& conv, int n);

/// Raw midpoint operator used by the optimizer hot loop.
std::vector<double> midpoint_mass(const std::vector<double>& p);

/// Raw general-lambda operator on mass vectors (conservative linear split).
std::vector<double> interpolant_mass(const std::vector<double>& p, double lambda);

}  // namespace detail

}  // namespace npprior
