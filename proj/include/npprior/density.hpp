#pragma once

#include <string>
#include <vector>

#include "npprior/grid.hpp"

namespace npprior {

/// Floor applied to the denominator distribution inside divergences,
/// with 0*log(0) := 0 on the numerator side.
inline constexpr double kKlFloor = 1e-12;

/// Discrete probability mass vector over a uniform grid. Mass entries are
/// dimensionless probabilities (not pdf samples): every entry >= 0 and the
/// vector sums to 1 within 1e-9.
struct BinnedDensity {
  GridSpec grid;
  std::vector<double> mass;
};

/// Objective choices for comparing two binned densities. JEFFREYS_MID is
/// KL(P||(P+Q)/2) + KL(Q||(P+Q)/2).
enum class DivergenceKind { KL_PQ, KL_QP, JEFFREYS_MID, L2 };

const char* to_string(DivergenceKind k);
DivergenceKind divergence_kind_from_string(const std::string& s);

/// Throws InvalidParameter unless d satisfies the BinnedDensity invariants.
void validate(const BinnedDensity& d);

BinnedDensity make_uniform(const GridSpec& grid);

/// Normal pdf discretized by the midpoint rule (pdf at bin centers,
/// renormalized). Truncation error is negligible once the grid covers a
/// few sigma.
BinnedDensity make_truncated_normal(const GridSpec& grid, double mu, double sigma);

BinnedDensity make_truncated_cauchy(const GridSpec& grid, double x0, double gamma_scale);

/// Places all mass in the bin containing x (test/CLI convenience).
BinnedDensity make_delta(const GridSpec& grid, int bin);

double mean(const BinnedDensity& d);
double variance(const BinnedDensity& d);

/// The constraint term of the design problem, in bin-index units with
/// i = 1..n: (1/n) * (sum i^2 p_i - (sum i p_i)^2). Relates to the physical
/// variance by variance = index_variance * h^2 * n.
double index_variance(const BinnedDensity& d);

/// Divergence between two densities on the same grid, in nats. The floor
/// eps is applied to the denominator distribution only.
double divergence(DivergenceKind kind, const BinnedDensity& p, const BinnedDensity& q,
                  double eps = kKlFloor);

namespace detail {
/// Raw-vector divergence used by the optimizer hot loop; p and q must have
/// equal length.
double divergence_raw(DivergenceKind kind, const std::vector<double>& p,
                      const std::vector<double>& q, double eps);
}  // namespace detail

}  // namespace npprior
