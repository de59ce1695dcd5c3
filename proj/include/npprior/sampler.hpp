#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "npprior/density.hpp"

namespace npprior {

struct UniformPrior {
  double min = 0.0;
  double max = 1.0;
};

struct NormalPrior {
  double mu = 0.0;
  double sigma = 1.0;
};

struct CauchyPrior {
  double x0 = 0.0;
  double gamma_scale = 1.0;
};

/// v ~ Uniform(S^{d-1}), r ~ Gamma(1/2, theta) (scale convention),
/// z = sqrt(r) * v. Sampled rejection-free via r = (theta/2) * Z^2.
struct GammaRadialPrior {
  double theta = 1.0;
};

struct NonParametricPrior {
  BinnedDensity density;
};

using PriorSpec =
    std::variant<UniformPrior, NormalPrior, CauchyPrior, GammaRadialPrior, NonParametricPrior>;

void validate(const PriorSpec& prior);
std::string describe(const PriorSpec& prior);

/// Default theta matching a standard normal's expected squared norm (E||z||^2 = d).
inline double default_gamma_radial_theta(int d) { return 2.0 * d; }

/// Immutable count x d batch of latent vectors together with the seed that
/// produced it. Sampling is chunked by rows (1024 per chunk); chunk k uses
/// mix_seed(seed, k), so output does not depend on thread scheduling.
struct SampleBatch {
  int d = 0;
  std::int64_t count = 0;
  std::vector<double> data;  // row-major
  std::uint64_t seed = 0;
  PriorSpec prior;

  double at(std::int64_t row, int col) const { return data[static_cast<std::size_t>(row) * d + col]; }
};

SampleBatch sample(const PriorSpec& prior, int d, std::int64_t count, std::uint64_t seed);

/// Element-wise (1-lambda)*a + lambda*b for lambda in [0,1].
SampleBatch interpolate(const SampleBatch& a, const SampleBatch& b, double lambda);

/// Rows are isotropic unit vectors (normalized standard normal draws).
SampleBatch uniform_on_sphere(int d, std::int64_t count, std::uint64_t seed);

}  // namespace npprior
