#include "npprior/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "npprior/parallel.hpp"
#include "npprior/rng.hpp"

namespace npprior {

namespace {

constexpr std::int64_t kChunkRows = 1024;

struct Overloaded {
  template <typename... Fs>
  struct Set : Fs... {
    using Fs::operator()...;
  };
};

template <typename... Fs>
auto overloaded(Fs... fs) {
  return Overloaded::Set<Fs...>{fs...};
}

double draw_cauchy(std::mt19937_64& rng, double x0, double gamma_scale) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return x0 + gamma_scale * std::tan(std::numbers::pi * (u01(rng) - 0.5));
}

}  // namespace

void validate(const PriorSpec& prior) {
  std::visit(overloaded(
                 [](const UniformPrior& u) {
                   if (!(u.min < u.max)) throw InvalidParameter("UniformPrior: min must be < max");
                 },
                 [](const NormalPrior& n) {
                   if (!(n.sigma > 0.0)) throw InvalidParameter("NormalPrior: sigma must be > 0");
                 },
                 [](const CauchyPrior& c) {
                   if (!(c.gamma_scale > 0.0))
                     throw InvalidParameter("CauchyPrior: gamma_scale must be > 0");
                 },
                 [](const GammaRadialPrior& g) {
                   if (!(g.theta > 0.0)) throw InvalidParameter("GammaRadialPrior: theta must be > 0");
                 },
                 [](const NonParametricPrior& np) { validate(np.density); }),
             prior);
}

std::string describe(const PriorSpec& prior) {
  return std::visit(
      overloaded(
          [](const UniformPrior& u) {
            return "uniform(" + std::to_string(u.min) + "," + std::to_string(u.max) + ")";
          },
          [](const NormalPrior& n) {
            return "normal(" + std::to_string(n.mu) + "," + std::to_string(n.sigma) + ")";
          },
          [](const CauchyPrior& c) {
            return "cauchy(" + std::to_string(c.x0) + "," + std::to_string(c.gamma_scale) + ")";
          },
          [](const GammaRadialPrior& g) {
            return "gamma_radial(" + std::to_string(g.theta) + ")";
          },
          [](const NonParametricPrior& np) {
            return "non_parametric(n=" + std::to_string(np.density.grid.n) + ")";
          }),
      prior);
}

SampleBatch sample(const PriorSpec& prior, int d, std::int64_t count, std::uint64_t seed) {
  validate(prior);
  if (d < 1) throw InvalidParameter("sample: d must be >= 1");
  if (count < 1) throw InvalidParameter("sample: count must be >= 1");

  SampleBatch batch;
  batch.d = d;
  batch.count = count;
  batch.seed = seed;
  batch.prior = prior;
  batch.data.resize(static_cast<std::size_t>(count) * d);

  // cumulative mass for inverse-CDF sampling of the binned density
  std::vector<double> cdf;
  const NonParametricPrior* np = std::get_if<NonParametricPrior>(&prior);
  if (np != nullptr) {
    cdf.resize(np->density.mass.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      acc += np->density.mass[i];
      cdf[i] = acc;
    }
    cdf.back() = 1.0;
  }

  for_each_chunk(count, kChunkRows, [&](std::int64_t chunk, std::int64_t rb, std::int64_t re) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(chunk)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> z01(0.0, 1.0);
    double* out = batch.data.data() + static_cast<std::size_t>(rb) * d;

    std::visit(overloaded(
                   [&](const UniformPrior& u) {
                     std::uniform_real_distribution<double> dist(u.min, u.max);
                     for (std::int64_t k = 0; k < (re - rb) * d; ++k) out[k] = dist(rng);
                   },
                   [&](const NormalPrior& nr) {
                     for (std::int64_t k = 0; k < (re - rb) * d; ++k)
                       out[k] = nr.mu + nr.sigma * z01(rng);
                   },
                   [&](const CauchyPrior& c) {
                     for (std::int64_t k = 0; k < (re - rb) * d; ++k)
                       out[k] = draw_cauchy(rng, c.x0, c.gamma_scale);
                   },
                   [&](const GammaRadialPrior& g) {
                     const double rscale = std::sqrt(0.5 * g.theta);
                     std::vector<double> v(d);
                     for (std::int64_t row = rb; row < re; ++row) {
                       double nrm = 0.0;
                       do {
                         nrm = 0.0;
                         for (int j = 0; j < d; ++j) {
                           v[j] = z01(rng);
                           nrm += v[j] * v[j];
                         }
                       } while (nrm == 0.0);
                       nrm = std::sqrt(nrm);
                       const double radius = std::abs(z01(rng)) * rscale;
                       double* row_out = out + static_cast<std::size_t>(row - rb) * d;
                       for (int j = 0; j < d; ++j) row_out[j] = radius * v[j] / nrm;
                     }
                   },
                   [&](const NonParametricPrior& npp) {
                     const GridSpec& grid = npp.density.grid;
                     const double h = grid.width();
                     for (std::int64_t k = 0; k < (re - rb) * d; ++k) {
                       const double u = u01(rng);
                       auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                       auto bin = std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                           static_cast<std::ptrdiff_t>(cdf.size()) - 1);
                       out[k] = grid.min + (static_cast<double>(bin) + u01(rng)) * h;
                     }
                   }),
               prior);
  });
  return batch;
}

SampleBatch interpolate(const SampleBatch& a, const SampleBatch& b, double lambda) {
  if (a.d != b.d || a.count != b.count)
    throw IncompatibleBatches("interpolate: batches must share d and count");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidParameter("interpolate: lambda must lie in [0,1]");
  SampleBatch out;
  out.d = a.d;
  out.count = a.count;
  out.seed = a.seed;
  out.prior = a.prior;
  out.data.resize(a.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = (1.0 - lambda) * a.data[i] + lambda * b.data[i];
  return out;
}

SampleBatch uniform_on_sphere(int d, std::int64_t count, std::uint64_t seed) {
  if (d < 1) throw InvalidParameter("uniform_on_sphere: d must be >= 1");
  if (count < 1) throw InvalidParameter("uniform_on_sphere: count must be >= 1");
  SampleBatch batch;
  batch.d = d;
  batch.count = count;
  batch.seed = seed;
  batch.prior = GammaRadialPrior{default_gamma_radial_theta(d)};
  batch.data.resize(static_cast<std::size_t>(count) * d);

  for_each_chunk(count, kChunkRows, [&](std::int64_t chunk, std::int64_t rb, std::int64_t re) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(chunk)));
    std::normal_distribution<double> z01(0.0, 1.0);
    for (std::int64_t row = rb; row < re; ++row) {
      double* out = batch.data.data() + static_cast<std::size_t>(row) * d;
      double nrm = 0.0;
      do {
        nrm = 0.0;
        for (int j = 0; j < d; ++j) {
          out[j] = z01(rng);
          nrm += out[j] * out[j];
        }
      } while (nrm == 0.0);
      nrm = std::sqrt(nrm);
      for (int j = 0; j < d; ++j) out[j] /= nrm;
    }
  });
  return batch;
}

}  // namespace npprior
