#include "npprior/density.hpp"

#include <cmath>
#include <numbers>

namespace npprior {

const char* to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::KL_PQ: return "kl_pq";
    case DivergenceKind::KL_QP: return "kl_qp";
    case DivergenceKind::JEFFREYS_MID: return "jeffreys_mid";
    case DivergenceKind::L2: return "l2";
  }
  return "kl_pq";
}

DivergenceKind divergence_kind_from_string(const std::string& s) {
  if (s == "kl_pq") return DivergenceKind::KL_PQ;
  if (s == "kl_qp") return DivergenceKind::KL_QP;
  if (s == "jeffreys_mid") return DivergenceKind::JEFFREYS_MID;
  if (s == "l2") return DivergenceKind::L2;
  throw InvalidParameter("unknown divergence kind: " + s);
}

void validate(const BinnedDensity& d) {
  validate(d.grid);
  if (static_cast<int>(d.mass.size()) != d.grid.n)
    throw InvalidParameter("BinnedDensity: mass length does not match grid.n");
  double sum = 0.0;
  for (double m : d.mass) {
    if (!(m >= 0.0)) throw InvalidParameter("BinnedDensity: negative or NaN mass entry");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidParameter("BinnedDensity: mass does not sum to 1 within 1e-9");
}

static BinnedDensity from_pdf_at_centers(const GridSpec& grid, auto&& pdf) {
  BinnedDensity d{grid, std::vector<double>(grid.n)};
  double sum = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    d.mass[i] = pdf(grid.center(i));
    sum += d.mass[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw InvalidParameter("density discretization produced no finite mass on the grid");
  for (double& m : d.mass) m /= sum;
  return d;
}

BinnedDensity make_uniform(const GridSpec& grid) {
  validate(grid);
  return BinnedDensity{grid, std::vector<double>(grid.n, 1.0 / grid.n)};
}

BinnedDensity make_truncated_normal(const GridSpec& grid, double mu, double sigma) {
  validate(grid);
  if (!(sigma > 0.0)) throw InvalidParameter("make_truncated_normal: sigma must be > 0");
  // exp of the shifted log-pdf so that very narrow sigmas do not underflow
  // every bin at once
  double peak = 0.0;
  bool any = false;
  for (int i = 0; i < grid.n; ++i) {
    double z = (grid.center(i) - mu) / sigma;
    double lp = -0.5 * z * z;
    if (!any || lp > peak) peak = lp, any = true;
  }
  return from_pdf_at_centers(grid, [&](double x) {
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z - peak);
  });
}

BinnedDensity make_truncated_cauchy(const GridSpec& grid, double x0, double gamma_scale) {
  validate(grid);
  if (!(gamma_scale > 0.0))
    throw InvalidParameter("make_truncated_cauchy: gamma_scale must be > 0");
  return from_pdf_at_centers(grid, [&](double x) {
    double z = (x - x0) / gamma_scale;
    return 1.0 / (std::numbers::pi * gamma_scale * (1.0 + z * z));
  });
}

BinnedDensity make_delta(const GridSpec& grid, int bin) {
  validate(grid);
  if (bin < 0 || bin >= grid.n) throw InvalidParameter("make_delta: bin out of range");
  BinnedDensity d{grid, std::vector<double>(grid.n, 0.0)};
  d.mass[bin] = 1.0;
  return d;
}

double mean(const BinnedDensity& d) {
  double m = 0.0;
  for (int i = 0; i < d.grid.n; ++i) m += d.mass[i] * d.grid.center(i);
  return m;
}

double variance(const BinnedDensity& d) {
  double m = mean(d);
  double s2 = 0.0;
  for (int i = 0; i < d.grid.n; ++i) {
    double dx = d.grid.center(i) - m;
    s2 += d.mass[i] * dx * dx;
  }
  return s2;
}

double index_variance(const BinnedDensity& d) {
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < d.grid.n; ++i) {
    double idx = i + 1.0;
    s1 += idx * d.mass[i];
    s2 += idx * idx * d.mass[i];
  }
  return (s2 - s1 * s1) / d.grid.n;
}

namespace detail {

static double kl_directed(const std::vector<double>& num, const std::vector<double>& den,
                          double eps) {
  double f = 0.0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (num[i] > 0.0) f += num[i] * (std::log(num[i]) - std::log(std::max(den[i], eps)));
  }
  return f;
}

double divergence_raw(DivergenceKind kind, const std::vector<double>& p,
                      const std::vector<double>& q, double eps) {
  switch (kind) {
    case DivergenceKind::KL_PQ:
      return kl_directed(p, q, eps);
    case DivergenceKind::KL_QP:
      return kl_directed(q, p, eps);
    case DivergenceKind::JEFFREYS_MID: {
      std::vector<double> m(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
      return kl_directed(p, m, eps) + kl_directed(q, m, eps);
    }
    case DivergenceKind::L2: {
      double f = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        double d = p[i] - q[i];
        f += d * d;
      }
      return f;
    }
  }
  return 0.0;
}

}  // namespace detail

double divergence(DivergenceKind kind, const BinnedDensity& p, const BinnedDensity& q,
                  double eps) {
  if (!(p.grid == q.grid))
    throw IncompatibleGrids("divergence: P and Q must share an identical grid");
  if (!(eps > 0.0)) throw InvalidParameter("divergence: eps must be > 0");
  return detail::divergence_raw(kind, p.mass, q.mass, eps);
}

}  // namespace npprior
