#include "npprior/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

#include "npprior/interpolant.hpp"
#include "npprior/rng.hpp"

namespace npprior {

const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::UNIFORM: return "uniform";
    case InitKind::PERTURBED_UNIFORM: return "perturbed_uniform";
    case InitKind::TRUNC_NORMAL: return "trunc_normal";
    case InitKind::DELTA_AT: return "delta_at";
  }
  return "perturbed_uniform";
}

InitKind init_kind_from_string(const std::string& s) {
  if (s == "uniform") return InitKind::UNIFORM;
  if (s == "perturbed_uniform") return InitKind::PERTURBED_UNIFORM;
  if (s == "trunc_normal") return InitKind::TRUNC_NORMAL;
  if (s == "delta_at") return InitKind::DELTA_AT;
  throw InvalidParameter("unknown init kind: " + s);
}

void validate(const SolverConfig& cfg) {
  if (cfg.n < 2) throw InvalidParameter("SolverConfig: n must be >= 2");
  if (!(cfg.grid_min < cfg.grid_max)) throw InvalidParameter("SolverConfig: grid_min < grid_max");
  if (!(cfg.xi >= 0.0)) throw InvalidParameter("SolverConfig: xi must be >= 0");
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0))
    throw InvalidParameter("SolverConfig: lambda must lie in (0,1)");
  if (cfg.max_iters <= 0 || cfg.max_fun_evals <= 0)
    throw InvalidParameter("SolverConfig: iteration budgets must be positive");
  if (!(cfg.rel_tol > 0.0)) throw InvalidParameter("SolverConfig: rel_tol must be > 0");
  if (cfg.restarts < 1) throw InvalidParameter("SolverConfig: restarts must be >= 1");
  if (!(cfg.eps > 0.0)) throw InvalidParameter("SolverConfig: eps must be > 0");
  if (cfg.init == InitKind::DELTA_AT && cfg.delta_bin >= cfg.n)
    throw InvalidParameter("SolverConfig: delta_bin out of range");
  // A two-point density at the grid ends achieves the largest index variance,
  // just below n/4; anything above that is unsatisfiable.
  if (cfg.xi > cfg.n / 4.0)
    throw InfeasibleConstraint("SolverConfig: xi exceeds the maximum achievable index variance");
}

std::vector<double> simplex_map(const std::vector<double>& params) {
  std::vector<double> p(params.size());
  double mx = params[0];
  for (double t : params) mx = std::max(mx, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    p[i] = std::exp(params[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

namespace {

constexpr double kTiny = 1e-300;     // numerator-side log clamp, 0*log(0) := 0
constexpr double kFeasTol = 1e-6;    // reported feasibility tolerance
constexpr double kBarrier0 = 3e-3;   // initial continuation weight
constexpr double kBarrierDecay = 0.1;
constexpr double kBarrierCut = 1e-9;
constexpr int kLbfgsMemory = 16;
constexpr int kStopWindow = 50;

// Divergence term and its partials with respect to p (direct) and q.
double divergence_terms(DivergenceKind kind, double eps, const std::vector<double>& p,
                        const std::vector<double>& logp, const std::vector<double>& q,
                        std::vector<double>& dfdp, std::vector<double>& dfdq) {
  const std::size_t n = p.size();
  double f = 0.0;
  switch (kind) {
    case DivergenceKind::KL_PQ:
      for (std::size_t i = 0; i < n; ++i) {
        const double lq = std::log(std::max(q[i], eps));
        if (p[i] > 0.0) f += p[i] * (logp[i] - lq);
        dfdp[i] = logp[i] - lq + 1.0;
        dfdq[i] = q[i] >= eps ? -p[i] / q[i] : 0.0;
      }
      break;
    case DivergenceKind::KL_QP:
      for (std::size_t i = 0; i < n; ++i) {
        const double lq = std::log(std::max(q[i], kTiny));
        const double lp = std::log(std::max(p[i], eps));
        if (q[i] > 0.0) f += q[i] * (lq - lp);
        dfdq[i] = lq - lp + 1.0;
        dfdp[i] = p[i] >= eps ? -q[i] / p[i] : 0.0;
      }
      break;
    case DivergenceKind::JEFFREYS_MID:
      for (std::size_t i = 0; i < n; ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        const double lm = std::log(std::max(m, eps));
        const double lq = std::log(std::max(q[i], kTiny));
        if (p[i] > 0.0) f += p[i] * (logp[i] - lm);
        if (q[i] > 0.0) f += q[i] * (lq - lm);
        const double ratio = m >= eps ? 0.5 * (p[i] + q[i]) / m : 0.0;
        dfdp[i] = logp[i] - lm + 1.0 - ratio;
        dfdq[i] = lq - lm + 1.0 - ratio;
      }
      break;
    case DivergenceKind::L2:
      for (std::size_t i = 0; i < n; ++i) {
        const double d = p[i] - q[i];
        f += d * d;
        dfdp[i] = 2.0 * d;
        dfdq[i] = -2.0 * d;
      }
      break;
  }
  return f;
}

// Evaluates the penalized objective in mass space with reusable buffers.
class MassObjective {
 public:
  explicit MassObjective(const SolverConfig& cfg)
      : cfg_(cfg),
        n_(cfg.n),
        dfdp_(cfg.n),
        dfdq_(cfg.n),
        w_(2 * static_cast<std::size_t>(cfg.n) - 1) {}

  // gmass is overwritten; logp must match p.
  double eval(const std::vector<double>& p, const std::vector<double>& logp,
              const PenaltyState& ps, std::vector<double>& gmass) {
    const bool mid = cfg_.lambda == 0.5;
    q_ = mid ? detail::midpoint_mass(p) : detail::interpolant_mass(p, cfg_.lambda);
    double f = divergence_terms(cfg_.kind, cfg_.eps, p, logp, q_, dfdp_, dfdq_);

    gmass = dfdp_;
    if (mid) {
      add_midpoint_adjoint(p, dfdq_, gmass);
    } else {
      add_general_adjoint(p, dfdq_, gmass);
    }

    // variance constraint, augmented-Lagrangian form
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double idx = i + 1.0;
      s1 += idx * p[i];
      s2 += idx * idx * p[i];
    }
    const double v = (s2 - s1 * s1) / n_;
    constraint_gap_ = cfg_.xi - v;
    violation_ = std::max(0.0, constraint_gap_);
    const double t = ps.lambda / ps.mu + constraint_gap_;
    if (t > 0.0) {
      f += 0.5 * ps.mu * t * t - 0.5 * ps.lambda * ps.lambda / ps.mu;
      const double scale = ps.mu * t;
      for (int i = 0; i < n_; ++i) {
        const double idx = i + 1.0;
        gmass[i] -= scale * (idx * idx - 2.0 * s1 * idx) / n_;
      }
    } else {
      f += -0.5 * ps.lambda * ps.lambda / ps.mu;
    }

    if (ps.barrier > 0.0) {
      double blog = 0.0;
      for (int i = 0; i < n_; ++i) blog -= logp[i];
      f += ps.barrier * blog / n_;
      for (int i = 0; i < n_; ++i) gmass[i] -= ps.barrier / (n_ * std::max(p[i], kTiny));
    }
    return f;
  }

  double last_violation() const { return violation_; }
  double last_constraint_gap() const { return constraint_gap_; }

 private:
  void add_midpoint_adjoint(const std::vector<double>& p, const std::vector<double>& r,
                            std::vector<double>& g) {
    // w_s collects the rebin weights pulled back to sum-index space
    const int n = n_;
    for (int k = 0; k < n; ++k) w_[2 * k] = r[k];
    for (int m = 0; m + 1 < n; ++m) w_[2 * m + 1] = 0.5 * (r[m] + r[m + 1]);
    // dQ/dp is 2*B(e_a, p); its adjoint is a correlation of p against w
    for (int a = 0; a < n; ++a) {
      const double* wrow = w_.data() + a;
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += p[j] * wrow[j];
      g[a] += 2.0 * acc;
    }
  }

  void add_general_adjoint(const std::vector<double>& p, const std::vector<double>& r,
                           std::vector<double>& g) {
    const int n = n_;
    const double lam = cfg_.lambda;
    for (int i = 0; i < n; ++i) {
      const double base = (1.0 - lam) * i;
      const double pi = p[i];
      double gi = 0.0;
      for (int j = 0; j < n; ++j) {
        const double u = base + lam * j;
        const int k = static_cast<int>(u);
        double rs;
        if (k >= n - 1) {
          rs = r[n - 1];
        } else {
          const double frac = u - k;
          rs = (1.0 - frac) * r[k] + frac * r[k + 1];
        }
        gi += p[j] * rs;
        g[j] += pi * rs;
      }
      g[i] += gi;
    }
  }

  const SolverConfig& cfg_;
  int n_;
  std::vector<double> dfdp_, dfdq_, w_, q_;
  double violation_ = 0.0;
  double constraint_gap_ = 0.0;
};

void softmax_with_log(const std::vector<double>& theta, std::vector<double>& p,
                      std::vector<double>& logp) {
  const std::size_t n = theta.size();
  p.resize(n);
  logp.resize(n);
  double mx = theta[0];
  for (double t : theta) mx = std::max(mx, t);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(theta[i] - mx);
  const double lse = mx + std::log(sum);
  for (std::size_t i = 0; i < n; ++i) {
    logp[i] = theta[i] - lse;
    p[i] = std::exp(logp[i]);
  }
}

// Merit evaluation in parameter space: softmax, mass-space terms, pullback.
class ThetaObjective {
 public:
  explicit ThetaObjective(const SolverConfig& cfg) : mass_obj_(cfg) {}

  double eval(const std::vector<double>& theta, const PenaltyState& ps,
              std::vector<double>& grad) {
    softmax_with_log(theta, p_, logp_);
    const double f = mass_obj_.eval(p_, logp_, ps, gmass_);
    grad.resize(theta.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) dot += p_[i] * gmass_[i];
    for (std::size_t i = 0; i < p_.size(); ++i) grad[i] = p_[i] * (gmass_[i] - dot);
    ++evals_;
    return f;
  }

  const std::vector<double>& mass() const { return p_; }
  double last_violation() const { return mass_obj_.last_violation(); }
  double last_constraint_gap() const { return mass_obj_.last_constraint_gap(); }
  std::int64_t evals() const { return evals_; }

 private:
  MassObjective mass_obj_;
  std::vector<double> p_, logp_, gmass_;
  std::int64_t evals_ = 0;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct LbfgsHistory {
  std::vector<std::vector<double>> s, y;
  std::vector<double> rho;

  void clear() { s.clear(), y.clear(), rho.clear(); }

  void push(std::vector<double> si, std::vector<double> yi) {
    const double sy = dot(si, yi);
    if (!(sy > 1e-12 * norm2(si) * norm2(yi))) return;  // skip non-curvature pairs
    if (static_cast<int>(s.size()) == kLbfgsMemory) {
      s.erase(s.begin());
      y.erase(y.begin());
      rho.erase(rho.begin());
    }
    s.push_back(std::move(si));
    y.push_back(std::move(yi));
    rho.push_back(1.0 / sy);
  }

  // two-loop recursion; d = -H*g
  void direction(const std::vector<double>& g, std::vector<double>& d) const {
    d = g;
    const int m = static_cast<int>(s.size());
    if (m == 0) {
      for (double& v : d) v = -v;
      return;
    }
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * dot(s[i], d);
      for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alpha[i] * y[i][k];
    }
    const double gamma = dot(s[m - 1], y[m - 1]) / dot(y[m - 1], y[m - 1]);
    for (double& v : d) v *= gamma;
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * dot(y[i], d);
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += (alpha[i] - beta) * s[i][k];
    }
    for (double& v : d) v = -v;
  }
};

struct RoundResult {
  bool window_stopped = false;
  bool budget_hit = false;
};

struct RestartResult {
  std::vector<double> theta;
  std::vector<TracePoint> trace;
  std::vector<std::size_t> round_starts;
  double kl = 0.0;
  double violation = 0.0;
  bool converged = false;
  std::int64_t iterations = 0;
  std::int64_t fun_evals = 0;
  BinnedDensity density;
};

// One monotone inner descent on the merit at fixed penalty state.
RoundResult run_round(ThetaObjective& obj, const SolverConfig& cfg, const PenaltyState& ps,
                      std::vector<double>& theta, std::int64_t iter_cap,
                      std::int64_t& global_iter, std::int64_t eval_cap,
                      std::vector<TracePoint>& trace) {
  RoundResult rr;
  LbfgsHistory hist;
  std::vector<double> g, g_new, d, theta_new, window;
  double f = obj.eval(theta, ps, g);
  window.assign(1, f);
  double prev_alpha = 1.0;

  for (std::int64_t it = 0; it < iter_cap; ++it) {
    if (global_iter >= cfg.max_iters || obj.evals() >= eval_cap) {
      rr.budget_hit = true;
      return rr;
    }
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-14) {
      rr.window_stopped = true;
      return rr;
    }

    bool steepest = hist.s.empty();
    hist.direction(g, d);
    double dd = dot(g, d);
    if (!(dd < 0.0)) {
      hist.clear();
      d = g;
      for (double& v : d) v = -v;
      dd = -dot(g, g);
      steepest = true;
    }

    double alpha = steepest ? std::min(prev_alpha * 2.0, 1.0 / std::max(1.0, norm2(g))) : 1.0;
    constexpr double c1 = 1e-4;
    bool accepted = false;
    double f_new = f;
    theta_new.resize(theta.size());
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < theta.size(); ++k) theta_new[k] = theta[k] + alpha * d[k];
      f_new = obj.eval(theta_new, ps, g_new);
      if (obj.evals() >= eval_cap) break;
      if (std::isfinite(f_new) && f_new <= f + c1 * alpha * dd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!steepest) {
        hist.clear();  // retry from steepest next iteration
        continue;
      }
      rr.window_stopped = true;  // numerically stationary
      return rr;
    }

    std::vector<double> s(theta.size()), yv(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
      s[k] = theta_new[k] - theta[k];
      yv[k] = g_new[k] - g[k];
    }
    hist.push(std::move(s), std::move(yv));
    theta.swap(theta_new);
    g.swap(g_new);
    f = f_new;
    prev_alpha = alpha;
    ++global_iter;
    trace.push_back(TracePoint{global_iter, f, obj.last_violation()});

    window.push_back(f);
    if (static_cast<int>(window.size()) > kStopWindow + 1)
      window.erase(window.begin());
    if (static_cast<int>(window.size()) == kStopWindow + 1 &&
        std::abs(window.front() - f) <= cfg.rel_tol * std::max(1.0, std::abs(f))) {
      rr.window_stopped = true;
      return rr;
    }
  }
  return rr;
}

std::vector<double> initial_logits(const SolverConfig& cfg, int restart) {
  std::vector<double> theta(cfg.n, 0.0);
  switch (cfg.init) {
    case InitKind::UNIFORM:
      break;
    case InitKind::PERTURBED_UNIFORM: {
      std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
      std::normal_distribution<double> noise(0.0, 1.0);
      for (double& t : theta) t = 0.01 * noise(rng);
      return theta;
    }
    case InitKind::TRUNC_NORMAL: {
      const GridSpec grid{cfg.grid_min, cfg.grid_max, cfg.n};
      const double mu = 0.5 * (cfg.grid_min + cfg.grid_max);
      const double sigma = 0.1 * (cfg.grid_max - cfg.grid_min);
      const BinnedDensity d = make_truncated_normal(grid, mu, sigma);
      for (int i = 0; i < cfg.n; ++i) theta[i] = std::log(std::max(d.mass[i], 1e-12));
      break;
    }
    case InitKind::DELTA_AT: {
      const int bin = cfg.delta_bin >= 0 ? cfg.delta_bin : cfg.n / 2;
      theta[bin] = 12.0;
      break;
    }
  }
  // restarts beyond the first perturb any deterministic init with their own
  // derived seed so they explore distinct basins
  if (restart > 0 && cfg.init != InitKind::PERTURBED_UNIFORM) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& t : theta) t += 0.01 * noise(rng);
  }
  return theta;
}

RestartResult solve_restart(const SolverConfig& cfg, int restart) {
  ThetaObjective obj(cfg);
  RestartResult res;
  std::vector<double> theta = initial_logits(cfg, restart);

  PenaltyState ps{1.0, 0.0, kBarrier0};
  std::int64_t global_iter = 0;
  double prev_viol = -1.0;
  int settled_rounds = 0;
  bool last_window_stopped = false;
  constexpr int kMaxRounds = 16;
  const std::int64_t inner_cap = std::max<std::int64_t>(100, cfg.max_iters / 8);

  for (int round = 0; round < kMaxRounds; ++round) {
    if (global_iter >= cfg.max_iters || obj.evals() >= cfg.max_fun_evals) break;
    res.round_starts.push_back(res.trace.size());
    const RoundResult rr = run_round(obj, cfg, ps, theta,
                                     std::min(inner_cap, cfg.max_iters - global_iter),
                                     global_iter, cfg.max_fun_evals, res.trace);
    last_window_stopped = rr.window_stopped;

    std::vector<double> g;
    obj.eval(theta, ps, g);
    const double viol = obj.last_violation();

    // multiplier update, then schedule bookkeeping
    ps.lambda = std::max(0.0, ps.lambda + ps.mu * obj.last_constraint_gap());
    if (viol <= 1e-9 && ps.barrier == 0.0 && rr.window_stopped) {
      if (++settled_rounds >= 2) break;
    } else {
      settled_rounds = 0;
    }
    if (prev_viol >= 0.0 && viol > 0.5 * prev_viol) ps.mu *= 10.0;
    prev_viol = viol;
    ps.barrier = ps.barrier < kBarrierCut ? 0.0 : ps.barrier * kBarrierDecay;
    if (rr.budget_hit) break;
  }

  std::vector<double> p = simplex_map(theta);
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  res.density = BinnedDensity{GridSpec{cfg.grid_min, cfg.grid_max, cfg.n}, std::move(p)};
  res.kl = divergence(DivergenceKind::KL_PQ, res.density, midpoint_density(res.density), cfg.eps);
  res.violation = std::max(0.0, cfg.xi - index_variance(res.density));
  res.converged = res.violation <= kFeasTol && last_window_stopped;
  res.iterations = global_iter;
  res.fun_evals = obj.evals();
  res.theta = std::move(theta);
  return res;
}

}  // namespace

std::pair<double, std::vector<double>> objective_and_gradient(const std::vector<double>& params,
                                                              const SolverConfig& cfg,
                                                              const PenaltyState& ps) {
  validate(cfg);
  if (static_cast<int>(params.size()) != cfg.n)
    throw InvalidParameter("objective_and_gradient: params length must equal cfg.n");
  for (double t : params)
    if (!std::isfinite(t)) throw InvalidParameter("objective_and_gradient: non-finite parameter");
  ThetaObjective obj(cfg);
  std::vector<double> grad;
  const double f = obj.eval(params, ps, grad);
  return {f, std::move(grad)};
}

std::pair<double, std::vector<double>> objective_and_gradient(const std::vector<double>& params,
                                                              const SolverConfig& cfg) {
  return objective_and_gradient(params, cfg, PenaltyState{});
}

namespace detail {

std::pair<double, std::vector<double>> objective_mass_space(const std::vector<double>& mass,
                                                            const SolverConfig& cfg,
                                                            const PenaltyState& ps) {
  validate(cfg);
  if (static_cast<int>(mass.size()) != cfg.n)
    throw InvalidParameter("objective_mass_space: mass length must equal cfg.n");
  std::vector<double> logp(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) logp[i] = std::log(std::max(mass[i], kTiny));
  MassObjective obj(cfg);
  std::vector<double> gmass;
  const double f = obj.eval(mass, logp, ps, gmass);
  return {f, std::move(gmass)};
}

}  // namespace detail

SolveReport solve_prior(const SolverConfig& cfg) {
  validate(cfg);
  std::vector<RestartResult> results;
  results.reserve(cfg.restarts);
  for (int r = 0; r < cfg.restarts; ++r) results.push_back(solve_restart(cfg, r));

  int best = 0;
  auto better = [](const RestartResult& a, const RestartResult& b) {
    const bool fa = a.violation <= kFeasTol, fb = b.violation <= kFeasTol;
    if (fa != fb) return fa;
    if (fa) return a.kl < b.kl;
    return a.violation < b.violation;
  };
  for (int r = 1; r < cfg.restarts; ++r)
    if (better(results[r], results[best])) best = r;

  RestartResult& win = results[best];
  SolveReport report;
  report.density = std::move(win.density);
  report.trace = std::move(win.trace);
  report.round_starts = std::move(win.round_starts);
  report.converged = win.converged;
  report.final_kl_to_midpoint = win.kl;
  report.restarts_run = cfg.restarts;
  report.best_restart = best;
  report.iterations = win.iterations;
  report.fun_evals = win.fun_evals;
  return report;
}

ShapeReport shape_report(const BinnedDensity& d) {
  validate(d);
  const int n = d.grid.n;
  ShapeReport rep;

  double dev = 0.0;
  for (int i = 0; i < n; ++i) dev += std::abs(d.mass[i] - d.mass[n - 1 - i]);
  rep.symmetry_deviation = 0.5 * dev;

  // boxcar smoothing, width 9, window truncated at the edges
  std::vector<double> smooth(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 4), hi = std::min(n - 1, i + 4);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += d.mass[j];
    smooth[i] = acc / (hi - lo + 1);
  }
  // plateau-aware local maxima: a run of equal values bounded by strictly
  // smaller neighbors (grid boundaries count as smaller)
  int lobes = 0;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && smooth[j + 1] == smooth[i]) ++j;
    const bool left_ok = i == 0 || smooth[i - 1] < smooth[i];
    const bool right_ok = j == n - 1 || smooth[j + 1] < smooth[i];
    if (left_ok && right_ok && smooth[i] > 0.0) ++lobes;
    i = j + 1;
  }
  rep.lobe_count = lobes;

  const int tail = static_cast<int>(0.05 * n);
  double tm = 0.0;
  for (int k = 0; k < tail; ++k) tm += d.mass[k] + d.mass[n - 1 - k];
  rep.tail_mass = tm;
  return rep;
}

}  // namespace npprior
