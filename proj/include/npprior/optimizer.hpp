#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "npprior/density.hpp"

namespace npprior {

enum class InitKind { UNIFORM, PERTURBED_UNIFORM, TRUNC_NORMAL, DELTA_AT };

const char* to_string(InitKind k);
InitKind init_kind_from_string(const std::string& s);

/// Problem instance for the self-midpoint divergence minimization:
/// min f(P || Q(P; lambda)) over the simplex with index_variance(P) >= xi.
struct SolverConfig {
  int n = 1024;
  double grid_min = 0.0;
  double grid_max = 1.0;
  double xi = 0.75;
  double lambda = 0.5;
  DivergenceKind kind = DivergenceKind::KL_PQ;
  std::int64_t max_iters = 100000;
  std::int64_t max_fun_evals = 400000;
  double rel_tol = 1e-9;
  int restarts = 3;
  InitKind init = InitKind::PERTURBED_UNIFORM;
  int delta_bin = -1;  // DELTA_AT target bin; -1 = center
  std::uint64_t seed = 0;
  double eps = kKlFloor;
};

void validate(const SolverConfig& cfg);

struct TracePoint {
  std::int64_t iter = 0;
  double cost_nats = 0.0;
  double constraint_violation = 0.0;
};

struct SolveReport {
  BinnedDensity density;
  std::vector<TracePoint> trace;  // accepted steps of the best restart
  // trace indices where a penalty round begins; the merit function changes
  // only at these boundaries, so cost_nats is non-increasing between them
  std::vector<std::size_t> round_starts;
  bool converged = false;
  double final_kl_to_midpoint = 0.0;
  int restarts_run = 0;
  int best_restart = 0;
  std::int64_t iterations = 0;  // accepted steps of the best restart
  std::int64_t fun_evals = 0;   // objective evaluations of the best restart
};

/// Multiplier state of the augmented-Lagrangian schedule, plus the decaying
/// log-barrier continuation weight used to wash out the initialization the
/// way an interior-point solver would.
struct PenaltyState {
  double mu = 1.0;
  double lambda = 0.0;
  double barrier = 0.0;
};

/// Penalized objective and its exact analytic gradient with respect to the
/// unconstrained parameter vector (masses are softmax(params)). The public
/// overload evaluates at the schedule's initial state mu=1, lambda=0.
std::pair<double, std::vector<double>> objective_and_gradient(const std::vector<double>& params,
                                                              const SolverConfig& cfg);
std::pair<double, std::vector<double>> objective_and_gradient(const std::vector<double>& params,
                                                              const SolverConfig& cfg,
                                                              const PenaltyState& ps);

/// Simplex map: mass = exp(params) / sum(exp(params)).
std::vector<double> simplex_map(const std::vector<double>& params);

SolveReport solve_prior(const SolverConfig& cfg);

struct ShapeReport {
  double symmetry_deviation = 0.0;  // 0.5 * sum |p_i - p_{n+1-i}|
  int lobe_count = 0;               // local maxima after width-9 boxcar smoothing
  double tail_mass = 0.0;           // mass in the outer 5% of bins on each side
};

ShapeReport shape_report(const BinnedDensity& d);

namespace detail {
/// Mass-space objective terms: returns the penalized cost and the gradient
/// with respect to the mass vector itself (before the softmax pullback).
std::pair<double, std::vector<double>> objective_mass_space(const std::vector<double>& mass,
                                                            const SolverConfig& cfg,
                                                            const PenaltyState& ps);
}  // namespace detail

}  // namespace npprior
