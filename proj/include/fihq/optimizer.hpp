#pragma once

// Classical outer loop: minimize the expected energy of the QAOA state over
// (beta, gamma) with a derivative-free simplex search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "fihq/errors.hpp"
#include "fihq/ising.hpp"
#include "fihq/qaoa.hpp"

namespace fihq {

enum class EvalMode { sampled, exact };

inline std::string_view to_string(EvalMode mode) { return mode == EvalMode::sampled ? "sampled" : "exact"; }

inline EvalMode parse_eval_mode(std::string_view s) {
  if (s == "sampled") return EvalMode::sampled;
  if (s == "exact") return EvalMode::exact;
  throw ContractError("unknown evaluation mode '" + std::string(s) + "'");
}

/// Parameters live in [-kParamBound, kParamBound].
inline constexpr double kParamBound = 2.0 * std::numbers::pi;

struct OptimizerConfig {
  std::size_t p = 3;
  std::uint64_t shots = 1000;
  std::uint64_t seed = 0;
  std::size_t max_cycles = 100;
  double tol = 1e-3;
  bool shared_params = true;
  EvalMode eval_mode = EvalMode::sampled;
  double initial_beta = 1.0;
  double initial_gamma = 1.0;
  double initial_step = 0.25;
  std::size_t max_restarts = 3;

  void validate() const {
    if (p < 1) throw ContractError("optimizer: p must be >= 1");
    if (shots < 1) throw ContractError("optimizer: shots must be >= 1");
    if (max_cycles < 1) throw ContractError("optimizer: max_cycles must be >= 1");
    if (!(tol > 0.0)) throw ContractError("optimizer: tol must be > 0");
    if (!(initial_step > 0.0)) throw ContractError("optimizer: initial_step must be > 0");
  }

  std::size_t dimension() const noexcept { return shared_params ? 2 : 2 * p; }
};

struct CycleRecord {
  std::size_t cycle = 0;
  std::vector<double> betas;   // best-seen parameters after this cycle
  std::vector<double> gammas;
  double objective = 0.0;      // best-seen objective after this cycle
  double simplex_best = 0.0;   // best vertex of the current simplex
  std::size_t evaluations = 0;
};

struct OptimizerTrace {
  std::vector<CycleRecord> cycles;
  QaoaParams initial;
  double initial_objective = 0.0;
  QaoaParams best;
  double best_objective = 0.0;
  std::size_t evaluations = 0;
  std::size_t restarts = 0;
  bool converged = false;
};

namespace detail {

inline double clamp_param(double v) { return std::clamp(v, -kParamBound, kParamBound); }

inline QaoaParams unpack(const std::vector<double>& x, const OptimizerConfig& cfg) {
  if (cfg.shared_params) return QaoaParams::shared(cfg.p, x[0], x[1]);
  return QaoaParams(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(cfg.p)),
                    std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(cfg.p), x.end()));
}

/// Expected energy at a parameter point. Sampled evaluations all reuse
/// cfg.seed, so the objective is a deterministic function of the point.
class Objective {
 public:
  Objective(const IsingModel& model, const OptimizerConfig& cfg) : sim_(model), cfg_(cfg) {}

  double operator()(const QaoaParams& params) {
    ++evaluations_;
    const Statevector state = sim_.run(params);
    if (cfg_.eval_mode == EvalMode::exact) return sim_.expectation(state);
    return sample(state, cfg_.shots, cfg_.seed).mean(sim_.energies());
  }

  double operator()(const std::vector<double>& x) { return (*this)(unpack(x, cfg_)); }

  std::size_t evaluations() const noexcept { return evaluations_; }
  const QaoaSimulator& simulator() const noexcept { return sim_; }

 private:
  QaoaSimulator sim_;
  OptimizerConfig cfg_;
  std::size_t evaluations_ = 0;
};

}  // namespace detail

inline double objective_at(const QaoaParams& params, const IsingModel& model, const OptimizerConfig& cfg) {
  detail::Objective f(model, cfg);
  return f(params);
}

/// Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
/// from beta = gamma = cfg.initial_*, each vertex clamped to the box.
/// A cycle is one simplex iteration. The search has converged when the
/// simplex extent around its best vertex and the spread of its values are
/// both below tol; it then restarts around the best point, and stops once a
/// restart fails to improve the best-seen value by more than tol.
inline OptimizerTrace optimize(const IsingModel& model, const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t dim = cfg.dimension();
  detail::Objective f(model, cfg);

  std::vector<double> start(dim);
  if (cfg.shared_params) {
    start = {cfg.initial_beta, cfg.initial_gamma};
  } else {
    std::fill_n(start.begin(), cfg.p, cfg.initial_beta);
    std::fill(start.begin() + static_cast<std::ptrdiff_t>(cfg.p), start.end(), cfg.initial_gamma);
  }
  for (auto& v : start) v = detail::clamp_param(v);

  OptimizerTrace trace;
  trace.initial = detail::unpack(start, cfg);
  trace.initial_objective = f(start);
  std::vector<double> best_x = start;
  double best_f = trace.initial_objective;

  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  const auto build_simplex = [&](const std::vector<double>& centre, double centre_value) {
    simplex.assign(1, centre);
    values.assign(1, centre_value);
    for (std::size_t k = 0; k < dim; ++k) {
      auto v = centre;
      v[k] = centre[k] + cfg.initial_step <= kParamBound ? centre[k] + cfg.initial_step
                                                         : centre[k] - cfg.initial_step;
      simplex.push_back(v);
      values.push_back(f(v));
    }
  };
  const auto observe = [&](const std::vector<double>& x, double fx) {
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  };
  const auto affine = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> out(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = detail::clamp_param(from[k] + t * (to[k] - from[k]));
    return out;
  };

  build_simplex(start, trace.initial_objective);
  for (std::size_t i = 1; i < values.size(); ++i) observe(simplex[i], values[i]);
  double best_at_restart = best_f;

  std::vector<std::size_t> order(dim + 1);
  for (std::size_t cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t ib = order.front(), iw = order.back(), is = order[dim - 1];

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i : order)
      if (i != iw)
        for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);

    const auto xr = affine(centroid, simplex[iw], -1.0);
    const double fr = f(xr);
    observe(xr, fr);
    if (fr < values[ib]) {
      const auto xe = affine(centroid, simplex[iw], -2.0);
      const double fe = f(xe);
      observe(xe, fe);
      if (fe < fr) {
        simplex[iw] = xe;
        values[iw] = fe;
      } else {
        simplex[iw] = xr;
        values[iw] = fr;
      }
    } else if (fr < values[is]) {
      simplex[iw] = xr;
      values[iw] = fr;
    } else {
      const bool outside = fr < values[iw];
      const auto xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, simplex[iw], 0.5);
      const double fc = f(xc);
      observe(xc, fc);
      if (outside ? fc <= fr : fc < values[iw]) {
        simplex[iw] = xc;
        values[iw] = fc;
      } else {
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == ib) continue;
          simplex[i] = affine(simplex[ib], simplex[i], 0.5);
          values[i] = f(simplex[i]);
          observe(simplex[i], values[i]);
        }
      }
    }

    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const auto ibest = static_cast<std::size_t>(lo - values.begin());
    double extent = 0.0;
    for (const auto& v : simplex)
      for (std::size_t k = 0; k < dim; ++k) extent = std::max(extent, std::abs(v[k] - simplex[ibest][k]));
    const double spread = *hi - *lo;

    const QaoaParams bp = detail::unpack(best_x, cfg);
    trace.cycles.push_back({cycle, bp.betas, bp.gammas, best_f, *lo, f.evaluations()});

    if (extent < cfg.tol && spread < cfg.tol) {
      const bool improved = best_at_restart - best_f > cfg.tol;
      if ((trace.restarts > 0 && !improved) || trace.restarts >= cfg.max_restarts) {
        trace.converged = true;
        break;
      }
      ++trace.restarts;
      best_at_restart = best_f;
      build_simplex(best_x, best_f);
      for (std::size_t i = 1; i < values.size(); ++i) observe(simplex[i], values[i]);
    }
  }

  trace.best = detail::unpack(best_x, cfg);
  trace.best_objective = best_f;
  trace.evaluations = f.evaluations();
  return trace;
}

/// Exhaustive scan of a resolution x resolution grid over [lo, hi]^2 in the
/// shared-parameter space. One trace record per beta row.
inline OptimizerTrace grid_scan(const IsingModel& model, const OptimizerConfig& cfg, std::size_t resolution,
                                double lo = -kParamBound, double hi = kParamBound) {
  cfg.validate();
  if (!cfg.shared_params) throw ContractError("grid_scan: only the shared (beta, gamma) space is supported");
  if (resolution < 2) throw ContractError("grid_scan: resolution must be >= 2");
  if (!(lo < hi)) throw ContractError("grid_scan: empty range");
  lo = detail::clamp_param(lo);
  hi = detail::clamp_param(hi);
  detail::Objective f(model, cfg);

  OptimizerTrace trace;
  trace.initial = QaoaParams::shared(cfg.p, cfg.initial_beta, cfg.initial_gamma);
  trace.initial_objective = f(trace.initial);
  trace.best = trace.initial;
  trace.best_objective = trace.initial_objective;
  const double step = (hi - lo) / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double beta = lo + step * static_cast<double>(i);
    double row_best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < resolution; ++k) {
      const double gamma = lo + step * static_cast<double>(k);
      const auto params = QaoaParams::shared(cfg.p, beta, gamma);
      const double v = f(params);
      row_best = std::min(row_best, v);
      if (v < trace.best_objective) {
        trace.best_objective = v;
        trace.best = params;
      }
    }
    trace.cycles.push_back({i + 1, trace.best.betas, trace.best.gammas, trace.best_objective, row_best,
                            f.evaluations()});
  }
  trace.evaluations = f.evaluations();
  trace.converged = true;
  return trace;
}

}  // namespace fihq
