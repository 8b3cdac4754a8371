#pragma once

// JSON documents: model dumps, probability vectors, optimizer traces,
// inspection summaries and solution reports. Field names are stable.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fihq/dataset.hpp"
#include "fihq/fih.hpp"
#include "fihq/ising.hpp"
#include "fihq/optimizer.hpp"
#include "fihq/pipeline.hpp"
#include "fihq/qaoa.hpp"

namespace fihq {

using nlohmann::json;

inline json bits_json(const Assignment& x) {
  json out = json::array();
  for (auto b : x.bits) out.push_back(static_cast<int>(b));
  return out;
}

inline json model_json(const IsingModel& model) {
  json pairs = json::array();
  for (std::size_t m = 0; m < model.size(); ++m)
    for (std::size_t n = m + 1; n < model.size(); ++n)
      pairs.push_back({{"m", m}, {"n", n}, {"j", model.coupling(m, n)}});
  return {{"n", model.size()},
          {"mode", std::string(to_string(model.mode()))},
          {"h", model.linear()},
          {"pairs", pairs},
          {"constant", model.constant()}};
}

/// Probability vector of a small state, indexed by basis value.
inline json probabilities_json(const Statevector& state) {
  if (state.qubits() > 12) throw ContractError("probability dump is limited to 12 qubits");
  return {{"n", state.qubits()}, {"probabilities", state.probabilities()}};
}

inline json trace_json(const OptimizerTrace& trace) {
  json cycles = json::array();
  for (const auto& c : trace.cycles)
    cycles.push_back({{"cycle", c.cycle},
                      {"beta", c.betas},
                      {"gamma", c.gammas},
                      {"objective", c.objective},
                      {"simplex_best", c.simplex_best},
                      {"evaluations", c.evaluations}});
  return {{"initial_beta", trace.initial.betas},
          {"initial_gamma", trace.initial.gammas},
          {"initial_objective", trace.initial_objective},
          {"beta_star", trace.best.betas},
          {"gamma_star", trace.best.gammas},
          {"best_objective", trace.best_objective},
          {"evaluations", trace.evaluations},
          {"restarts", trace.restarts},
          {"converged", trace.converged},
          {"cycles", cycles}};
}

inline json lagrangian_json(const LagrangianData& lag) {
  json c_exact = json::array();
  json c_2dp = json::array();
  for (const auto& c : lag.c_exact) {
    c_exact.push_back(to_string(c));
    c_2dp.push_back(floor_2dp(c));
  }
  return {{"lambda", to_string(lag.lambda)},
          {"lambda_value", to_double(lag.lambda)},
          {"c", lag.c},
          {"c_exact", c_exact},
          {"c_two_decimals", c_2dp},
          {"k_const", lag.k_const},
          {"k_exact", to_string(lag.k_exact)},
          {"big_coeff", lag.big_coeff},
          {"big_coeff_exact", to_string(lag.big_exact)}};
}

inline json config_json(const PipelineConfig& cfg) {
  const auto& o = cfg.optimizer;
  return {{"method", std::string(to_string(cfg.method))},
          {"ham_mode", std::string(to_string(cfg.ham_mode))},
          {"eval_mode", std::string(to_string(o.eval_mode))},
          {"layers", o.p},
          {"shots", o.shots},
          {"top", cfg.top_o},
          {"seeds", cfg.seeds},
          {"max_cycles", o.max_cycles},
          {"tol", o.tol},
          {"shared_params", o.shared_params},
          {"initial_beta", o.initial_beta},
          {"initial_gamma", o.initial_gamma},
          {"initial_step", o.initial_step},
          {"grid_resolution", cfg.grid_resolution}};
}

inline json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

inline json seed_json(const Problem& pr, const SeedOutcome& s) {
  return {{"seed", s.seed},
          {"assignment", bits_json(to_source(pr.instance, s.assignment))},
          {"fih_objective", s.fih_objective},
          {"feasible", s.feasible},
          {"repaired", s.repaired},
          {"selection_rank", optional_json(s.selection_rank)},
          {"ising_energy", s.ising_energy},
          {"distinct_sampled", s.distinct_sampled},
          {"beta_star", s.trace.best.betas},
          {"gamma_star", s.trace.best.gammas},
          {"expected_energy", s.trace.best_objective},
          {"optimizer_evaluations", s.trace.evaluations},
          {"optimizer_cycles", s.trace.cycles.size()},
          {"converged", s.trace.converged}};
}

inline json report_json(const Problem& pr, const SolutionReport& rep, const PipelineConfig& cfg) {
  json per_seed = json::array();
  for (const auto& s : rep.per_seed) per_seed.push_back(seed_json(pr, s));
  const auto lag = lagrangian_json(pr.lagrangian);
  json out = {{"tool_version", std::string(kToolVersion)},
              {"method", std::string(to_string(rep.method))},
              {"assignment", bits_json(rep.assignment)},
              {"fih_objective", rep.fih_objective},
              {"feasible", rep.feasible},
              {"ising_energy", rep.ising_energy},
              {"selection_rank", optional_json(rep.selection_rank)},
              {"repaired", rep.repaired},
              {"lambda", lag["lambda"]},
              {"c", lag["c"]},
              {"big_coeff", lag["big_coeff"]},
              {"per_seed", per_seed},
              {"best_seed", rep.best_seed ? json(rep.per_seed[*rep.best_seed].seed) : json(nullptr)},
              {"selection",
               {{"ranking", "ascending_energy"},
                {"window", "distinct_bitstrings"},
                {"note",
                 "candidates are ranked by increasing Ising energy because the Hamiltonian is minimized; "
                 "the top-O window counts distinct sampled bitstrings, shot count only breaks ties"}}},
              {"config", config_json(cfg)},
              {"warnings", pr.instance.warnings}};
  return out;
}

/// The document written by `solve`. With method "both" it nests the two
/// reports under "exact" and "qaoa".
inline json result_json(const PipelineResult& res, const PipelineConfig& cfg) {
  if (res.exact && res.qaoa) {
    return {{"tool_version", std::string(kToolVersion)},
            {"method", "both"},
            {"exact", report_json(res.problem, *res.exact, cfg)},
            {"qaoa", report_json(res.problem, *res.qaoa, cfg)},
            {"exact_le_qaoa", res.exact->fih_objective <= res.qaoa->fih_objective}};
  }
  return report_json(res.problem, res.primary(), cfg);
}

inline json inspect_json(const TransactionDatabase& db, const SensitiveSpec& spec, bool have_thresholds) {
  const IncidenceMatrix inc = compute_incidence(db, spec);
  json itemsets = json::array();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    json entry = {{"items", spec.itemsets[j]}, {"support", inc.supports[j]}};
    if (have_thresholds) {
      entry["hiding_threshold"] = spec.hiding_thresholds[j];
      entry["rhs"] = static_cast<std::int64_t>(inc.supports[j]) - spec.hiding_thresholds[j] + 1;
    }
    itemsets.push_back(entry);
  }
  json rows = json::array();
  for (std::size_t m = 0; m < inc.n_rows; ++m) {
    std::string r;
    for (std::size_t j = 0; j < inc.n_cols; ++j) r += inc.at(m, j) ? '1' : '0';
    rows.push_back(r);
  }
  json out = {{"tool_version", std::string(kToolVersion)},
              {"database",
               {{"label", db.label()},
                {"transactions", db.size()},
                {"items", db.universe().size()},
                {"average_length", db.average_length()}}},
              {"itemsets", itemsets},
              {"incidence", {{"rows", rows}, {"total_ones", inc.total_ones()}}}};

  // Without thresholds every itemset stays in the program and rhs-dependent
  // quantities (K, big_coeff) are omitted.
  FihInstance inst;
  if (have_thresholds) {
    const PrunedDatabase pruned = prune_nonsupporting(db, inc);
    inst = build_instance(pruned.incidence, spec, pruned.kept, db.size());
  } else {
    SensitiveSpec loose = spec;
    loose.hiding_thresholds.assign(spec.size(), 1);
    const PrunedDatabase pruned = prune_nonsupporting(db, inc);
    inst = build_instance(pruned.incidence, loose, pruned.kept, db.size());
  }
  json lag = lagrangian_json(compute_coeffs(inst, compute_lambda(inst)));
  if (!have_thresholds)
    for (const char* key : {"k_const", "k_exact", "big_coeff", "big_coeff_exact"}) lag.erase(key);
  out["instance"] = {{"transactions", inst.n_transactions()},
                     {"constraints", inst.n_constraints()},
                     {"origin", inst.origin},
                     {"rhs", have_thresholds ? json(inst.rhs) : json(nullptr)},
                     {"warnings", inst.warnings}};
  out["lagrangian"] = lag;
  return out;
}

}  // namespace fihq
