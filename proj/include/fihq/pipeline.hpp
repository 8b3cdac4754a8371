#pragma once

// End-to-end hiding: data -> integer program -> Ising model -> QAOA ->
// feasibility-filtered choice -> sanitized database. The exact solver runs
// the same front half and replaces the quantum path with enumeration.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "fihq/dataset.hpp"
#include "fihq/errors.hpp"
#include "fihq/fih.hpp"
#include "fihq/ising.hpp"
#include "fihq/optimizer.hpp"
#include "fihq/qaoa.hpp"

namespace fihq {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Method { exact, qaoa, both };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::qaoa: return "qaoa";
    case Method::both: return "both";
  }
  throw ContractError("unknown method");
}

inline Method parse_method(std::string_view s) {
  if (s == "exact") return Method::exact;
  if (s == "qaoa") return Method::qaoa;
  if (s == "both") return Method::both;
  throw ContractError("unknown method '" + std::string(s) + "'");
}

struct PipelineConfig {
  Method method = Method::qaoa;
  HamiltonianMode ham_mode = HamiltonianMode::paper_verbatim;
  OptimizerConfig optimizer;          // p, shots, tolerances; optimizer.seed is overridden per seed
  std::size_t top_o = 50;
  std::vector<std::uint64_t> seeds{0};
  std::size_t grid_resolution = 0;    // > 0 replaces the simplex search by a grid scan

  void validate() const {
    optimizer.validate();
    if (top_o < 1) throw ContractError("top-O window must be >= 1");
    if (seeds.empty()) throw ContractError("at least one seed is required");
  }
};

struct RankedCandidate {
  std::uint64_t mask = 0;
  double energy = 0.0;
  std::uint64_t count = 0;
};

/// Distinct sampled bitstrings ordered by ascending energy, then higher
/// shot count, then smaller value; truncated to `limit`.
inline std::vector<RankedCandidate> rank_candidates(const ShotHistogram& hist, const IsingModel& model,
                                                    std::size_t limit) {
  std::vector<RankedCandidate> out;
  out.reserve(hist.counts.size());
  for (const auto& [z, k] : hist.counts) out.push_back({z, model.energy(z), k});
  std::sort(out.begin(), out.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    return std::tie(a.energy, b.count, a.mask) < std::tie(b.energy, a.count, b.mask);
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

struct Selection {
  Assignment assignment;
  std::size_t rank = 0;  // 1-based position in the energy ranking
};

/// First feasible assignment among the o_cap lowest-energy distinct samples.
inline std::optional<Selection> select_solution(const ShotHistogram& hist, const IsingModel& model,
                                                const FihInstance& inst, std::size_t o_cap) {
  if (hist.counts.empty()) throw ContractError("select_solution: empty histogram");
  if (o_cap < 1) throw ContractError("select_solution: o_cap must be >= 1");
  if (model.size() != inst.n_transactions()) throw ContractError("select_solution: model/instance size mismatch");
  const auto cols = column_masks(inst);
  const auto ranked = rank_candidates(hist, model, o_cap);
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (mask_feasible(cols, inst.rhs, ranked[r].mask))
      return Selection{Assignment::from_mask(ranked[r].mask, inst.n_transactions()), r + 1};
  return std::nullopt;
}

/// Sets variables to 1 until feasible, each time choosing the unset
/// transaction whose supported constraints carry the largest total deficit
/// (smallest index on ties).
inline Assignment repair_greedy(const FihInstance& inst, Assignment x) {
  for (;;) {
    const auto deficit = constraint_deficits(inst, x);
    std::int64_t best_score = 0;
    std::size_t best_m = inst.n_transactions();
    for (std::size_t m = 0; m < inst.n_transactions(); ++m) {
      if (x[m]) continue;
      std::int64_t score = 0;
      for (std::size_t j = 0; j < inst.n_constraints(); ++j)
        if (inst.a.at(m, j)) score += deficit[j];
      if (score > best_score) {
        best_score = score;
        best_m = m;
      }
    }
    if (best_score == 0) return x;  // no deficit left
    x.set(best_m);
  }
}

/// Everything derived from the inputs before any solver runs.
struct Problem {
  TransactionDatabase db;
  SensitiveSpec spec;
  IncidenceMatrix incidence;   // over the full database
  FihInstance instance;        // pruned, already-hidden itemsets dropped
  LagrangianData lagrangian;
  IsingModel model;
};

inline Problem prepare(TransactionDatabase db, SensitiveSpec spec, HamiltonianMode mode) {
  spec.validate(db);
  Problem pr;
  pr.incidence = compute_incidence(db, spec);
  const PrunedDatabase pruned = prune_nonsupporting(db, pr.incidence);
  pr.instance = build_instance(pruned.incidence, spec, pruned.kept, db.size());
  pr.lagrangian = compute_coeffs(pr.instance, compute_lambda(pr.instance));
  pr.model = build_ising(pr.instance, pr.lagrangian, mode);
  pr.db = std::move(db);
  pr.spec = std::move(spec);
  return pr;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  Assignment assignment;  // instance indexing
  std::size_t fih_objective = 0;
  bool feasible = false;
  bool repaired = false;
  std::optional<std::size_t> selection_rank;
  double ising_energy = 0.0;
  std::size_t distinct_sampled = 0;
  OptimizerTrace trace;
};

struct SolutionReport {
  Method method = Method::exact;
  Assignment assignment;  // source-database indexing
  std::size_t fih_objective = 0;
  bool feasible = false;
  double ising_energy = 0.0;
  std::optional<std::size_t> selection_rank;
  bool repaired = false;
  std::vector<SeedOutcome> per_seed;
  std::optional<std::size_t> best_seed;  // index into per_seed
  TransactionDatabase sanitized;
};

/// Stateless 64-bit mix (splitmix64 finalizer) for deriving stream seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline SolutionReport finish_report(const Problem& pr, Method method, const Assignment& x) {
  SolutionReport rep;
  rep.method = method;
  rep.feasible = is_feasible(pr.instance, x);
  if (!rep.feasible) throw ContractError("internal: final assignment is infeasible");
  rep.fih_objective = fih_objective(x);
  rep.ising_energy = energy(pr.model, x);
  rep.assignment = to_source(pr.instance, x);
  rep.sanitized = sanitize(pr.db, pr.instance, x, pr.spec);
  return rep;
}

inline SolutionReport run_exact(const Problem& pr) {
  const ExactSolution sol = solve_exact(pr.instance);
  return finish_report(pr, Method::exact, sol.assignment);
}

/// One QAOA run: optimize (beta, gamma), sample the final circuit, take the
/// first feasible of the top-O window, or greedily repair the
/// lowest-energy sample when the window holds nothing feasible.
inline SeedOutcome run_qaoa_seed(const Problem& pr, const PipelineConfig& cfg, std::uint64_t seed) {
  OptimizerConfig oc = cfg.optimizer;
  oc.seed = derive_seed(seed, 1);
  SeedOutcome out;
  out.seed = seed;
  out.trace = cfg.grid_resolution > 0 ? grid_scan(pr.model, oc, cfg.grid_resolution) : optimize(pr.model, oc);

  const QaoaSimulator sim(pr.model);
  const Statevector final_state = sim.run(out.trace.best);
  const ShotHistogram hist = sample(final_state, cfg.optimizer.shots, derive_seed(seed, 2));
  out.distinct_sampled = hist.counts.size();

  if (auto sel = select_solution(hist, pr.model, pr.instance, cfg.top_o)) {
    out.assignment = std::move(sel->assignment);
    out.selection_rank = sel->rank;
  } else {
    const auto lowest = rank_candidates(hist, pr.model, 1).front();
    out.assignment = repair_greedy(pr.instance, Assignment::from_mask(lowest.mask, pr.instance.n_transactions()));
    out.repaired = true;
  }
  out.feasible = is_feasible(pr.instance, out.assignment);
  out.fih_objective = fih_objective(out.assignment);
  out.ising_energy = energy(pr.model, out.assignment);
  return out;
}

/// Runs every seed and keeps the lowest objective (earliest seed on ties).
inline SolutionReport run_qaoa(const Problem& pr, const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<SeedOutcome> outcomes;
  for (std::uint64_t seed : cfg.seeds) outcomes.push_back(run_qaoa_seed(pr, cfg, seed));
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].fih_objective < outcomes[best].fih_objective) best = i;
  SolutionReport rep = finish_report(pr, Method::qaoa, outcomes[best].assignment);
  rep.selection_rank = outcomes[best].selection_rank;
  rep.repaired = outcomes[best].repaired;
  rep.best_seed = best;
  rep.per_seed = std::move(outcomes);
  return rep;
}

struct PipelineResult {
  Problem problem;
  std::optional<SolutionReport> exact;
  std::optional<SolutionReport> qaoa;

  /// The QAOA report when one was produced, otherwise the exact one.
  const SolutionReport& primary() const { return qaoa ? *qaoa : *exact; }
};

inline PipelineResult run_pipeline(TransactionDatabase db, SensitiveSpec spec, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult res{prepare(std::move(db), std::move(spec), cfg.ham_mode), std::nullopt, std::nullopt};
  if (cfg.method == Method::exact || cfg.method == Method::both) res.exact = run_exact(res.problem);
  if (cfg.method == Method::qaoa || cfg.method == Method::both) res.qaoa = run_qaoa(res.problem, cfg);
  return res;
}

// ---------------------------------------------------------------------------
// File inputs

/// Uniform threshold or one threshold per sensitive itemset.
using HidingThresholds = std::variant<std::int64_t, std::vector<std::int64_t>>;

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

inline TransactionDatabase load_database(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_fimi(in, path.filename().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Whitespace-separated positive integers, one per sensitive itemset.
inline std::vector<std::int64_t> load_thresholds(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::int64_t> out;
  std::string token;
  while (in >> token) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw ParseError(path.string() + ": invalid threshold '" + token + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(path.string() + ": no thresholds");
  return out;
}

inline SensitiveSpec load_sensitive(const std::filesystem::path& path, const HidingThresholds& thresholds,
                                    std::optional<std::int64_t> mining_threshold = std::nullopt) {
  auto in = open_input(path);
  std::vector<Itemset> sets;
  try {
    sets = parse_itemsets(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  SensitiveSpec spec;
  spec.itemsets = std::move(sets);
  if (const auto* uniform = std::get_if<std::int64_t>(&thresholds)) {
    spec.hiding_thresholds.assign(spec.itemsets.size(), *uniform);
    spec.mining_threshold = *uniform;
  } else {
    spec.hiding_thresholds = std::get<std::vector<std::int64_t>>(thresholds);
    spec.mining_threshold = spec.hiding_thresholds.empty()
                                ? 1
                                : *std::min_element(spec.hiding_thresholds.begin(), spec.hiding_thresholds.end());
  }
  if (mining_threshold) spec.mining_threshold = *mining_threshold;
  return spec;
}

inline PipelineResult run_pipeline(const std::filesystem::path& db_file, const std::filesystem::path& sensitive_file,
                                   const HidingThresholds& thresholds, const PipelineConfig& cfg) {
  return run_pipeline(load_database(db_file), load_sensitive(sensitive_file, thresholds), cfg);
}

}  // namespace fihq
