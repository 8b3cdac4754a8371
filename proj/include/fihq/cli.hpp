#pragma once

// Command-line front end shared by tools/fihq and the tests.
//
//   solve   --db F --sensitive F --hide-threshold N|FILE [--method exact|qaoa|both] ...
//   inspect --db F --sensitive F [--hide-threshold N|FILE]
//   trace   (solve options) --trace-out FILE
//
// Exit codes: 0 success, 1 I/O or parse error, 2 contract error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fihq/errors.hpp"
#include "fihq/json_io.hpp"
#include "fihq/pipeline.hpp"

namespace fihq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitContract = 2;

/// "0,1,2" and "0..4" (inclusive) forms, freely mixed.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const auto to_u64 = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw ParseError("invalid seed list '" + text + "'");
    return v;
  };
  std::vector<std::uint64_t> seeds;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = to_u64(item.substr(0, dots));
      const auto hi = to_u64(item.substr(dots + 2));
      if (hi < lo) throw ParseError("invalid seed range '" + std::string(item) + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(to_u64(item));
    }
  }
  if (seeds.empty()) throw ParseError("empty seed list");
  return seeds;
}

/// An integer, or else the path of a per-itemset threshold file.
inline HidingThresholds parse_thresholds(const std::string& arg) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (!arg.empty() && ec == std::errc{} && ptr == arg.data() + arg.size()) return v;
  return load_thresholds(arg);
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

struct SolveOptions {
  std::string db, sensitive, hide_threshold, out, sanitized_out, trace_out;
  std::optional<std::int64_t> mining_threshold;
  std::string method = "qaoa", ham_mode = "paper", eval_mode = "sampled", seeds = "0";
  std::size_t layers = 3, top = 50, max_cycles = 100, grid = 0;
  std::uint64_t shots = 1000;
  double tol = 1e-3, init_beta = 1.0, init_gamma = 1.0;
  bool per_layer = false;

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.method = parse_method(method);
    cfg.ham_mode = parse_hamiltonian_mode(ham_mode);
    cfg.optimizer.p = layers;
    cfg.optimizer.shots = shots;
    cfg.optimizer.max_cycles = max_cycles;
    cfg.optimizer.tol = tol;
    cfg.optimizer.shared_params = !per_layer;
    cfg.optimizer.eval_mode = parse_eval_mode(eval_mode);
    cfg.optimizer.initial_beta = init_beta;
    cfg.optimizer.initial_gamma = init_gamma;
    cfg.top_o = top;
    cfg.seeds = parse_seed_list(seeds);
    cfg.grid_resolution = grid;
    return cfg;
  }
};

inline void add_solve_options(CLI::App& cmd, SolveOptions& o, bool qaoa_only) {
  cmd.add_option("--db", o.db, "transaction database (FIMI)")->required();
  cmd.add_option("--sensitive", o.sensitive, "sensitive itemsets (FIMI layout)")->required();
  cmd.add_option("--hide-threshold", o.hide_threshold, "hiding threshold, or a file with one per itemset")
      ->required();
  cmd.add_option("--mining-threshold", o.mining_threshold, "mining threshold (defaults to the hiding threshold)");
  if (!qaoa_only)
    cmd.add_option("--method", o.method, "exact, qaoa or both")
        ->check(CLI::IsMember({"exact", "qaoa", "both"}))
        ->capture_default_str();
  cmd.add_option("--layers", o.layers, "QAOA layers p")->capture_default_str();
  cmd.add_option("--shots", o.shots, "shots per cycle and for the final distribution")->capture_default_str();
  cmd.add_option("--top", o.top, "top-O window for feasibility selection")->capture_default_str();
  cmd.add_option("--seeds", o.seeds, "seed list, e.g. 0,1,2 or 0..4")->capture_default_str();
  cmd.add_option("--ham-mode", o.ham_mode, "paper or exact")
      ->check(CLI::IsMember({"paper", "exact"}))
      ->capture_default_str();
  cmd.add_option("--eval-mode", o.eval_mode, "sampled or exact")
      ->check(CLI::IsMember({"sampled", "exact"}))
      ->capture_default_str();
  cmd.add_option("--max-cycles", o.max_cycles, "optimizer iteration cap")->capture_default_str();
  cmd.add_option("--tol", o.tol, "optimizer convergence tolerance")->capture_default_str();
  cmd.add_option("--init-beta", o.init_beta, "initial beta")->capture_default_str();
  cmd.add_option("--init-gamma", o.init_gamma, "initial gamma")->capture_default_str();
  cmd.add_flag("--per-layer", o.per_layer, "optimize one (beta, gamma) pair per layer");
  cmd.add_option("--grid", o.grid, "grid-scan resolution instead of the simplex search (0 = off)")
      ->capture_default_str();
  cmd.add_option("--out", o.out, "report JSON (default stdout)");
  cmd.add_option("--sanitized-out", o.sanitized_out, "write the sanitized database here");
}

inline void print_warnings(const Problem& pr, std::ostream& err) {
  for (const auto& w : pr.instance.warnings) err << "warning: " << w << '\n';
}

inline json traces_document(const PipelineConfig& cfg, const std::vector<std::uint64_t>& seeds,
                            const std::vector<const OptimizerTrace*>& traces) {
  json list = json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    json entry = trace_json(*traces[i]);
    entry["seed"] = seeds[i];
    list.push_back(entry);
  }
  return {{"tool_version", std::string(kToolVersion)}, {"config", config_json(cfg)}, {"traces", list}};
}

inline int run_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = o.config();
  auto db = load_database(o.db);
  auto spec = load_sensitive(o.sensitive, parse_thresholds(o.hide_threshold), o.mining_threshold);
  const PipelineResult res = run_pipeline(std::move(db), std::move(spec), cfg);
  print_warnings(res.problem, err);
  write_text(o.out, result_json(res, cfg).dump(2) + "\n", out);
  if (!o.sanitized_out.empty()) {
    std::ostringstream text;
    write_fimi(text, res.primary().sanitized);
    write_text(o.sanitized_out, text.str(), out);
  }
  if (!o.trace_out.empty() && res.qaoa) {
    std::vector<const OptimizerTrace*> traces;
    for (const auto& s : res.qaoa->per_seed) traces.push_back(&s.trace);
    write_text(o.trace_out, traces_document(cfg, cfg.seeds, traces).dump(2) + "\n", out);
  }
  return kExitOk;
}

inline int run_trace(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = o.config();
  cfg.method = Method::qaoa;
  auto db = load_database(o.db);
  auto spec = load_sensitive(o.sensitive, parse_thresholds(o.hide_threshold), o.mining_threshold);
  const Problem pr = prepare(std::move(db), std::move(spec), cfg.ham_mode);
  print_warnings(pr, err);
  std::vector<OptimizerTrace> runs;
  for (std::uint64_t seed : cfg.seeds) {
    OptimizerConfig oc = cfg.optimizer;
    oc.seed = derive_seed(seed, 1);
    runs.push_back(cfg.grid_resolution > 0 ? grid_scan(pr.model, oc, cfg.grid_resolution)
                                           : optimize(pr.model, oc));
  }
  std::vector<const OptimizerTrace*> traces;
  for (const auto& t : runs) traces.push_back(&t);
  write_text(o.trace_out, traces_document(cfg, cfg.seeds, traces).dump(2) + "\n", out);
  return kExitOk;
}

inline int run_inspect(const std::string& db_path, const std::string& sens_path, const std::string& threshold,
                       const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto db = load_database(db_path);
  const bool have = !threshold.empty();
  const auto spec = load_sensitive(sens_path, have ? parse_thresholds(threshold) : HidingThresholds{1});
  spec.validate(db);
  const json doc = inspect_json(db, spec, have);
  for (const auto& w : doc["instance"]["warnings"]) err << "warning: " << w.get<std::string>() << '\n';
  write_text(out_path, doc.dump(2) + "\n", out);
  return kExitOk;
}

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Frequent itemset hiding with an exact solver and a simulated QAOA heuristic", "fihq"};
  app.require_subcommand(1);

  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "solve a hiding instance and write a report");
  add_solve_options(*solve, solve_opts, false);
  solve->add_option("--trace-out", solve_opts.trace_out, "also write optimizer traces (qaoa)");

  SolveOptions trace_opts;
  auto* trace = app.add_subcommand("trace", "run the optimizer and write its traces");
  add_solve_options(*trace, trace_opts, true);
  trace->add_option("--trace-out", trace_opts.trace_out, "trace JSON file")->required();

  std::string in_db, in_sens, in_threshold, in_out;
  auto* inspect = app.add_subcommand("inspect", "print supports, incidence and Lagrangian coefficients");
  inspect->add_option("--db", in_db, "transaction database (FIMI)")->required();
  inspect->add_option("--sensitive", in_sens, "sensitive itemsets (FIMI layout)")->required();
  inspect->add_option("--hide-threshold", in_threshold, "hiding threshold, or a file with one per itemset");
  inspect->add_option("--out", in_out, "JSON output (default stdout)");

  // CLI11 wants argv order reversed when parsing from a vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    if (solve->parsed()) return run_solve(solve_opts, out, err);
    if (trace->parsed()) return run_trace(trace_opts, out, err);
    if (inspect->parsed()) return run_inspect(in_db, in_sens, in_threshold, in_out, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace fihq::cli
