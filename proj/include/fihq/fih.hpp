#pragma once

// The frequent itemset hiding integer program: choose the fewest
// transactions to sanitize so that, for every sensitive itemset j,
//
//     sum_m a[m][j] * x[m] >= support_j - hiding_threshold_j + 1.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fihq/dataset.hpp"
#include "fihq/errors.hpp"

namespace fihq {

/// Largest instance solve_exact will enumerate (2^25 subsets).
inline constexpr std::size_t kMaxExactTransactions = 25;

/// x[m] = 1 marks transaction m for sanitization. Transaction 0 is the
/// least significant bit when an assignment is read as an integer.
struct Assignment {
  std::vector<std::uint8_t> bits;

  Assignment() = default;
  explicit Assignment(std::size_t n) : bits(n, 0) {}
  explicit Assignment(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  static Assignment from_mask(std::uint64_t mask, std::size_t n) {
    Assignment a(n);
    for (std::size_t m = 0; m < n; ++m) a.bits[m] = static_cast<std::uint8_t>((mask >> m) & 1U);
    return a;
  }
  static Assignment ones(std::size_t n) { return Assignment(std::vector<std::uint8_t>(n, 1)); }

  std::uint64_t to_mask() const {
    if (bits.size() > 64) throw ContractError("Assignment: more than 64 variables do not fit a mask");
    std::uint64_t mask = 0;
    for (std::size_t m = 0; m < bits.size(); ++m)
      if (bits[m]) mask |= std::uint64_t{1} << m;
    return mask;
  }

  std::size_t size() const noexcept { return bits.size(); }
  bool operator[](std::size_t m) const { return bits.at(m) != 0; }
  void set(std::size_t m, bool v = true) { bits.at(m) = v ? 1 : 0; }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct FihInstance {
  IncidenceMatrix a;                 // rows: instance transactions, cols: active itemsets
  std::vector<std::int64_t> rhs;     // support_j - hiding_threshold_j + 1, each >= 1
  std::vector<std::size_t> itemset_index;   // active column -> index in the SensitiveSpec
  std::vector<std::size_t> origin;          // instance row -> index in the source database
  std::size_t n_source = 0;                 // transaction count of the source database
  std::vector<std::string> warnings;

  std::size_t n_transactions() const noexcept { return a.n_rows; }
  std::size_t n_constraints() const noexcept { return a.n_cols; }
};

/// Builds the integer program. Itemsets already below their hiding
/// threshold are dropped with a warning, and rows that then support no
/// remaining itemset are removed. `origin` maps inc rows to source rows
/// (identity when empty); `n_source` defaults to inc.n_rows.
inline FihInstance build_instance(const IncidenceMatrix& inc, const SensitiveSpec& spec,
                                  std::vector<std::size_t> origin = {}, std::size_t n_source = 0) {
  if (spec.hiding_thresholds.size() != inc.n_cols)
    throw ContractError("build_instance: threshold count does not match incidence columns");
  if (origin.empty()) {
    origin.resize(inc.n_rows);
    for (std::size_t m = 0; m < inc.n_rows; ++m) origin[m] = m;
  }
  if (origin.size() != inc.n_rows) throw ContractError("build_instance: origin map size mismatch");
  if (n_source == 0) n_source = origin.empty() ? 0 : *std::max_element(origin.begin(), origin.end()) + 1;
  n_source = std::max(n_source, inc.n_rows);

  FihInstance inst;
  inst.n_source = n_source;
  for (std::size_t j = 0; j < inc.n_cols; ++j) {
    const auto support = static_cast<std::int64_t>(inc.supports[j]);
    const std::int64_t rhs = support - spec.hiding_thresholds[j] + 1;
    if (rhs <= 0) {
      inst.warnings.push_back("itemset " + std::to_string(j) + " {" + render_itemset(spec.itemsets[j]) +
                              "} has support " + std::to_string(support) + " < hiding threshold " +
                              std::to_string(spec.hiding_thresholds[j]) + "; already hidden, dropped");
      continue;
    }
    inst.itemset_index.push_back(j);
    inst.rhs.push_back(rhs);
  }
  if (inst.itemset_index.empty()) throw NothingToHide();

  const std::size_t cols = inst.itemset_index.size();
  inst.a.n_cols = cols;
  inst.a.supports.assign(cols, 0);
  for (std::size_t m = 0; m < inc.n_rows; ++m) {
    bool any = false;
    for (std::size_t j : inst.itemset_index) any = any || inc.at(m, j);
    if (!any) continue;
    inst.origin.push_back(origin[m]);
    for (std::size_t k = 0; k < cols; ++k) {
      const std::uint8_t v = inc.at(m, inst.itemset_index[k]) ? 1 : 0;
      inst.a.cells.push_back(v);
      inst.a.supports[k] += v;
    }
  }
  inst.a.n_rows = inst.origin.size();
  return inst;
}

inline std::size_t fih_objective(const Assignment& x) {
  return static_cast<std::size_t>(std::count_if(x.bits.begin(), x.bits.end(), [](auto b) { return b != 0; }));
}

/// Remaining shortfall of each constraint under x (0 when satisfied).
inline std::vector<std::int64_t> constraint_deficits(const FihInstance& inst, const Assignment& x) {
  if (x.size() != inst.n_transactions())
    throw ContractError("assignment length " + std::to_string(x.size()) + " does not match instance size " +
                        std::to_string(inst.n_transactions()));
  std::vector<std::int64_t> deficit(inst.rhs);
  for (std::size_t m = 0; m < inst.n_transactions(); ++m) {
    if (!x[m]) continue;
    for (std::size_t j = 0; j < inst.n_constraints(); ++j) deficit[j] -= inst.a.at(m, j) ? 1 : 0;
  }
  for (auto& d : deficit) d = std::max<std::int64_t>(d, 0);
  return deficit;
}

inline bool is_feasible(const FihInstance& inst, const Assignment& x) {
  const auto deficit = constraint_deficits(inst, x);
  return std::all_of(deficit.begin(), deficit.end(), [](auto d) { return d == 0; });
}

/// Per-constraint column masks: bit m set when transaction m supports j.
inline std::vector<std::uint64_t> column_masks(const FihInstance& inst) {
  if (inst.n_transactions() > 64) throw ContractError("column_masks: more than 64 transactions");
  std::vector<std::uint64_t> cols(inst.n_constraints(), 0);
  for (std::size_t m = 0; m < inst.n_transactions(); ++m)
    for (std::size_t j = 0; j < inst.n_constraints(); ++j)
      if (inst.a.at(m, j)) cols[j] |= std::uint64_t{1} << m;
  return cols;
}

inline bool mask_feasible(const std::vector<std::uint64_t>& cols, const std::vector<std::int64_t>& rhs,
                          std::uint64_t mask) {
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (std::popcount(cols[j] & mask) < rhs[j]) return false;
  return true;
}

struct ExactSolution {
  Assignment assignment;
  std::size_t objective = 0;
};

/// Minimum-cardinality feasible assignment by enumeration. Cardinalities
/// are tried in increasing order starting from the largest right-hand
/// side; within one cardinality subsets are visited in increasing integer
/// order, so the smallest-valued optimum wins ties.
inline ExactSolution solve_exact(const FihInstance& inst) {
  const std::size_t n = inst.n_transactions();
  if (n > kMaxExactTransactions)
    throw InstanceTooLarge("instance too large for exact enumeration: " + std::to_string(n) +
                           " transactions (limit " + std::to_string(kMaxExactTransactions) + ")");
  const auto cols = column_masks(inst);
  const std::int64_t lower = *std::max_element(inst.rhs.begin(), inst.rhs.end());
  for (std::size_t k = static_cast<std::size_t>(lower); k <= n; ++k) {
    const std::uint64_t last = ((std::uint64_t{1} << k) - 1) << (n - k);
    // Gosper's hack: next k-subset in increasing numeric order.
    for (std::uint64_t mask = (std::uint64_t{1} << k) - 1;;) {
      if (mask_feasible(cols, inst.rhs, mask)) return {Assignment::from_mask(mask, n), k};
      if (mask == last || k == 0) break;
      const std::uint64_t low = mask & (~mask + 1);
      const std::uint64_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
  }
  throw ContractError("solve_exact: no feasible assignment (rhs exceeds column support)");
}

/// Expands an instance assignment to the source database's indexing.
inline Assignment to_source(const FihInstance& inst, const Assignment& x) {
  if (x.size() != inst.n_transactions()) throw ContractError("to_source: assignment length mismatch");
  Assignment out(inst.n_source);
  for (std::size_t m = 0; m < x.size(); ++m)
    if (x[m]) out.set(inst.origin[m]);
  return out;
}

/// Greedily strips items from one transaction until it contains none of
/// `itemsets`: each step removes the item shared by the most still-contained
/// itemsets, smallest ID on ties.
inline Itemset strip_transaction(Itemset items, const std::vector<Itemset>& itemsets) {
  for (;;) {
    std::vector<const Itemset*> live;
    for (const auto& s : itemsets)
      if (is_subset(s, items)) live.push_back(&s);
    if (live.empty()) return items;
    ItemId best_item = 0;
    std::size_t best_score = 0;
    for (ItemId item : items) {
      std::size_t score = 0;
      for (const Itemset* s : live) score += std::binary_search(s->begin(), s->end(), item) ? 1 : 0;
      if (score > best_score) {
        best_score = score;
        best_item = item;
      }
    }
    items.erase(std::find(items.begin(), items.end(), best_item));
  }
}

/// Applies a feasible plan to the source database. Untouched transactions
/// keep their original text; sanitized ones may become empty.
inline TransactionDatabase sanitize(const TransactionDatabase& db, const FihInstance& inst,
                                    const Assignment& x, const SensitiveSpec& spec) {
  if (db.size() != inst.n_source) throw ContractError("sanitize: database does not match the instance");
  if (!is_feasible(inst, x)) throw ContractError("sanitize: assignment is infeasible");
  std::vector<Itemset> rows = db.transactions();
  std::vector<std::string> lines = db.source_lines();
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (!x[m]) continue;
    const std::size_t src = inst.origin[m];
    Itemset stripped = strip_transaction(rows[src], spec.itemsets);
    if (stripped != rows[src]) {
      rows[src] = std::move(stripped);
      lines[src].clear();
    }
  }
  return TransactionDatabase(std::move(rows), std::move(lines), db.label(),
                             TransactionDatabase::EmptyRows::allow);
}

}  // namespace fihq
