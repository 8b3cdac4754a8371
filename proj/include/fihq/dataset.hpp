#pragma once

// Transaction databases, sensitive-itemset specifications and the
// transaction x itemset incidence structure.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fihq/errors.hpp"

namespace fihq {

using ItemId = std::uint64_t;

/// Sorted, duplicate-free list of item IDs.
using Itemset = std::vector<ItemId>;

inline Itemset normalize_itemset(Itemset items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

inline bool is_subset(const Itemset& small, const Itemset& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline std::string render_itemset(const Itemset& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(items[i]);
  }
  return out;
}

/// Ordered transactions plus their item universe. Indices are stable
/// identifiers; duplicate transactions stay distinct rows.
class TransactionDatabase {
 public:
  enum class EmptyRows { reject, allow };

  TransactionDatabase() = default;

  explicit TransactionDatabase(std::vector<Itemset> transactions, std::string label = {},
                               EmptyRows empty = EmptyRows::reject)
      : TransactionDatabase(std::move(transactions), {}, std::move(label), empty) {}

  /// `lines` holds the original text of each transaction; an entry that is
  /// empty (or a missing vector) means "render canonically on output".
  TransactionDatabase(std::vector<Itemset> transactions, std::vector<std::string> lines,
                      std::string label, EmptyRows empty = EmptyRows::reject)
      : transactions_(std::move(transactions)), lines_(std::move(lines)), label_(std::move(label)) {
    if (lines_.empty()) lines_.resize(transactions_.size());
    if (lines_.size() != transactions_.size())
      throw ContractError("TransactionDatabase: line count does not match transaction count");
    std::set<ItemId> universe;
    for (auto& t : transactions_) {
      t = normalize_itemset(std::move(t));
      if (t.empty() && empty == EmptyRows::reject)
        throw ContractError("TransactionDatabase: empty transaction");
      universe.insert(t.begin(), t.end());
    }
    universe_.assign(universe.begin(), universe.end());
  }

  const std::vector<Itemset>& transactions() const noexcept { return transactions_; }
  const Itemset& operator[](std::size_t m) const { return transactions_.at(m); }
  std::size_t size() const noexcept { return transactions_.size(); }
  bool empty() const noexcept { return transactions_.empty(); }

  /// Sorted list of every item that occurs in some transaction.
  const Itemset& universe() const noexcept { return universe_; }
  const std::string& label() const noexcept { return label_; }

  /// Original source text for transaction m, or "" when it has none.
  const std::string& source_line(std::size_t m) const { return lines_.at(m); }
  const std::vector<std::string>& source_lines() const noexcept { return lines_; }

  double average_length() const {
    if (transactions_.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& t : transactions_) total += t.size();
    return static_cast<double>(total) / static_cast<double>(transactions_.size());
  }

  bool contains_item(ItemId item) const {
    return std::binary_search(universe_.begin(), universe_.end(), item);
  }

 private:
  std::vector<Itemset> transactions_;
  std::vector<std::string> lines_;
  Itemset universe_;
  std::string label_;
};

/// Sensitive itemsets and their hiding thresholds (mu_h per itemset).
struct SensitiveSpec {
  std::vector<Itemset> itemsets;
  std::vector<std::int64_t> hiding_thresholds;
  std::int64_t mining_threshold = 1;

  static SensitiveSpec uniform(std::vector<Itemset> sets, std::int64_t threshold) {
    SensitiveSpec spec;
    for (auto& s : sets) spec.itemsets.push_back(normalize_itemset(std::move(s)));
    spec.hiding_thresholds.assign(spec.itemsets.size(), threshold);
    spec.mining_threshold = threshold;
    return spec;
  }

  std::size_t size() const noexcept { return itemsets.size(); }

  /// Throws ContractError if the spec is not usable against `db`.
  void validate(const TransactionDatabase& db) const {
    if (itemsets.empty()) throw ContractError("sensitive spec: no itemsets");
    if (hiding_thresholds.size() != itemsets.size())
      throw ContractError("sensitive spec: " + std::to_string(hiding_thresholds.size()) +
                          " thresholds for " + std::to_string(itemsets.size()) + " itemsets");
    if (mining_threshold < 1) throw ContractError("sensitive spec: mining threshold must be >= 1");
    for (std::size_t j = 0; j < itemsets.size(); ++j) {
      if (itemsets[j].empty()) throw ContractError("sensitive spec: itemset " + std::to_string(j) + " is empty");
      if (hiding_thresholds[j] < 1)
        throw ContractError("sensitive spec: hiding threshold of itemset " + std::to_string(j) + " must be >= 1");
      for (ItemId item : itemsets[j])
        if (!db.contains_item(item))
          throw ContractError("sensitive spec: item " + std::to_string(item) + " of itemset " +
                              std::to_string(j) + " is not in the item universe");
    }
  }
};

/// Binary matrix a[m][j] = 1 iff sensitive itemset j is contained in
/// transaction m, with column sums cached as supports.
struct IncidenceMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint8_t> cells;      // row-major
  std::vector<std::size_t> supports;    // column sums

  bool at(std::size_t m, std::size_t j) const { return cells[m * n_cols + j] != 0; }

  std::size_t row_sum(std::size_t m) const {
    std::size_t s = 0;
    for (std::size_t j = 0; j < n_cols; ++j) s += cells[m * n_cols + j];
    return s;
  }

  std::size_t total_ones() const {
    return std::accumulate(supports.begin(), supports.end(), std::size_t{0});
  }

  std::vector<std::uint8_t> row(std::size_t m) const {
    return {cells.begin() + static_cast<std::ptrdiff_t>(m * n_cols),
            cells.begin() + static_cast<std::ptrdiff_t>((m + 1) * n_cols)};
  }
};

namespace detail {

inline std::vector<std::pair<Itemset, std::string>> parse_records(std::istream& in) {
  std::vector<std::pair<Itemset, std::string>> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Itemset items;
    std::size_t pos = 0;
    const auto is_space = [](char ch) {
      return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\v' || ch == '\f';
    };
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !is_space(line[end])) ++end;
      const std::string_view token(line.data() + pos, end - pos);
      ItemId value = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("invalid item token '" + std::string(token) + "'", line_no);
      items.push_back(value);
      pos = end;
    }
    if (items.empty()) continue;
    records.emplace_back(normalize_itemset(std::move(items)), line);
  }
  return records;
}

}  // namespace detail

/// Parses a FIMI transaction database: one transaction per non-blank line.
inline TransactionDatabase parse_fimi(std::istream& in, std::string label = {}) {
  auto records = detail::parse_records(in);
  if (records.empty()) throw ParseError("empty database: no transactions");
  std::vector<Itemset> transactions;
  std::vector<std::string> lines;
  transactions.reserve(records.size());
  lines.reserve(records.size());
  for (auto& [items, text] : records) {
    transactions.push_back(std::move(items));
    lines.push_back(std::move(text));
  }
  return TransactionDatabase(std::move(transactions), std::move(lines), std::move(label));
}

inline TransactionDatabase parse_fimi(std::string_view text, std::string label = {}) {
  std::istringstream in{std::string(text)};
  return parse_fimi(in, std::move(label));
}

/// Parses a list of itemsets in FIMI layout (the sensitive-itemset file).
inline std::vector<Itemset> parse_itemsets(std::istream& in) {
  auto records = detail::parse_records(in);
  if (records.empty()) throw ParseError("no itemsets");
  std::vector<Itemset> sets;
  for (auto& r : records) sets.push_back(std::move(r.first));
  return sets;
}

inline std::vector<Itemset> parse_itemsets(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_itemsets(in);
}

/// Writes one line per transaction. Rows with retained source text are
/// reproduced verbatim; the rest are rendered as space-separated IDs.
inline void write_fimi(std::ostream& out, const TransactionDatabase& db) {
  for (std::size_t m = 0; m < db.size(); ++m) {
    const auto& line = db.source_line(m);
    out << (line.empty() ? render_itemset(db[m]) : line) << '\n';
  }
}

inline std::size_t count_support(const TransactionDatabase& db, const Itemset& itemset) {
  return static_cast<std::size_t>(std::count_if(
      db.transactions().begin(), db.transactions().end(),
      [&](const Itemset& t) { return is_subset(itemset, t); }));
}

inline IncidenceMatrix compute_incidence(const TransactionDatabase& db, const SensitiveSpec& spec) {
  IncidenceMatrix inc;
  inc.n_rows = db.size();
  inc.n_cols = spec.size();
  inc.cells.assign(inc.n_rows * inc.n_cols, 0);
  inc.supports.assign(inc.n_cols, 0);
  for (std::size_t m = 0; m < inc.n_rows; ++m) {
    for (std::size_t j = 0; j < inc.n_cols; ++j) {
      if (is_subset(spec.itemsets[j], db[m])) {
        inc.cells[m * inc.n_cols + j] = 1;
        ++inc.supports[j];
      }
    }
  }
  return inc;
}

struct PrunedDatabase {
  TransactionDatabase db;
  IncidenceMatrix incidence;
  /// kept[new_index] = index in the input database (injective, increasing).
  std::vector<std::size_t> kept;
};

/// Drops transactions that support no sensitive itemset.
inline PrunedDatabase prune_nonsupporting(const TransactionDatabase& db, const IncidenceMatrix& inc) {
  if (inc.n_rows != db.size()) throw ContractError("prune: incidence was not built from this database");
  PrunedDatabase out;
  std::vector<Itemset> rows;
  std::vector<std::string> lines;
  out.incidence.n_cols = inc.n_cols;
  out.incidence.supports.assign(inc.n_cols, 0);
  for (std::size_t m = 0; m < inc.n_rows; ++m) {
    if (inc.row_sum(m) == 0) continue;
    out.kept.push_back(m);
    rows.push_back(db[m]);
    lines.push_back(db.source_line(m));
    for (std::size_t j = 0; j < inc.n_cols; ++j) {
      out.incidence.cells.push_back(inc.cells[m * inc.n_cols + j]);
      out.incidence.supports[j] += inc.cells[m * inc.n_cols + j];
    }
  }
  if (out.kept.empty()) throw NothingToHide();
  out.incidence.n_rows = out.kept.size();
  out.db = TransactionDatabase(std::move(rows), std::move(lines), db.label());
  return out;
}

}  // namespace fihq
