#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fihq/fih.hpp"
#include "test_support.hpp"

using namespace fihq;
using fihq::testing::art_ds;
using fihq::testing::art_ds_spec;
using fihq::testing::kPublishedOptimum;

namespace {

FihInstance art_ds_instance() {
  const auto db = art_ds();
  return build_instance(compute_incidence(db, art_ds_spec()), art_ds_spec());
}

}  // namespace

TEST_CASE("build_instance right-hand sides", "[fih]") {
  const auto inst = art_ds_instance();
  CHECK(inst.rhs == std::vector<std::int64_t>{3, 6, 3, 3, 1});
  CHECK(inst.n_transactions() == 10);
  CHECK(inst.warnings.empty());
  for (std::size_t j = 0; j < inst.n_constraints(); ++j) CHECK(inst.rhs[j] <= static_cast<std::int64_t>(inst.a.supports[j]));
}

TEST_CASE("build_instance threshold boundaries", "[fih]") {
  const TransactionDatabase db(std::vector<Itemset>{{1, 2}, {1, 2, 3}, {3}});
  const auto inc = compute_incidence(db, SensitiveSpec::uniform({{1, 2}, {3}}, 2));

  SECTION("support equal to the threshold leaves rhs 1") {
    const auto inst = build_instance(inc, SensitiveSpec::uniform({{1, 2}, {3}}, 2));
    CHECK(inst.rhs == std::vector<std::int64_t>{1, 1});
  }
  SECTION("already-hidden itemsets are dropped with a warning") {
    SensitiveSpec spec = SensitiveSpec::uniform({{1, 2}, {3}}, 2);
    spec.hiding_thresholds = {3, 2};
    const auto inst = build_instance(inc, spec);
    CHECK(inst.rhs == std::vector<std::int64_t>{1});
    CHECK(inst.itemset_index == std::vector<std::size_t>{1});
    CHECK(inst.warnings.size() == 1);
    // Row {1,2} supports only the dropped itemset and leaves the program.
    CHECK(inst.origin == std::vector<std::size_t>{1, 2});
  }
  SECTION("all itemsets already hidden") {
    CHECK_THROWS_AS(build_instance(inc, SensitiveSpec::uniform({{1, 2}, {3}}, 5)), NothingToHide);
  }
}

TEST_CASE("is_feasible and fih_objective", "[fih]") {
  const auto inst = art_ds_instance();
  const Assignment published(kPublishedOptimum);
  CHECK(is_feasible(inst, published));
  CHECK(fih_objective(published) == 6);
  CHECK(is_feasible(inst, Assignment::ones(10)));
  CHECK(fih_objective(Assignment::ones(10)) == 10);
  CHECK_FALSE(is_feasible(inst, Assignment(10)));
  CHECK(fih_objective(Assignment(10)) == 0);
  CHECK_THROWS_AS(is_feasible(inst, Assignment(9)), ContractError);
}

TEST_CASE("solve_exact on the example", "[fih]") {
  const auto inst = art_ds_instance();
  const auto sol = solve_exact(inst);
  CHECK(sol.objective == 6);
  CHECK(is_feasible(inst, sol.assignment));
  const auto optima = fihq::testing::all_optima(inst);
  CHECK(std::find(optima.begin(), optima.end(), Assignment(kPublishedOptimum).to_mask()) != optima.end());
  // Ties go to the smallest mask.
  CHECK(sol.assignment.to_mask() == *std::min_element(optima.begin(), optima.end()));
}

TEST_CASE("solve_exact small cases", "[fih]") {
  SECTION("one itemset with rhs 1 and three supporters") {
    const TransactionDatabase db(std::vector<Itemset>{{1, 2}, {1, 2, 3}, {1, 2, 4}});
    const auto spec = SensitiveSpec::uniform({{1, 2}}, 3);
    const auto inst = build_instance(compute_incidence(db, spec), spec);
    REQUIRE(inst.rhs == std::vector<std::int64_t>{1});
    CHECK(solve_exact(inst).objective == 1);
  }
  SECTION("rhs equal to column sums forces every supporting row") {
    auto inst = art_ds_instance();
    for (std::size_t j = 0; j < inst.n_constraints(); ++j) inst.rhs[j] = static_cast<std::int64_t>(inst.a.supports[j]);
    std::size_t nonzero = 0;
    for (std::size_t m = 0; m < inst.n_transactions(); ++m) nonzero += inst.a.row_sum(m) > 0 ? 1 : 0;
    const auto sol = solve_exact(inst);
    CHECK(sol.objective == nonzero);
    const auto oracle = fihq::testing::brute_force_optimum(inst);
    REQUIRE(oracle.has_value());
    CHECK(sol.objective == static_cast<std::size_t>(std::popcount(*oracle)));
  }
}

TEST_CASE("solve_exact enforces its size guard", "[fih]") {
  std::vector<Itemset> rows(kMaxExactTransactions + 1, Itemset{1, 2});
  const TransactionDatabase db(rows);
  const auto spec = SensitiveSpec::uniform({{1, 2}}, 1);
  const auto inst = build_instance(compute_incidence(db, spec), spec);
  CHECK_THROWS_AS(solve_exact(inst), InstanceTooLarge);
}

TEST_CASE("solve_exact agrees with a full scan on random instances", "[fih][property]") {
  std::mt19937_64 rng(4242);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    const auto db = fihq::testing::random_database(rng, n, 7, 0.45);
    auto spec = SensitiveSpec::uniform(fihq::testing::random_itemsets(rng, db, 1 + rng() % 5), 1);
    for (auto& t : spec.hiding_thresholds) t = 1 + static_cast<std::int64_t>(rng() % 3);
    FihInstance inst;
    try {
      const auto inc = compute_incidence(db, spec);
      const auto pruned = prune_nonsupporting(db, inc);
      inst = build_instance(pruned.incidence, spec, pruned.kept, db.size());
    } catch (const NothingToHide&) {
      continue;
    }
    const auto sol = solve_exact(inst);
    const auto oracle = fihq::testing::brute_force_optimum(inst);
    REQUIRE(oracle.has_value());
    REQUIRE(sol.assignment.to_mask() == *oracle);
    REQUIRE(sol.objective == static_cast<std::size_t>(std::popcount(*oracle)));
    REQUIRE(is_feasible(inst, sol.assignment));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("adding a 1 to a feasible assignment keeps it feasible", "[fih][property]") {
  const auto inst = art_ds_instance();
  const auto cols = column_masks(inst);
  for (std::uint64_t mask = 0; mask < 1024; ++mask) {
    if (!mask_feasible(cols, inst.rhs, mask)) continue;
    for (std::size_t m = 0; m < 10; ++m) REQUIRE(mask_feasible(cols, inst.rhs, mask | (std::uint64_t{1} << m)));
  }
}

TEST_CASE("strip_transaction removes the most shared item first", "[fih][sanitize]") {
  // Item 8 is in both {2,8} and {7,8}; removing it clears both.
  CHECK(strip_transaction({2, 7, 8}, {{2, 8}, {7, 8}}) == Itemset{2, 7});
  // No supported itemset: unchanged.
  CHECK(strip_transaction({1, 2}, {{3}}) == Itemset{1, 2});
  // Tie on score: smallest ID goes first.
  CHECK(strip_transaction({1, 2, 3}, {{1, 2}}) == Itemset{2, 3});
}

TEST_CASE("sanitize hides every itemset on the example", "[fih][sanitize]") {
  const auto db = art_ds();
  const auto spec = art_ds_spec();
  const auto inst = art_ds_instance();
  const Assignment x(kPublishedOptimum);
  const auto out = sanitize(db, inst, x, spec);
  REQUIRE(out.size() == db.size());
  CHECK(out[0] == Itemset{2, 7});
  for (const auto& s : spec.itemsets) CHECK(count_support(out, s) < 3);
  for (std::size_t m = 0; m < db.size(); ++m) {
    if (x[m]) continue;
    CHECK(out[m] == db[m]);
    CHECK(out.source_line(m) == db.source_line(m));
  }
}

TEST_CASE("sanitize with a selected transaction that supports nothing", "[fih][sanitize]") {
  const TransactionDatabase db(std::vector<Itemset>{{1, 2}, {1, 2}, {5}});
  const auto spec = SensitiveSpec::uniform({{1, 2}}, 2);
  const auto inst = build_instance(compute_incidence(db, spec), spec);
  const auto out = sanitize(db, inst, Assignment::ones(inst.n_transactions()), spec);
  CHECK(out[2] == Itemset{5});
  CHECK(count_support(out, {1, 2}) < 2);
}

TEST_CASE("sanitize rejects infeasible plans", "[fih][sanitize]") {
  const auto db = art_ds();
  CHECK_THROWS_AS(sanitize(db, art_ds_instance(), Assignment(10), art_ds_spec()), ContractError);
}

TEST_CASE("sanitize output hides every itemset for any feasible plan", "[fih][sanitize][property]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto db = fihq::testing::random_database(rng, 2 + rng() % 12, 6, 0.5);
    auto spec = SensitiveSpec::uniform(fihq::testing::random_itemsets(rng, db, 1 + rng() % 4), 2);
    FihInstance inst;
    try {
      const auto pruned = prune_nonsupporting(db, compute_incidence(db, spec));
      inst = build_instance(pruned.incidence, spec, pruned.kept, db.size());
    } catch (const NothingToHide&) {
      continue;
    }
    const auto sol = solve_exact(inst);
    const auto out = sanitize(db, inst, sol.assignment, spec);
    for (std::size_t j = 0; j < spec.size(); ++j)
      REQUIRE(static_cast<std::int64_t>(count_support(out, spec.itemsets[j])) < spec.hiding_thresholds[j]);
    const auto src = to_source(inst, sol.assignment);
    for (std::size_t m = 0; m < db.size(); ++m)
      if (!src[m]) REQUIRE(out[m] == db[m]);
  }
}
