#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fihq/qaoa.hpp"
#include "test_support.hpp"

using namespace fihq;
using Catch::Approx;

namespace {

using Matrix = std::vector<std::vector<Complex>>;

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t ra = a.size();
  const std::size_t rb = b.size();
  Matrix out(ra * rb, std::vector<Complex>(ra * rb));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ra; ++j)
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < rb; ++l) out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
  return out;
}

// exp(-i beta X) on n qubits as an explicit matrix. The highest qubit is the
// leftmost Kronecker factor so that basis index bit q is qubit q.
Matrix mixer_matrix(std::size_t n, double beta) {
  const Complex c(std::cos(beta), 0.0);
  const Complex s(0.0, -std::sin(beta));
  const Matrix rx = {{c, s}, {s, c}};
  Matrix out = rx;
  for (std::size_t q = 1; q < n; ++q) out = kron(rx, out);
  return out;
}

std::vector<Complex> apply_matrix(const Matrix& u, std::span<const Complex> v) {
  std::vector<Complex> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += u[i][j] * v[j];
  return out;
}

IsingModel one_qubit(double h) {
  IsingModel m(1, HamiltonianMode::exact_squared);
  m.set_h(0, h);
  return m;
}

}  // namespace

TEST_CASE("uniform initial state", "[qaoa]") {
  for (std::size_t n : {1u, 3u, 10u}) {
    const auto s = init_uniform(n);
    REQUIRE(s.dim() == (std::size_t{1} << n));
    for (std::uint64_t z = 0; z < s.dim(); ++z)
      REQUIRE(std::abs(s.amplitude(z) - Complex(std::pow(2.0, -0.5 * static_cast<double>(n)), 0.0)) < 1e-15);
    CHECK(s.norm() == Approx(1.0).margin(1e-12));
  }
  CHECK_THROWS_AS(init_uniform(0), ContractError);
  CHECK_THROWS_AS(init_uniform(kMaxQubits + 1), ContractError);
  CHECK_THROWS_AS(Statevector(1, {Complex(1, 0), Complex(1, 0)}), ContractError);
  CHECK_THROWS_AS(Statevector(2, {Complex(1, 0)}), ContractError);
}

TEST_CASE("cost phase on one qubit", "[qaoa]") {
  const auto model = one_qubit(1.0);
  auto s = init_uniform(1);
  apply_cost_phase(s, model, std::numbers::pi / 2);
  const double r = 1.0 / std::sqrt(2.0);
  // energy(0) = -1, energy(1) = +1.
  CHECK(std::abs(s.amplitude(0) - Complex(0.0, r)) < 1e-12);
  CHECK(std::abs(s.amplitude(1) - Complex(0.0, -r)) < 1e-12);
  CHECK_THROWS_AS(apply_cost_phase(s, IsingModel(2, HamiltonianMode::exact_squared), 0.1), ContractError);
}

TEST_CASE("mixer on one qubit", "[qaoa]") {
  auto s = Statevector::basis(1, 0);
  apply_mixer(s, std::numbers::pi / 2);
  CHECK(std::abs(s.amplitude(0)) < 1e-12);
  CHECK(std::abs(s.amplitude(1) - Complex(0.0, -1.0)) < 1e-12);

  auto u = init_uniform(1);
  apply_mixer(u, 0.7);
  // |+> is an eigenvector of X: only a global phase appears.
  CHECK(std::abs(u.amplitude(0) - u.amplitude(1)) < 1e-12);
  CHECK(std::abs(u.amplitude(0)) == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("mixer matches the Kronecker product of single-qubit rotations", "[qaoa][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
  for (std::size_t n : {1u, 2u, 3u}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto s = fihq::testing::random_state(rng, n);
      const double beta = angle(rng);
      const auto expected = apply_matrix(mixer_matrix(n, beta), s.amplitudes());
      apply_mixer(s, beta);
      for (std::size_t z = 0; z < s.dim(); ++z) REQUIRE(std::abs(s.amplitude(z) - expected[z]) < 1e-12);
    }
  }
}

TEST_CASE("gates are unitary and invertible", "[qaoa][property]") {
  std::mt19937_64 rng(8);
  for (std::size_t n : {1u, 4u, 8u}) {
    const auto model = fihq::testing::random_model(rng, n);
    const auto table = energy_table(model);
    const auto original = fihq::testing::random_state(rng, n);
    auto s = original;
    apply_cost_phase(s, table, 0.37);
    apply_mixer(s, -1.1);
    CHECK(s.norm() == Approx(1.0).margin(1e-12));
    apply_mixer(s, 1.1);
    apply_cost_phase(s, table, -0.37);
    CHECK(fihq::testing::max_amplitude_diff(s, original) < 1e-12);
  }
}

TEST_CASE("zero angles leave the uniform state invariant", "[qaoa]") {
  const auto pr = fihq::testing::art_ds_problem();
  const QaoaSimulator sim(pr.model);
  const auto s = sim.run(QaoaParams::shared(3, 0.7, 0.0));
  // The mixer fixes |+...+>; with gamma = 0 nothing else acts.
  for (double p : s.probabilities()) REQUIRE(p == Approx(1.0 / 1024).margin(1e-12));
  const auto t = sim.run(QaoaParams::shared(3, 0.0, 0.0));
  CHECK(fihq::testing::max_amplitude_diff(t, init_uniform(10)) < 1e-12);
}

TEST_CASE("circuit on the example is stable", "[qaoa][regression]") {
  const auto pr = fihq::testing::art_ds_problem();
  const QaoaSimulator sim(pr.model);
  const auto s = sim.run(QaoaParams::shared(3, 1.0, 1.0));
  CHECK(s.norm() == Approx(1.0).margin(1e-10));
  CHECK(s.probabilities()[0] == Approx(0.0014503577805031805).margin(1e-9));
  CHECK(s.probabilities()[1023] == Approx(0.0088939682394830553).margin(1e-9));
  CHECK(sim.expectation(s) == Approx(-1.3798452585998409).margin(1e-8));
  CHECK(exact_expectation(s, pr.model) == Approx(sim.expectation(s)).margin(1e-12));
}

TEST_CASE("expectation on simple states", "[qaoa]") {
  const auto model = one_qubit(2.5);
  const QaoaSimulator sim(model);
  CHECK(sim.expectation(Statevector::basis(1, 0)) == Approx(-2.5));
  CHECK(sim.expectation(Statevector::basis(1, 1)) == Approx(2.5));
  CHECK(sim.expectation(init_uniform(1)) == Approx(0.0).margin(1e-12));
  CHECK(sim.variance(init_uniform(1)) == Approx(6.25));

  std::mt19937_64 rng(1);
  const auto m5 = fihq::testing::random_model(rng, 5);
  const auto s = fihq::testing::random_state(rng, 5);
  double direct = 0.0;
  for (std::uint64_t z = 0; z < 32; ++z) direct += std::norm(s.amplitude(z)) * m5.energy(z);
  CHECK(exact_expectation(s, m5) == Approx(direct).margin(1e-12));
}

TEST_CASE("sampling is deterministic per seed", "[qaoa][sampling]") {
  std::mt19937_64 rng(21);
  const auto s = fihq::testing::random_state(rng, 6);
  const auto a = sample(s, 500, 123);
  const auto b = sample(s, 500, 123);
  const auto c = sample(s, 500, 124);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != c.counts);
  std::uint64_t total = 0;
  for (const auto& [z, k] : a.counts) total += k;
  CHECK(total == 500);
  CHECK_THROWS_AS(sample(s, 0, 1), ContractError);
}

TEST_CASE("sampling never returns zero-probability states", "[qaoa][sampling]") {
  auto amps = std::vector<Complex>(8, Complex(0, 0));
  amps[3] = Complex(std::sqrt(0.25), 0);
  amps[4] = Complex(0, std::sqrt(0.75));
  const Statevector s(3, amps);
  const auto h = sample(s, 20000, 9);
  for (const auto& [z, k] : h.counts) REQUIRE((z == 3 || z == 4));
  const auto one = sample(Statevector::basis(2, 1), 100, 1);
  CHECK(one.counts.size() == 1);
  CHECK(one.counts.at(1) == 100);
}

TEST_CASE("uniform single qubit sampling stays within three sigma", "[qaoa][sampling]") {
  const auto h = sample(init_uniform(1), 100000, 2024);
  const double sigma = std::sqrt(100000 * 0.25);
  for (std::uint64_t z : {0u, 1u}) CHECK(std::abs(static_cast<double>(h.counts.at(z)) - 50000.0) < 3 * sigma);
}

TEST_CASE("sample frequencies pass a chi-square test", "[qaoa][sampling][property]") {
  std::mt19937_64 rng(31);
  constexpr std::uint64_t shots = 100000;
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto s = fihq::testing::random_state(rng, n);
    const auto p = s.probabilities();
    const auto h = sample(s, shots, 1000 + n);
    double chi2 = 0.0;
    for (std::size_t z = 0; z < p.size(); ++z) {
      const double expected = p[z] * shots;
      const double got = h.counts.count(z) ? static_cast<double>(h.counts.at(z)) : 0.0;
      chi2 += (got - expected) * (got - expected) / expected;
    }
    // 99.9% quantiles for 3, 7 and 15 degrees of freedom.
    const double limit = n == 2 ? 16.27 : n == 3 ? 24.32 : 37.70;
    CHECK(chi2 < limit);
  }
}

TEST_CASE("exact expectation matches the shot mean", "[qaoa][sampling][property]") {
  std::mt19937_64 rng(41);
  constexpr std::uint64_t shots = 100000;
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = fihq::testing::random_model(rng, 6);
    const QaoaSimulator sim(model);
    const auto s = fihq::testing::random_state(rng, 6);
    const auto h = sample(s, shots, static_cast<std::uint64_t>(trial));
    const double se = std::sqrt(sim.variance(s) / shots);
    REQUIRE(std::abs(h.mean(sim.energies()) - exact_expectation(s, model)) < 5 * se);
  }
}

TEST_CASE("uniform state expectation is the constant term", "[qaoa]") {
  std::mt19937_64 rng(51);
  const auto model = fihq::testing::random_model(rng, 7);
  CHECK(exact_expectation(init_uniform(7), model) == Approx(model.constant()).margin(1e-12));
}

TEST_CASE("cost phase keeps magnitudes", "[qaoa][property]") {
  std::mt19937_64 rng(61);
  const auto model = fihq::testing::random_model(rng, 5);
  const auto before = fihq::testing::random_state(rng, 5);
  auto after = before;
  apply_cost_phase(after, model, 1.234);
  for (std::size_t z = 0; z < before.dim(); ++z)
    REQUIRE(std::abs(std::abs(after.amplitude(z)) - std::abs(before.amplitude(z))) < 1e-12);
  auto same = before;
  apply_cost_phase(same, model, 0.0);
  apply_mixer(same, 0.0);
  CHECK(fihq::testing::max_amplitude_diff(same, before) == 0.0);
}

TEST_CASE("run_circuit is bitwise deterministic", "[qaoa]") {
  const auto pr = fihq::testing::art_ds_problem();
  const auto params = QaoaParams({0.3, -0.8}, {1.1, 0.2});
  CHECK(run_circuit(pr.model, params).probabilities() == run_circuit(pr.model, params).probabilities());
}

TEST_CASE("QaoaParams validation", "[qaoa]") {
  CHECK_THROWS_AS(QaoaParams({}, {}), ContractError);
  CHECK_THROWS_AS(QaoaParams({1.0}, {1.0, 2.0}), ContractError);
  CHECK(QaoaParams::shared(3, 1.0, 2.0).layers() == 3);
}
