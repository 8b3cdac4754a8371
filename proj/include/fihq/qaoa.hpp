#pragma once

// Statevector simulation of the QAOA circuit: Hadamards on |0...0>, then p
// layers of exp(-i gamma H_O) followed by exp(-i beta sum_m X_m), then
// computational-basis measurement. H_O is diagonal, so the cost layer is a
// per-basis-state phase taken from a precomputed energy table.
//
// Basis index z holds qubit m in bit m (qubit 0 = least significant).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fihq/errors.hpp"
#include "fihq/ising.hpp"

namespace fihq {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;
inline constexpr double kNormTolerance = 1e-10;

class Statevector {
 public:
  Statevector() = default;

  /// Wraps explicit amplitudes; they must already have unit norm.
  Statevector(std::size_t n, std::vector<Complex> amplitudes) : n_(n), amps_(std::move(amplitudes)) {
    check_qubits(n);
    if (amps_.size() != (std::size_t{1} << n))
      throw ContractError("Statevector: expected " + std::to_string(std::size_t{1} << n) + " amplitudes, got " +
                          std::to_string(amps_.size()));
    if (std::abs(norm() - 1.0) > kNormTolerance) throw ContractError("Statevector: amplitudes are not normalized");
  }

  /// H^{(x)n} |0...0>: every amplitude 2^{-n/2}.
  static Statevector uniform(std::size_t n) {
    check_qubits(n);
    const std::size_t dim = std::size_t{1} << n;
    return Statevector(n, std::vector<Complex>(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0)),
                       Unchecked{});
  }

  static Statevector basis(std::size_t n, std::uint64_t z) {
    check_qubits(n);
    std::vector<Complex> amps(std::size_t{1} << n, Complex(0.0, 0.0));
    amps.at(z) = Complex(1.0, 0.0);
    return Statevector(n, std::move(amps), Unchecked{});
  }

  std::size_t qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }

  Complex amplitude(std::uint64_t z) const { return amps_.at(z); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  std::span<Complex> mutable_amplitudes() noexcept { return amps_; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](const Complex& a) { return std::norm(a); });
    return p;
  }

 private:
  struct Unchecked {};
  Statevector(std::size_t n, std::vector<Complex> amps, Unchecked) : n_(n), amps_(std::move(amps)) {}

  static void check_qubits(std::size_t n) {
    if (n < 1 || n > kMaxQubits)
      throw ContractError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
  }

  std::size_t n_ = 0;
  std::vector<Complex> amps_;
};

inline Statevector init_uniform(std::size_t n) { return Statevector::uniform(n); }

/// energy(z) for every basis state, built incrementally: setting bit k of a
/// state flips s_k from -1 to +1 and changes the energy by
/// 2 (h_k + sum_{l != k} J_kl s_l).
inline std::vector<double> energy_table(const IsingModel& model) {
  const std::size_t n = model.size();
  if (n < 1 || n > kMaxQubits) throw ContractError("energy_table: model size outside the simulator range");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> table(dim);
  table[0] = model.energy(0);
  for (std::uint64_t z = 1; z < dim; ++z) {
    const auto k = static_cast<std::size_t>(std::countr_zero(z));
    const std::uint64_t prev = z & (z - 1);
    double field = model.h(k);
    for (std::size_t l = 0; l < n; ++l)
      if (l != k) field += model.coupling(k, l) * (((prev >> l) & 1U) ? 1.0 : -1.0);
    table[z] = table[prev] + 2.0 * field;
  }
  return table;
}

/// Multiplies amplitude z by exp(-i gamma energy(z)).
inline void apply_cost_phase(Statevector& state, std::span<const double> energies, double gamma) {
  if (energies.size() != state.dim()) throw ContractError("apply_cost_phase: energy table size mismatch");
  auto amps = state.mutable_amplitudes();
  for (std::size_t z = 0; z < amps.size(); ++z) {
    const double angle = -gamma * energies[z];
    amps[z] *= Complex(std::cos(angle), std::sin(angle));
  }
}

inline void apply_cost_phase(Statevector& state, const IsingModel& model, double gamma) {
  if (model.size() != state.qubits())
    throw ContractError("apply_cost_phase: model has " + std::to_string(model.size()) + " spins, state has " +
                        std::to_string(state.qubits()) + " qubits");
  const auto table = energy_table(model);
  apply_cost_phase(state, table, gamma);
}

/// exp(-i beta X) on every qubit: (a, b) -> (a cos b - i b sin b, b cos b - i a sin b).
inline void apply_mixer(Statevector& state, double beta) {
  const Complex cos_b(std::cos(beta), 0.0);
  const Complex msin_b(0.0, -std::sin(beta));
  auto amps = state.mutable_amplitudes();
  const std::size_t dim = amps.size();
  for (std::size_t q = 0; q < state.qubits(); ++q) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const Complex a = amps[i];
        const Complex b = amps[i + stride];
        amps[i] = a * cos_b + b * msin_b;
        amps[i + stride] = b * cos_b + a * msin_b;
      }
    }
  }
}

struct QaoaParams {
  std::vector<double> betas;
  std::vector<double> gammas;

  QaoaParams() = default;
  QaoaParams(std::vector<double> b, std::vector<double> g) : betas(std::move(b)), gammas(std::move(g)) {
    validate();
  }

  /// The same (beta, gamma) on every layer.
  static QaoaParams shared(std::size_t p, double beta, double gamma) {
    return QaoaParams(std::vector<double>(p, beta), std::vector<double>(p, gamma));
  }

  std::size_t layers() const noexcept { return betas.size(); }

  void validate() const {
    if (betas.empty()) throw ContractError("QaoaParams: at least one layer is required");
    if (betas.size() != gammas.size()) throw ContractError("QaoaParams: beta and gamma lengths differ");
  }
};

/// Owns the energy table of one model so repeated circuit runs (one per
/// optimizer evaluation) reuse it. Not safe for concurrent use.
class QaoaSimulator {
 public:
  explicit QaoaSimulator(const IsingModel& model) : qubits_(model.size()), energies_(energy_table(model)) {}

  std::size_t qubits() const noexcept { return qubits_; }
  std::span<const double> energies() const noexcept { return energies_; }

  Statevector run(const QaoaParams& params) const {
    params.validate();
    Statevector state = Statevector::uniform(qubits_);
    for (std::size_t layer = 0; layer < params.layers(); ++layer) {
      apply_cost_phase(state, energies_, params.gammas[layer]);
      apply_mixer(state, params.betas[layer]);
    }
    return state;
  }

  double expectation(const Statevector& state) const {
    if (state.dim() != energies_.size()) throw ContractError("expectation: dimension mismatch");
    double e = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) e += std::norm(amps[z]) * energies_[z];
    return e;
  }

  /// Variance of the energy under the Born distribution of `state`.
  double variance(const Statevector& state) const {
    const double mean = expectation(state);
    double v = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t z = 0; z < amps.size(); ++z) {
      const double d = energies_[z] - mean;
      v += std::norm(amps[z]) * d * d;
    }
    return v;
  }

 private:
  std::size_t qubits_;
  std::vector<double> energies_;
};

inline Statevector run_circuit(const IsingModel& model, const QaoaParams& params) {
  return QaoaSimulator(model).run(params);
}

inline double exact_expectation(const Statevector& state, const IsingModel& model) {
  if (model.size() != state.qubits()) throw ContractError("exact_expectation: dimension mismatch");
  return QaoaSimulator(model).expectation(state);
}

struct ShotHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;  // ordered for deterministic iteration
  std::uint64_t shots = 0;
  std::size_t qubits = 0;

  double mean(std::span<const double> energies) const {
    double total = 0.0;
    for (const auto& [z, k] : counts) total += static_cast<double>(k) * energies[z];
    return total / static_cast<double>(shots);
  }
};

/// Uniform double in [0, 1) from the top 53 bits of one draw. Written out
/// so histograms do not depend on the standard library's distributions.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// `shots` independent draws from the Born distribution of `state`.
inline ShotHistogram sample(const Statevector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw ContractError("sample: shots must be >= 1");
  std::vector<double> cdf(state.dim());
  double acc = 0.0;
  const auto amps = state.amplitudes();
  for (std::size_t z = 0; z < amps.size(); ++z) {
    acc += std::norm(amps[z]);
    cdf[z] = acc;
  }
  std::mt19937_64 rng(seed);
  ShotHistogram hist;
  hist.shots = shots;
  hist.qubits = state.qubits();
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    // cdf[it] > u >= cdf[it - 1], so the chosen state has positive mass.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
      // u rounded up to the total: take the last state with positive mass.
      do --it; while (it != cdf.begin() && *it == *(it - 1));
    }
    ++hist.counts[static_cast<std::uint64_t>(it - cdf.begin())];
  }
  return hist;
}

}  // namespace fihq
