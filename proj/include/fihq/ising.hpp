#pragma once

// Lagrangian relaxation of the hiding program and its Ising form.
//
// With one multiplier lambda for every constraint, the dual objective is
//     L(x) = sum_m c_m x_m + K,   c_m = 1 - lambda * (itemsets supported by m),
//                                 K   = lambda * sum_j rhs_j.
// Squaring L and substituting x_m = (1 + s_m) / 2 gives a quadratic form in
// spins s_m = +-1. Energies here are always minimized:
//     energy(s) = sum_m h_m s_m + sum_{m<n} J_mn s_m s_n + constant.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "fihq/errors.hpp"
#include "fihq/fih.hpp"

namespace fihq {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Two-decimal truncation (toward minus infinity) of an exact rational.
inline double floor_2dp(const Rational& r) {
  const std::int64_t scaled = r.numerator() * 100;
  std::int64_t q = scaled / r.denominator();
  if (scaled % r.denominator() != 0 && scaled < 0) --q;
  return static_cast<double>(q) / 100.0;
}

enum class HamiltonianMode { paper_verbatim, exact_squared };

inline std::string_view to_string(HamiltonianMode mode) {
  switch (mode) {
    case HamiltonianMode::paper_verbatim: return "paper";
    case HamiltonianMode::exact_squared: return "exact";
  }
  throw ContractError("unknown Hamiltonian mode");
}

inline HamiltonianMode parse_hamiltonian_mode(std::string_view s) {
  if (s == "paper" || s == "paper_verbatim") return HamiltonianMode::paper_verbatim;
  if (s == "exact" || s == "exact_squared") return HamiltonianMode::exact_squared;
  throw ContractError("unknown Hamiltonian mode '" + std::string(s) + "'");
}

struct LagrangianData {
  Rational lambda{0};
  std::vector<Rational> c_exact;
  Rational k_exact{0};
  Rational big_exact{0};  // (1/2) sum_m c_m + K

  // Materialized values used to build the Hamiltonian. Hand-built data
  // (e.g. two-decimal coefficients) may set these without the exact side.
  std::vector<double> c;
  double k_const = 0.0;
  double big_coeff = 0.0;
};

/// lambda = 1 / (number of ones in the incidence matrix).
inline Rational compute_lambda(const FihInstance& inst) {
  const std::size_t ones = inst.a.total_ones();
  if (ones == 0) throw ContractError("compute_lambda: incidence matrix has no ones");
  return Rational(1, static_cast<std::int64_t>(ones));
}

inline LagrangianData compute_coeffs(const FihInstance& inst, const Rational& lambda) {
  if (lambda < Rational(0)) throw ContractError("compute_coeffs: lambda must be non-negative");
  LagrangianData lag;
  lag.lambda = lambda;
  for (std::size_t m = 0; m < inst.n_transactions(); ++m)
    lag.c_exact.push_back(Rational(1) - lambda * static_cast<std::int64_t>(inst.a.row_sum(m)));
  const std::int64_t rhs_total = std::accumulate(inst.rhs.begin(), inst.rhs.end(), std::int64_t{0});
  lag.k_exact = lambda * rhs_total;
  const Rational c_total = std::accumulate(lag.c_exact.begin(), lag.c_exact.end(), Rational(0));
  lag.big_exact = c_total / 2 + lag.k_exact;

  for (const auto& c : lag.c_exact) lag.c.push_back(to_double(c));
  lag.k_const = to_double(lag.k_exact);
  lag.big_coeff = to_double(lag.big_exact);
  return lag;
}

class IsingModel {
 public:
  IsingModel() = default;
  IsingModel(std::size_t n, HamiltonianMode mode)
      : n_(n), h_(n, 0.0), pair_(n * n, 0.0), mode_(mode) {}

  std::size_t size() const noexcept { return n_; }
  HamiltonianMode mode() const noexcept { return mode_; }

  double h(std::size_t m) const { return h_.at(m); }
  void set_h(std::size_t m, double v) { h_.at(m) = v; }
  const std::vector<double>& linear() const noexcept { return h_; }

  /// Coefficient of s_m s_n, symmetric in its arguments; zero for m == n.
  double coupling(std::size_t m, std::size_t n) const {
    if (m == n) return 0.0;
    if (m > n) std::swap(m, n);
    return pair_.at(m * n_ + n);
  }
  void set_coupling(std::size_t m, std::size_t n, double v) {
    if (m == n) throw ContractError("IsingModel: self coupling");
    if (m > n) std::swap(m, n);
    pair_.at(m * n_ + n) = v;
  }

  double constant() const noexcept { return constant_; }
  void set_constant(double v) noexcept { constant_ = v; }

  /// Energy of basis state z (bit m of z is qubit / transaction m).
  double energy(std::uint64_t z) const {
    double e = constant_;
    for (std::size_t m = 0; m < n_; ++m) {
      const double sm = ((z >> m) & 1U) ? 1.0 : -1.0;
      double row = h_[m];
      for (std::size_t k = m + 1; k < n_; ++k) row += pair_[m * n_ + k] * (((z >> k) & 1U) ? 1.0 : -1.0);
      e += sm * row;
    }
    return e;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> h_;
  std::vector<double> pair_;  // dense n x n, upper triangle used
  double constant_ = 0.0;
  HamiltonianMode mode_ = HamiltonianMode::paper_verbatim;
};

inline double energy(const IsingModel& model, std::uint64_t z) {
  if (model.size() < 64 && (z >> model.size()) != 0)
    throw ContractError("energy: bitstring has bits beyond the model size");
  return model.energy(z);
}

inline double energy(const IsingModel& model, const Assignment& x) {
  if (x.size() != model.size())
    throw ContractError("energy: bitstring length " + std::to_string(x.size()) + " does not match model size " +
                        std::to_string(model.size()));
  return model.energy(x.to_mask());
}

/// paper_verbatim: h_m = c_m^2 / 4 + B c_m, J_mn = c_m c_n, no constant.
/// exact_squared:  h_m = B c_m, J_mn = c_m c_n / 2, constant = B^2 + sum c_m^2 / 4,
///                 so that energy(z) == (sum_m c_m x_m + K)^2 exactly.
/// B is LagrangianData::big_coeff.
inline IsingModel build_ising(const LagrangianData& lag, HamiltonianMode mode) {
  const std::size_t n = lag.c.size();
  IsingModel model(n, mode);
  const double big = lag.big_coeff;
  double sum_sq = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double cm = lag.c[m];
    sum_sq += cm * cm;
    switch (mode) {
      case HamiltonianMode::paper_verbatim: model.set_h(m, 0.25 * cm * cm + big * cm); break;
      case HamiltonianMode::exact_squared: model.set_h(m, big * cm); break;
      default: throw ContractError("build_ising: unknown mode");
    }
    for (std::size_t k = m + 1; k < n; ++k) {
      const double cc = cm * lag.c[k];
      model.set_coupling(m, k, mode == HamiltonianMode::paper_verbatim ? cc : 0.5 * cc);
    }
  }
  if (mode == HamiltonianMode::exact_squared) model.set_constant(big * big + 0.25 * sum_sq);
  return model;
}

inline IsingModel build_ising(const FihInstance& inst, const LagrangianData& lag, HamiltonianMode mode) {
  if (lag.c.size() != inst.n_transactions())
    throw ContractError("build_ising: Lagrangian data was not computed from this instance");
  return build_ising(lag, mode);
}

/// (sum_m c_m x_m + K)^2, evaluated directly.
inline double lagrangian_sq(const LagrangianData& lag, const Assignment& x) {
  if (x.size() != lag.c.size()) throw ContractError("lagrangian_sq: assignment length mismatch");
  double v = lag.k_const;
  for (std::size_t m = 0; m < x.size(); ++m)
    if (x[m]) v += lag.c[m];
  return v * v;
}

inline double lagrangian_sq(const FihInstance& inst, const LagrangianData& lag, const Assignment& x) {
  if (x.size() != inst.n_transactions()) throw ContractError("lagrangian_sq: assignment length mismatch");
  return lagrangian_sq(lag, x);
}

}  // namespace fihq
