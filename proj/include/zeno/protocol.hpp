#pragma once

// The measurement-cycle engine.
//
// One cycle: free evolution K(tau/2), controlled-M on the ancilla
// (identity if the system is in |e>, M otherwise), K(tau/2) again, then a
// projective measurement onto |e>. On the surviving branch the ancilla
// undergoes A = K_ee^2 I + dK2 M with dK2 = Sum_{i != e} K_ei K_ie. M is
// diag(e^{i nu}, e^{-i nu}) in the (|+>, |->) basis, so A is diagonal there
// with eigenvalues lambda_{+/-} = K_ee^2 + e^{+/- i nu} dK2.
//
// Every near-unit quantity is carried as an increment (K_ee - 1,
// lambda - 1, 1 - P) because at realistic parameters those increments are
// far below one ulp of 1.0.

#include <cstdint>
#include <vector>

#include "zeno/linalg.hpp"
#include "zeno/models.hpp"

namespace zeno {

/// (|+> + |->)/sqrt(2)
StateVector equal_superposition();

struct ProtocolParams {
  double tau = 0.0;        // time between projective measurements
  double nu = 0.0;         // controlled-M eigenphase, in (0, pi]
  double n_cycles = 1.0;   // N; a whole number, may exceed 2^53
  std::uint64_t q_rounds = 1;
  std::uint64_t seed = 0;
  StateVector ancilla = equal_superposition();  // in the (|+>, |->) basis

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;
};

struct CycleAmplitudes {
  Complex u;                 // K_ee - 1, K = K(tau/2)
  Complex delta_k2;          // Sum_{i != e} K_ei K_ie
  Complex lambda_plus_inc;   // lambda_+ - 1
  Complex lambda_minus_inc;  // lambda_- - 1
};

struct SurvivalProbability {
  double log_p = 0.0;
  double deficit = 0.0;  // 1 - p
};

struct BranchReport {
  StateVector ancilla_state;  // normalized, (|+>, |->) basis
  double phi_exact_per_cycle = 0.0;
  double common_phase_per_cycle = 0.0;
  double log_survival = 0.0;      // log of the probability that all N cycles survive
  double survival_deficit = 0.0;  // 1 - exp(log_survival)
  double n_cycles = 1.0;
};

struct ValidityMargin {
  double margin = 0.0;         // |pi - nu| / sqrt(tau * omega_bar)
  double tau_omega_bar = 0.0;
};

struct ReadoutProbabilities {
  double p_plus = 1.0;
  double p_minus = 0.0;
};

enum class Outcome { Plus, Minus, None };

struct RoundResult {
  bool survived = false;
  Outcome outcome = Outcome::None;  // None iff !survived
};

/// Outcomes of Q rounds of N cycles each, with the inputs that produced them.
struct MeasurementRecord {
  std::vector<RoundResult> rounds;
  std::uint64_t seed = 0;
  ProtocolParams params;

  std::size_t survived_count() const noexcept;
  std::size_t minus_count() const noexcept;
  std::size_t plus_count() const noexcept;
  bool all_survived() const noexcept { return survived_count() == rounds.size(); }

  friend bool operator==(const MeasurementRecord& a, const MeasurementRecord& b);
};

CycleAmplitudes compute_cycle_amplitudes(const GenericModel& model, double tau, double nu);
/// Same, reusing a decomposition of model.hamiltonian() across (tau, nu).
CycleAmplitudes compute_cycle_amplitudes(const GenericModel& model, const SpectralDecomposition& decomp,
                                         double tau, double nu);

/// |Sum_{i != e} K_ei K_ie - (<e|K(tau)|e> - K_ee^2)| with K = K(tau/2), both
/// sides from explicit evolution operators.
double variance_identity_residual(const GenericModel& model, double tau);

/// Survival of one cycle for the given (normalized) ancilla.
SurvivalProbability exact_survival_one_cycle(const CycleAmplitudes& cycle, const StateVector& ancilla);

/// N cycles on the surviving branch, in closed form. lambda^N is evaluated as
/// exp(N log lambda) so N may be as large as 1e21.
BranchReport run_postselected(const CycleAmplitudes& cycle, const ProtocolParams& params);

enum class CompositeMode { PostSelect, Sample };

struct CompositeResult {
  BranchReport branch;
  MeasurementRecord record;  // empty rounds in PostSelect mode
};

/// Explicit simulation of system x ancilla, one cycle at a time. This is the
/// brute-force reference for run_postselected; N is limited to 1e6.
CompositeResult run_full_composite(const GenericModel& model, const ProtocolParams& params,
                                   CompositeMode mode);

/// -tau^2 dH^2 sin(nu) / 4
double second_order_phi(double tau, double nu, double delta_h);

/// tau^2 dH^2 (1 + cos nu) / 2, the per-cycle loss probability to second order.
double second_order_pe(double tau, double nu, double delta_h);

/// sin(nu) / (2 (1 + cos nu)) = tan(nu/2) / 2
double snr(double nu);

ValidityMargin validity_margin(double tau, double nu, double omega_bar);

ReadoutProbabilities readout_probabilities(const StateVector& ancilla);

}  // namespace zeno
