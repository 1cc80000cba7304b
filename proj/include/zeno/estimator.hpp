#pragma once

// Measurement campaigns and the inversion from ancilla statistics back to
// Delta H_ee.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zeno/models.hpp"
#include "zeno/protocol.hpp"

namespace zeno {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

struct DerivedCoupling {
  std::string name;  // "omega" (two-level) or "rms_coupling" (continuum)
  double value = 0.0;
};

struct EstimationResult {
  double n_phi_hat = 0.0;    // |N phi|, from the minus fraction
  double phi_hat = 0.0;      // n_phi_hat / N
  double delta_h_hat = 0.0;  // >= 0
  std::optional<DerivedCoupling> derived;
  std::size_t survived_rounds = 0;
  std::size_t total_rounds = 0;
  std::size_t minus_rounds = 0;  // in the rounds the estimate is based on
  Interval ci95_delta_h;
  double n_used = 1.0;
  /// Minus fraction was 1: N phi sits on the pi/2 edge of the invertible
  /// range, so only the lower end of the interval is meaningful.
  bool degenerate = false;
  bool converged = true;
  std::vector<double> schedule;  // N values queried, in order (adaptive only)
};

/// Survival of a whole campaign.
struct SurvivalPrediction {
  double p_all = 1.0;      // exp(N Q log P_cycle)
  double asymptote = 1.0;  // exp(-Q / SNR)
};

/// Q independent rounds; the ancilla is reset to params.ancilla before each.
/// Each round needs one survival draw and, if it survived, one readout draw,
/// both taken from the stream (seed, round index).
MeasurementRecord run_campaign(const GenericModel& model, const ProtocolParams& params);

/// Same, reusing a branch already evaluated for params.
MeasurementRecord run_campaign(const BranchReport& branch, const ProtocolParams& params);

/// Inverts the minus fraction assuming N |phi| in [0, pi/2].
/// Throws NoSurvivors when no round survived.
EstimationResult estimate_fixed_n(const MeasurementRecord& record);

/// round(pi / (4 |phi|)) with phi the second-order phase for the prior.
double choose_n(double tau, double nu, double delta_h_prior);

/// Doubling schedule starting well below the aliasing limit implied by the
/// worst-case Delta H = omega_bar * sqrt(dim - 1), then one refinement stage
/// at the count that puts the current estimate at N |phi| = pi/4. The
/// result is the maximum-likelihood phase over all stages jointly, with a
/// likelihood-ratio 95% interval.
EstimationResult estimate_adaptive(const GenericModel& model, double tau, double nu,
                                   std::size_t round_budget, std::uint64_t seed);

SurvivalPrediction predicted_survival(const ProtocolParams& params, const CycleAmplitudes& cycle);

/// exp(N Q log(1 - second_order_pe)); 0 once the second-order loss reaches 1.
double second_order_p_all(double tau, double nu, double delta_h, double n_cycles,
                          std::uint64_t q_rounds);

/// Names the coupling the estimate measures for the given model family.
std::optional<DerivedCoupling> derive_coupling(const ModelDescriptor& model, double delta_h_hat);

}  // namespace zeno
