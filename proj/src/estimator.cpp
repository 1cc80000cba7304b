#include "zeno/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zeno/error.hpp"
#include "zeno/rng.hpp"

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZ95 = 1.959963984540054;
constexpr double kMaxCount = 1e30;

// Delta H from the minus probability at N cycles, second-order inversion.
double delta_h_from_minus_fraction(double p_minus, double n, double tau, double nu) {
  const double n_phi = std::asin(std::sqrt(std::clamp(p_minus, 0.0, 1.0)));
  return std::sqrt(4.0 * (n_phi / n) / (tau * tau * std::sin(nu)));
}

Interval wilson_interval(double p_hat, double n) {
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p_hat + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ProtocolParams with_count(const ProtocolParams& base, double n, std::uint64_t rounds, std::uint64_t seed) {
  ProtocolParams p = base;
  p.n_cycles = n;
  p.q_rounds = rounds;
  p.seed = seed;
  return p;
}


// Surviving-round counts of one campaign at a fixed N.
struct StageCounts {
  double n = 1.0;
  std::size_t survived = 0;
  std::size_t minus = 0;
};

struct PooledFit {
  bool ok = false;       // at least one surviving round
  double phi = 0.0;      // |phi| per cycle, maximum likelihood
  double phi_lower = 0.0;
  double phi_upper = 0.0;
  bool at_edge = false;  // maximum sits on the no-aliasing boundary
};

double delta_h_from_phase(double phi, double tau, double nu) {
  return std::sqrt(4.0 * phi / (tau * tau * std::sin(nu)));
}

// Count putting a known per-cycle phase at N |phi| = pi/4.
double choose_n_for_phase(double phi, double n_cap) {
  return std::clamp(std::round(kPi / (4.0 * phi)), 1.0, n_cap);
}

// Joint likelihood of all stages as a function of x = |phi| per cycle:
//   l(x) = Sum_k m_k log sin^2(N_k x) + (s_k - m_k) log cos^2(N_k x).
// Every term is concave on 0 < x < pi / (2 max N_k), so the maximum is
// unique and the likelihood-ratio interval is a single segment.
PooledFit fit_stages(const std::vector<StageCounts>& stages) {
  double n_max = 0.0;
  std::size_t minus = 0;
  for (const auto& c : stages) {
    if (c.survived == 0) continue;
    n_max = std::max(n_max, c.n);
    minus += c.minus;
  }
  PooledFit fit;
  if (n_max == 0.0) return fit;
  fit.ok = true;

  auto loglik = [&](double x) {
    double l = 0.0;
    for (const auto& c : stages) {
      const double a = c.n * x;
      if (c.minus > 0) l += 2.0 * static_cast<double>(c.minus) * std::log(std::sin(a));
      if (c.survived > c.minus) l += 2.0 * static_cast<double>(c.survived - c.minus) * std::log(std::cos(a));
    }
    return l;
  };
  auto score = [&](double x) {
    double g = 0.0;
    for (const auto& c : stages) {
      const double a = c.n * x;
      g += c.n * (static_cast<double>(c.minus) / std::tan(a) -
                  static_cast<double>(c.survived - c.minus) * std::tan(a));
    }
    return g;
  };
  // Bisection for the last x in [lo, hi] with pred(x) true, pred monotone.
  auto bisect = [](double lo, double hi, auto pred) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double x_max = 0.5 * kPi / n_max;
  const double edge = x_max * (1.0 - 1e-12);
  if (minus == 0) {
    fit.phi = 0.0;
  } else if (score(edge) >= 0.0) {
    fit.phi = x_max;
    fit.at_edge = true;
  } else {
    fit.phi = bisect(0.0, edge, [&](double x) { return score(x) > 0.0; });
  }

  // 95% likelihood-ratio interval: l(x) >= l(x_hat) - chi2_1(0.95) / 2.
  const double floor_l = (fit.phi > 0.0 ? loglik(std::min(fit.phi, edge)) : 0.0) - 0.5 * kZ95 * kZ95;
  const double top = std::min(fit.phi, edge);
  fit.phi_lower = (fit.phi == 0.0 || loglik(1e-300) >= floor_l)
                      ? 0.0
                      : bisect(0.0, top, [&](double x) { return loglik(x) < floor_l; });
  fit.phi_upper = loglik(edge) >= floor_l ? x_max
                                          : bisect(top, edge, [&](double x) { return loglik(x) >= floor_l; });
  return fit;
}

}  // namespace

MeasurementRecord run_campaign(const BranchReport& branch, const ProtocolParams& params) {
  params.validate();
  const ReadoutProbabilities readout = readout_probabilities(branch.ancilla_state);
  MeasurementRecord record;
  record.seed = params.seed;
  record.params = params;
  record.rounds.reserve(params.q_rounds);
  for (std::uint64_t q = 0; q < params.q_rounds; ++q) {
    RandomStream rng(params.seed, q);
    // Loss is drawn against the deficit itself so that losses far below
    // 2^-53 keep their (tiny) probability instead of rounding away.
    RoundResult round;
    round.survived = !(rng.uniform() < branch.survival_deficit);
    if (round.survived)
      round.outcome = rng.uniform() < readout.p_minus ? Outcome::Minus : Outcome::Plus;
    record.rounds.push_back(round);
  }
  return record;
}

MeasurementRecord run_campaign(const GenericModel& model, const ProtocolParams& params) {
  params.validate();
  const ShiftedModel shifted = shift_energy_zero(model);
  const CycleAmplitudes cycle = compute_cycle_amplitudes(shifted.model, params.tau, params.nu);
  return run_campaign(run_postselected(cycle, params), params);
}

EstimationResult estimate_fixed_n(const MeasurementRecord& record) {
  const std::size_t survived = record.survived_count();
  if (survived == 0) throw Error(ErrorKind::NoSurvivors, "no round survived; nothing to invert");
  const auto& p = record.params;
  const double n = p.n_cycles;
  const double minus = static_cast<double>(record.minus_count());
  const double p_hat = minus / static_cast<double>(survived);

  EstimationResult r;
  r.n_phi_hat = std::asin(std::sqrt(p_hat));
  r.phi_hat = r.n_phi_hat / n;
  r.delta_h_hat = delta_h_from_minus_fraction(p_hat, n, p.tau, p.nu);
  r.survived_rounds = survived;
  r.total_rounds = record.rounds.size();
  r.minus_rounds = record.minus_count();
  r.n_used = n;
  r.degenerate = p_hat >= 1.0;

  const Interval pi = wilson_interval(p_hat, static_cast<double>(survived));
  r.ci95_delta_h = {delta_h_from_minus_fraction(pi.lower, n, p.tau, p.nu),
                    delta_h_from_minus_fraction(pi.upper, n, p.tau, p.nu)};
  // The Wilson interval always contains p_hat; guard the endpoints against
  // rounding in the inversion.
  r.ci95_delta_h.lower = std::min(r.ci95_delta_h.lower, r.delta_h_hat);
  r.ci95_delta_h.upper = std::max(r.ci95_delta_h.upper, r.delta_h_hat);
  return r;
}

double choose_n(double tau, double nu, double delta_h_prior) {
  if (!(delta_h_prior > 0.0))
    throw Error(ErrorKind::NoFiniteCount, "a positive Delta H prior is needed to choose N");
  const double phi = std::abs(second_order_phi(tau, nu, delta_h_prior));
  if (!(phi > 0.0)) throw Error(ErrorKind::NoFiniteCount, "phase per cycle is zero");
  const double n = std::round(kPi / (4.0 * phi));
  if (!(n <= kMaxCount)) throw Error(ErrorKind::GuardExceeded, "chosen N exceeds 1e30");
  return std::max(1.0, n);
}

EstimationResult estimate_adaptive(const GenericModel& model, double tau, double nu,
                                   std::size_t round_budget, std::uint64_t seed) {
  if (round_budget < 16) throw Error(ErrorKind::InvalidArgument, "adaptive estimation needs a budget >= 16");
  ProtocolParams base;
  base.tau = tau;
  base.nu = nu;
  base.validate();

  const ShiftedModel shifted = shift_energy_zero(model);
  const CycleAmplitudes cycle = compute_cycle_amplitudes(shifted.model, tau, nu);
  const double worst_dh =
      omega_bar(shifted.model) * std::sqrt(static_cast<double>(shifted.model.dim() - 1));
  const double worst_phi = std::abs(second_order_phi(tau, nu, worst_dh));

  double n_cap = 1.0;
  if (worst_phi > 0.0) {
    n_cap = std::floor(0.5 * kPi / worst_phi);
    if (!(n_cap <= kMaxCount)) throw Error(ErrorKind::GuardExceeded, "aliasing limit exceeds 1e30 cycles");
    n_cap = std::max(1.0, n_cap);
  }
  const double n0 = std::max(1.0, std::floor(n_cap / 8.0));
  const std::size_t stage_rounds = std::max<std::size_t>(4, round_budget / 8);

  std::vector<StageCounts> stages;
  std::vector<double> schedule;
  std::size_t used = 0;
  std::uint64_t stage = 0;
  auto campaign = [&](double n, std::size_t rounds) {
    const ProtocolParams p = with_count(base, n, rounds, derive_seed(seed, stage++));
    const MeasurementRecord rec = run_campaign(run_postselected(cycle, p), p);
    schedule.push_back(n);
    used += rec.rounds.size();
    stages.push_back({n, rec.survived_count(), rec.minus_count()});
    return stages.back();
  };

  double n = n0;
  while (round_budget - used >= stage_rounds) {
    const StageCounts c = campaign(n, stage_rounds);
    if (c.survived == 0) break;
    const double p_minus = static_cast<double>(c.minus) / static_cast<double>(c.survived);
    if (p_minus < 0.5 && 2.0 * n <= n_cap)
      n *= 2.0;
    else
      break;
  }

  bool refined = false;
  if (const std::size_t remaining = round_budget - used; remaining > 0) {
    double n_final = n_cap;
    const PooledFit so_far = fit_stages(stages);
    if (so_far.ok && so_far.phi > 0.0) n_final = std::min(n_cap, choose_n_for_phase(so_far.phi, n_cap));
    refined = campaign(n_final, remaining).survived > 0;
  }

  const PooledFit fit = fit_stages(stages);
  if (!fit.ok) throw Error(ErrorKind::BudgetExhausted, "no surviving round in the whole budget");

  EstimationResult r;
  r.n_used = schedule.back();
  r.phi_hat = fit.phi;
  r.n_phi_hat = r.n_used * fit.phi;
  r.delta_h_hat = delta_h_from_phase(fit.phi, tau, nu);
  r.ci95_delta_h = {delta_h_from_phase(fit.phi_lower, tau, nu), delta_h_from_phase(fit.phi_upper, tau, nu)};
  r.ci95_delta_h.lower = std::min(r.ci95_delta_h.lower, r.delta_h_hat);
  r.ci95_delta_h.upper = std::max(r.ci95_delta_h.upper, r.delta_h_hat);
  for (const auto& c : stages) {
    r.survived_rounds += c.survived;
    r.minus_rounds += c.minus;
  }
  r.total_rounds = used;
  r.degenerate = fit.at_edge;
  r.converged = refined && !fit.at_edge;
  r.schedule = std::move(schedule);
  return r;
}

SurvivalPrediction predicted_survival(const ProtocolParams& params, const CycleAmplitudes& cycle) {
  params.validate();
  const SurvivalProbability one = exact_survival_one_cycle(cycle, params.ancilla);
  const double nq = params.n_cycles * static_cast<double>(params.q_rounds);
  return {std::exp(nq * one.log_p), std::exp(-static_cast<double>(params.q_rounds) / snr(params.nu))};
}

double second_order_p_all(double tau, double nu, double delta_h, double n_cycles, std::uint64_t q_rounds) {
  const double pe = second_order_pe(tau, nu, delta_h);
  if (pe >= 1.0) return 0.0;
  return std::exp(n_cycles * static_cast<double>(q_rounds) * std::log1p(-pe));
}

std::optional<DerivedCoupling> derive_coupling(const ModelDescriptor& model, double delta_h_hat) {
  if (std::holds_alternative<TwoLevelModel>(model)) return DerivedCoupling{"omega", delta_h_hat};
  if (std::holds_alternative<ContinuumModel>(model)) return DerivedCoupling{"rms_coupling", delta_h_hat};
  return std::nullopt;
}

}  // namespace zeno
