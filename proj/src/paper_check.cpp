#include "zeno/paper_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "zeno/model_io.hpp"
#include "zeno/rng.hpp"

namespace zeno {

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CheckLine within(const std::string& name, double value, double lo, double hi) {
  return {name, lo <= value && value <= hi,
          fmt("%.6g", value) + " in [" + fmt("%.6g", lo) + ", " + fmt("%.6g", hi) + "]"};
}

}  // namespace

bool PaperCheckReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.passed; });
}

PaperCheckReport run_paper_check(const PaperCheckOptions& options) {
  PaperCheckReport r;
  r.tau = 1e-8;
  r.pi_minus_nu = 1e-4;
  r.nu = std::numbers::pi - r.pi_minus_nu;
  r.q_rounds = 100;

  const TwoLevelModel two_level{1.0, 1.0};
  const ShiftedModel shifted = shift_energy_zero(build_generic(two_level));
  const double delta_h = delta_h_ee(shifted.model);

  r.phi_second_order = second_order_phi(r.tau, r.nu, delta_h);
  r.n_cycles = std::ceil(1.0 / std::abs(r.phi_second_order));
  r.deficit_second_order = second_order_pe(r.tau, r.nu, delta_h);
  r.margin = validity_margin(r.tau, r.nu, omega_bar(shifted.model));

  ProtocolParams params;
  params.tau = r.tau;
  params.nu = r.nu;
  params.n_cycles = r.n_cycles;
  params.q_rounds = r.q_rounds;
  params.seed = options.seed;

  const CycleAmplitudes cycle = compute_cycle_amplitudes(shifted.model, r.tau, r.nu);
  r.deficit_exact = exact_survival_one_cycle(cycle, params.ancilla).deficit;
  const SurvivalPrediction pred = predicted_survival(params, cycle);
  r.p_all_exact = pred.p_all;
  r.asymptote = pred.asymptote;
  r.p_all_second_order = second_order_p_all(r.tau, r.nu, delta_h, r.n_cycles, r.q_rounds);

  const BranchReport branch = run_postselected(cycle, params);
  r.phi_exact = branch.phi_exact_per_cycle;

  // delta = 1, so Omega/delta is the Delta H estimate itself.
  auto campaign = [&](std::uint64_t seed) {
    ProtocolParams p = params;
    p.seed = seed;
    return run_campaign(branch, p);
  };

  r.seed = options.seed;
  const MeasurementRecord single = campaign(options.seed);
  r.survived_rounds = single.survived_count();
  r.all_survived = single.all_survived();
  r.minus_rounds = single.minus_count();
  if (r.survived_rounds > 0) {
    const EstimationResult est = estimate_fixed_n(single);
    r.omega_hat = est.delta_h_hat;
    r.omega_ci95 = est.ci95_delta_h;
  }

  r.ensemble = options.ensemble;
  double omega_sum = 0.0;
  std::size_t estimates = 0;
  std::size_t all_survived = 0;
  std::size_t rounds_survived = 0;
  for (std::size_t k = 0; k < options.ensemble; ++k) {
    const MeasurementRecord rec = campaign(derive_seed(options.seed, k));
    rounds_survived += rec.survived_count();
    if (rec.all_survived()) ++all_survived;
    if (rec.survived_count() > 0) {
      omega_sum += estimate_fixed_n(rec).delta_h_hat;
      ++estimates;
    }
  }
  if (options.ensemble > 0) {
    r.mean_omega_hat = estimates ? omega_sum / static_cast<double>(estimates) : 0.0;
    r.all_survived_fraction = static_cast<double>(all_survived) / static_cast<double>(options.ensemble);
    r.round_survival_fraction =
        static_cast<double>(rounds_survived) / static_cast<double>(options.ensemble * r.q_rounds);
  }

  r.checks.push_back(within("p_all_exact", r.p_all_exact, 0.985, 0.995));
  r.checks.push_back(within("p_all_second_order", r.p_all_second_order, 0.985, 0.995));
  r.checks.push_back(within("|p_all_exact - asymptote|", std::abs(r.p_all_exact - r.asymptote), 0.0, 1e-3));
  r.checks.push_back(
      within("|p_all_second_order - asymptote|", std::abs(r.p_all_second_order - r.asymptote), 0.0, 1e-3));
  if (options.ensemble > 0) {
    r.checks.push_back(within("mean Omega/delta estimate", r.mean_omega_hat, 0.95, 1.05));
    r.checks.push_back(within("fraction of campaigns fully surviving", r.all_survived_fraction, 0.975, 0.998));
  }
  return r;
}

nlohmann::json to_json(const PaperCheckReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {
      {"scenario",
       {{"omega", 1.0},
        {"delta", 1.0},
        {"tau", r.tau},
        {"nu", r.nu},
        {"pi_minus_nu", r.pi_minus_nu},
        {"q_rounds", r.q_rounds},
        {"n_cycles", r.n_cycles}}},
      {"analytic",
       {{"phi_second_order", r.phi_second_order},
        {"phi_exact", r.phi_exact},
        {"deficit_per_cycle_exact", r.deficit_exact},
        {"deficit_per_cycle_second_order", r.deficit_second_order},
        {"p_all_exact", r.p_all_exact},
        {"p_all_second_order", r.p_all_second_order},
        {"asymptote", r.asymptote},
        {"validity", to_json(r.margin)}}},
      {"single_campaign",
       {{"seed", r.seed},
        {"survived_rounds", r.survived_rounds},
        {"all_survived", r.all_survived},
        {"minus_rounds", r.minus_rounds},
        {"omega_over_delta", r.omega_hat},
        {"ci95", nlohmann::json::array({r.omega_ci95.lower, r.omega_ci95.upper})}}},
      {"ensemble",
       {{"campaigns", r.ensemble},
        {"mean_omega_over_delta", r.mean_omega_hat},
        {"all_survived_fraction", r.all_survived_fraction},
        {"round_survival_fraction", r.round_survival_fraction}}},
      {"checks", checks},
      {"passed", r.passed()}};
}

std::string to_text(const PaperCheckReport& r) {
  std::ostringstream o;
  o << "two-level check: Omega = delta = 1, tau = " << fmt("%.3g", r.tau) << ", pi - nu = "
    << fmt("%.3g", r.pi_minus_nu) << ", Q = " << r.q_rounds << ", N = " << fmt("%.6g", r.n_cycles) << "\n";
  o << "  phi per cycle        exact " << fmt("%.10g", r.phi_exact) << "   second order "
    << fmt("%.10g", r.phi_second_order) << "\n";
  o << "  loss per cycle       exact " << fmt("%.10g", r.deficit_exact) << "   second order "
    << fmt("%.10g", r.deficit_second_order) << "\n";
  o << "  P_e^{NQ}             exact " << fmt("%.6f", r.p_all_exact) << "   second order "
    << fmt("%.6f", r.p_all_second_order) << "   exp(-Q/SNR) " << fmt("%.6f", r.asymptote) << "\n";
  o << "  validity margin      " << fmt("%.6g", r.margin.margin) << "  (tau*omega_bar = "
    << fmt("%.3g", r.margin.tau_omega_bar) << ")\n";
  o << "  campaign seed " << r.seed << ": " << r.survived_rounds << "/" << r.q_rounds << " rounds survived, "
    << r.minus_rounds << " minus outcomes, Omega/delta = " << fmt("%.4f", r.omega_hat) << " [95% CI "
    << fmt("%.4f", r.omega_ci95.lower) << ", " << fmt("%.4f", r.omega_ci95.upper) << "]\n";
  o << "  " << r.ensemble << " campaigns: mean Omega/delta = " << fmt("%.4f", r.mean_omega_hat)
    << ", fully surviving fraction = " << fmt("%.4f", r.all_survived_fraction)
    << ", round survival = " << fmt("%.6f", r.round_survival_fraction) << "\n";
  for (const auto& c : r.checks) o << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
  return o.str();
}

}  // namespace zeno
