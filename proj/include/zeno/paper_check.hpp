#pragma once

// The reference two-level scenario: Omega = delta = 1, tau = 1e-8,
// pi - nu = 1e-4, Q = 100, N = ceil(1 / |phi|).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeno/estimator.hpp"
#include "zeno/protocol.hpp"

namespace zeno {

struct PaperCheckOptions {
  static constexpr std::uint64_t kDefaultSeed = 2007;
  std::uint64_t seed = kDefaultSeed;
  std::size_t ensemble = 1000;  // campaigns pooled for the sampled statistics
};

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct PaperCheckReport {
  double tau = 0.0;
  double nu = 0.0;
  double pi_minus_nu = 0.0;
  std::uint64_t q_rounds = 0;
  double n_cycles = 0.0;
  double phi_second_order = 0.0;
  double phi_exact = 0.0;
  double deficit_exact = 0.0;  // per cycle, equal-weight ancilla
  double deficit_second_order = 0.0;
  double p_all_exact = 0.0;
  double p_all_second_order = 0.0;
  double asymptote = 0.0;
  ValidityMargin margin;

  std::uint64_t seed = 0;
  std::size_t survived_rounds = 0;
  bool all_survived = false;
  std::size_t minus_rounds = 0;
  double omega_hat = 0.0;  // in units of delta
  Interval omega_ci95;

  std::size_t ensemble = 0;
  double mean_omega_hat = 0.0;
  double all_survived_fraction = 0.0;    // campaigns in which all N Q projections found |e>
  double round_survival_fraction = 0.0;  // pooled over rounds

  std::vector<CheckLine> checks;
  bool passed() const noexcept;
};

PaperCheckReport run_paper_check(const PaperCheckOptions& options = {});

nlohmann::json to_json(const PaperCheckReport& report);
std::string to_text(const PaperCheckReport& report);

}  // namespace zeno
