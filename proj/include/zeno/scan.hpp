#pragma once

// (tau, pi - nu) grid scans of the campaign survival probability, with CSV
// and SVG heatmap emitters.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zeno/models.hpp"

namespace zeno {

enum class ScanMode { Exact, SecondOrder, Both };

/// How N is picked for each cell from the model's true Delta H.
enum class CountRule {
  QuarterTurn,  // choose_n: N |phi| = pi/4
  InversePhi,   // N = ceil(1 / |phi|)
};

struct ScanConfig {
  ModelDescriptor model = TwoLevelModel{1.0, 1.0};
  std::vector<double> tau_grid;
  std::vector<double> pi_minus_nu_grid;
  std::uint64_t q_rounds = 100;
  ScanMode mode = ScanMode::Both;
  CountRule count_rule = CountRule::QuarterTurn;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string out_csv;
  std::string out_svg_exact;
  std::string out_svg_second_order;

  /// tau in [1e-9, 1e-1] and pi - nu in [1e-6, 1], 25 log steps each.
  static ScanConfig defaults();
  /// Throws InvalidConfig on violated invariants.
  void validate() const;
};

/// n points from lo to hi, evenly spaced in log10.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// Missing fields keep their defaults. Grids are either explicit lists or
/// {"min": f, "max": f, "steps": n}. Throws InvalidConfig naming the field.
ScanConfig parse_scan_config(const nlohmann::json& j);

struct ScanCell {
  double tau = 0.0;
  double nu = 0.0;
  double pi_minus_nu = 0.0;
  double margin = 0.0;
  double snr = 0.0;
  double n_used = 1.0;
  double p_all_exact = 1.0;
  double p_all_second_order = 1.0;
};

/// Cells in grid order (tau outer, pi - nu inner). Cells are evaluated on a
/// worker pool; the result does not depend on the number of threads.
std::vector<ScanCell> run_scan(const ScanConfig& config);

void write_scan_csv(std::ostream& out, std::span<const ScanCell> cells);

enum class HeatmapPanel { Exact, SecondOrder };

void write_heatmap_svg(std::ostream& out, const ScanConfig& config, std::span<const ScanCell> cells,
                       HeatmapPanel panel);

/// Fixed 8-stop ramp over [0, 1] as "#rrggbb".
std::string ramp_color(double p);

}  // namespace zeno
