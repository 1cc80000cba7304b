#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>

#include "zeno/error.hpp"
#include "zeno/scan.hpp"

using namespace zeno;
using nlohmann::json;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

ScanConfig small_config() {
  ScanConfig c = ScanConfig::defaults();
  c.tau_grid = log_spaced(1e-6, 1e-2, 5);
  c.pi_minus_nu_grid = log_spaced(1e-4, 1.0, 4);
  return c;
}

}  // namespace

TEST_SUITE("scan") {

TEST_CASE("default grid contains the reference point and both regimes") {
  const auto config = ScanConfig::defaults();
  CHECK(config.tau_grid.size() == 25);
  CHECK(config.pi_minus_nu_grid.size() == 25);
  CHECK(config.tau_grid.front() == 1e-9);
  CHECK(config.tau_grid.back() == 1e-1);
  CHECK(config.q_rounds == 100);
  const auto cells = run_scan(config);
  REQUIRE(cells.size() == 625);

  const ScanCell* ref = nullptr;
  bool agree = false, disagree = false;
  for (const auto& c : cells) {
    if (std::abs(std::log10(c.tau) + 8) < 1e-9 && std::abs(std::log10(c.pi_minus_nu) + 4) < 1e-9) ref = &c;
    const double diff = std::abs(c.p_all_exact - c.p_all_second_order);
    if (c.margin >= 10 && diff < 1e-3) agree = true;
    if (c.margin < 1 && diff > 0.01) disagree = true;
  }
  REQUIRE(ref != nullptr);
  CHECK(ref->margin == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ref->p_all_exact == doctest::Approx(0.99).epsilon(0.005));
  CHECK(ref->p_all_second_order == doctest::Approx(0.99).epsilon(0.005));
  CHECK(agree);
  CHECK(disagree);
}

TEST_CASE("decoupled model gives certain survival") {
  ScanConfig c = ScanConfig::defaults();
  c.model = TwoLevelModel{0.0, 1.0};
  c.tau_grid = {1e-3};
  c.pi_minus_nu_grid = {0.5};
  const auto cells = run_scan(c);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].p_all_exact == 1.0);
  CHECK(cells[0].p_all_second_order == 1.0);
  CHECK(cells[0].n_used == 1.0);
}

TEST_CASE("count rule") {
  ScanConfig c = small_config();
  c.count_rule = CountRule::InversePhi;
  const auto inv = run_scan(c);
  c.count_rule = CountRule::QuarterTurn;
  const auto quarter = run_scan(c);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const double phi = std::abs(-inv[i].tau * inv[i].tau * std::sin(inv[i].nu) / 4);
    CHECK(inv[i].n_used == std::max(1.0, std::ceil(1.0 / phi)));
    CHECK(quarter[i].n_used == std::max(1.0, std::round(std::numbers::pi / 4 / phi)));
  }
}

TEST_CASE("CSV has one finite row per cell and round-trips doubles") {
  const auto config = small_config();
  const auto cells = run_scan(config);
  std::ostringstream out;
  write_scan_csv(out, cells);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 1 + config.tau_grid.size() * config.pi_minus_nu_grid.size());
  CHECK(lines[0] == "tau,nu,pi_minus_nu,margin,snr,n_used,p_all_exact,p_all_second_order,abs_diff");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    REQUIRE(f.size() == 9);
    for (const auto& x : f) CHECK(std::isfinite(std::strtod(x.c_str(), nullptr)));
    const auto& c = cells[i - 1];
    CHECK(std::strtod(f[0].c_str(), nullptr) == c.tau);
    CHECK(std::strtod(f[1].c_str(), nullptr) == c.nu);
    CHECK(std::strtod(f[6].c_str(), nullptr) == c.p_all_exact);
    CHECK(std::strtod(f[8].c_str(), nullptr) == std::abs(c.p_all_exact - c.p_all_second_order));
  }
}

TEST_CASE("cells are in grid order with tau outermost") {
  const auto config = small_config();
  const auto cells = run_scan(config);
  const auto ng = config.pi_minus_nu_grid.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].tau == config.tau_grid[i / ng]);
    CHECK(cells[i].pi_minus_nu == config.pi_minus_nu_grid[i % ng]);
  }
}

TEST_CASE("output does not depend on the number of threads") {
  auto config = ScanConfig::defaults();
  config.threads = 1;
  std::ostringstream one;
  write_scan_csv(one, run_scan(config));
  for (unsigned t : {2u, 3u, 8u}) {
    config.threads = t;
    std::ostringstream many;
    write_scan_csv(many, run_scan(config));
    CHECK(many.str() == one.str());
  }
}

TEST_CASE("probabilities stay in range") {
  for (const auto& c : run_scan(ScanConfig::defaults())) {
    CHECK(c.p_all_exact >= 0.0);
    CHECK(c.p_all_exact <= 1.0);
    CHECK(c.p_all_second_order >= 0.0);
    CHECK(c.p_all_second_order <= 1.0);
    CHECK(c.margin >= 0.0);
  }
}

TEST_CASE("heatmaps carry one rectangle per cell") {
  const auto config = small_config();
  const auto cells = run_scan(config);
  for (auto panel : {HeatmapPanel::Exact, HeatmapPanel::SecondOrder}) {
    std::ostringstream out;
    write_heatmap_svg(out, config, cells, panel);
    const std::string svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_of(svg, "<title>") >= cells.size());
  }
}

TEST_CASE("color ramp endpoints") {
  CHECK(ramp_color(0.0) == "#440154");
  CHECK(ramp_color(1.0) == "#fde725");
  CHECK(ramp_color(-1.0) == ramp_color(0.0));
  CHECK(ramp_color(2.0) == ramp_color(1.0));
}

TEST_CASE("config parsing") {
  const auto c = parse_scan_config(json::parse(R"({
    "model": {"type": "continuum", "omegas": [1], "couplings": [[2, 0]]},
    "tau_grid": {"min": 1e-6, "max": 1e-3, "steps": 4},
    "pi_minus_nu_grid": [0.1, 0.01],
    "q_rounds": 10, "mode": "exact", "n_rule": "inverse_phi", "threads": 2,
    "out_csv": "a.csv", "out_svg_exact": "a.svg", "out_svg_2nd": "b.svg"})"));
  CHECK(std::holds_alternative<ContinuumModel>(c.model));
  CHECK(c.tau_grid.size() == 4);
  CHECK(c.tau_grid[3] == 1e-3);
  CHECK(c.pi_minus_nu_grid == std::vector<double>{0.1, 0.01});
  CHECK(c.q_rounds == 10);
  CHECK(c.mode == ScanMode::Exact);
  CHECK(c.count_rule == CountRule::InversePhi);
  CHECK(c.threads == 2);
  CHECK(c.out_svg_second_order == "b.svg");

  const auto d = parse_scan_config(json::object());
  CHECK(d.tau_grid == ScanConfig::defaults().tau_grid);
}

TEST_CASE("config errors name the field") {
  const char* bad[][2] = {
      {R"({"tau_grid": {"min": 1e-6, "max": 1e-3, "steps": 0}})", "tau_grid.steps"},
      {R"({"tau_grid": []})", "tau_grid"},
      {R"({"pi_minus_nu_grid": [4.0]})", "pi_minus_nu_grid[0]"},
      {R"({"q_rounds": 0})", "q_rounds"},
      {R"({"mode": "fast"})", "mode"},
      {R"({"n_rule": 3})", "n_rule"},
  };
  for (const auto& [text, field] : bad) {
    try {
      parse_scan_config(json::parse(text));
      FAIL("expected InvalidConfig for " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  }
}

}  // TEST_SUITE
