#include "zeno/scan.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "zeno/error.hpp"
#include "zeno/estimator.hpp"
#include "zeno/model_io.hpp"
#include "zeno/protocol.hpp"

namespace zeno {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, "field '" + field + "': " + why);
}

std::vector<double> parse_grid(const json& j, const std::string& field) {
  if (j.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) invalid(field + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(j[i].get<double>());
    }
    return out;
  }
  if (j.is_object()) {
    for (const char* key : {"min", "max", "steps"})
      if (!j.contains(key)) invalid(field + "." + key, "missing");
    if (!j["min"].is_number()) invalid(field + ".min", "expected a number");
    if (!j["max"].is_number()) invalid(field + ".max", "expected a number");
    if (!j["steps"].is_number_unsigned() || j["steps"].get<std::size_t>() == 0)
      invalid(field + ".steps", "expected a positive integer");
    const double lo = j["min"].get<double>();
    const double hi = j["max"].get<double>();
    if (!(lo > 0.0) || !(hi >= lo)) invalid(field, "need 0 < min <= max");
    return log_spaced(lo, hi, j["steps"].get<std::size_t>());
  }
  invalid(field, "expected a list or {min, max, steps}");
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ScanCell evaluate_cell(const GenericModel& shifted, const SpectralDecomposition& decomp, double delta_h,
                       double omega_bar_value, const ScanConfig& config, double tau, double gap) {
  ScanCell c;
  c.tau = tau;
  c.pi_minus_nu = gap;
  c.nu = std::numbers::pi - gap;
  c.margin = gap / std::sqrt(tau * omega_bar_value);
  if (!std::isfinite(c.margin)) c.margin = std::numeric_limits<double>::max();
  c.snr = snr(c.nu);

  const double phi = std::abs(second_order_phi(tau, c.nu, delta_h));
  if (phi > 0.0) {
    c.n_used = config.count_rule == CountRule::QuarterTurn ? choose_n(tau, c.nu, delta_h)
                                                           : std::max(1.0, std::ceil(1.0 / phi));
  }

  ProtocolParams p;
  p.tau = tau;
  p.nu = c.nu;
  p.n_cycles = c.n_used;
  p.q_rounds = config.q_rounds;
  const CycleAmplitudes cycle = compute_cycle_amplitudes(shifted, decomp, tau, c.nu);
  c.p_all_exact = predicted_survival(p, cycle).p_all;
  c.p_all_second_order = second_order_p_all(tau, c.nu, delta_h, c.n_used, config.q_rounds);
  return c;
}

struct Rgb {
  double r, g, b;
};

// Viridis sampled at 8 evenly spaced points.
constexpr std::array<Rgb, 8> kRamp{{{68, 1, 84},
                                    {70, 50, 127},
                                    {54, 92, 141},
                                    {39, 127, 142},
                                    {31, 161, 135},
                                    {74, 194, 109},
                                    {159, 218, 58},
                                    {253, 231, 37}}};

}  // namespace

ScanConfig ScanConfig::defaults() {
  ScanConfig c;
  c.tau_grid = log_spaced(1e-9, 1e-1, 25);
  c.pi_minus_nu_grid = log_spaced(1e-6, 1.0, 25);
  return c;
}

void ScanConfig::validate() const {
  if (tau_grid.empty()) invalid("tau_grid", "must not be empty");
  if (pi_minus_nu_grid.empty()) invalid("pi_minus_nu_grid", "must not be empty");
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > 0.0) || !std::isfinite(tau_grid[i]))
      invalid("tau_grid[" + std::to_string(i) + "]", "must be positive and finite");
  for (std::size_t i = 0; i < pi_minus_nu_grid.size(); ++i) {
    const double g = pi_minus_nu_grid[i];
    if (!(g > 0.0) || !(g < std::numbers::pi))
      invalid("pi_minus_nu_grid[" + std::to_string(i) + "]", "pi - nu must lie in (0, pi)");
  }
  if (q_rounds < 1) invalid("q_rounds", "must be >= 1");
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ScanConfig parse_scan_config(const json& j) {
  if (!j.is_object()) invalid("<root>", "expected an object");
  ScanConfig c = ScanConfig::defaults();
  if (auto it = j.find("model"); it != j.end()) {
    try {
      c.model = parse_model(*it);
    } catch (const Error& e) {
      invalid("model", e.what());
    }
  }
  if (auto it = j.find("tau_grid"); it != j.end()) c.tau_grid = parse_grid(*it, "tau_grid");
  if (auto it = j.find("pi_minus_nu_grid"); it != j.end())
    c.pi_minus_nu_grid = parse_grid(*it, "pi_minus_nu_grid");
  if (auto it = j.find("q_rounds"); it != j.end()) {
    if (!it->is_number_unsigned()) invalid("q_rounds", "expected a positive integer");
    c.q_rounds = it->get<std::uint64_t>();
  }
  if (auto it = j.find("mode"); it != j.end()) {
    const std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "exact") c.mode = ScanMode::Exact;
    else if (m == "second_order") c.mode = ScanMode::SecondOrder;
    else if (m == "both") c.mode = ScanMode::Both;
    else invalid("mode", "expected exact|second_order|both");
  }
  if (auto it = j.find("n_rule"); it != j.end()) {
    const std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "quarter_turn") c.count_rule = CountRule::QuarterTurn;
    else if (m == "inverse_phi") c.count_rule = CountRule::InversePhi;
    else invalid("n_rule", "expected quarter_turn|inverse_phi");
  }
  if (auto it = j.find("threads"); it != j.end()) {
    if (!it->is_number_unsigned()) invalid("threads", "expected a non-negative integer");
    c.threads = it->get<unsigned>();
  }
  for (auto [key, dst] : {std::pair{"out_csv", &c.out_csv}, std::pair{"out_svg_exact", &c.out_svg_exact},
                          std::pair{"out_svg_2nd", &c.out_svg_second_order}}) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_string()) invalid(key, "expected a path string");
      *dst = it->get<std::string>();
    }
  }
  c.validate();
  return c;
}

std::vector<ScanCell> run_scan(const ScanConfig& config) {
  config.validate();
  const ShiftedModel shifted = shift_energy_zero(build_generic(config.model));
  const SpectralDecomposition decomp = spectral_decompose(shifted.model.hamiltonian());
  const double delta_h = delta_h_ee(shifted.model);
  const double ob = omega_bar(shifted.model);

  const std::size_t nt = config.tau_grid.size();
  const std::size_t ng = config.pi_minus_nu_grid.size();
  std::vector<ScanCell> cells(nt * ng);

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      if (failed) return;
      try {
        cells[k] = evaluate_cell(shifted.model, decomp, delta_h, ob, config, config.tau_grid[k / ng],
                                 config.pi_minus_nu_grid[k % ng]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return cells;
}

void write_scan_csv(std::ostream& out, std::span<const ScanCell> cells) {
  out << "tau,nu,pi_minus_nu,margin,snr,n_used,p_all_exact,p_all_second_order,abs_diff\n";
  for (const auto& c : cells) {
    out << format_g17(c.tau) << ',' << format_g17(c.nu) << ',' << format_g17(c.pi_minus_nu) << ','
        << format_g17(c.margin) << ',' << format_g17(c.snr) << ',' << format_g17(c.n_used) << ','
        << format_g17(c.p_all_exact) << ',' << format_g17(c.p_all_second_order) << ','
        << format_g17(std::abs(c.p_all_exact - c.p_all_second_order)) << '\n';
  }
}

std::string ramp_color(double p) {
  const double x = std::clamp(std::isfinite(p) ? p : 0.0, 0.0, 1.0) * (kRamp.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), kRamp.size() - 2);
  const double f = x - static_cast<double>(i);
  auto lerp = [f](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lerp(kRamp[i].r, kRamp[i + 1].r),
                lerp(kRamp[i].g, kRamp[i + 1].g), lerp(kRamp[i].b, kRamp[i + 1].b));
  return buf;
}

void write_heatmap_svg(std::ostream& out, const ScanConfig& config, std::span<const ScanCell> cells,
                       HeatmapPanel panel) {
  const std::size_t nt = config.tau_grid.size();
  const std::size_t ng = config.pi_minus_nu_grid.size();
  if (cells.size() != nt * ng) throw Error(ErrorKind::InvalidConfig, "cell count does not match the grid");

  constexpr double left = 80, top = 40, plot = 480, bar_w = 20, gap = 30;
  const double cw = plot / static_cast<double>(nt);
  const double ch = plot / static_cast<double>(ng);
  const double width = left + plot + gap + bar_w + 70;
  const double height = top + plot + 60;
  const char* title = panel == HeatmapPanel::Exact ? "P_e^{NQ}, exact cycle amplitudes"
                                                   : "P_e^{NQ}, second-order expansion";

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << " (Q=" << config.q_rounds
      << ")</text>\n";
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t k = 0; k < ng; ++k) {
      const ScanCell& c = cells[i * ng + k];
      const double p = panel == HeatmapPanel::Exact ? c.p_all_exact : c.p_all_second_order;
      // pi - nu grows upwards.
      const double x = left + static_cast<double>(i) * cw;
      const double y = top + plot - static_cast<double>(k + 1) * ch;
      char buf[160];
      std::snprintf(buf, sizeof buf, "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\">",
                    x, y, cw + 0.02, ch + 0.02, ramp_color(p).c_str());
      out << buf << "<title>tau=" << format_g17(c.tau) << " pi-nu=" << format_g17(c.pi_minus_nu)
          << " p=" << format_g17(p) << "</title></rect>\n";
    }
  }
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot << "\" height=\"" << plot
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  char buf[64];
  auto tick = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  out << "<text x=\"" << left << "\" y=\"" << top + plot + 18 << "\">" << tick(config.tau_grid.front())
      << "</text>\n";
  out << "<text x=\"" << left + plot << "\" y=\"" << top + plot + 18 << "\" text-anchor=\"end\">"
      << tick(config.tau_grid.back()) << "</text>\n";
  out << "<text x=\"" << left + plot / 2 << "\" y=\"" << top + plot + 40
      << "\" text-anchor=\"middle\">tau (log scale)</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + plot << "\" text-anchor=\"end\">"
      << tick(config.pi_minus_nu_grid.front()) << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 12 << "\" text-anchor=\"end\">"
      << tick(config.pi_minus_nu_grid.back()) << "</text>\n";
  out << "<text transform=\"translate(" << 20 << "," << top + plot / 2
      << ") rotate(-90)\" text-anchor=\"middle\">pi - nu (log scale)</text>\n";

  const double bx = left + plot + gap;
  constexpr int kBarSteps = 64;
  for (int s = 0; s < kBarSteps; ++s) {
    const double p = (s + 0.5) / kBarSteps;
    const double y = top + plot - (s + 1) * plot / kBarSteps;
    std::snprintf(buf, sizeof buf, "%.3f", y);
    out << "<rect x=\"" << bx << "\" y=\"" << buf << "\" width=\"" << bar_w << "\" height=\""
        << plot / kBarSteps + 0.02 << "\" fill=\"" << ramp_color(p) << "\"/>\n";
  }
  out << "<text x=\"" << bx + bar_w + 4 << "\" y=\"" << top + plot << "\">0</text>\n";
  out << "<text x=\"" << bx + bar_w + 4 << "\" y=\"" << top + 12 << "\">1</text>\n";
  out << "</svg>\n";
}

}  // namespace zeno
