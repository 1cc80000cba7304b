#include "zeno/commands.hpp"

#include <fstream>
#include <ostream>

#include "zeno/error.hpp"
#include "zeno/estimator.hpp"
#include "zeno/model_io.hpp"
#include "zeno/paper_check.hpp"
#include "zeno/scan.hpp"

namespace zeno {

using nlohmann::json;

namespace {

bool write_file(const std::string& path, std::ostream& err, const auto& writer) {
  std::ofstream f(path);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  writer(f);
  return static_cast<bool>(f);
}

}  // namespace

int cmd_scan(const ScanPaths& paths, std::ostream& out, std::ostream& err) {
  ScanConfig config;
  try {
    std::ifstream in(paths.config);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open " + paths.config);
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::InvalidConfig, paths.config + ": " + e.what());
    }
    config = parse_scan_config(j);
    if (!paths.out_csv.empty()) config.out_csv = paths.out_csv;
    if (!paths.out_svg_exact.empty()) config.out_svg_exact = paths.out_svg_exact;
    if (!paths.out_svg_second_order.empty()) config.out_svg_second_order = paths.out_svg_second_order;
    if (paths.threads) config.threads = *paths.threads;
    if (config.out_csv.empty()) throw Error(ErrorKind::InvalidConfig, "field 'out_csv': no output path");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto cells = run_scan(config);
  if (!write_file(config.out_csv, err, [&](std::ostream& f) { write_scan_csv(f, cells); })) return kExitUsage;
  const bool exact = config.mode != ScanMode::SecondOrder;
  const bool second = config.mode != ScanMode::Exact;
  if (exact && !config.out_svg_exact.empty() &&
      !write_file(config.out_svg_exact, err,
                  [&](std::ostream& f) { write_heatmap_svg(f, config, cells, HeatmapPanel::Exact); }))
    return kExitUsage;
  if (second && !config.out_svg_second_order.empty() &&
      !write_file(config.out_svg_second_order, err,
                  [&](std::ostream& f) { write_heatmap_svg(f, config, cells, HeatmapPanel::SecondOrder); }))
    return kExitUsage;
  out << "scanned " << cells.size() << " cells (" << config.tau_grid.size() << " x "
      << config.pi_minus_nu_grid.size() << ")\n";
  return kExitOk;
}

int cmd_paper_check(const PaperCheckArgs& args, std::ostream& out, std::ostream& err) {
  const PaperCheckReport report = run_paper_check({args.seed, args.ensemble});
  const std::string dumped = to_json(report).dump(2) + "\n";
  if (args.json_stdout)
    out << dumped;
  else
    out << to_text(report);
  if (!args.out_json.empty() && !write_file(args.out_json, err, [&](std::ostream& f) { f << dumped; }))
    return kExitUsage;
  return report.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const ModelDescriptor model = load_model_file(args.model_file);
    const GenericModel generic = build_generic(model);
    EstimationResult result = estimate_adaptive(generic, args.tau, args.nu, args.budget, args.seed);
    result.derived = derive_coupling(model, result.delta_h_hat);
    const ModelSummary summary = summarize(generic);

    json j = to_json(result);
    j["validity"] = to_json(validity_margin(args.tau, args.nu, summary.omega_bar));
    j["config"] = {{"model", model_to_json(model)},
                   {"tau", args.tau},
                   {"nu", args.nu},
                   {"budget", args.budget},
                   {"seed", args.seed}};
    out << j.dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_model_info(const std::string& model_file, std::ostream& out, std::ostream& err) {
  try {
    const ModelSummary s = summarize(build_generic(load_model_file(model_file)));
    out << to_json(s).dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace zeno
