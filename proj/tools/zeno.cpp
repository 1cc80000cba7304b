#include <iostream>

#include <CLI11.hpp>

#include "zeno/commands.hpp"
#include "zeno/error.hpp"
#include "zeno/paper_check.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zeno-protected ancilla measurement simulator"};
  app.require_subcommand(1);

  zeno::ScanPaths scan;
  unsigned threads = 0;
  auto* scan_cmd = app.add_subcommand("scan", "Grid scan of P_e^{NQ} over (tau, pi - nu)");
  scan_cmd->add_option("--config", scan.config, "Scan configuration JSON")->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--out-csv", scan.out_csv, "CSV output path");
  scan_cmd->add_option("--out-svg-exact", scan.out_svg_exact, "Heatmap from exact cycle amplitudes");
  scan_cmd->add_option("--out-svg-2nd", scan.out_svg_second_order, "Heatmap from the second-order expansion");
  auto* threads_opt = scan_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  zeno::PaperCheckArgs check{zeno::PaperCheckOptions::kDefaultSeed, 1000};
  auto* check_cmd = app.add_subcommand("paper-check", "Run the reference two-level scenario");
  check_cmd->add_option("--seed", check.seed, "Campaign seed");
  check_cmd->add_option("--ensemble", check.ensemble, "Campaigns pooled for sampled statistics");
  check_cmd->add_flag("--json", check.json_stdout, "Print the JSON report instead of text");
  check_cmd->add_option("--out-json", check.out_json, "Also write the JSON report here");

  zeno::EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Adaptive estimation of Delta H_ee");
  est_cmd->add_option("--model", est.model_file, "Model JSON")->required();
  est_cmd->add_option("--tau", est.tau, "Time between projective measurements")->required();
  est_cmd->add_option("--nu", est.nu, "Controlled-M phase, in (0, pi]")->required();
  est_cmd->add_option("--budget", est.budget, "Total number of rounds");
  est_cmd->add_option("--seed", est.seed, "RNG seed");

  std::string info_model;
  auto* info_cmd = app.add_subcommand("model-info", "Print dim, Delta H_ee, omega_bar and energy shift");
  info_cmd->add_option("--model", info_model, "Model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return zeno::kExitUsage;
  }

  try {
    if (*scan_cmd) {
      if (threads_opt->count()) scan.threads = threads;
      return zeno::cmd_scan(scan, std::cout, std::cerr);
    }
    if (*check_cmd) return zeno::cmd_paper_check(check, std::cout, std::cerr);
    if (*est_cmd) return zeno::cmd_estimate(est, std::cout, std::cerr);
    if (*info_cmd) return zeno::cmd_model_info(info_model, std::cout, std::cerr);
  } catch (const zeno::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return zeno::kExitUsage;
  }
  return zeno::kExitUsage;
}
