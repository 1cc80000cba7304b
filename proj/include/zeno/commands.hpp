#pragma once

// Command implementations behind the `zeno` executable. Each returns the
// process exit code: 0 success, 1 failed acceptance check, 2 usage or parse
// error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace zeno {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct ScanPaths {
  std::string config;
  std::string out_csv;
  std::string out_svg_exact;
  std::string out_svg_second_order;
  std::optional<unsigned> threads;
};

int cmd_scan(const ScanPaths& paths, std::ostream& out, std::ostream& err);

struct PaperCheckArgs {
  std::uint64_t seed;
  std::size_t ensemble;
  bool json_stdout = false;
  std::string out_json;
};

int cmd_paper_check(const PaperCheckArgs& args, std::ostream& out, std::ostream& err);

struct EstimateArgs {
  std::string model_file;
  double tau = 0.0;
  double nu = 0.0;
  std::size_t budget = 400;
  std::uint64_t seed = 0;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err);

int cmd_model_info(const std::string& model_file, std::ostream& out, std::ostream& err);

}  // namespace zeno
