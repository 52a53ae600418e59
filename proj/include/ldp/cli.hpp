#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldp/sim.hpp"

namespace ldp::cli {

enum class Format { kCsv, kJson };
enum class Precision { kDefault, kFull };

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct TableOptions {
  std::vector<double> epsilons = {0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> ds = {2, 32, 1024};
  Format format = Format::kCsv;
  Precision precision = Precision::kDefault;  // default prints 2 decimals
};

struct BenchOptions {
  ExperimentConfig config;
  Format format = Format::kCsv;
  Precision precision = Precision::kDefault;
};

struct PrivacyCheckOptions {
  ProtocolKind protocol = ProtocolKind::kDE;
  double epsilon = 1.0;
  std::uint64_t d = 4;
  Format format = Format::kCsv;
};

struct ThresholdOptions {
  ProtocolKind protocol = ProtocolKind::kOLH;
  double epsilon = 1.0;
  std::uint64_t d = 2;
  std::uint64_t n = 1;
  double alpha = 0.05;
  std::optional<double> theta;  // THE only
  bool with_split_ratio = false;
  Format format = Format::kCsv;
};

// Per-user analytic variance for every (protocol, epsilon) pair, one row
// per combination; DE expands over the d grid.
int cmd_table(const TableOptions& options, std::ostream& out);

// One row per repetition plus a summary row. Timing goes to diag; stdout is
// byte-identical across reruns and thread counts.
int cmd_bench(const BenchOptions& options, std::ostream& out,
              std::ostream& diag);

// Exhaustive likelihood-ratio check; exit code 1 on FAIL.
int cmd_privacy_check(const PrivacyCheckOptions& options, std::ostream& out,
                      std::ostream& diag);

// Significance threshold, its per-sqrt(n) coefficient, and optionally the
// budget-vs-population split ratio.
int cmd_threshold(const ThresholdOptions& options, std::ostream& out);

// Full argument parsing and dispatch. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ldp::cli
