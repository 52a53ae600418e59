#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldp/protocols.hpp"

namespace ldp {

enum class DistKind { kZipf, kUniform, kFromFile };

struct Distribution {
  DistKind kind = DistKind::kZipf;
  double zipf_s = 1.1;  // Zipf exponent, > 0
  std::string path;     // kFromFile only

  static Distribution zipf(double s);
  static Distribution uniform();
  static Distribution from_file(std::string path);

  // "zipf:<s>", "uniform", "file:<path>"
  std::string to_string() const;
  static std::optional<Distribution> parse(std::string_view text);
};

struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::kOLH;
  std::optional<double> theta;     // THE override
  std::optional<std::uint64_t> g;  // OLH override
  double epsilon = 1.0;
  std::uint64_t d = 2;
  std::uint64_t n = 10000;  // ignored for kFromFile (file length wins)
  Distribution dist;
  std::uint64_t master_seed = 0;
  std::uint32_t repetitions = 10;
  std::optional<std::uint64_t> top_k;
  std::optional<double> threshold_alpha;  // derives the cutoff from alpha
  std::optional<double> threshold_value;  // explicit cutoff, wins over alpha
  unsigned threads = 0;                   // 0 = hardware concurrency
};

struct TrialResult {
  std::vector<std::uint64_t> true_counts;  // sums to n
  EstimateVector estimates;
  double avg_sq_error = 0.0;
  // Wall-clock seconds for this trial. Timing is the one field outside the
  // determinism contract; everything else is bit-identical given the config.
  double seconds = 0.0;
};

// Parse error with the 1-based line it occurred on.
struct FileFormatError : std::runtime_error {
  FileFormatError(const std::string& message, std::size_t line_number);
  std::size_t line = 0;
};

// n i.i.d. draws from {0,...,d-1} with P(i) proportional to 1/(i+1)^s
// (rank 1 maps to value 0). Deterministic for a given seed.
std::vector<std::uint64_t> gen_zipf(std::uint64_t d, double s, std::uint64_t n,
                                    std::uint64_t seed);

// n i.i.d. uniform draws from {0,...,d-1}.
std::vector<std::uint64_t> gen_uniform(std::uint64_t d, std::uint64_t n,
                                       std::uint64_t seed);

// Reads one base-10 value per line, each validated into [0, d). Failures
// carry the offending line number.
std::vector<std::uint64_t> ingest_values(const std::string& path,
                                         std::uint64_t d);

// Generates one dataset, perturbs one report per user, aggregates, and
// scores avg_sq_error = (1/d) * sum_i (estimates[i] - true_counts[i])^2.
// Reports are folded into counts as they are produced, never materialized.
// Per-user randomness comes from derive_seed(master_seed, trial_index,
// user_index), so identical configs reproduce bit-identical results.
TrialResult run_trial(const ExperimentConfig& config,
                      std::uint32_t trial_index);

// All repetitions, trials distributed over config.threads workers. Results
// are ordered by trial index and independent of the worker count.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config);

// Mean squared error over the k values with the largest true counts, ties
// broken toward the smaller index.
double topk_error(const TrialResult& result, std::uint64_t k);

// Values estimated above the threshold, split by whether their true count
// is above it (tp) or not (fp).
std::pair<std::uint64_t, std::uint64_t> tp_fp(const TrialResult& result,
                                              double threshold);

// (1/d) * sum_i (estimates[i] - true_counts[i])^2
double avg_squared_error(const EstimateVector& estimates,
                         const std::vector<std::uint64_t>& true_counts);

}  // namespace ldp
