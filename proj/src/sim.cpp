#include "ldp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace ldp {
namespace {

// Stream id for dataset generation, distinct from every user index.
constexpr std::uint64_t kDataStream = ~std::uint64_t{0};

std::string format_zipf(double s) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "zipf:%g", s);
  return buffer;
}

}  // namespace

Distribution Distribution::zipf(double s) {
  if (!(s > 0.0)) {
    throw std::invalid_argument("zipf exponent must be positive");
  }
  Distribution dist;
  dist.kind = DistKind::kZipf;
  dist.zipf_s = s;
  return dist;
}

Distribution Distribution::uniform() {
  Distribution dist;
  dist.kind = DistKind::kUniform;
  return dist;
}

Distribution Distribution::from_file(std::string path) {
  if (path.empty()) {
    throw std::invalid_argument("dataset path is empty");
  }
  Distribution dist;
  dist.kind = DistKind::kFromFile;
  dist.path = std::move(path);
  return dist;
}

std::string Distribution::to_string() const {
  switch (kind) {
    case DistKind::kZipf:
      return format_zipf(zipf_s);
    case DistKind::kUniform:
      return "uniform";
    case DistKind::kFromFile:
      return "file:" + path;
  }
  return "unknown";
}

std::optional<Distribution> Distribution::parse(std::string_view text) {
  if (text == "uniform") {
    return uniform();
  }
  if (text.rfind("zipf:", 0) == 0) {
    const std::string_view number = text.substr(5);
    double s = 0.0;
    const auto* end = number.data() + number.size();
    const auto [ptr, ec] = std::from_chars(number.data(), end, s);
    if (ec != std::errc{} || ptr != end || !(s > 0.0)) {
      return std::nullopt;
    }
    return zipf(s);
  }
  if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    return from_file(std::string(text.substr(5)));
  }
  return std::nullopt;
}

FileFormatError::FileFormatError(const std::string& message,
                                 std::size_t line_number)
    : std::runtime_error(message), line(line_number) {}

std::vector<std::uint64_t> gen_zipf(std::uint64_t d, double s, std::uint64_t n,
                                    std::uint64_t seed) {
  Domain domain(d);
  if (!(s > 0.0)) {
    throw std::invalid_argument("zipf exponent must be positive");
  }
  // P(value i) = (1/(i+1)^s) / sum_{k=1..d} 1/k^s, sampled by inverting the
  // cumulative distribution.
  std::vector<double> cumulative(d);
  double total = 0.0;
  for (std::uint64_t i = 0; i < d; ++i) {
    total += std::pow(static_cast<double>(i + 1), -s);
    cumulative[i] = total;
  }
  for (std::uint64_t i = 0; i < d; ++i) {
    cumulative[i] /= total;
  }
  cumulative.back() = 1.0;

  Rng rng(seed);
  std::vector<std::uint64_t> values(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    const double u = rng.uniform();
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    values[j] = static_cast<std::uint64_t>(it - cumulative.begin());
  }
  return values;
}

std::vector<std::uint64_t> gen_uniform(std::uint64_t d, std::uint64_t n,
                                       std::uint64_t seed) {
  Domain domain(d);
  Rng rng(seed);
  std::vector<std::uint64_t> values(n);
  for (std::uint64_t j = 0; j < n; ++j) {
    values[j] = rng.below(domain.size());
  }
  return values;
}

std::vector<std::uint64_t> ingest_values(const std::string& path,
                                         std::uint64_t d) {
  std::ifstream input(path);
  if (!input) {
    throw FileFormatError("cannot open dataset file: " + path, 0);
  }
  std::vector<std::uint64_t> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::uint64_t value = 0;
    const char* begin = line.data();
    const char* end = begin + line.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || line.empty()) {
      throw FileFormatError(path + ":" + std::to_string(line_number) +
                                ": expected one base-10 value per line, got \"" +
                                line + "\"",
                            line_number);
    }
    if (value >= d) {
      throw FileFormatError(path + ":" + std::to_string(line_number) +
                                ": value " + std::to_string(value) +
                                " outside domain of size " + std::to_string(d),
                            line_number);
    }
    values.push_back(value);
  }
  return values;
}

namespace {

// Streaming equivalents of perturb + support_count. Draw order matches the
// report-producing functions exactly, so folding a user is bit-identical to
// aggregating their materialized report.
void fold_user(const ProtocolSpec& spec, std::uint64_t value, Rng& rng,
               std::vector<std::uint64_t>& counts, std::vector<double>& sums) {
  const std::uint64_t d = spec.d();
  switch (spec.kind()) {
    case ProtocolKind::kDE:
      ++counts[grr_sample(value, d, spec.p(), rng)];
      break;
    case ProtocolKind::kSHE: {
      const double scale = 2.0 / spec.epsilon();
      for (std::uint64_t i = 0; i < d; ++i) {
        sums[i] += (i == value ? 1.0 : 0.0) + laplace(scale, rng);
      }
      break;
    }
    case ProtocolKind::kTHE: {
      const double scale = 2.0 / spec.epsilon();
      const double theta = spec.theta();
      for (std::uint64_t i = 0; i < d; ++i) {
        const double noisy = (i == value ? 1.0 : 0.0) + laplace(scale, rng);
        counts[i] += noisy > theta ? 1 : 0;
      }
      break;
    }
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE: {
      const double p = spec.p();
      const double q = spec.q();
      for (std::uint64_t i = 0; i < d; ++i) {
        counts[i] += rng.bernoulli(i == value ? p : q) ? 1 : 0;
      }
      break;
    }
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH: {
      const std::uint64_t g = spec.g();
      const std::uint64_t seed = rng();
      const std::uint64_t hashed = lh_hash(seed, value, g);
      const std::uint64_t reported = grr_sample(hashed, g, spec.p(), rng);
      for (std::uint64_t v = 0; v < d; ++v) {
        counts[v] += lh_hash(seed, v, g) == reported ? 1 : 0;
      }
      break;
    }
  }
}

std::vector<std::uint64_t> make_dataset(const ExperimentConfig& config,
                                        std::uint32_t trial_index) {
  const std::uint64_t seed =
      derive_seed(config.master_seed, trial_index, kDataStream);
  switch (config.dist.kind) {
    case DistKind::kZipf:
      return gen_zipf(config.d, config.dist.zipf_s, config.n, seed);
    case DistKind::kUniform:
      return gen_uniform(config.d, config.n, seed);
    case DistKind::kFromFile:
      return ingest_values(config.dist.path, config.d);
  }
  throw std::logic_error("unknown distribution kind");
}

TrialResult run_trial_on_data(const ExperimentConfig& config,
                              std::uint32_t trial_index,
                              const std::vector<std::uint64_t>& data) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t n = data.size();
  if (n < 1) {
    throw std::invalid_argument("a trial needs at least one report");
  }
  const ProtocolSpec spec(config.protocol, PrivacyBudget(config.epsilon),
                          Domain(config.d), {config.theta, config.g});

  TrialResult result;
  result.true_counts.assign(config.d, 0);
  for (const std::uint64_t v : data) {
    ++result.true_counts[v];
  }

  std::vector<std::uint64_t> counts;
  std::vector<double> sums;
  if (spec.kind() == ProtocolKind::kSHE) {
    sums.assign(config.d, 0.0);
  } else {
    counts.assign(config.d, 0);
  }
  for (std::uint64_t j = 0; j < n; ++j) {
    Rng rng(derive_seed(config.master_seed, trial_index, j));
    fold_user(spec, data[j], rng, counts, sums);
  }

  if (spec.kind() == ProtocolKind::kSHE) {
    result.estimates = EstimateVector{std::move(sums), n};
  } else {
    result.estimates = estimate(counts, n, spec.pure_params());
  }
  result.avg_sq_error = avg_squared_error(result.estimates, result.true_counts);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config,
                      std::uint32_t trial_index) {
  if (config.dist.kind != DistKind::kFromFile && config.n < 1) {
    throw std::invalid_argument("a trial needs at least one report");
  }
  return run_trial_on_data(config, trial_index, make_dataset(config, trial_index));
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config) {
  if (config.repetitions < 1) {
    throw std::invalid_argument("experiments need at least one repetition");
  }
  // A file-backed dataset is identical across trials; load it once.
  std::vector<std::uint64_t> shared_data;
  const bool from_file = config.dist.kind == DistKind::kFromFile;
  if (from_file) {
    shared_data = ingest_values(config.dist.path, config.d);
  }

  const auto one_trial = [&](std::uint32_t t) {
    return from_file ? run_trial_on_data(config, t, shared_data)
                     : run_trial(config, t);
  };

  std::vector<TrialResult> results(config.repetitions);
  unsigned workers = config.threads != 0 ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, config.repetitions);
  if (workers <= 1) {
    for (std::uint32_t t = 0; t < config.repetitions; ++t) {
      results[t] = one_trial(t);
    }
    return results;
  }

  // Whole trials are the unit of parallelism: every trial is seeded by its
  // own index, so the outcome cannot depend on the worker count.
  std::atomic<std::uint32_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::uint32_t t = next.fetch_add(1);
      if (t >= config.repetitions) {
        return;
      }
      try {
        results[t] = one_trial(t);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  for (std::thread& thread : pool) {
    thread.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
  return results;
}

double avg_squared_error(const EstimateVector& estimates,
                         const std::vector<std::uint64_t>& true_counts) {
  if (estimates.estimates.size() != true_counts.size() ||
      true_counts.empty()) {
    throw std::invalid_argument("estimate/truth length mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < true_counts.size(); ++i) {
    const double diff =
        estimates.estimates[i] - static_cast<double>(true_counts[i]);
    total += diff * diff;
  }
  return total / static_cast<double>(true_counts.size());
}

double topk_error(const TrialResult& result, std::uint64_t k) {
  const std::uint64_t d = result.true_counts.size();
  if (k < 1 || k > d) {
    throw std::invalid_argument("top-k needs 1 <= k <= d");
  }
  std::vector<std::uint64_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::uint64_t a, std::uint64_t b) {
                      if (result.true_counts[a] != result.true_counts[b]) {
                        return result.true_counts[a] > result.true_counts[b];
                      }
                      return a < b;  // ties toward the smaller index
                    });
  double total = 0.0;
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t idx = order[i];
    const double diff = result.estimates.estimates[idx] -
                        static_cast<double>(result.true_counts[idx]);
    total += diff * diff;
  }
  return total / static_cast<double>(k);
}

std::pair<std::uint64_t, std::uint64_t> tp_fp(const TrialResult& result,
                                              double threshold) {
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("threshold must be non-negative");
  }
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < result.true_counts.size(); ++i) {
    if (result.estimates.estimates[i] > threshold) {
      if (static_cast<double>(result.true_counts[i]) > threshold) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  return {tp, fp};
}

}  // namespace ldp
