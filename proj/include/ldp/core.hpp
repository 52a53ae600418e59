#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ldp {

// Privacy budget epsilon in nats. Rejects non-positive and non-finite
// values at construction; e^epsilon is computed once and cached.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double exp_epsilon() const noexcept { return exp_epsilon_; }

 private:
  double epsilon_;
  double exp_epsilon_;
};

// Input domain {0, ..., d-1}. d >= 2: with a single value no randomizer can
// keep its own support more likely than another's.
class Domain {
 public:
  explicit Domain(std::uint64_t size);

  std::uint64_t size() const noexcept { return size_; }

 private:
  std::uint64_t size_;
};

// Estimator constants of a pure protocol: a report votes for its own input
// with probability p_star and for any other fixed value with probability
// q_star. Requires 0 < q_star < p_star <= 1.
class PureParams {
 public:
  PureParams(double p_star, double q_star);

  double p_star() const noexcept { return p_star_; }
  double q_star() const noexcept { return q_star_; }

 private:
  double p_star_;
  double q_star_;
};

// One protocol output per user. The variant must match the protocol that
// produced it; aggregation rejects mixtures.
struct CategoricalReport {
  std::uint64_t value = 0;
};

struct HistogramReport {
  std::vector<double> values;
};

struct BitVectorReport {
  std::vector<std::uint8_t> bits;  // one 0/1 entry per domain value
};

struct HashedReport {
  std::uint64_t seed = 0;   // identifies the hash function used
  std::uint64_t value = 0;  // perturbed hash bucket in [g]
};

using Report =
    std::variant<CategoricalReport, HistogramReport, BitVectorReport,
                 HashedReport>;

// Estimated counts per domain value, in units of users. Values may be
// negative: the estimator is unbiased, not truncated.
struct EstimateVector {
  std::vector<double> estimates;
  std::uint64_t n = 0;
};

struct VariantMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unbiased count estimates from per-value support counts:
//   estimates[i] = (support_counts[i] - n * q_star) / (p_star - q_star)
// No clamping is applied.
EstimateVector estimate(const std::vector<std::uint64_t>& support_counts,
                        std::uint64_t n, const PureParams& params);

// Variance of one estimated count when the true frequency is f_i:
//   n * q*(1-q*)/(p*-q*)^2 + n * f_i * (1-p*-q*)/(p*-q*)
double exact_variance(const PureParams& params, double n, double f_i);

// Per-user variance factor in the f_i -> 0 limit: q*(1-q*)/(p*-q*)^2.
double var_star(const PureParams& params);

// Optional post-processing: clamps estimates into [0, n]. Kept separate from
// estimate() because unbiasedness checks need the raw values.
EstimateVector clamp_estimates(EstimateVector ev);

}  // namespace ldp
