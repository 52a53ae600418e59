#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "ldp/core.hpp"
#include "ldp/rng.hpp"

namespace ldp {

enum class ProtocolKind { kDE, kSHE, kTHE, kSUE, kOUE, kBLH, kOLH };

// Lower-case identifiers used by the CLI: de, she, the, sue, oue, blh, olh.
std::string_view to_string(ProtocolKind kind) noexcept;
std::optional<ProtocolKind> protocol_from_string(std::string_view name);

// Thrown when estimator constants are requested from a protocol that has
// none (SHE aggregates noisy sums directly and is not pure).
struct NotPureError : std::logic_error {
  using std::logic_error::logic_error;
};

struct ProtocolOptions {
  std::optional<double> theta;     // THE only; default is the optimum
  std::optional<std::uint64_t> g;  // OLH only; default is round(e^eps)+1
};

// Immutable bundle of a protocol's derived parameters. Safe to share across
// threads.
class ProtocolSpec {
 public:
  ProtocolSpec(ProtocolKind kind, PrivacyBudget epsilon, Domain domain,
               ProtocolOptions options = {});

  ProtocolKind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_.epsilon(); }
  double exp_epsilon() const noexcept { return epsilon_.exp_epsilon(); }
  std::uint64_t d() const noexcept { return d_; }

  bool is_pure() const noexcept { return kind_ != ProtocolKind::kSHE; }

  // Per-report retention/flip probabilities. Defined for DE, SUE, OUE, BLH,
  // OLH; the histogram protocols have no (p, q).
  double p() const;
  double q() const;

  double theta() const;     // THE only
  std::uint64_t g() const;  // BLH/OLH only

  // Throws NotPureError for SHE.
  const PureParams& pure_params() const;

 private:
  ProtocolKind kind_;
  PrivacyBudget epsilon_;
  std::uint64_t d_;
  double p_ = 0.0;
  double q_ = 0.0;
  double theta_ = 0.0;
  std::uint64_t g_ = 0;
  std::optional<PureParams> pure_;
};

// ---- parameter derivation ----

// Unary-encoding probabilities: SUE splits the budget symmetrically
// (p = e^{eps/2}/(e^{eps/2}+1), q = 1-p); OUE fixes p = 1/2 and
// q = 1/(e^eps+1), which minimizes the estimator variance.
std::pair<double, double> ue_params(ProtocolKind kind,
                                    const PrivacyBudget& epsilon);

// Hash range that minimizes local-hashing variance, rounded to an integer:
// max(2, round(e^eps) + 1).
std::uint64_t olh_g(const PrivacyBudget& epsilon);

// Support constants of thresholded histograms at cutoff theta in [0, 1]:
//   p* = 1 - e^{eps(theta-1)/2}/2,  q* = e^{-eps*theta/2}/2
PureParams the_pure_params(const PrivacyBudget& epsilon, double theta);

// Minimizes var_star(the_pure_params(eps, theta)) over theta in (0.5, 1],
// to absolute tolerance 1e-6. The minimum is interior and moves toward 1 as
// the budget grows.
double the_optimal_theta(const PrivacyBudget& epsilon);

// ---- hashing ----

// Keyed mixing hash of (seed, value) reduced into [g] by widening multiply.
// Deterministic; per-bucket bias below g / 2^64.
inline std::uint64_t lh_hash(std::uint64_t seed, std::uint64_t value,
                             std::uint64_t g) noexcept {
  const std::uint64_t h =
      mix64(seed ^ mix64(value + 0x9E3779B97F4A7C15ULL));
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(h) * g) >> 64);
}

// ---- sampling primitives ----

// Zero-mean Laplace noise with the given scale, via the inverse CDF applied
// to a single uniform draw u in (0,1):
//   x = -scale * sgn(u - 1/2) * ln(1 - 2|u - 1/2|)
double laplace(double scale, Rng& rng);

// Generalized randomized response over [m]: keeps x with probability p,
// otherwise returns one of the m-1 other values uniformly.
std::uint64_t grr_sample(std::uint64_t x, std::uint64_t m, double p, Rng& rng);

// ---- encode / perturb ----

// Direct encoding: reports the value itself with probability p, each other
// value with probability q.
CategoricalReport de_perturb(std::uint64_t v, const ProtocolSpec& spec,
                             Rng& rng);

// Histogram encoding (SHE and THE): one-hot vector plus independent
// Laplace(2/eps) noise on every component.
HistogramReport he_encode_perturb(std::uint64_t v, const ProtocolSpec& spec,
                                  Rng& rng);

// Unary encoding: bit i is set with probability p when i == v and q
// otherwise, independently. The (d, p, q) overload is the raw mechanism;
// the spec overload reads parameters from a SUE/OUE spec.
BitVectorReport ue_perturb(std::uint64_t v, std::uint64_t d, double p,
                           double q, Rng& rng);
BitVectorReport ue_perturb(std::uint64_t v, const ProtocolSpec& spec,
                           Rng& rng);

// Local hashing: draws a fresh uniform hash seed, hashes v into [g], then
// applies generalized randomized response over [g].
HashedReport lh_encode_perturb(std::uint64_t v, const ProtocolSpec& spec,
                               Rng& rng);

// Dispatch on spec.kind().
Report perturb(std::uint64_t v, const ProtocolSpec& spec, Rng& rng);

// ---- support sets / aggregation ----

// Thresholded-histogram support: strictly above the cutoff. A component
// exactly at theta is not supported.
inline bool the_supports(const HistogramReport& report, double theta,
                         std::uint64_t value) {
  return report.values[value] > theta;
}

// Number of reports whose support set contains each domain value. Support
// sets are never materialized; hashed reports are tested value by value.
// Mixing report variants (or passing SHE) is an error.
std::vector<std::uint64_t> support_count(std::span<const Report> reports,
                                         const ProtocolSpec& spec);

// SHE aggregation: estimates[i] is the plain sum of the noisy histograms.
// Unbiased without the pure-protocol correction.
EstimateVector she_aggregate(std::span<const Report> reports, std::uint64_t d);

}  // namespace ldp
