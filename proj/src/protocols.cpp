#include "ldp/protocols.hpp"

#include <cmath>
#include <string>

namespace ldp {
namespace {

double the_objective(const PrivacyBudget& epsilon, double theta) {
  return var_star(the_pure_params(epsilon, theta));
}

[[noreturn]] void wrong_kind(const char* what, ProtocolKind kind) {
  throw std::logic_error(std::string(what) + " is not defined for protocol " +
                         std::string(to_string(kind)));
}

}  // namespace

std::string_view to_string(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::kDE:
      return "de";
    case ProtocolKind::kSHE:
      return "she";
    case ProtocolKind::kTHE:
      return "the";
    case ProtocolKind::kSUE:
      return "sue";
    case ProtocolKind::kOUE:
      return "oue";
    case ProtocolKind::kBLH:
      return "blh";
    case ProtocolKind::kOLH:
      return "olh";
  }
  return "unknown";
}

std::optional<ProtocolKind> protocol_from_string(std::string_view name) {
  if (name == "de") return ProtocolKind::kDE;
  if (name == "she") return ProtocolKind::kSHE;
  if (name == "the") return ProtocolKind::kTHE;
  if (name == "sue") return ProtocolKind::kSUE;
  if (name == "oue") return ProtocolKind::kOUE;
  if (name == "blh") return ProtocolKind::kBLH;
  if (name == "olh") return ProtocolKind::kOLH;
  return std::nullopt;
}

std::pair<double, double> ue_params(ProtocolKind kind,
                                    const PrivacyBudget& epsilon) {
  switch (kind) {
    case ProtocolKind::kSUE: {
      const double half = std::sqrt(epsilon.exp_epsilon());  // e^{eps/2}
      return {half / (half + 1.0), 1.0 / (half + 1.0)};
    }
    case ProtocolKind::kOUE:
      return {0.5, 1.0 / (epsilon.exp_epsilon() + 1.0)};
    default:
      wrong_kind("unary-encoding parameters", kind);
  }
}

std::uint64_t olh_g(const PrivacyBudget& epsilon) {
  const double ideal = epsilon.exp_epsilon();
  // Domain guard: hash ranges beyond 2^62 are meaningless and would
  // overflow the rounding; the variance curve is flat out there anyway.
  if (ideal >= 4.6e18) {
    return std::uint64_t{1} << 62;
  }
  const auto rounded = static_cast<std::uint64_t>(std::llround(ideal));
  return std::max<std::uint64_t>(2, rounded + 1);
}

PureParams the_pure_params(const PrivacyBudget& epsilon, double theta) {
  const double eps = epsilon.epsilon();
  const double p_star = 1.0 - 0.5 * std::exp(eps * (theta - 1.0) / 2.0);
  const double q_star = 0.5 * std::exp(-eps * theta / 2.0);
  return {p_star, q_star};
}

double the_optimal_theta(const PrivacyBudget& epsilon) {
  // Coarse scan to bracket the minimum, then golden-section inside the
  // bracket. The objective is smooth with a single interior minimum.
  constexpr int kGrid = 128;
  constexpr double kLo = 0.5;
  constexpr double kHi = 1.0;
  int best = 0;
  double best_value = the_objective(epsilon, kLo);
  for (int i = 1; i <= kGrid; ++i) {
    const double theta = kLo + (kHi - kLo) * i / kGrid;
    const double value = the_objective(epsilon, theta);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double a = kLo + (kHi - kLo) * std::max(0, best - 1) / kGrid;
  double b = kLo + (kHi - kLo) * std::min(kGrid, best + 1) / kGrid;

  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = the_objective(epsilon, c);
  double fd = the_objective(epsilon, d);
  while (b - a > 1e-8) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = the_objective(epsilon, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = the_objective(epsilon, d);
    }
  }
  const double theta = 0.5 * (a + b);
  // The minimum is strictly interior; keep the open lower bound even if the
  // bracket degenerated.
  return std::max(theta, kLo + 1e-9);
}

ProtocolSpec::ProtocolSpec(ProtocolKind kind, PrivacyBudget epsilon,
                           Domain domain, ProtocolOptions options)
    : kind_(kind), epsilon_(epsilon), d_(domain.size()) {
  if (options.theta && kind != ProtocolKind::kTHE) {
    throw std::invalid_argument("theta override only applies to the");
  }
  if (options.g && kind != ProtocolKind::kOLH) {
    throw std::invalid_argument("hash-range override only applies to olh");
  }
  const double ee = epsilon_.exp_epsilon();
  switch (kind) {
    case ProtocolKind::kDE:
      p_ = ee / (ee + static_cast<double>(d_) - 1.0);
      q_ = 1.0 / (ee + static_cast<double>(d_) - 1.0);
      pure_.emplace(p_, q_);
      break;
    case ProtocolKind::kSHE:
      break;  // noisy sums only; no (p, q), no pure constants
    case ProtocolKind::kTHE:
      theta_ = options.theta ? *options.theta : the_optimal_theta(epsilon_);
      if (!(theta_ > 0.5) || !(theta_ <= 1.0)) {
        throw std::invalid_argument("theta must lie in (0.5, 1], got " +
                                    std::to_string(theta_));
      }
      pure_.emplace(the_pure_params(epsilon_, theta_));
      break;
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE: {
      const auto [p, q] = ue_params(kind, epsilon_);
      p_ = p;
      q_ = q;
      pure_.emplace(p_, q_);
      break;
    }
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH:
      g_ = kind == ProtocolKind::kBLH ? 2
                                      : options.g ? *options.g : olh_g(epsilon_);
      if (g_ < 2) {
        throw std::invalid_argument("hash range must be at least 2");
      }
      p_ = ee / (ee + static_cast<double>(g_) - 1.0);
      q_ = 1.0 / (ee + static_cast<double>(g_) - 1.0);
      pure_.emplace(p_, 1.0 / static_cast<double>(g_));
      break;
  }
}

double ProtocolSpec::p() const {
  if (kind_ == ProtocolKind::kSHE || kind_ == ProtocolKind::kTHE) {
    wrong_kind("report retention probability", kind_);
  }
  return p_;
}

double ProtocolSpec::q() const {
  if (kind_ == ProtocolKind::kSHE || kind_ == ProtocolKind::kTHE) {
    wrong_kind("report flip probability", kind_);
  }
  return q_;
}

double ProtocolSpec::theta() const {
  if (kind_ != ProtocolKind::kTHE) {
    wrong_kind("support threshold", kind_);
  }
  return theta_;
}

std::uint64_t ProtocolSpec::g() const {
  if (kind_ != ProtocolKind::kBLH && kind_ != ProtocolKind::kOLH) {
    wrong_kind("hash range", kind_);
  }
  return g_;
}

const PureParams& ProtocolSpec::pure_params() const {
  if (!pure_) {
    throw NotPureError(
        "she has no pure-protocol constants; aggregate with she_aggregate");
  }
  return *pure_;
}

double laplace(double scale, Rng& rng) {
  const double t = rng.uniform_open() - 0.5;  // in (-0.5, 0.5)
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(t));
  return t < 0.0 ? -magnitude : magnitude;
}

std::uint64_t grr_sample(std::uint64_t x, std::uint64_t m, double p,
                         Rng& rng) {
  if (m < 2 || x >= m) {
    throw std::invalid_argument("randomized response needs x < m and m >= 2");
  }
  if (rng.uniform() < p) {
    return x;
  }
  const std::uint64_t other = rng.below(m - 1);
  return other + (other >= x ? 1 : 0);
}

CategoricalReport de_perturb(std::uint64_t v, const ProtocolSpec& spec,
                             Rng& rng) {
  if (spec.kind() != ProtocolKind::kDE) {
    wrong_kind("direct encoding", spec.kind());
  }
  if (v >= spec.d()) {
    throw std::invalid_argument("value outside the domain");
  }
  return {grr_sample(v, spec.d(), spec.p(), rng)};
}

HistogramReport he_encode_perturb(std::uint64_t v, const ProtocolSpec& spec,
                                  Rng& rng) {
  if (spec.kind() != ProtocolKind::kSHE && spec.kind() != ProtocolKind::kTHE) {
    wrong_kind("histogram encoding", spec.kind());
  }
  if (v >= spec.d()) {
    throw std::invalid_argument("value outside the domain");
  }
  const double scale = 2.0 / spec.epsilon();
  HistogramReport report;
  report.values.resize(spec.d());
  for (std::uint64_t i = 0; i < spec.d(); ++i) {
    report.values[i] = (i == v ? 1.0 : 0.0) + laplace(scale, rng);
  }
  return report;
}

BitVectorReport ue_perturb(std::uint64_t v, std::uint64_t d, double p,
                           double q, Rng& rng) {
  if (v >= d) {
    throw std::invalid_argument("value outside the domain");
  }
  BitVectorReport report;
  report.bits.resize(d);
  for (std::uint64_t i = 0; i < d; ++i) {
    report.bits[i] = rng.bernoulli(i == v ? p : q) ? 1 : 0;
  }
  return report;
}

BitVectorReport ue_perturb(std::uint64_t v, const ProtocolSpec& spec,
                           Rng& rng) {
  if (spec.kind() != ProtocolKind::kSUE && spec.kind() != ProtocolKind::kOUE) {
    wrong_kind("unary encoding", spec.kind());
  }
  return ue_perturb(v, spec.d(), spec.p(), spec.q(), rng);
}

HashedReport lh_encode_perturb(std::uint64_t v, const ProtocolSpec& spec,
                               Rng& rng) {
  if (spec.kind() != ProtocolKind::kBLH && spec.kind() != ProtocolKind::kOLH) {
    wrong_kind("local hashing", spec.kind());
  }
  if (v >= spec.d()) {
    throw std::invalid_argument("value outside the domain");
  }
  const std::uint64_t seed = rng();
  const std::uint64_t hashed = lh_hash(seed, v, spec.g());
  return {seed, grr_sample(hashed, spec.g(), spec.p(), rng)};
}

Report perturb(std::uint64_t v, const ProtocolSpec& spec, Rng& rng) {
  switch (spec.kind()) {
    case ProtocolKind::kDE:
      return de_perturb(v, spec, rng);
    case ProtocolKind::kSHE:
    case ProtocolKind::kTHE:
      return he_encode_perturb(v, spec, rng);
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE:
      return ue_perturb(v, spec, rng);
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH:
      return lh_encode_perturb(v, spec, rng);
  }
  throw std::logic_error("unknown protocol kind");
}

namespace {

[[noreturn]] void mismatch(const ProtocolSpec& spec) {
  throw VariantMismatchError("report variant does not match protocol " +
                             std::string(to_string(spec.kind())));
}

}  // namespace

std::vector<std::uint64_t> support_count(std::span<const Report> reports,
                                         const ProtocolSpec& spec) {
  const std::uint64_t d = spec.d();
  std::vector<std::uint64_t> counts(d, 0);
  switch (spec.kind()) {
    case ProtocolKind::kSHE:
      throw NotPureError(
          "she reports have no support sets; aggregate with she_aggregate");
    case ProtocolKind::kDE:
      for (const Report& r : reports) {
        const auto* cat = std::get_if<CategoricalReport>(&r);
        if (!cat) mismatch(spec);
        if (cat->value >= d) {
          throw std::invalid_argument("report value outside the domain");
        }
        ++counts[cat->value];
      }
      break;
    case ProtocolKind::kTHE: {
      const double theta = spec.theta();
      for (const Report& r : reports) {
        const auto* hist = std::get_if<HistogramReport>(&r);
        if (!hist) mismatch(spec);
        if (hist->values.size() != d) {
          throw std::invalid_argument("histogram report length mismatch");
        }
        for (std::uint64_t i = 0; i < d; ++i) {
          counts[i] += the_supports(*hist, theta, i) ? 1 : 0;
        }
      }
      break;
    }
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE:
      for (const Report& r : reports) {
        const auto* bits = std::get_if<BitVectorReport>(&r);
        if (!bits) mismatch(spec);
        if (bits->bits.size() != d) {
          throw std::invalid_argument("bit-vector report length mismatch");
        }
        for (std::uint64_t i = 0; i < d; ++i) {
          counts[i] += bits->bits[i];
        }
      }
      break;
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH: {
      const std::uint64_t g = spec.g();
      for (const Report& r : reports) {
        const auto* hashed = std::get_if<HashedReport>(&r);
        if (!hashed) mismatch(spec);
        for (std::uint64_t v = 0; v < d; ++v) {
          counts[v] += lh_hash(hashed->seed, v, g) == hashed->value ? 1 : 0;
        }
      }
      break;
    }
  }
  return counts;
}

EstimateVector she_aggregate(std::span<const Report> reports,
                             std::uint64_t d) {
  EstimateVector result;
  result.n = reports.size();
  result.estimates.assign(d, 0.0);
  for (const Report& r : reports) {
    const auto* hist = std::get_if<HistogramReport>(&r);
    if (!hist) {
      throw VariantMismatchError("she aggregation expects histogram reports");
    }
    if (hist->values.size() != d) {
      throw std::invalid_argument("histogram report length mismatch");
    }
    for (std::uint64_t i = 0; i < d; ++i) {
      result.estimates[i] += hist->values[i];
    }
  }
  return result;
}

}  // namespace ldp
