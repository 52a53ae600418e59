#include "ldp/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldp {
namespace {

constexpr double kSlack = 1.0 + 1e-9;

PrivacyCheck verdict(double max_ratio, double epsilon) {
  PrivacyCheck result;
  result.max_ratio = max_ratio;
  result.bound = std::exp(epsilon) * kSlack;
  result.pass = max_ratio <= result.bound;
  return result;
}

}  // namespace

PrivacyCheck de_privacy_check(double p, double q, std::uint64_t d,
                              double epsilon) {
  if (d < 2) {
    throw std::invalid_argument("domain needs at least two values");
  }
  double max_ratio = 0.0;
  for (std::uint64_t v1 = 0; v1 < d; ++v1) {
    for (std::uint64_t v2 = 0; v2 < d; ++v2) {
      if (v1 == v2) continue;
      for (std::uint64_t y = 0; y < d; ++y) {
        const double pr1 = y == v1 ? p : q;
        const double pr2 = y == v2 ? p : q;
        max_ratio = std::max(max_ratio, pr1 / pr2);
      }
    }
  }
  return verdict(max_ratio, epsilon);
}

PrivacyCheck ue_privacy_check(double p, double q, std::uint64_t d,
                              double epsilon) {
  if (d < 2 || d > 16) {
    throw std::invalid_argument(
        "bit-vector enumeration needs 2 <= d <= 16 (cost is d^2 * 2^d)");
  }
  double max_ratio = 0.0;
  const std::uint64_t outputs = std::uint64_t{1} << d;
  for (std::uint64_t v1 = 0; v1 < d; ++v1) {
    for (std::uint64_t v2 = 0; v2 < d; ++v2) {
      if (v1 == v2) continue;
      for (std::uint64_t mask = 0; mask < outputs; ++mask) {
        double pr1 = 1.0;
        double pr2 = 1.0;
        for (std::uint64_t i = 0; i < d; ++i) {
          const bool set = (mask >> i) & 1;
          const double on1 = i == v1 ? p : q;
          const double on2 = i == v2 ? p : q;
          pr1 *= set ? on1 : 1.0 - on1;
          pr2 *= set ? on2 : 1.0 - on2;
        }
        max_ratio = std::max(max_ratio, pr1 / pr2);
      }
    }
  }
  return verdict(max_ratio, epsilon);
}

PrivacyCheck lh_privacy_check(double p, double q, double epsilon) {
  // With the seed public, the report is randomized response over the hash
  // range: the extreme outputs are "kept own bucket" vs "flipped into it".
  return verdict(std::max(p / q, q / p), epsilon);
}

PrivacyCheck privacy_check(const ProtocolSpec& spec) {
  switch (spec.kind()) {
    case ProtocolKind::kDE:
      return de_privacy_check(spec.p(), spec.q(), spec.d(), spec.epsilon());
    case ProtocolKind::kSUE:
    case ProtocolKind::kOUE:
      return ue_privacy_check(spec.p(), spec.q(), spec.d(), spec.epsilon());
    case ProtocolKind::kBLH:
    case ProtocolKind::kOLH:
      return lh_privacy_check(spec.p(), spec.q(), spec.epsilon());
    case ProtocolKind::kSHE:
    case ProtocolKind::kTHE:
      throw std::invalid_argument(
          "histogram protocols emit continuous noise and cannot be "
          "enumerated; their guarantee follows from the Laplace scale");
  }
  throw std::logic_error("unknown protocol kind");
}

}  // namespace ldp
