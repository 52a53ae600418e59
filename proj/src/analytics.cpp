#include "ldp/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace ldp {
namespace {

// Rational approximation of the standard-normal quantile for p <= 1/2
// (Acklam's coefficients, relative error ~1.15e-9), refined below.
double quantile_lower_half(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// One Halley step against the erfc-based CDF. For p <= 1/2 the quantile is
// non-positive, so Phi(x) = erfc(-x/sqrt(2))/2 is evaluated in its small
// tail and loses nothing to cancellation.
double refine_lower_half(double x, double p) {
  if (!(std::abs(x) < 37.0)) {
    return x;  // exp(x^2/2) would overflow; the raw approximation stands
  }
  constexpr double kSqrt2 = 1.4142135623730951;
  constexpr double kSqrt2Pi = 2.5066282746310002;
  const double err = 0.5 * std::erfc(-x / kSqrt2) - p;
  const double u = err * kSqrt2Pi * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

}  // namespace

double inv_normal_cdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("quantile argument must lie strictly in (0, 1)");
  }
  // Reflection keeps the computation in the lower tail and makes the
  // antisymmetry inv(p) = -inv(1-p) exact. For p >= 1/2 the complement
  // 1 - p is computed without rounding error.
  if (p > 0.5) {
    return -inv_normal_cdf(1.0 - p);
  }
  return refine_lower_half(quantile_lower_half(p), p);
}

double analytic_var(ProtocolKind kind, double epsilon, std::uint64_t d,
                    double theta) {
  const PrivacyBudget budget(epsilon);  // validates the budget
  const double ee = budget.exp_epsilon();
  switch (kind) {
    case ProtocolKind::kDE: {
      Domain domain(d);  // validates d
      const double dm = static_cast<double>(domain.size());
      return (dm - 2.0 + ee) / ((ee - 1.0) * (ee - 1.0));
    }
    case ProtocolKind::kSHE:
      return 8.0 / (epsilon * epsilon);
    case ProtocolKind::kTHE: {
      if (!(theta > 0.0) || !(theta <= 1.0)) {
        throw std::invalid_argument("theta must lie in (0, 1]");
      }
      const double u = std::exp(epsilon * theta / 2.0);
      const double denom = 2.0 * u - u * u * std::exp(-epsilon / 2.0) - 1.0;
      return (2.0 * u - 1.0) / (denom * denom);
    }
    case ProtocolKind::kSUE: {
      const double half = std::exp(epsilon / 2.0);
      return half / ((half - 1.0) * (half - 1.0));
    }
    case ProtocolKind::kOUE:
    case ProtocolKind::kOLH:
      return 4.0 * ee / ((ee - 1.0) * (ee - 1.0));
    case ProtocolKind::kBLH: {
      const double ratio = (ee + 1.0) / (ee - 1.0);
      return ratio * ratio;
    }
  }
  throw std::invalid_argument("unknown protocol kind");
}

double significance_threshold(const ThresholdSpec& spec) {
  if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0)) {
    throw std::domain_error("significance level must lie in (0, 1)");
  }
  if (spec.d < 1) {
    throw std::domain_error("threshold needs at least one estimate");
  }
  if (!(spec.var_star_total >= 0.0)) {
    throw std::domain_error("total variance must be non-negative");
  }
  const double tail = spec.alpha / static_cast<double>(spec.d);
  if (tail >= 1.0) {
    throw std::domain_error("alpha/d must be below 1");
  }
  return inv_normal_cdf(1.0 - tail) * std::sqrt(spec.var_star_total);
}

ProtocolKind choose_protocol(double epsilon, std::uint64_t d,
                             CommBudget budget) {
  const PrivacyBudget pb(epsilon);
  Domain domain(d);
  if (static_cast<double>(domain.size()) < 3.0 * pb.exp_epsilon() + 2.0) {
    return ProtocolKind::kDE;
  }
  return budget == CommBudget::kUnbounded ? ProtocolKind::kOUE
                                          : ProtocolKind::kOLH;
}

double split_ratio(double epsilon) {
  const double half_budget = analytic_var(ProtocolKind::kOLH, epsilon / 2.0);
  const double full_budget = analytic_var(ProtocolKind::kOLH, epsilon);
  return std::sqrt(2.0 * half_budget / full_budget);
}

}  // namespace ldp
