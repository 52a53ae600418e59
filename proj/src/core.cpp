#include "ldp/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ldp {

PrivacyBudget::PrivacyBudget(double epsilon) : epsilon_(epsilon) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw std::invalid_argument("privacy budget must be finite and positive, got " +
                                std::to_string(epsilon));
  }
  exp_epsilon_ = std::exp(epsilon);
}

Domain::Domain(std::uint64_t size) : size_(size) {
  if (size < 2) {
    throw std::invalid_argument("domain needs at least two values, got " +
                                std::to_string(size));
  }
}

PureParams::PureParams(double p_star, double q_star)
    : p_star_(p_star), q_star_(q_star) {
  if (!(q_star > 0.0) || !(q_star < p_star) || !(p_star <= 1.0)) {
    throw std::invalid_argument(
        "pure-protocol constants require 0 < q* < p* <= 1, got p*=" +
        std::to_string(p_star) + " q*=" + std::to_string(q_star));
  }
}

EstimateVector estimate(const std::vector<std::uint64_t>& support_counts,
                        std::uint64_t n, const PureParams& params) {
  if (support_counts.empty()) {
    throw std::invalid_argument("support counts are empty");
  }
  if (n < 1) {
    throw std::invalid_argument("estimation requires at least one report");
  }
  const double shift = static_cast<double>(n) * params.q_star();
  const double scale = params.p_star() - params.q_star();
  EstimateVector result;
  result.n = n;
  result.estimates.resize(support_counts.size());
  for (std::size_t i = 0; i < support_counts.size(); ++i) {
    result.estimates[i] =
        (static_cast<double>(support_counts[i]) - shift) / scale;
  }
  return result;
}

double exact_variance(const PureParams& params, double n, double f_i) {
  const double p = params.p_star();
  const double q = params.q_star();
  const double gap = p - q;
  return n * q * (1.0 - q) / (gap * gap) + n * f_i * (1.0 - p - q) / gap;
}

double var_star(const PureParams& params) {
  const double q = params.q_star();
  const double gap = params.p_star() - q;
  return q * (1.0 - q) / (gap * gap);
}

EstimateVector clamp_estimates(EstimateVector ev) {
  const double hi = static_cast<double>(ev.n);
  for (double& e : ev.estimates) {
    e = std::clamp(e, 0.0, hi);
  }
  return ev;
}

}  // namespace ldp
