#pragma once

#include <cstdint>

#include "ldp/protocols.hpp"

namespace ldp {

// Closed-form per-user variance factor Var*/n for each protocol:
//   DE   (d-2+e^eps) / (e^eps-1)^2
//   SHE  8 / eps^2
//   THE  (2u-1) / (2u - u^2 e^{-eps/2} - 1)^2   with u = e^{eps*theta/2}
//   SUE  e^{eps/2} / (e^{eps/2}-1)^2
//   OUE  4 e^eps / (e^eps-1)^2
//   BLH  (e^eps+1)^2 / (e^eps-1)^2
//   OLH  same as OUE (the ideal continuous hash range; the integer-range
//        value of a concrete spec comes from var_star(spec.pure_params()))
// d is used only by DE; theta only by THE (default 1).
double analytic_var(ProtocolKind kind, double epsilon, std::uint64_t d = 2,
                    double theta = 1.0);

// Standard-normal quantile. Absolute error at most 1e-8 for
// p in [1e-12, 1-1e-12]; throws std::domain_error outside (0, 1).
double inv_normal_cdf(double p);

struct ThresholdSpec {
  double alpha = 0.05;          // significance level, in (0, 1)
  std::uint64_t d = 2;          // number of simultaneous estimates
  std::uint64_t n = 1;          // report count (informational)
  double var_star_total = 0.0;  // var_per_user * n
};

// Estimate cutoff separating signal from noise under a Bonferroni-style
// correction: Phi^{-1}(1 - alpha/d) * sqrt(var_star_total).
double significance_threshold(const ThresholdSpec& spec);

enum class CommBudget { kUnbounded, kLogarithmic };

// Selection guideline: DE while d < 3 e^eps + 2; beyond that OUE when
// report size is no concern, otherwise OLH.
ProtocolKind choose_protocol(double epsilon, std::uint64_t d,
                             CommBudget budget);

// Ratio T1/T2 of significance thresholds when the privacy budget is halved
// (budget eps/2, population n) versus the population being halved (budget
// eps, population n/2). The quantile factor cancels:
//   ratio = sqrt(2 * var(eps/2) / var(eps))
// with var the continuous OUE/OLH factor. A ratio above 2 favors splitting
// the population.
double split_ratio(double epsilon);

}  // namespace ldp
