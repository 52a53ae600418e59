#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "ldp/core.hpp"
#include "ldp/protocols.hpp"
#include "ldp/rng.hpp"

using namespace ldp;

TEST_CASE("domain types reject invalid construction") {
  CHECK_THROWS_AS(PrivacyBudget(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PrivacyBudget(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(PrivacyBudget(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(PrivacyBudget(std::nan("")), std::invalid_argument);
  CHECK(PrivacyBudget(2.0).exp_epsilon() == doctest::Approx(std::exp(2.0)));

  CHECK_THROWS_AS(Domain(0), std::invalid_argument);
  CHECK_THROWS_AS(Domain(1), std::invalid_argument);
  CHECK(Domain(2).size() == 2);

  CHECK_THROWS_AS(PureParams(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(PureParams(0.4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(PureParams(1.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(PureParams(0.5, 0.0), std::invalid_argument);
  CHECK_NOTHROW(PureParams(1.0, 0.5));
}

TEST_CASE("estimate applies the affine debias without clamping") {
  const PureParams params(0.75, 0.25);
  std::vector<std::uint64_t> counts = {25, 60, 10};
  const EstimateVector ev = estimate(counts, 100, params);
  CHECK(ev.n == 100);
  CHECK(ev.estimates[0] == doctest::Approx(0.0));
  CHECK(ev.estimates[1] == doctest::Approx(70.0));
  CHECK(ev.estimates[2] == doctest::Approx(-30.0));  // negatives survive

  // Affine anchors: a count of n*q* is zero, a count of n*p* is n, exactly.
  const EstimateVector anchors = estimate({25, 75}, 100, params);
  CHECK(anchors.estimates[0] == 0.0);
  CHECK(anchors.estimates[1] == 100.0);

  CHECK_THROWS_AS(estimate({}, 100, params), std::invalid_argument);
  CHECK_THROWS_AS(estimate({1}, 0, params), std::invalid_argument);
}

TEST_CASE("clamping is a separate opt-in step") {
  const PureParams params(0.75, 0.25);
  const EstimateVector raw = estimate({10, 90}, 100, params);
  CHECK(raw.estimates[0] < 0.0);
  CHECK(raw.estimates[1] > 100.0);
  const EstimateVector clamped = clamp_estimates(raw);
  CHECK(clamped.estimates[0] == 0.0);
  CHECK(clamped.estimates[1] == 100.0);
}

TEST_CASE("variance formulas at hand-computed points") {
  // p* + q* = 1 kills the frequency term for any f.
  const PureParams symmetric(0.75, 0.25);
  CHECK(exact_variance(symmetric, 100.0, 0.0) == doctest::Approx(75.0));
  CHECK(exact_variance(symmetric, 100.0, 0.7) ==
        doctest::Approx(100.0 * var_star(symmetric)));
  CHECK(var_star(symmetric) == doctest::Approx(0.75));

  // Optimized unary encoding at epsilon = 1.
  const double e1 = std::exp(1.0);
  const PureParams oue(0.5, 1.0 / (e1 + 1.0));
  CHECK(var_star(oue) == doctest::Approx(3.68).epsilon(0.005 / 3.68));

  // Binary local hashing at epsilon = 4.
  const double e4 = std::exp(4.0);
  const PureParams blh(e4 / (e4 + 1.0), 0.5);
  CHECK(var_star(blh) == doctest::Approx(1.08).epsilon(0.005 / 1.08));
}

TEST_CASE("estimator variance matches a direct simulation") {
  // Support counts are binomial mixtures; the estimator's sample variance
  // must land on the closed form.
  const double q = 1.0 / (std::exp(1.0) + 1.0);
  const PureParams params(0.5, q);
  const std::uint64_t n = 1000;
  const double f = 0.1;
  const auto holders = static_cast<std::uint64_t>(f * n);

  Rng rng(20240817);
  std::binomial_distribution<std::uint64_t> own(holders, params.p_star());
  std::binomial_distribution<std::uint64_t> other(n - holders, params.q_star());
  const int trials = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t count = own(rng) + other(rng);
    const EstimateVector ev = estimate({count}, n, params);
    sum += ev.estimates[0];
    sum_sq += ev.estimates[0] * ev.estimates[0];
  }
  const double mean = sum / trials;
  const double sample_var = (sum_sq - trials * mean * mean) / (trials - 1);
  const double expected = exact_variance(params, n, f);
  CHECK(sample_var == doctest::Approx(expected).epsilon(0.03));

  // Unbiasedness of the same stream: the mean recovers n*f.
  const double se = std::sqrt(expected / trials);
  CHECK(std::abs(mean - f * n) <= 4.0 * se);
}

TEST_CASE("support counting by report kind") {
  const PrivacyBudget eps(std::log(3.0));

  SUBCASE("categorical reports vote for themselves") {
    const ProtocolSpec spec(ProtocolKind::kDE, eps, Domain(8));
    const std::vector<Report> reports = {CategoricalReport{2},
                                         CategoricalReport{2},
                                         CategoricalReport{5}};
    const auto counts = support_count(reports, spec);
    CHECK(counts == std::vector<std::uint64_t>{0, 0, 2, 0, 0, 1, 0, 0});
  }

  SUBCASE("bit vectors vote for their set positions") {
    const ProtocolSpec spec(ProtocolKind::kSUE, eps, Domain(4));
    const std::vector<Report> reports = {BitVectorReport{{1, 0, 1, 0}}};
    const auto counts = support_count(reports, spec);
    CHECK(counts == std::vector<std::uint64_t>{1, 0, 1, 0});
  }

  SUBCASE("hashed reports vote for every preimage of their bucket") {
    // Find a seed whose hash splits {0,1} from {2,3}, then both reports
    // voting bucket 0 must support exactly the first two values.
    const std::uint64_t g = 2;
    std::uint64_t seed = 0;
    bool found = false;
    for (std::uint64_t s = 0; s < 4096 && !found; ++s) {
      if (lh_hash(s, 0, g) == 0 && lh_hash(s, 1, g) == 0 &&
          lh_hash(s, 2, g) == 1 && lh_hash(s, 3, g) == 1) {
        seed = s;
        found = true;
      }
    }
    REQUIRE(found);
    const ProtocolSpec spec(ProtocolKind::kBLH, eps, Domain(4));
    const std::vector<Report> reports = {HashedReport{seed, 0},
                                         HashedReport{seed, 0}};
    const auto counts = support_count(reports, spec);
    CHECK(counts == std::vector<std::uint64_t>{2, 2, 0, 0});
  }

  SUBCASE("mixed variants are rejected") {
    const ProtocolSpec spec(ProtocolKind::kDE, eps, Domain(4));
    const std::vector<Report> reports = {CategoricalReport{1},
                                         BitVectorReport{{1, 0, 0, 0}}};
    CHECK_THROWS_AS(support_count(reports, spec), VariantMismatchError);
  }

  SUBCASE("summed histograms have no support sets") {
    const ProtocolSpec spec(ProtocolKind::kSHE, eps, Domain(4));
    const std::vector<Report> reports = {HistogramReport{{1.0, 0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(support_count(reports, spec), NotPureError);
  }
}

TEST_CASE("direct encoding support counts sum to the report count") {
  const ProtocolSpec spec(ProtocolKind::kDE, PrivacyBudget(1.0), Domain(16));
  Rng rng(99);
  std::vector<Report> reports;
  for (int j = 0; j < 1000; ++j) {
    reports.push_back(de_perturb(j % 16, spec, rng));
  }
  const auto counts = support_count(reports, spec);
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  CHECK(total == 1000);
}
