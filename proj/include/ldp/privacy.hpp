#pragma once

#include <cstdint>

#include "ldp/protocols.hpp"

namespace ldp {

// Result of an exhaustive likelihood-ratio check. The mechanism satisfies
// eps-LDP when every output is at most e^eps times likelier under one input
// than under another; bound carries a 1e-9 relative cushion for floating
// point.
struct PrivacyCheck {
  double max_ratio = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Direct encoding: enumerates all (input pair, output) triples. Takes the
// probabilities explicitly so corrupted parameter sets can be fed in as
// negative controls.
PrivacyCheck de_privacy_check(double p, double q, std::uint64_t d,
                              double epsilon);

// Unary encoding: enumerates all 2^d output vectors against all input
// pairs. Requires d <= 16 (cost grows as d^2 * 2^d).
PrivacyCheck ue_privacy_check(double p, double q, std::uint64_t d,
                              double epsilon);

// Local hashing, conditioned on the hash seed: once the seed is public the
// mechanism is randomized response over [g], so the ratio is p/q.
PrivacyCheck lh_privacy_check(double p, double q, double epsilon);

// Runs the appropriate check for a spec's own parameters. DE, SUE, OUE,
// BLH, OLH only; histogram protocols have continuous outputs and cannot be
// enumerated.
PrivacyCheck privacy_check(const ProtocolSpec& spec);

}  // namespace ldp
