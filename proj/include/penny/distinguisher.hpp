#pragma once

#include <cstddef>
#include <vector>

#include "penny/exact_value.hpp"
#include "penny/oracle.hpp"
#include "penny/prng.hpp"
#include "penny/strategy.hpp"

namespace penny {

/// The single-round test built from a payoff advantage: simulate the game
/// with the input stream as Player 1's plays against s and accept iff
/// Player 1 wins round `round`.
struct DistinguisherReport {
  std::size_t round = 0;  // 1-based
  std::vector<ExactValue> per_round;  // E[A_i], A_i in {-1, +1}
  ExactValue value;  // E[U] = mean of per_round
  ExactValue pr_generator;  // Pr[T(G) = 1] = (E[A_i] + 1) / 2
  ExactValue pr_uniform;  // Pr[T(U) = 1]
  ExactValue advantage;  // |pr_generator - pr_uniform| = |E[A_i]| / 2
};

/// Picks the round with the largest |E[A_i]| (earliest on ties). On a
/// uniform input Player 1's round-i play is a fresh bit independent of s's
/// round-i move, so Pr[T(U) = 1] is exactly 1/2.
inline DistinguisherReport payoff_to_distinguisher(const StrategySpec& s, GeneratorSpec g, std::size_t n,
                                                   const Limits& limits = {}) {
  if (n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  g.out_len = n;
  const StrategySpec player = generator_strategy(g);
  DistinguisherReport r;
  r.per_round = per_round_values(player, s, n, limits);
  r.value = Weighting::average().combine(r.per_round);
  ExactValue best(-1);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.per_round[i].abs() > best) {
      best = r.per_round[i].abs();
      r.round = i + 1;
    }
  }
  const ExactValue half = ExactValue::fraction(1, 2);
  r.pr_generator = (r.per_round[r.round - 1] + ExactValue(1)) * half;
  r.pr_uniform = half;
  r.advantage = (r.pr_generator - r.pr_uniform).abs();
  return r;
}

}  // namespace penny
