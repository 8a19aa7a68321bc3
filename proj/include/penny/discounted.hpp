#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/oracle.hpp"
#include "penny/prng.hpp"
#include "penny/strategy.hpp"

namespace penny {

/// Discount factor and equilibrium slack for the infinitely repeated game.
struct DiscountParams {
  ExactValue delta;
  ExactValue epsilon;

  DiscountParams(ExactValue d, ExactValue e) : delta(std::move(d)), epsilon(std::move(e)) {
    require_discount(delta);
    if (epsilon <= ExactValue(0)) fail(ErrorCode::kInvalidParameter, "epsilon must be positive, got " + epsilon.str());
  }
};

/// delta^n / (1 - delta): the most a deviation can collect on the
/// deterministic tail that starts at round n.
inline ExactValue tail_gain(const ExactValue& delta, std::size_t n) {
  require_discount(delta);
  return delta.pow(n) / (ExactValue(1) - delta);
}

/// Least n with tail_gain(delta, n) < epsilon. The logarithmic estimate
/// only seeds the search; the boundary is settled by exact comparison.
inline std::size_t min_rounds(const DiscountParams& p) {
  const double estimate =
      std::log(p.epsilon.to_double() * (1.0 - p.delta.to_double())) / std::log(p.delta.to_double());
  std::size_t n = 0;
  if (std::isfinite(estimate) && estimate > 0.0) n = static_cast<std::size_t>(std::floor(estimate));
  while (n > 0 && tail_gain(p.delta, n - 1) < p.epsilon) --n;
  while (!(tail_gain(p.delta, n) < p.epsilon)) ++n;
  return n;
}

enum class PrefixKind { kUniform, kGenerator };

/// What both players run for the first n rounds before the tails.
struct DiscountPrefix {
  PrefixKind kind = PrefixKind::kUniform;
  std::optional<GeneratorSpec> generator;

  static DiscountPrefix uniform() { return {}; }
  static DiscountPrefix from_generator(GeneratorSpec g) { return {PrefixKind::kGenerator, std::move(g)}; }

  std::string describe() const { return kind == PrefixKind::kUniform ? "uniform" : "gen:" + generator->describe(); }

  StrategySpec strategy(std::size_t n, std::size_t seed_len) const {
    if (kind == PrefixKind::kUniform) return uniform_table(seed_len);
    GeneratorSpec g = *generator;
    g.out_len = n;
    if (g.seed_len() != seed_len) {
      fail(ErrorCode::kInvalidParameter, "generator " + g.describe() + " uses " + std::to_string(g.seed_len()) +
                                             " seed bits, not " + std::to_string(seed_len));
    }
    return generator_strategy(g);
  }
};

struct DiscountedReport {
  std::size_t n = 0;
  std::size_t seed_len = 0;
  GapReport prefix;  // discounted gaps over rounds 1..n
  ExactValue prefix_gap;
  ExactValue tail_gain;
  ExactValue epsilon_prime;  // prefix_gap + tail_gain
  bool certified = false;  // epsilon_prime < epsilon
};

/// Both players run the prefix for n rounds, then Player 1 plays H forever
/// and Player 2 alternates H,T,... . The prefix gaps are exact discounted
/// best-response gaps; the tail contributes tail_gain(delta, n).
inline DiscountedReport certify_discounted_eq(std::size_t n, const DiscountParams& params, std::size_t seed_len,
                                              const DiscountPrefix& prefix = DiscountPrefix::uniform(),
                                              const Limits& limits = {}) {
  if (seed_len > n) {
    fail(ErrorCode::kInvalidParameter, "seed length " + std::to_string(seed_len) + " exceeds prefix length " +
                                           std::to_string(n));
  }
  const StrategySpec s = prefix.strategy(n, seed_len);
  DiscountedReport r;
  r.n = n;
  r.seed_len = seed_len;
  r.prefix = certify_gap(s, s, n, Weighting::discounted(params.delta), limits);
  r.prefix_gap = r.prefix.certified_epsilon;
  r.tail_gain = tail_gain(params.delta, n);
  r.epsilon_prime = r.prefix_gap + r.tail_gain;
  r.certified = r.epsilon_prime < params.epsilon;
  return r;
}

/// Round-wise view of the discounted reduction. A_t in {-1, +1} is Player
/// 1's payoff at round t; its win indicator in {0, 1} has mean
/// (E[A_t] + 1) / 2.
struct DiscountedDistinguisher {
  std::size_t round = 0;  // argmax_t |delta^t E[A_t]|, earliest on ties
  std::vector<ExactValue> per_round;  // E[A_t]
  std::vector<ExactValue> discounted_per_round;  // delta^t E[A_t]
  std::vector<ExactValue> win_probability;  // E[1{P1 wins round t}]
  ExactValue discounted_value;  // sum_t delta^t E[A_t]
  ExactValue discounted_advantage;  // |delta^t E[A_t]| / 2 at `round`
  ExactValue advantage;  // |E[A_t]| / 2 at `round`: the test's actual advantage
};

inline DiscountedDistinguisher discounted_distinguisher(const StrategySpec& s, GeneratorSpec g, std::size_t n,
                                                        const ExactValue& delta, const Limits& limits = {}) {
  require_discount(delta);
  if (n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  g.out_len = n;
  DiscountedDistinguisher r;
  r.per_round = per_round_values(generator_strategy(g), s, n, limits);
  const ExactValue half = ExactValue::fraction(1, 2);
  ExactValue w(1);
  ExactValue best(-1);
  r.discounted_value = ExactValue(0);
  for (std::size_t t = 0; t < n; ++t) {
    w *= delta;
    r.discounted_per_round.push_back(w * r.per_round[t]);
    r.win_probability.push_back((r.per_round[t] + ExactValue(1)) * half);
    r.discounted_value += r.discounted_per_round.back();
    if (r.discounted_per_round.back().abs() > best) {
      best = r.discounted_per_round.back().abs();
      r.round = t + 1;
    }
  }
  r.discounted_advantage = best * half;
  r.advantage = r.per_round[r.round - 1].abs() * half;
  return r;
}

}  // namespace penny
