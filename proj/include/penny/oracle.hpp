#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/game.hpp"
#include "penny/seed.hpp"
#include "penny/strategy.hpp"

namespace penny {

/// How per-round payoffs are aggregated: the average over n rounds, or the
/// discounted sum with round t weighted by delta^t.
class Weighting {
 public:
  static Weighting average() { return Weighting(); }
  static Weighting discounted(ExactValue delta) {
    require_discount(delta);
    Weighting w;
    w.delta_ = std::move(delta);
    return w;
  }

  bool is_average() const { return !delta_.has_value(); }
  const std::optional<ExactValue>& delta() const { return delta_; }

  /// Weight of 1-based round t in an n-round game.
  ExactValue weight(std::size_t t, std::size_t n) const {
    if (delta_) return delta_->pow(t);
    return ExactValue::fraction(1, static_cast<std::int64_t>(n));
  }

  ExactValue combine(const std::vector<ExactValue>& per_round) const {
    if (per_round.empty()) {
      if (is_average()) fail(ErrorCode::kZeroLengthGame, "zero-length game");
      return ExactValue(0);
    }
    ExactValue total(0);
    if (delta_) {
      ExactValue w(1);
      for (const auto& v : per_round) {
        w *= *delta_;
        total += w * v;
      }
      return total;
    }
    for (const auto& v : per_round) total += v;
    return total / ExactValue(static_cast<std::int64_t>(per_round.size()));
  }

 private:
  std::optional<ExactValue> delta_;
};

namespace detail {

inline std::uint64_t pair_space(const StrategySpec& s1, const StrategySpec& s2, const Limits& limits) {
  return seed_space(s1.seed_len(), limits) * seed_space(s2.seed_len(), limits);
}

/// Per-round bias Pr[H] - Pr[T] of an oblivious strategy, exact.
inline std::vector<ExactValue> marginal_bias(const StrategySpec& s, std::size_t n, Seat seat,
                                             const Limits& limits) {
  std::vector<ExactValue> bias(n);
  if (auto laws = s->round_laws(n, seat)) {
    for (std::size_t t = 0; t < n; ++t) {
      bias[t] = (*laws)[t].fresh ? ExactValue(0) : ExactValue((*laws)[t].fixed == Action::kHeads ? 1 : -1);
    }
    return bias;
  }
  const std::uint64_t total = seed_space(s.seed_len(), limits);
  std::vector<std::int64_t> balance(n, 0);
  for_each_seed(s.seed_len(), limits, [&](const Seed& seed) {
    const auto plays = s->sequence(seed, n, seat);
    for (std::size_t t = 0; t < n; ++t) balance[t] += plays[t] == Action::kHeads ? 1 : -1;
  });
  for (std::size_t t = 0; t < n; ++t) {
    bias[t] = ExactValue::fraction(balance[t], static_cast<std::int64_t>(total));
  }
  return bias;
}

/// Per-round [seed-summed payoff to P1] over every seed pair, by simulation.
inline std::vector<std::int64_t> enumerate_round_sums(const StrategySpec& s1, const StrategySpec& s2,
                                                      std::size_t n, const Limits& limits) {
  pair_space(s1, s2, limits);
  std::vector<std::int64_t> sums(n, 0);
  for_each_seed(s1.seed_len(), limits, [&](const Seed& a) {
    for_each_seed(s2.seed_len(), limits, [&](const Seed& b) {
      const Transcript t = simulate(s1, a, s2, b, n);
      for (std::size_t i = 0; i < n; ++i) sums[i] += stage_payoff(t[i].p1, t[i].p2);
    });
  });
  return sums;
}

}  // namespace detail

/// E[h_t] for each round t = 1..n, from Player 1's side. Independent
/// oblivious players factor into the product of their per-round biases;
/// anything adaptive falls back to enumerating every seed pair.
inline std::vector<ExactValue> per_round_values(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                                                const Limits& limits = {}) {
  if (s1.oblivious() && s2.oblivious()) {
    const auto b1 = detail::marginal_bias(s1, n, Seat::kPlayer1, limits);
    const auto b2 = detail::marginal_bias(s2, n, Seat::kPlayer2, limits);
    std::vector<ExactValue> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = b1[t] * b2[t];
    return out;
  }
  const auto sums = detail::enumerate_round_sums(s1, s2, n, limits);
  const auto pairs = static_cast<std::int64_t>(detail::pair_space(s1, s2, limits));
  std::vector<ExactValue> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = ExactValue::fraction(sums[t], pairs);
  return out;
}

/// E[U] of the profile: uniform over both players' seeds, exact.
inline ExactValue exact_value(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                              const Limits& limits = {}) {
  if (n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  return Weighting::average().combine(per_round_values(s1, s2, n, limits));
}

/// E[sum_t delta^t h_t] over the first n rounds.
inline ExactValue discounted_value(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                                   const ExactValue& delta, const Limits& limits = {}) {
  return Weighting::discounted(delta).combine(per_round_values(s1, s2, n, limits));
}

/// Reference path: average_payoff of every simulated seed pair.
inline ExactValue exact_value_enumerated(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                                         const Limits& limits = {}) {
  const auto pairs = static_cast<std::int64_t>(detail::pair_space(s1, s2, limits));
  ExactValue total(0);
  for_each_seed(s1.seed_len(), limits, [&](const Seed& a) {
    for_each_seed(s2.seed_len(), limits, [&](const Seed& b) { total += average_payoff(simulate(s1, a, s2, b, n)); });
  });
  return total / ExactValue(pairs);
}

// ---------------------------------------------------------------------------
// Best responses.

enum class BestResponseMethod {
  kAuto,
  /// Product-form opponents: fresh rounds are worth 0, fixed rounds 1.
  kClosedForm,
  /// Oblivious opponents: match the posterior majority each round.
  kGreedy,
  /// Any opponent: expectimax over the full history tree.
  kTree,
};

namespace detail {

// Sum over rounds of sum over posterior classes of |#H - #T|.
inline std::vector<std::int64_t> greedy_round_gains(const StrategySpec& opponent, std::size_t n,
                                                    Seat opponent_seat, const Limits& limits) {
  if (!opponent.oblivious()) fail(ErrorCode::kNotOblivious, opponent.describe() + " is not oblivious");
  if (n > 64) fail(ErrorCode::kInvalidParameter, "greedy best response supports at most 64 rounds");
  const std::size_t k = opponent.seed_len();
  const std::uint64_t total = seed_space(k, limits);
  std::vector<std::uint64_t> words(total, 0);
  for_each_seed(k, limits, [&](const Seed& seed) {
    const auto plays = opponent->sequence(seed, n, opponent_seat);
    std::uint64_t w = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (plays[t] == Action::kHeads) w |= std::uint64_t{1} << t;
    }
    words[seed.index()] = w;
  });
  std::vector<std::vector<std::uint64_t>> classes(1);
  classes[0].resize(total);
  for (std::uint64_t v = 0; v < total; ++v) classes[0][v] = v;

  std::vector<std::int64_t> gains(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::vector<std::uint64_t>> next;
    next.reserve(classes.size() * 2);
    for (auto& cls : classes) {
      std::vector<std::uint64_t> heads;
      std::vector<std::uint64_t> tails;
      for (auto v : cls) ((words[v] >> t) & 1u ? heads : tails).push_back(v);
      gains[t] += std::llabs(static_cast<std::int64_t>(heads.size()) - static_cast<std::int64_t>(tails.size()));
      if (!heads.empty()) next.push_back(std::move(heads));
      if (!tails.empty()) next.push_back(std::move(tails));
    }
    classes = std::move(next);
  }
  return gains;
}

template <class Value, class WeightFn>
Value tree_value(const StrategySpec& opponent, Seat opponent_seat, std::size_t n, Transcript& history,
                 const std::vector<std::uint64_t>& alive, const WeightFn& weight) {
  if (history.size() == n || alive.empty()) return Value(0);
  const Seat me = other(opponent_seat);
  const std::size_t t = history.size() + 1;
  std::vector<std::uint64_t> split[2];
  for (auto v : alive) {
    const Action b = opponent.act(Seed::from_index(v, opponent.seed_len()), history, opponent_seat);
    split[b == Action::kHeads ? 1 : 0].push_back(v);
  }
  std::optional<Value> best;
  for (Action a : {Action::kHeads, Action::kTails}) {
    Value total(0);
    for (Action b : {Action::kHeads, Action::kTails}) {
      const auto& branch = split[b == Action::kHeads ? 1 : 0];
      if (branch.empty()) continue;
      total += weight(t) * Value(static_cast<std::int64_t>(branch.size()) * payoff_for(me, a, b));
      history.push_back(Round::seated(me, a, b));
      total += tree_value<Value>(opponent, opponent_seat, n, history, branch, weight);
      history.pop_back();
    }
    if (!best || total > *best) best = total;
  }
  return *best;
}

}  // namespace detail

/// The best expected payoff any deterministic adaptive deviation achieves
/// against `opponent` seated at `opponent_seat`, from the deviator's side.
inline ExactValue best_response_value(const StrategySpec& opponent, std::size_t n, Seat opponent_seat,
                                      const Weighting& weighting, const Limits& limits = {},
                                      BestResponseMethod method = BestResponseMethod::kAuto) {
  if (n == 0 && weighting.is_average()) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  if (method == BestResponseMethod::kAuto) {
    if (opponent->round_laws(n, opponent_seat)) {
      method = BestResponseMethod::kClosedForm;
    } else if (opponent.oblivious()) {
      method = BestResponseMethod::kGreedy;
    } else {
      method = BestResponseMethod::kTree;
    }
  }

  switch (method) {
    case BestResponseMethod::kClosedForm: {
      auto laws = opponent->round_laws(n, opponent_seat);
      if (!laws) fail(ErrorCode::kInvalidParameter, opponent.describe() + " is not product-form");
      std::vector<ExactValue> gains(n);
      for (std::size_t t = 0; t < n; ++t) gains[t] = (*laws)[t].fresh ? ExactValue(0) : ExactValue(1);
      return weighting.combine(gains);
    }
    case BestResponseMethod::kGreedy: {
      const auto total = static_cast<std::int64_t>(seed_space(opponent.seed_len(), limits));
      const auto sums = detail::greedy_round_gains(opponent, n, opponent_seat, limits);
      std::vector<ExactValue> gains(n);
      for (std::size_t t = 0; t < n; ++t) gains[t] = ExactValue::fraction(sums[t], total);
      return weighting.combine(gains);
    }
    case BestResponseMethod::kTree:
    case BestResponseMethod::kAuto:
      break;
  }

  if (n > limits.max_tree_rounds) {
    fail(ErrorCode::kTreeTooLarge, "tree too large: " + std::to_string(n) + " rounds exceeds " +
                                       std::to_string(limits.max_tree_rounds));
  }
  const std::uint64_t total = seed_space(opponent.seed_len(), limits);
  std::vector<std::uint64_t> alive(total);
  for (std::uint64_t v = 0; v < total; ++v) alive[v] = v;
  Transcript history;
  const auto seeds = static_cast<std::int64_t>(total);
  if (weighting.is_average()) {
    const auto sum = detail::tree_value<std::int64_t>(opponent, opponent_seat, n, history, alive,
                                                      [](std::size_t) { return std::int64_t{1}; });
    return ExactValue::fraction(sum, seeds * static_cast<std::int64_t>(n));
  }
  std::vector<ExactValue> powers(n + 1, ExactValue(1));
  for (std::size_t t = 1; t <= n; ++t) powers[t] = powers[t - 1] * *weighting.delta();
  const auto sum = detail::tree_value<ExactValue>(opponent, opponent_seat, n, history, alive,
                                                  [&](std::size_t t) { return powers[t]; });
  return sum / ExactValue(seeds);
}

inline ExactValue best_response_value(const StrategySpec& opponent, std::size_t n, Seat opponent_seat,
                                      const Limits& limits = {},
                                      BestResponseMethod method = BestResponseMethod::kAuto) {
  return best_response_value(opponent, n, opponent_seat, Weighting::average(), limits, method);
}

// ---------------------------------------------------------------------------
// Gap certification.

struct GapReport {
  ExactValue value;  // P1's payoff; P2 receives -value
  ExactValue best_response_1;
  ExactValue best_response_2;
  ExactValue gap_1;
  ExactValue gap_2;
  ExactValue certified_epsilon;

  /// True iff the profile is a gamma-Nash equilibrium.
  bool certifies(const ExactValue& gamma) const { return certified_epsilon <= gamma; }
};

inline GapReport certify_gap(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                             const Weighting& weighting, const Limits& limits = {}) {
  GapReport r;
  r.value = weighting.combine(per_round_values(s1, s2, n, limits));
  r.best_response_1 = best_response_value(s2, n, Seat::kPlayer2, weighting, limits);
  r.best_response_2 = best_response_value(s1, n, Seat::kPlayer1, weighting, limits);
  r.gap_1 = r.best_response_1 - r.value;
  r.gap_2 = r.best_response_2 + r.value;
  r.certified_epsilon = std::max(r.gap_1, r.gap_2);
  return r;
}

inline GapReport certify_gap(const StrategySpec& s1, const StrategySpec& s2, std::size_t n,
                             const Limits& limits = {}) {
  if (n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  return certify_gap(s1, s2, n, Weighting::average(), limits);
}

}  // namespace penny
