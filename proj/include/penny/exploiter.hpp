#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/game.hpp"
#include "penny/seed.hpp"
#include "penny/strategy.hpp"

namespace penny {

/// Opponent action predicted by the largest share of the consistent seeds.
struct Majority {
  Action predicted = Action::kHeads;
  std::uint64_t count = 0;
  std::uint64_t total = 0;

  ExactValue p() const {
    return ExactValue::fraction(static_cast<std::int64_t>(count), static_cast<std::int64_t>(total));
  }
  double p_double() const { return static_cast<double>(count) / static_cast<double>(total); }
};

/// Seeds of a known opponent strategy that agree with every opponent move
/// observed so far.
class ConsistentSet {
 public:
  /// All 2^seed_len opponent seeds. With a horizon and an oblivious
  /// opponent, every seed's play sequence is computed once up front.
  static ConsistentSet init(StrategySpec opponent, Seat opponent_seat, const Limits& limits = {},
                            std::optional<std::size_t> horizon = std::nullopt) {
    ConsistentSet cs;
    const std::uint64_t count = seed_space(opponent.seed_len(), limits);
    cs.opponent_ = std::move(opponent);
    cs.seat_ = opponent_seat;
    cs.alive_.resize(count);
    for (std::uint64_t v = 0; v < count; ++v) cs.alive_[v] = v;
    if (horizon && cs.opponent_.oblivious() && *horizon <= 64) {
      cs.plays_.resize(count);
      for (std::uint64_t v = 0; v < count; ++v) {
        const auto seq = cs.opponent_->sequence(cs.seed(v), *horizon, opponent_seat);
        std::uint64_t word = 0;
        for (std::size_t t = 0; t < seq.size(); ++t) {
          if (seq[t] == Action::kHeads) word |= std::uint64_t{1} << t;
        }
        cs.plays_[v] = word;
      }
      cs.horizon_ = *horizon;
    }
    return cs;
  }

  const StrategySpec& opponent() const { return opponent_; }
  Seat opponent_seat() const { return seat_; }
  const std::vector<std::uint64_t>& alive() const { return alive_; }
  std::size_t size() const { return alive_.size(); }
  std::size_t round() const { return round_; }

  bool contains(const Seed& s) const {
    for (auto v : alive_) {
      if (v == s.index()) return true;
    }
    return false;
  }

  /// Ties predict H.
  Majority majority(const Transcript& history) const {
    check_round(history);
    if (alive_.empty()) fail(ErrorCode::kInconsistentObservation, "inconsistent observation: no seed left");
    std::uint64_t heads = 0;
    for (auto v : alive_) heads += predict(v, history) == Action::kHeads ? 1 : 0;
    const std::uint64_t tails = alive_.size() - heads;
    Majority m;
    m.total = alive_.size();
    m.predicted = heads >= tails ? Action::kHeads : Action::kTails;
    m.count = std::max(heads, tails);
    return m;
  }

  /// Keeps the seeds whose move this round, given history, equals observed.
  void filter(Action observed, const Transcript& history) {
    if (!try_filter(observed, history)) {
      fail(ErrorCode::kInconsistentObservation, "inconsistent observation: no seed of " + opponent_.describe() +
                                                    " plays " + to_char(observed) + " at round " +
                                                    std::to_string(round_));
    }
  }

  /// As filter, but leaves the set untouched and returns false when no
  /// seed survives.
  bool try_filter(Action observed, const Transcript& history) {
    check_round(history);
    std::vector<std::uint64_t> kept;
    kept.reserve(alive_.size());
    for (auto v : alive_) {
      if (predict(v, history) == observed) kept.push_back(v);
    }
    if (kept.empty()) return false;
    alive_ = std::move(kept);
    ++round_;
    return true;
  }

 private:
  Seed seed(std::uint64_t v) const { return Seed::from_index(v, opponent_.seed_len()); }

  Action predict(std::uint64_t v, const Transcript& history) const {
    if (history.size() < horizon_) {
      return ((plays_[v] >> history.size()) & 1u) != 0 ? Action::kHeads : Action::kTails;
    }
    return opponent_.act(seed(v), history, seat_);
  }

  void check_round(const Transcript& history) const {
    if (history.size() + 1 != round_) {
      fail(ErrorCode::kInvalidParameter, "history of " + std::to_string(history.size()) +
                                             " rounds does not match consistent-set round " +
                                             std::to_string(round_));
    }
  }

  StrategySpec opponent_;
  Seat seat_ = Seat::kPlayer2;
  std::vector<std::uint64_t> alive_;
  std::vector<std::uint64_t> plays_;
  std::size_t horizon_ = 0;
  std::size_t round_ = 1;
};

// ---------------------------------------------------------------------------
// Potential function phi(t) = sum_{k<t} h_k - log2 |S^t|.

inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0 && p < 1.0) h = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline void require_majority_fraction(double p) {
  if (!(p >= 0.5 && p <= 1.0)) {
    fail(ErrorCode::kInvalidParameter, "majority fraction " + std::to_string(p) + " outside [1/2, 1]");
  }
}

/// Expected potential increase 2p - 1 + H(p) when the true seed is uniform
/// over the consistent set; at least 1 on [1/2, 1].
inline double expected_potential_step(double p) {
  require_majority_fraction(p);
  return 2.0 * p - 1.0 + binary_entropy(p);
}

/// Realized potential change: the round payoff minus log2 of the fraction
/// of seeds that survive. A win keeps the majority share p.
inline double potential_step(double p, bool won) {
  require_majority_fraction(p);
  if (won) return 1.0 - std::log2(p);
  if (p >= 1.0) fail(ErrorCode::kInconsistentObservation, "inconsistent observation: loss against a unanimous set");
  return -1.0 - std::log2(1.0 - p);
}

struct PotentialRecord {
  std::size_t round = 0;
  Majority majority;
  std::uint64_t alive_size = 0;
  std::int64_t accumulated = 0;  // payoff over rounds before this one
  double phi = 0.0;
  int payoff = 0;
  double delta_phi = 0.0;
  double expected_delta_phi = 0.0;
};

struct PotentialTrace {
  std::vector<PotentialRecord> rounds;
  /// phi(n+1): total payoff minus log2 of the final consistent-set size.
  double final_phi = 0.0;
  std::int64_t final_payoff = 0;
  std::uint64_t final_alive = 0;
};

struct ExploitRun {
  Transcript transcript;
  PotentialTrace trace;
};

/// The exploiter's move against a predicted opponent move: match it from
/// seat 1, mismatch it from seat 2.
constexpr Action exploit_response(Seat exploiter_seat, Action predicted) {
  return exploiter_seat == Seat::kPlayer1 ? predicted : flip(predicted);
}

/// One match of the majority-elimination strategy against `opponent`
/// playing with `opponent_seed`, recording the potential each round.
inline ExploitRun run_exploiter(const StrategySpec& opponent, const Seed& opponent_seed, std::size_t n,
                                Seat exploiter_seat = Seat::kPlayer1, const Limits& limits = {}) {
  const Seat opp_seat = other(exploiter_seat);
  ConsistentSet cs = ConsistentSet::init(opponent, opp_seat, limits, n);
  auto opp = opponent->start(opponent_seed, opp_seat, n);
  ExploitRun run;
  std::int64_t accumulated = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    const Transcript& history = run.transcript;
    PotentialRecord rec;
    rec.round = t;
    rec.majority = cs.majority(history);
    rec.alive_size = cs.size();
    rec.accumulated = accumulated;
    rec.phi = static_cast<double>(accumulated) - std::log2(static_cast<double>(cs.size()));
    rec.expected_delta_phi = expected_potential_step(rec.majority.p_double());

    const Action mine = exploit_response(exploiter_seat, rec.majority.predicted);
    const Action theirs = opp->next(history);
    rec.payoff = payoff_for(exploiter_seat, mine, theirs);
    const auto before = static_cast<double>(cs.size());
    cs.filter(theirs, history);
    rec.delta_phi = rec.payoff - std::log2(static_cast<double>(cs.size()) / before);
    accumulated += rec.payoff;
    run.trace.rounds.push_back(rec);
    run.transcript.push_back(Round::seated(exploiter_seat, mine, theirs));
  }
  run.trace.final_payoff = accumulated;
  run.trace.final_alive = cs.size();
  run.trace.final_phi = static_cast<double>(accumulated) - std::log2(static_cast<double>(cs.size()));
  return run;
}

namespace detail {

class ExploiterPlayer final : public Player {
 public:
  ExploiterPlayer(const StrategySpec& opponent, Seat seat, std::size_t horizon, const Limits& limits)
      : seat_(seat), cs_(ConsistentSet::init(opponent, other(seat), limits, horizon)) {}

  Action next(const Transcript& history) override {
    while (!off_model_ && seen_.size() < history.size()) {
      const Round& r = history[seen_.size()];
      off_model_ = !cs_.try_filter(r.of(other(seat_)), seen_);
      seen_.push_back(r);
    }
    if (off_model_) return exploit_response(seat_, Action::kHeads);
    return exploit_response(seat_, cs_.majority(history).predicted);
  }

 private:
  Seat seat_;
  ConsistentSet cs_;
  Transcript seen_;
  bool off_model_ = false;
};

}  // namespace detail

/// Seedless adaptive strategy that knows the opponent's strategy (not its
/// seed) and plays the majority-elimination rule against it. Once the
/// opponent's play contradicts every seed it predicts H for the rest of
/// the match, so the strategy is defined on every history.
class ExploiterStrategy final : public Strategy {
 public:
  explicit ExploiterStrategy(StrategySpec opponent, Limits limits = {})
      : opponent_(std::move(opponent)), limits_(limits) {
    seed_space(opponent_.seed_len(), limits_);
  }

  StrategyKind kind() const override { return StrategyKind::kExploiter; }
  std::size_t seed_len() const override { return 0; }
  bool oblivious() const override { return false; }
  std::string describe() const override { return "exploit:vs=" + opponent_.describe(); }
  const StrategySpec& opponent() const { return opponent_; }

  std::unique_ptr<Player> start(const Seed& seed, Seat seat, std::size_t horizon) const override {
    check_seed(seed);
    return std::make_unique<detail::ExploiterPlayer>(opponent_, seat, horizon, limits_);
  }

 protected:
  // Pure replay of the filtering over the whole history.
  Action decide(const Seed&, const Transcript& history, Seat seat) const override {
    ConsistentSet cs = ConsistentSet::init(opponent_, other(seat), limits_, history.size() + 1);
    Transcript seen;
    for (const Round& r : history) {
      if (!cs.try_filter(r.of(other(seat)), seen)) return exploit_response(seat, Action::kHeads);
      seen.push_back(r);
    }
    return exploit_response(seat, cs.majority(history).predicted);
  }

 private:
  StrategySpec opponent_;
  Limits limits_;
};

inline StrategySpec exploiter(StrategySpec opponent, const Limits& limits = {}) {
  return StrategySpec::make<ExploiterStrategy>(std::move(opponent), limits);
}

}  // namespace penny
