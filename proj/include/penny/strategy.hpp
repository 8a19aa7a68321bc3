#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/game.hpp"
#include "penny/seed.hpp"

namespace penny {

enum class StrategyKind {
  kUniformTable,
  kConstant,
  kAlternator,
  kPrefixTail,
  kGeneratorBacked,
  kPredictorBacked,
  kExploiter,
};

/// Per-round law of a product-form strategy: each round either reads a
/// fresh seed bit that no other round reads, or plays a seed-independent
/// action.
struct RoundLaw {
  bool fresh = false;
  Action fixed = Action::kHeads;
};

/// Match-local play state. Players created by Strategy::start() are owned
/// by a single match and fed the shared history before each round.
class Player {
 public:
  virtual ~Player() = default;
  virtual Action next(const Transcript& history) = 0;
};

/// A deterministic map (seed, history, seat) -> action with a declared
/// randomness budget. Implementations must be immutable.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const = 0;
  virtual std::size_t seed_len() const = 0;
  virtual bool oblivious() const = 0;
  virtual std::string describe() const = 0;

  /// Action for round history.size() + 1.
  Action act(const Seed& seed, const Transcript& history, Seat seat) const {
    check_seed(seed);
    return decide(seed, history, seat);
  }

  /// Fresh match-local player for a game of `horizon` rounds.
  virtual std::unique_ptr<Player> start(const Seed& seed, Seat seat, std::size_t horizon) const;

  /// The full action sequence of an oblivious strategy.
  virtual std::vector<Action> sequence(const Seed& seed, std::size_t n, Seat seat) const {
    if (!oblivious()) fail(ErrorCode::kNotOblivious, describe() + " is not oblivious");
    check_seed(seed);
    std::vector<Action> out;
    out.reserve(n);
    Transcript history;
    for (std::size_t t = 0; t < n; ++t) {
      Action a = decide(seed, history, seat);
      out.push_back(a);
      history.push_back(Round::seated(seat, a, Action::kHeads));
    }
    return out;
  }

  /// Non-empty only for product-form strategies over the first n rounds.
  virtual std::optional<std::vector<RoundLaw>> round_laws(std::size_t /*n*/, Seat /*seat*/) const {
    return std::nullopt;
  }

  void check_seed(const Seed& seed) const {
    if (seed.size() != seed_len()) {
      fail(ErrorCode::kBudgetViolation, "budget violation: " + describe() + " declares " +
                                            std::to_string(seed_len()) + " seed bits, got " +
                                            std::to_string(seed.size()));
    }
  }

 protected:
  virtual Action decide(const Seed& seed, const Transcript& history, Seat seat) const = 0;
};

namespace detail {

class ActPlayer final : public Player {
 public:
  ActPlayer(const Strategy& strategy, Seed seed, Seat seat)
      : strategy_(strategy), seed_(seed), seat_(seat) {}
  Action next(const Transcript& history) override { return strategy_.act(seed_, history, seat_); }

 private:
  const Strategy& strategy_;
  Seed seed_;
  Seat seat_;
};

}  // namespace detail

inline std::unique_ptr<Player> Strategy::start(const Seed& seed, Seat seat, std::size_t) const {
  check_seed(seed);
  return std::make_unique<detail::ActPlayer>(*this, seed, seat);
}

/// Shared immutable handle; copies are cheap and refer to the same strategy.
class StrategySpec {
 public:
  StrategySpec() = default;
  explicit StrategySpec(std::shared_ptr<const Strategy> impl) : impl_(std::move(impl)) {}

  template <class S, class... Args>
  static StrategySpec make(Args&&... args) {
    return StrategySpec(std::make_shared<const S>(std::forward<Args>(args)...));
  }

  const Strategy& operator*() const { return *impl_; }
  const Strategy* operator->() const { return impl_.get(); }
  explicit operator bool() const { return impl_ != nullptr; }

  StrategyKind kind() const { return impl_->kind(); }
  std::size_t seed_len() const { return impl_->seed_len(); }
  bool oblivious() const { return impl_->oblivious(); }
  std::string describe() const { return impl_->describe(); }
  Action act(const Seed& seed, const Transcript& history, Seat seat) const {
    return impl_->act(seed, history, seat);
  }

 private:
  std::shared_ptr<const Strategy> impl_;
};

// ---------------------------------------------------------------------------
// Basic families.

/// Plays seed bit t at round t; with k < n bits the table is reused
/// cyclically. k = 0 always plays H.
class UniformTable final : public Strategy {
 public:
  explicit UniformTable(std::size_t bits) : bits_(bits) {
    if (bits > kMaxSeedBits) fail(ErrorCode::kBudgetViolation, "budget violation: seed longer than 64 bits");
  }
  StrategyKind kind() const override { return StrategyKind::kUniformTable; }
  std::size_t seed_len() const override { return bits_; }
  bool oblivious() const override { return true; }
  std::string describe() const override { return "uniform:" + std::to_string(bits_); }

  std::optional<std::vector<RoundLaw>> round_laws(std::size_t n, Seat) const override {
    if (bits_ != 0 && n > bits_) return std::nullopt;
    std::vector<RoundLaw> laws(n);
    for (auto& law : laws) law.fresh = bits_ != 0;
    return laws;
  }

 protected:
  Action decide(const Seed& seed, const Transcript& history, Seat) const override {
    if (bits_ == 0) return Action::kHeads;
    return action_from_bit(seed.bit(history.size() % bits_));
  }

 private:
  std::size_t bits_;
};

class ConstantStrategy final : public Strategy {
 public:
  explicit ConstantStrategy(Action action) : action_(action) {}
  StrategyKind kind() const override { return StrategyKind::kConstant; }
  std::size_t seed_len() const override { return 0; }
  bool oblivious() const override { return true; }
  std::string describe() const override { return std::string("const:") + to_char(action_); }

  std::optional<std::vector<RoundLaw>> round_laws(std::size_t n, Seat) const override {
    return std::vector<RoundLaw>(n, RoundLaw{false, action_});
  }

 protected:
  Action decide(const Seed&, const Transcript&, Seat) const override { return action_; }

 private:
  Action action_;
};

class Alternator final : public Strategy {
 public:
  explicit Alternator(Action first = Action::kHeads) : first_(first) {}
  StrategyKind kind() const override { return StrategyKind::kAlternator; }
  std::size_t seed_len() const override { return 0; }
  bool oblivious() const override { return true; }
  std::string describe() const override { return std::string("alt:") + to_char(first_); }

  std::optional<std::vector<RoundLaw>> round_laws(std::size_t n, Seat) const override {
    std::vector<RoundLaw> laws(n);
    for (std::size_t t = 0; t < n; ++t) laws[t].fixed = t % 2 == 0 ? first_ : flip(first_);
    return laws;
  }

 protected:
  Action decide(const Seed&, const Transcript& history, Seat) const override {
    return history.size() % 2 == 0 ? first_ : flip(first_);
  }

 private:
  Action first_;
};

enum class TailKind { kConstantHeads, kAlternate };

/// Uniform play on the first `prefix` rounds (one fresh seed bit each), then
/// a deterministic tail: constant H, or H,T,H,... starting with H.
class PrefixTail final : public Strategy {
 public:
  PrefixTail(std::size_t prefix, TailKind tail) : prefix_(prefix), tail_(tail) {
    if (prefix > kMaxSeedBits) fail(ErrorCode::kBudgetViolation, "budget violation: seed longer than 64 bits");
  }
  StrategyKind kind() const override { return StrategyKind::kPrefixTail; }
  std::size_t seed_len() const override { return prefix_; }
  bool oblivious() const override { return true; }
  std::string describe() const override {
    return "prefix-tail:prefix=" + std::to_string(prefix_) +
           (tail_ == TailKind::kConstantHeads ? ",tail=const" : ",tail=alt");
  }
  std::size_t prefix() const { return prefix_; }
  TailKind tail() const { return tail_; }

  std::optional<std::vector<RoundLaw>> round_laws(std::size_t n, Seat) const override {
    std::vector<RoundLaw> laws(n);
    for (std::size_t t = 0; t < n; ++t) {
      if (t < prefix_) {
        laws[t].fresh = true;
      } else {
        laws[t].fixed = tail_action(t);
      }
    }
    return laws;
  }

 protected:
  Action decide(const Seed& seed, const Transcript& history, Seat) const override {
    const std::size_t t = history.size();
    if (t < prefix_) return action_from_bit(seed.bit(t));
    return tail_action(t);
  }

 private:
  Action tail_action(std::size_t t) const {
    if (tail_ == TailKind::kConstantHeads) return Action::kHeads;
    return (t - prefix_) % 2 == 0 ? Action::kHeads : Action::kTails;
  }

  std::size_t prefix_;
  TailKind tail_;
};

inline StrategySpec uniform_table(std::size_t bits) { return StrategySpec::make<UniformTable>(bits); }
inline StrategySpec constant(Action a) { return StrategySpec::make<ConstantStrategy>(a); }
inline StrategySpec alternator(Action first = Action::kHeads) { return StrategySpec::make<Alternator>(first); }
inline StrategySpec prefix_tail(std::size_t prefix, TailKind tail) {
  return StrategySpec::make<PrefixTail>(prefix, tail);
}

struct Profile {
  StrategySpec p1;
  StrategySpec p2;
};

/// Both players randomize for the first k1 / k2 rounds; afterwards Player 1
/// plays H forever and Player 2 alternates H,T,... .
inline Profile make_budget_profile(std::size_t k1, std::size_t k2) {
  return {prefix_tail(k1, TailKind::kConstantHeads), prefix_tail(k2, TailKind::kAlternate)};
}

/// The gamma-Nash construction: n(1-gamma) uniform rounds, then the
/// constant-H / alternating tails. Needs gamma*n to be an even integer.
inline Profile make_gamma_equilibrium(std::size_t n, const ExactValue& gamma) {
  if (gamma < ExactValue(0) || gamma > ExactValue(1)) {
    fail(ErrorCode::kInadmissibleGamma, "inadmissible gamma " + gamma.str() + ": outside [0, 1]");
  }
  const ExactValue tail = gamma * ExactValue(static_cast<std::int64_t>(n));
  if (!tail.is_integer() || tail.numerator() % 2 != 0) {
    fail(ErrorCode::kInadmissibleGamma,
         "inadmissible gamma " + gamma.str() + ": gamma*n = " + tail.str() + " is not an even integer");
  }
  const auto tail_len = static_cast<std::size_t>(tail.numerator());
  const std::size_t prefix = n - tail_len;
  if (tail_len == 0) return {uniform_table(prefix), uniform_table(prefix)};
  return make_budget_profile(prefix, prefix);
}

/// Plays n rounds; each seat sees the shared history so far.
inline Transcript simulate(const StrategySpec& s1, const Seed& seed1, const StrategySpec& s2,
                           const Seed& seed2, std::size_t n) {
  auto a = s1->start(seed1, Seat::kPlayer1, n);
  auto b = s2->start(seed2, Seat::kPlayer2, n);
  Transcript history;
  for (std::size_t t = 0; t < n; ++t) {
    Action x = a->next(history);
    Action y = b->next(history);
    history.push_back({x, y});
  }
  return history;
}

}  // namespace penny
