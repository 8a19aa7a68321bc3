#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"

namespace penny {

enum class Action : std::uint8_t { kTails = 0, kHeads = 1 };

constexpr Action flip(Action a) {
  return a == Action::kHeads ? Action::kTails : Action::kHeads;
}

constexpr char to_char(Action a) { return a == Action::kHeads ? 'H' : 'T'; }

// Seed / stream bit 1 plays H, bit 0 plays T.
constexpr Action action_from_bit(bool bit) { return bit ? Action::kHeads : Action::kTails; }
constexpr bool bit_from_action(Action a) { return a == Action::kHeads; }

inline Action parse_action(char c) {
  if (c == 'H' || c == 'h') return Action::kHeads;
  if (c == 'T' || c == 't') return Action::kTails;
  fail(ErrorCode::kMalformedDescriptor, std::string("unknown action '") + c + "'");
}

enum class Seat : std::uint8_t { kPlayer1 = 1, kPlayer2 = 2 };

constexpr Seat other(Seat s) { return s == Seat::kPlayer1 ? Seat::kPlayer2 : Seat::kPlayer1; }

/// Payoff to Player 1, the matcher: +1 on equal plays, -1 otherwise.
constexpr int stage_payoff(Action p1, Action p2) { return p1 == p2 ? 1 : -1; }

/// Payoff to `seat` when that seat plays `own` against `opponent`.
constexpr int payoff_for(Seat seat, Action own, Action opponent) {
  return seat == Seat::kPlayer1 ? stage_payoff(own, opponent) : -stage_payoff(opponent, own);
}

struct Round {
  Action p1 = Action::kHeads;
  Action p2 = Action::kHeads;

  Action of(Seat s) const { return s == Seat::kPlayer1 ? p1 : p2; }
  static Round seated(Seat s, Action own, Action opponent) {
    return s == Seat::kPlayer1 ? Round{own, opponent} : Round{opponent, own};
  }
  friend bool operator==(const Round&, const Round&) = default;
};

/// Ordered rounds of paired plays. Round t (1-based in the game) lives at
/// index t-1. An empty transcript is a valid history prefix.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(std::vector<Round> rounds) : rounds_(std::move(rounds)) {}

  /// "HH,HT,TT": comma-separated rounds, Player 1's symbol first.
  static Transcript parse(std::string_view text) {
    Transcript t;
    if (text.empty()) return t;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t comma = text.find(',', start);
      std::string_view cell = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (cell.size() != 2) {
        fail(ErrorCode::kMalformedDescriptor, "malformed round '" + std::string(cell) + "'");
      }
      t.push_back({parse_action(cell[0]), parse_action(cell[1])});
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return t;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < rounds_.size(); ++i) {
      if (i != 0) out += ',';
      out += to_char(rounds_[i].p1);
      out += to_char(rounds_[i].p2);
    }
    return out;
  }

  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  const Round& operator[](std::size_t i) const { return rounds_[i]; }
  const Round& back() const { return rounds_.back(); }
  auto begin() const { return rounds_.begin(); }
  auto end() const { return rounds_.end(); }

  void push_back(Round r) { rounds_.push_back(r); }
  void pop_back() { rounds_.pop_back(); }

  /// Actions of one seat, in round order.
  std::vector<Action> plays(Seat s) const {
    std::vector<Action> out;
    out.reserve(rounds_.size());
    for (const Round& r : rounds_) out.push_back(r.of(s));
    return out;
  }

  friend Transcript operator+(Transcript a, const Transcript& b) {
    a.rounds_.insert(a.rounds_.end(), b.rounds_.begin(), b.rounds_.end());
    return a;
  }
  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::vector<Round> rounds_;
};

inline std::int64_t cumulative_payoff(const Transcript& t, Seat seat = Seat::kPlayer1) {
  std::int64_t total = 0;
  for (const Round& r : t) total += stage_payoff(r.p1, r.p2);
  return seat == Seat::kPlayer1 ? total : -total;
}

inline ExactValue average_payoff(const Transcript& t) {
  if (t.empty()) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  return ExactValue::fraction(cumulative_payoff(t), static_cast<std::int64_t>(t.size()));
}

inline void require_discount(const ExactValue& delta) {
  if (!(delta > ExactValue(0) && delta < ExactValue(1))) {
    fail(ErrorCode::kInvalidDiscount, "invalid discount factor " + delta.str());
  }
}

/// Sum over rounds t = 1..n of delta^t * h(round t).
inline ExactValue discounted_payoff(const Transcript& t, const ExactValue& delta) {
  require_discount(delta);
  ExactValue total(0);
  ExactValue weight(1);
  for (const Round& r : t) {
    weight *= delta;
    total += weight * ExactValue(stage_payoff(r.p1, r.p2));
  }
  return total;
}

}  // namespace penny
