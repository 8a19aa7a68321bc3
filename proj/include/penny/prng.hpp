#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/game.hpp"
#include "penny/seed.hpp"
#include "penny/strategy.hpp"

namespace penny {

using BitString = std::vector<std::uint8_t>;

inline BitString parse_bits(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') fail(ErrorCode::kMalformedDescriptor, "bit string must be 0/1");
    out.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

inline std::string format_bits(const BitString& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out += b ? '1' : '0';
  return out;
}

inline bool inner_product_bit(std::uint64_t x, std::uint64_t y) {
  return (std::popcount(x & y) & 1) != 0;
}

inline bool inner_product_bit(const BitString& x, const BitString& y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kLengthMismatch, "inner product of strings of length " + std::to_string(x.size()) +
                                         " and " + std::to_string(y.size()));
  }
  unsigned parity = 0;
  for (std::size_t i = 0; i < x.size(); ++i) parity ^= static_cast<unsigned>(x[i] & y[i]);
  return parity != 0;
}

// ---------------------------------------------------------------------------
// Permutations of {0,1}^m.

namespace detail {

inline bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  base %= p;
  while (e != 0) {
    if (e & 1u) r = mul_mod(r, base, p);
    base = mul_mod(base, base, p);
    e >>= 1u;
  }
  return r;
}

inline std::uint64_t smallest_primitive_root(std::uint64_t p) {
  if (p == 2) return 1;
  std::vector<std::uint64_t> factors;
  std::uint64_t rest = p - 1;
  for (std::uint64_t d = 2; d * d <= rest; ++d) {
    if (rest % d == 0) {
      factors.push_back(d);
      while (rest % d == 0) rest /= d;
    }
  }
  if (rest > 1) factors.push_back(rest);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool primitive = true;
    for (auto q : factors) {
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) return g;
  }
  return 1;
}

}  // namespace detail

inline constexpr unsigned kMaxPermutationWidth = 32;
inline constexpr unsigned kVerifiedPermutationWidth = 20;

/// A bijection on m-bit values. Construction verifies bijectivity by
/// exhaustion for m <= 20; wider custom maps are refused outright.
class Permutation {
 public:
  using Map = std::function<std::uint64_t(std::uint64_t)>;

  static Permutation identity(unsigned m) {
    return Permutation("id", m, [](std::uint64_t x) { return x; }, true);
  }

  /// x + c mod 2^m.
  static Permutation add(unsigned m, std::uint64_t c = 1) {
    const std::uint64_t mask = mask_for(m);
    return Permutation("add:" + std::to_string(c), m, [c, mask](std::uint64_t x) { return (x + c) & mask; }, true);
  }

  /// a * x mod 2^m for odd a.
  static Permutation multiply(unsigned m, std::uint64_t a = 5) {
    if (a % 2 == 0) fail(ErrorCode::kNotBijective, "multiplier " + std::to_string(a) + " is even: not a bijection");
    const std::uint64_t mask = mask_for(m);
    return Permutation("mul:" + std::to_string(a), m,
                       [a, mask](std::uint64_t x) { return (a * x) & mask; }, true);
  }

  /// Multiplication by a primitive root g in the unit group mod p, where p
  /// is the largest prime <= 2^m + 1. Value x encodes the unit x + 1;
  /// values x >= p - 1 (none when 2^m + 1 is prime) are fixed points.
  static Permutation unit_group(unsigned m) {
    check_width(m);
    if (m == 0) return Permutation("mulmod", 0, [](std::uint64_t x) { return x; }, true);
    std::uint64_t p = (std::uint64_t{1} << m) + 1;
    while (!detail::is_prime(p)) --p;
    const std::uint64_t g = detail::smallest_primitive_root(p);
    return Permutation("mulmod", m, [p, g](std::uint64_t x) {
      if (x + 2 > p) return x;
      return detail::mul_mod(x + 1, g, p) - 1;
    }, true);
  }

  /// Registers an arbitrary map after an exhaustive bijectivity check.
  static Permutation custom(std::string name, unsigned m, Map map) {
    if (m > kVerifiedPermutationWidth) {
      fail(ErrorCode::kNotBijective, "cannot verify custom permutation wider than 20 bits");
    }
    return Permutation(std::move(name), m, std::move(map), false);
  }

  /// "id", "add", "add:3", "mul", "mul:5", "mulmod".
  static Permutation parse(std::string_view text, unsigned m) {
    std::string_view name = text;
    std::optional<std::uint64_t> arg;
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
      name = text.substr(0, colon);
      const std::string digits(text.substr(colon + 1));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        fail(ErrorCode::kMalformedDescriptor, "malformed permutation parameter in '" + std::string(text) + "'");
      }
      arg = std::stoull(digits);
    }
    if (name == "id" || name == "identity") return identity(m);
    if (name == "add") return add(m, arg.value_or(1));
    if (name == "mul") return multiply(m, arg.value_or(5));
    if (name == "mulmod") return unit_group(m);
    fail(ErrorCode::kMalformedDescriptor, "unknown permutation '" + std::string(text) + "'");
  }

  std::uint64_t operator()(std::uint64_t x) const { return map_(x); }
  unsigned width() const { return width_; }
  const std::string& name() const { return name_; }

 private:
  Permutation(std::string name, unsigned m, Map map, bool builtin)
      : name_(std::move(name)), width_(m), map_(std::move(map)) {
    check_width(m);
    if (m <= kVerifiedPermutationWidth) {
      verify();
    } else if (!builtin) {
      fail(ErrorCode::kNotBijective, "cannot verify permutation wider than 20 bits");
    }
  }

  static void check_width(unsigned m) {
    if (m > kMaxPermutationWidth) {
      fail(ErrorCode::kInvalidParameter, "permutation width " + std::to_string(m) + " exceeds 32");
    }
  }

  static std::uint64_t mask_for(unsigned m) {
    check_width(m);
    return m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
  }

  void verify() const {
    const std::uint64_t size = std::uint64_t{1} << width_;
    std::vector<bool> seen(size, false);
    for (std::uint64_t x = 0; x < size; ++x) {
      const std::uint64_t y = map_(x);
      if (y >= size || seen[y]) {
        fail(ErrorCode::kNotBijective, "permutation '" + name_ + "' is not a bijection on " +
                                           std::to_string(width_) + " bits");
      }
      seen[y] = true;
    }
  }

  std::string name_;
  unsigned width_;
  Map map_;
};

// ---------------------------------------------------------------------------
// Generators.

enum class GeneratorKind { kBlumMicaliIp, kUniformPassthrough, kBrokenRepeat, kBrokenCounter, kConstant };

/// Bit-stream generator with a fixed output length.
///
///   blum-micali-ip   seed (x, y), m bits each; bit i = f^(n-i+1)(x) . y
///   passthrough      seed of n bits emitted verbatim
///   broken-repeat    seed of `period` bits repeated
///   broken-counter   m-bit counter c; emits c, c+1, ... (mod 2^m) MSB first
///   constant         no seed; every bit equals `bit`
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kUniformPassthrough;
  std::optional<Permutation> perm;
  unsigned m = 0;
  std::size_t period = 0;
  bool bit = true;
  std::size_t out_len = 0;

  static GeneratorSpec blum_micali(Permutation f, std::size_t n) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kBlumMicaliIp;
    g.m = f.width();
    g.perm = std::move(f);
    g.out_len = n;
    g.check();
    return g;
  }
  static GeneratorSpec passthrough(std::size_t n) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kUniformPassthrough;
    g.out_len = n;
    g.check();
    return g;
  }
  static GeneratorSpec broken_repeat(std::size_t period, std::size_t n) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kBrokenRepeat;
    g.period = period;
    g.out_len = n;
    g.check();
    return g;
  }
  static GeneratorSpec broken_counter(unsigned m, std::size_t n) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kBrokenCounter;
    g.m = m;
    g.out_len = n;
    g.check();
    return g;
  }
  static GeneratorSpec constant_stream(std::size_t n, bool bit = true) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kConstant;
    g.bit = bit;
    g.out_len = n;
    return g;
  }

  std::size_t seed_len() const {
    switch (kind) {
      case GeneratorKind::kBlumMicaliIp: return 2 * static_cast<std::size_t>(m);
      case GeneratorKind::kUniformPassthrough: return out_len;
      case GeneratorKind::kBrokenRepeat: return period;
      case GeneratorKind::kBrokenCounter: return m;
      case GeneratorKind::kConstant: return 0;
    }
    return 0;
  }

  /// Descriptor without the output length, e.g. "bm,perm=add:1,m=3".
  std::string describe() const {
    switch (kind) {
      case GeneratorKind::kBlumMicaliIp: return "bm,perm=" + perm->name() + ",m=" + std::to_string(m);
      case GeneratorKind::kUniformPassthrough: return "passthrough";
      case GeneratorKind::kBrokenRepeat: return "repeat,period=" + std::to_string(period);
      case GeneratorKind::kBrokenCounter: return "counter,m=" + std::to_string(m);
      case GeneratorKind::kConstant: return std::string("const,bit=") + (bit ? "1" : "0");
    }
    return "";
  }

  void check() const {
    if (seed_len() > kMaxSeedBits) {
      fail(ErrorCode::kBudgetViolation, "budget violation: generator seed longer than 64 bits");
    }
    if ((kind == GeneratorKind::kBrokenRepeat && period == 0) ||
        (kind == GeneratorKind::kBrokenCounter && m == 0)) {
      fail(ErrorCode::kInvalidParameter, "generator " + describe() + " needs a positive width");
    }
  }
};

/// Output stream of length g.out_len. The permutation chain is walked once
/// forward and read back in reverse, so bit 1 is f^n(x) . y.
inline BitString generate(const GeneratorSpec& g, const Seed& seed) {
  if (seed.size() != g.seed_len()) {
    fail(ErrorCode::kBudgetViolation, "budget violation: generator " + g.describe() + " expects " +
                                          std::to_string(g.seed_len()) + " seed bits");
  }
  const std::size_t n = g.out_len;
  BitString out(n);
  switch (g.kind) {
    case GeneratorKind::kBlumMicaliIp: {
      const std::uint64_t x = seed.slice(0, g.m);
      const std::uint64_t y = seed.slice(g.m, g.m);
      std::uint64_t v = x;
      for (std::size_t j = 1; j <= n; ++j) {
        v = (*g.perm)(v);
        out[n - j] = inner_product_bit(v, y) ? 1 : 0;
      }
      break;
    }
    case GeneratorKind::kUniformPassthrough:
      for (std::size_t i = 0; i < n; ++i) out[i] = seed.bit(i) ? 1 : 0;
      break;
    case GeneratorKind::kBrokenRepeat: {
      const std::size_t reads = std::min(n, g.period);
      for (std::size_t i = 0; i < reads; ++i) out[i] = seed.bit(i) ? 1 : 0;
      for (std::size_t i = reads; i < n; ++i) out[i] = out[i - g.period];
      break;
    }
    case GeneratorKind::kBrokenCounter: {
      const std::uint64_t mask = g.m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.m) - 1;
      const std::uint64_t start = seed.slice(0, g.m);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t word = (start + i / g.m) & mask;
        out[i] = (word >> (g.m - 1 - i % g.m)) & 1u;
      }
      break;
    }
    case GeneratorKind::kConstant:
      for (auto& b : out) b = g.bit ? 1 : 0;
      break;
  }
  return out;
}

inline BitString bm_generate(const GeneratorSpec& g, const Seed& seed) {
  if (g.kind != GeneratorKind::kBlumMicaliIp) {
    fail(ErrorCode::kInvalidParameter, "bm_generate needs a blum-micali-ip generator");
  }
  return generate(g, seed);
}

// ---------------------------------------------------------------------------
// Next-bit predictors.

enum class PredictorKind { kConstant, kFrequency, kMarkov1, kPeriodicity, kAffine };

/// A deterministic map from a bit prefix to a guess of the next bit.
///
///   constant      always `param` (0 or 1)
///   frequency     majority of seen bits at positions congruent to the
///                 target modulo `param` (param 1: all seen bits)
///   markov        majority of the bits that followed earlier occurrences
///                 of the last bit
///   period        smallest p with the whole prefix p-periodic (confirmed by
///                 at least one repeat); predicts the bit p back
///   affine        XOR of the last `param` bits
///
/// Ties and empty evidence guess 1.
struct Predictor {
  PredictorKind kind = PredictorKind::kFrequency;
  unsigned param = 1;

  static Predictor constant(bool bit) { return {PredictorKind::kConstant, bit ? 1u : 0u}; }
  static Predictor frequency(unsigned phase = 1) { return {PredictorKind::kFrequency, phase}; }
  static Predictor markov1() { return {PredictorKind::kMarkov1, 0}; }
  static Predictor periodicity() { return {PredictorKind::kPeriodicity, 0}; }
  static Predictor affine(unsigned window = 3) { return {PredictorKind::kAffine, window}; }

  /// "const:0", "const:1", "freq", "freq:2", "markov", "period", "affine", "affine:3".
  static Predictor parse(std::string_view text) {
    std::string_view name = text;
    std::optional<unsigned> arg;
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
      name = text.substr(0, colon);
      const std::string digits(text.substr(colon + 1));
      if (digits.empty() || digits.size() > 6 || digits.find_first_not_of("0123456789") != std::string::npos) {
        fail(ErrorCode::kMalformedDescriptor, "malformed predictor parameter in '" + std::string(text) + "'");
      }
      arg = static_cast<unsigned>(std::stoul(digits));
    }
    Predictor p;
    if (name == "const") {
      p = constant(arg.value_or(1) != 0);
      if (arg && *arg > 1) fail(ErrorCode::kMalformedDescriptor, "constant predictor takes 0 or 1");
    } else if (name == "freq") {
      p = frequency(arg.value_or(1));
    } else if (name == "markov" && !arg) {
      p = markov1();
    } else if (name == "period" && !arg) {
      p = periodicity();
    } else if (name == "affine") {
      p = affine(arg.value_or(3));
    } else {
      fail(ErrorCode::kMalformedDescriptor, "unknown predictor '" + std::string(text) + "'");
    }
    if ((p.kind == PredictorKind::kFrequency || p.kind == PredictorKind::kAffine) && p.param == 0) {
      fail(ErrorCode::kMalformedDescriptor, "predictor parameter must be positive");
    }
    return p;
  }

  std::string describe() const {
    switch (kind) {
      case PredictorKind::kConstant: return "const:" + std::to_string(param);
      case PredictorKind::kFrequency: return param == 1 ? "freq" : "freq:" + std::to_string(param);
      case PredictorKind::kMarkov1: return "markov";
      case PredictorKind::kPeriodicity: return "period";
      case PredictorKind::kAffine: return "affine:" + std::to_string(param);
    }
    return "";
  }

  bool guess(std::span<const std::uint8_t> prefix) const {
    const std::size_t len = prefix.size();
    switch (kind) {
      case PredictorKind::kConstant:
        return param != 0;
      case PredictorKind::kFrequency: {
        long balance = 0;
        for (std::size_t back = param; back <= len; back += param) balance += prefix[len - back] ? 1 : -1;
        return balance >= 0;
      }
      case PredictorKind::kMarkov1: {
        if (len == 0) return true;
        const auto last = prefix[len - 1];
        long balance = 0;
        for (std::size_t j = 0; j + 1 < len; ++j) {
          if (prefix[j] == last) balance += prefix[j + 1] ? 1 : -1;
        }
        return balance >= 0;
      }
      case PredictorKind::kPeriodicity: {
        for (std::size_t p = 1; p < len; ++p) {
          bool periodic = true;
          for (std::size_t j = p; j < len; ++j) {
            if (prefix[j] != prefix[j - p]) {
              periodic = false;
              break;
            }
          }
          if (periodic) return prefix[len - p] != 0;
        }
        return true;
      }
      case PredictorKind::kAffine: {
        if (len < param) return true;
        unsigned parity = 0;
        for (std::size_t j = len - param; j < len; ++j) parity ^= prefix[j];
        return parity != 0;
      }
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// Strategies backed by generators and predictors.

/// Plays generator bit t at round t (1 -> H). Oblivious; defined for at
/// most g.out_len rounds.
class GeneratorStrategy final : public Strategy {
 public:
  explicit GeneratorStrategy(GeneratorSpec g) : g_(std::move(g)) { g_.check(); }

  StrategyKind kind() const override { return StrategyKind::kGeneratorBacked; }
  std::size_t seed_len() const override { return g_.seed_len(); }
  bool oblivious() const override { return true; }
  std::string describe() const override { return "gen:" + g_.describe(); }
  const GeneratorSpec& generator() const { return g_; }

  std::vector<Action> sequence(const Seed& seed, std::size_t n, Seat) const override {
    check_seed(seed);
    check_horizon(n);
    const BitString bits = generate(g_, seed);
    std::vector<Action> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = action_from_bit(bits[t] != 0);
    return out;
  }

  std::optional<std::vector<RoundLaw>> round_laws(std::size_t n, Seat) const override {
    check_horizon(n);
    if (g_.kind == GeneratorKind::kUniformPassthrough) {
      return std::vector<RoundLaw>(n, RoundLaw{true, Action::kHeads});
    }
    if (g_.kind == GeneratorKind::kConstant) {
      return std::vector<RoundLaw>(n, RoundLaw{false, action_from_bit(g_.bit)});
    }
    return std::nullopt;
  }

 protected:
  Action decide(const Seed& seed, const Transcript& history, Seat) const override {
    check_horizon(history.size() + 1);
    return action_from_bit(generate(g_, seed)[history.size()] != 0);
  }

 private:
  void check_horizon(std::size_t n) const {
    if (n > g_.out_len) {
      fail(ErrorCode::kHorizonExceeded, "generator " + g_.describe() + " defines only " +
                                            std::to_string(g_.out_len) + " rounds");
    }
  }

  GeneratorSpec g_;
};

/// Adaptive, seedless: guesses the opponent's next move from the opponent's
/// past moves and plays to win against the guess.
class PredictorStrategy final : public Strategy {
 public:
  explicit PredictorStrategy(Predictor p) : predictor_(p) {}

  StrategyKind kind() const override { return StrategyKind::kPredictorBacked; }
  std::size_t seed_len() const override { return 0; }
  bool oblivious() const override { return false; }
  std::string describe() const override { return "pred:" + predictor_.describe(); }
  const Predictor& predictor() const { return predictor_; }

 protected:
  Action decide(const Seed&, const Transcript& history, Seat seat) const override {
    BitString seen;
    seen.reserve(history.size());
    for (const Round& r : history) seen.push_back(bit_from_action(r.of(other(seat))) ? 1 : 0);
    const Action guess = action_from_bit(predictor_.guess(seen));
    return seat == Seat::kPlayer1 ? guess : flip(guess);
  }

 private:
  Predictor predictor_;
};

inline StrategySpec generator_strategy(GeneratorSpec g) {
  return StrategySpec::make<GeneratorStrategy>(std::move(g));
}

inline StrategySpec predictor_strategy(Predictor p) { return StrategySpec::make<PredictorStrategy>(p); }

// ---------------------------------------------------------------------------
// Predictor evaluation.

enum class EvalMode { kExact, kSampled };

struct PredictorReport {
  bool exact = true;
  std::uint64_t samples = 0;
  /// 1-based position achieving the maximal advantage (first on ties).
  std::size_t best_position = 0;
  double advantage = 0.0;
  std::optional<ExactValue> exact_advantage;
  std::vector<double> per_position;
  std::vector<ExactValue> exact_per_position;
  /// 95% normal-approximation half-width at best_position (sampled mode).
  double half_width = 0.0;
};

/// Per-position |Pr[predictor right] - 1/2| over the generator's seeds.
/// Sampled mode draws seeds from a 64-bit Mersenne Twister seeded with
/// eval_seed, so reports are reproducible.
inline PredictorReport eval_next_bit_predictor(const GeneratorSpec& g, const Predictor& predictor,
                                               EvalMode mode, std::uint64_t samples = 0,
                                               std::uint64_t eval_seed = 0, const Limits& limits = {}) {
  const std::size_t n = g.out_len;
  const std::size_t k = g.seed_len();
  std::vector<std::uint64_t> correct(n, 0);
  auto score = [&](const Seed& seed) {
    const BitString bits = generate(g, seed);
    for (std::size_t i = 0; i < n; ++i) {
      if (predictor.guess(std::span<const std::uint8_t>(bits.data(), i)) == (bits[i] != 0)) ++correct[i];
    }
  };

  PredictorReport report;
  report.per_position.assign(n, 0.0);
  if (mode == EvalMode::kExact) {
    const std::uint64_t total = seed_space(k, limits);
    for_each_seed(k, limits, score);
    report.exact = true;
    report.samples = total;
    ExactValue best(-1);
    for (std::size_t i = 0; i < n; ++i) {
      const ExactValue adv =
          (ExactValue::fraction(static_cast<std::int64_t>(correct[i]), static_cast<std::int64_t>(total)) -
           ExactValue::fraction(1, 2)).abs();
      report.exact_per_position.push_back(adv);
      report.per_position[i] = adv.to_double();
      if (adv > best) {
        best = adv;
        report.best_position = i + 1;
      }
    }
    if (n != 0) {
      report.exact_advantage = best;
      report.advantage = best.to_double();
    }
    return report;
  }

  if (samples == 0) fail(ErrorCode::kInvalidParameter, "sampled mode needs a positive sample count");
  std::mt19937_64 rng(eval_seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const std::uint64_t draw = k == 0 ? 0 : (rng() >> (64 - k));
    score(Seed::from_index(draw, k));
  }
  report.exact = false;
  report.samples = samples;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = static_cast<double>(correct[i]) / static_cast<double>(samples);
    report.per_position[i] = std::fabs(rate - 0.5);
    if (report.per_position[i] > best) {
      best = report.per_position[i];
      report.best_position = i + 1;
      report.half_width = 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(samples));
    }
  }
  report.advantage = n == 0 ? 0.0 : best;
  return report;
}

struct AccuracyReport {
  std::vector<ExactValue> per_round;
  ExactValue mean;
};

/// Exact accuracy of `predictor` guessing an oblivious opponent's moves,
/// averaged uniformly over the opponent's seeds.
inline AccuracyReport predictor_accuracy(const Predictor& predictor, const StrategySpec& opponent,
                                         std::size_t n, Seat opponent_seat, const Limits& limits = {}) {
  if (!opponent.oblivious()) fail(ErrorCode::kNotOblivious, opponent.describe() + " is not oblivious");
  if (n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game");
  const std::size_t k = opponent.seed_len();
  const std::uint64_t total = seed_space(k, limits);
  std::vector<std::uint64_t> correct(n, 0);
  for_each_seed(k, limits, [&](const Seed& seed) {
    const std::vector<Action> plays = opponent->sequence(seed, n, opponent_seat);
    BitString bits(n);
    for (std::size_t t = 0; t < n; ++t) bits[t] = bit_from_action(plays[t]) ? 1 : 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (predictor.guess(std::span<const std::uint8_t>(bits.data(), t)) == (bits[t] != 0)) ++correct[t];
    }
  });
  AccuracyReport report;
  std::uint64_t sum = 0;
  for (std::size_t t = 0; t < n; ++t) {
    report.per_round.push_back(
        ExactValue::fraction(static_cast<std::int64_t>(correct[t]), static_cast<std::int64_t>(total)));
    sum += correct[t];
  }
  report.mean = ExactValue::fraction(static_cast<std::int64_t>(sum), static_cast<std::int64_t>(total * n));
  return report;
}

}  // namespace penny
