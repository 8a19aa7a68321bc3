#include <gtest/gtest.h>

#include <cmath>

#include "penny/penny.hpp"
#include "population.hpp"

namespace penny {
namespace {

using testing::oblivious_population;
using testing::shipped_predictors;

ExactValue q(std::int64_t n, std::int64_t d) { return ExactValue::fraction(n, d); }

bool guess(const Predictor& p, const char* prefix) {
  const BitString bits = parse_bits(prefix);
  return p.guess(std::span<const std::uint8_t>(bits.data(), bits.size()));
}

// Straight from the definition: bit i applies f n-i+1 times from scratch.
BitString naive_bm(const Permutation& f, unsigned m, std::uint64_t x, std::uint64_t y, std::size_t n) {
  BitString out;
  for (std::size_t i = 1; i <= n; ++i) {
    std::uint64_t v = x;
    for (std::size_t j = 0; j < n - i + 1; ++j) v = f(v);
    unsigned parity = 0;
    for (unsigned b = 0; b < m; ++b) parity ^= ((v >> b) & 1u) & ((y >> b) & 1u);
    out.push_back(static_cast<std::uint8_t>(parity));
  }
  return out;
}

TEST(InnerProduct, Examples) {
  EXPECT_TRUE(inner_product_bit(parse_bits("101"), parse_bits("110")));
  EXPECT_FALSE(inner_product_bit(parse_bits("000"), parse_bits("111")));
  EXPECT_FALSE(inner_product_bit(parse_bits("11"), parse_bits("11")));
  try {
    inner_product_bit(parse_bits("10"), parse_bits("101"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
  EXPECT_THROW(parse_bits("102"), Error);
}

TEST(Permutation, RegistryRejectsNonBijections) {
  EXPECT_THROW(Permutation::custom("square", 4, [](std::uint64_t x) { return (x * x) & 15u; }), Error);
  EXPECT_THROW(Permutation::custom("escape", 3, [](std::uint64_t x) { return x + 1; }), Error);
  EXPECT_THROW(Permutation::custom("wide", 21, [](std::uint64_t x) { return x; }), Error);
  EXPECT_THROW(Permutation::multiply(5, 6), Error);
  EXPECT_THROW(Permutation::parse("mul:4", 5), Error);
  EXPECT_THROW(Permutation::parse("rot", 5), Error);
  EXPECT_THROW(Permutation::add(33), Error);
  EXPECT_NO_THROW(Permutation::custom("swap", 2, [](std::uint64_t x) { return x ^ 3u; }));
  try {
    Permutation::custom("zero", 3, [](std::uint64_t) { return std::uint64_t{0}; });
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotBijective);
  }
}

TEST(Permutation, ShippedFamiliesAreBijections) {
  for (unsigned m = 0; m <= 12; ++m) {
    for (const char* name : {"id", "add:1", "add:7", "mul:5", "mul:3", "mulmod"}) {
      const Permutation f = Permutation::parse(name, m);
      std::vector<bool> hit(std::size_t{1} << m, false);
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) {
        const auto y = f(x);
        ASSERT_LT(y, std::uint64_t{1} << m);
        ASSERT_FALSE(hit[y]) << name << " m=" << m;
        hit[y] = true;
      }
    }
  }
  EXPECT_NO_THROW(Permutation::unit_group(20));
  EXPECT_NO_THROW(Permutation::unit_group(32));
}

TEST(Permutation, UnitGroupIsAFullCycleWhenTheModulusIsPrime) {
  // 2^8 + 1 = 257 is prime, so a primitive root walks all 256 values.
  const Permutation f = Permutation::unit_group(8);
  std::uint64_t v = 0;
  std::size_t len = 0;
  do {
    v = f(v);
    ++len;
  } while (v != 0);
  EXPECT_EQ(len, 256u);
}

TEST(BmGenerate, Examples) {
  const auto id = GeneratorSpec::blum_micali(Permutation::identity(3), 5);
  for (std::uint64_t v = 0; v < 64; ++v) {
    const BitString bits = bm_generate(id, Seed::from_index(v, 6));
    const bool c = inner_product_bit(v >> 3, v & 7u);
    for (auto b : bits) EXPECT_EQ(b != 0, c);
  }
  const auto add = GeneratorSpec::blum_micali(Permutation::add(3, 1), 2);
  EXPECT_EQ(format_bits(bm_generate(add, Seed::parse("000001"))), "01");
  const auto pass = GeneratorSpec::passthrough(6);
  EXPECT_EQ(format_bits(generate(pass, Seed::parse("101100"))), "101100");
  EXPECT_THROW(bm_generate(pass, Seed::parse("101100")), Error);
  EXPECT_THROW(generate(add, Seed::parse("0001")), Error);
}

TEST(BmGenerate, MatchesNaiveIterationAndHasFixedLength) {
  for (unsigned m : {1u, 3u, 4u}) {
    for (const char* name : {"id", "add:1", "mul:5", "mulmod"}) {
      const Permutation f = Permutation::parse(name, m);
      for (std::size_t n : {1u, 5u, 9u}) {
        const auto g = GeneratorSpec::blum_micali(f, n);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << (2 * m)); ++v) {
          const BitString a = bm_generate(g, Seed::from_index(v, 2 * m));
          ASSERT_EQ(a.size(), n);
          ASSERT_EQ(a, naive_bm(f, m, v >> m, v & ((1u << m) - 1), n)) << name;
          ASSERT_EQ(a, bm_generate(g, Seed::from_index(v, 2 * m)));
        }
      }
    }
  }
}

TEST(Generators, BrokenFamilies) {
  EXPECT_EQ(format_bits(generate(GeneratorSpec::broken_repeat(3, 8), Seed::parse("110"))), "11011011");
  EXPECT_EQ(format_bits(generate(GeneratorSpec::broken_counter(2, 7), Seed::parse("11"))), "1100011");
  EXPECT_EQ(format_bits(generate(GeneratorSpec::constant_stream(4, false), Seed())), "0000");
  EXPECT_THROW(GeneratorSpec::broken_repeat(0, 4), Error);
  EXPECT_EQ(GeneratorSpec::blum_micali(Permutation::unit_group(8), 16).seed_len(), 16u);
}

TEST(Predictors, GuessRules) {
  EXPECT_TRUE(guess(Predictor::frequency(), ""));
  EXPECT_TRUE(guess(Predictor::frequency(), "10"));
  EXPECT_FALSE(guess(Predictor::frequency(), "100"));
  EXPECT_FALSE(guess(Predictor::frequency(2), "001"));
  EXPECT_TRUE(guess(Predictor::frequency(2), "110"));
  EXPECT_FALSE(guess(Predictor::markov1(), "10101"));
  EXPECT_FALSE(guess(Predictor::markov1(), "0101"));
  EXPECT_TRUE(guess(Predictor::markov1(), "1010"));
  EXPECT_TRUE(guess(Predictor::periodicity(), "1101101"));
  EXPECT_FALSE(guess(Predictor::periodicity(), "1001001"));
  EXPECT_TRUE(guess(Predictor::periodicity(), "1"));
  EXPECT_FALSE(guess(Predictor::affine(3), "1011"));
  EXPECT_TRUE(guess(Predictor::affine(2), "01"));
  EXPECT_FALSE(guess(Predictor::constant(false), "111"));
  EXPECT_EQ(Predictor::parse("freq:2").describe(), "freq:2");
  EXPECT_EQ(Predictor::parse("affine").describe(), "affine:3");
  for (const char* bad : {"freq:0", "const:2", "markov:1", "wizard", "freq:x"}) {
    EXPECT_THROW(Predictor::parse(bad), Error) << bad;
  }
}

TEST(EvalPredictor, PassthroughIsUnpredictable) {
  const auto g = GeneratorSpec::passthrough(10);
  for (const auto& p : shipped_predictors()) {
    const PredictorReport r = eval_next_bit_predictor(g, p, EvalMode::kExact);
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.samples, 1024u);
    ASSERT_TRUE(r.exact_advantage);
    EXPECT_EQ(*r.exact_advantage, ExactValue(0)) << p.describe();
    for (const auto& a : r.exact_per_position) EXPECT_EQ(a, ExactValue(0));
  }
}

TEST(EvalPredictor, FrequencyBreaksBrokenRepeat) {
  for (std::size_t period : {1u, 2u, 3u}) {
    const auto g = GeneratorSpec::broken_repeat(period, 10);
    const PredictorReport r =
        eval_next_bit_predictor(g, Predictor::frequency(static_cast<unsigned>(period)), EvalMode::kExact);
    EXPECT_EQ(*r.exact_advantage, q(1, 2));
    EXPECT_EQ(r.best_position, period + 1);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(r.exact_per_position[i], i >= period ? q(1, 2) : ExactValue(0)) << i;
    }
  }
}

TEST(EvalPredictor, AffineGuessAgainstAddOneFixture) {
  const auto g = GeneratorSpec::blum_micali(Permutation::add(8, 1), 16);
  const PredictorReport r = eval_next_bit_predictor(g, Predictor::affine(3), EvalMode::kExact);
  EXPECT_EQ(r.samples, 65536u);
  // Independent count of the same quantity.
  std::vector<std::int64_t> right(16, 0);
  for (std::uint64_t v = 0; v < 65536; ++v) {
    const BitString bits = naive_bm(Permutation::add(8, 1), 8, v >> 8, v & 255u, 16);
    for (std::size_t i = 0; i < 16; ++i) {
      // Too little evidence guesses 1.
      unsigned x = 1;
      if (i >= 3) x = bits[i - 1] ^ bits[i - 2] ^ bits[i - 3];
      right[i] += x == bits[i] ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(r.exact_per_position[i], (q(right[i], 65536) - q(1, 2)).abs()) << i;
  }
  EXPECT_EQ(r.exact_advantage->str(), "1/4");
  EXPECT_EQ(r.best_position, 4u);
}

TEST(EvalPredictor, SampledModeIsReproducibleAndCalibrated) {
  const auto g = GeneratorSpec::blum_micali(Permutation::add(4, 3), 12);
  const Predictor p = Predictor::markov1();
  const PredictorReport exact = eval_next_bit_predictor(g, p, EvalMode::kExact);
  const PredictorReport a = eval_next_bit_predictor(g, p, EvalMode::kSampled, 20000, 42);
  const PredictorReport b = eval_next_bit_predictor(g, p, EvalMode::kSampled, 20000, 42);
  EXPECT_FALSE(a.exact);
  EXPECT_FALSE(a.exact_advantage.has_value());
  EXPECT_EQ(a.per_position, b.per_position);
  EXPECT_EQ(a.half_width, b.half_width);
  EXPECT_GT(a.half_width, 0.0);
  EXPECT_LT(a.half_width, 0.01);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(a.per_position[i], exact.per_position[i], 0.03) << i;
  EXPECT_THROW(eval_next_bit_predictor(g, p, EvalMode::kSampled, 0, 1), Error);
  Limits tight;
  tight.cap = 64;
  EXPECT_THROW(eval_next_bit_predictor(g, p, EvalMode::kExact, 0, 0, tight), Error);
  EXPECT_NO_THROW(eval_next_bit_predictor(g, p, EvalMode::kSampled, 10, 0, tight));
}

TEST(EvalPredictor, AdvantageStaysInRange) {
  for (const auto& m : {GeneratorSpec::broken_counter(3, 9), GeneratorSpec::blum_micali(Permutation::unit_group(3), 9),
                        GeneratorSpec::constant_stream(9)}) {
    for (const auto& p : shipped_predictors()) {
      const PredictorReport r = eval_next_bit_predictor(m, p, EvalMode::kExact);
      EXPECT_GE(*r.exact_advantage, ExactValue(0));
      EXPECT_LE(*r.exact_advantage, q(1, 2));
    }
  }
}

TEST(PredictorStrategy, PayoffAccuracyIdentity) {
  for (std::size_t n : {4u, 8u}) {
    for (const auto& m : oblivious_population(n, std::min<std::size_t>(n, 6))) {
      for (const auto& p : shipped_predictors()) {
        const auto s = predictor_strategy(p);
        const AccuracyReport acc = predictor_accuracy(p, m.strategy, n, Seat::kPlayer2);
        EXPECT_EQ(exact_value(s, m.strategy, n), ExactValue(2) * acc.mean - ExactValue(1)) << m.label;
        const auto per = per_round_values(s, m.strategy, n);
        for (std::size_t t = 0; t < n; ++t) EXPECT_EQ(per[t], ExactValue(2) * acc.per_round[t] - ExactValue(1));
        // From seat 2 the predictor mismatches its guess.
        const AccuracyReport acc1 = predictor_accuracy(p, m.strategy, n, Seat::kPlayer1);
        EXPECT_EQ(exact_value(m.strategy, s, n), ExactValue(1) - ExactValue(2) * acc1.mean) << m.label;
      }
    }
  }
}

TEST(PredictorStrategy, Examples) {
  EXPECT_EQ(exact_value(predictor_strategy(Predictor::constant(true)), constant(Action::kHeads), 5), ExactValue(1));
  EXPECT_EQ(exact_value(predictor_strategy(Predictor::constant(true)), uniform_table(6), 6), ExactValue(0));
  const auto rep = generator_strategy(GeneratorSpec::broken_repeat(2, 8));
  const auto acc = predictor_accuracy(Predictor::frequency(), rep, 8, Seat::kPlayer2);
  EXPECT_EQ(exact_value(predictor_strategy(Predictor::frequency()), rep, 8), ExactValue(2) * acc.mean - ExactValue(1));
  const auto per = per_round_values(predictor_strategy(Predictor::frequency(2)), rep, 8);
  for (std::size_t t = 2; t < 8; ++t) EXPECT_EQ(per[t], ExactValue(1));
  EXPECT_EQ(predictor_strategy(Predictor::markov1()).seed_len(), 0u);
  EXPECT_FALSE(predictor_strategy(Predictor::markov1()).oblivious());
}

TEST(GeneratorStrategy, HorizonIsEnforced) {
  const auto s = generator_strategy(GeneratorSpec::broken_repeat(2, 4));
  EXPECT_THROW(s->sequence(Seed::parse("10"), 5, Seat::kPlayer1), Error);
  EXPECT_THROW(simulate(s, Seed::parse("10"), alternator(), Seed(), 5), Error);
}

// Direct counting of Pr[Player 1 wins round i] over all seed pairs.
ExactValue win_rate(const StrategySpec& p1, const StrategySpec& s, std::size_t n, std::size_t round) {
  std::int64_t wins = 0;
  std::int64_t total = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << p1.seed_len()); ++a) {
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << s.seed_len()); ++b) {
      const Transcript t = simulate(p1, Seed::from_index(a, p1.seed_len()), s, Seed::from_index(b, s.seed_len()), n);
      wins += stage_payoff(t[round - 1].p1, t[round - 1].p2) == 1 ? 1 : 0;
      ++total;
    }
  }
  return q(wins, total);
}

TEST(Distinguisher, Examples) {
  for (const auto& s : {constant(Action::kTails), alternator(), uniform_table(3)}) {
    const DistinguisherReport r = payoff_to_distinguisher(s, GeneratorSpec::passthrough(6), 6);
    EXPECT_EQ(r.advantage, ExactValue(0));
    for (const auto& e : r.per_round) EXPECT_EQ(e, ExactValue(0));
  }
  const DistinguisherReport c = payoff_to_distinguisher(constant(Action::kTails), GeneratorSpec::constant_stream(5, false), 5);
  EXPECT_EQ(c.round, 1u);
  EXPECT_EQ(c.advantage, q(1, 2));
  EXPECT_EQ(c.per_round[0].abs(), ExactValue(1));
}

TEST(Distinguisher, LowerBoundAndIndependentProbabilities) {
  const std::size_t n = 6;
  const std::vector<GeneratorSpec> gens = {
      GeneratorSpec::broken_repeat(2, n), GeneratorSpec::broken_counter(2, n),
      GeneratorSpec::blum_micali(Permutation::add(2, 1), n), GeneratorSpec::blum_micali(Permutation::unit_group(3), n),
      GeneratorSpec::constant_stream(n), GeneratorSpec::passthrough(n)};
  for (const auto& g : gens) {
    const auto gp = generator_strategy(g);
    std::vector<StrategySpec> opponents = {constant(Action::kHeads), alternator(Action::kTails), uniform_table(2),
                                           predictor_strategy(Predictor::markov1()), exploiter(gp)};
    for (const auto& s : opponents) {
      const DistinguisherReport r = payoff_to_distinguisher(s, g, n);
      EXPECT_GE(r.advantage, exact_value(gp, s, n).abs() * q(1, 2)) << g.describe() << " vs " << s.describe();
      EXPECT_EQ(r.pr_generator, win_rate(gp, s, n, r.round)) << g.describe() << " vs " << s.describe();
      if (s.kind() != StrategyKind::kExploiter) {
        // Feed the test a truly uniform stream instead.
        EXPECT_EQ(win_rate(generator_strategy(GeneratorSpec::passthrough(n)), s, n, r.round), r.pr_uniform);
      }
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(r.per_round[i].abs(), r.per_round[r.round - 1].abs());
    }
  }
}

}  // namespace
}  // namespace penny
