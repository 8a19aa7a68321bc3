#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "penny/descriptor.hpp"
#include "penny/discounted.hpp"
#include "penny/distinguisher.hpp"
#include "penny/error.hpp"
#include "penny/exploiter.hpp"
#include "penny/oracle.hpp"
#include "penny/prng.hpp"
#include "penny/strategy.hpp"

namespace penny::cli {

using Json = nlohmann::ordered_json;

enum class Command { kSimulate, kExploit, kVerifyEq, kPrngTest, kDiscounted, kSweep };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::kSimulate: return "simulate";
    case Command::kExploit: return "exploit";
    case Command::kVerifyEq: return "verify-eq";
    case Command::kPrngTest: return "prng-test";
    case Command::kDiscounted: return "discounted";
    case Command::kSweep: return "sweep";
  }
  return "";
}

enum class Format { kCsv, kJson };

/// Everything a run depends on. Sampled modes carry their evaluation seed
/// here, so a config fully determines its artifact.
struct ExperimentConfig {
  Command command = Command::kSimulate;
  std::size_t n = 0;
  std::string p1;
  std::string p2;
  std::string vs;
  std::string seed1;
  std::string seed2;
  std::string seed;
  std::string gamma;
  std::optional<std::size_t> truncate;
  std::string gen = "bm";
  std::string perm = "add";
  unsigned m = 4;
  std::size_t period = 2;
  std::string predictor = "freq";
  std::string mode = "exact";
  std::uint64_t samples = 0;
  std::uint64_t eval_seed = 0;
  std::string delta;
  std::string epsilon;
  std::optional<std::size_t> seed_len;
  std::string prefix = "uniform";
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::string family = "uniform";
  Format format = Format::kCsv;
  std::string out;
  std::string run_id;
  Limits limits;
  /// Effective configuration in a fixed order, echoed into artifacts.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Thrown by parse_config when --help is requested.
struct HelpRequested {
  std::string text;
};

struct RunResult {
  int status = 0;
  std::string artifact;
};

// ---------------------------------------------------------------------------
// Budget families for sweeps: one opponent per seed length k.

/// uniform, prefix-tail, repeat, counter, passthrough, bm-<perm> (k even).
inline StrategySpec opponent_with_budget(std::string_view family, std::size_t k, std::size_t n) {
  if (family == "uniform") return uniform_table(k);
  if (family == "prefix-tail") return prefix_tail(k, TailKind::kAlternate);
  if (family == "repeat") {
    return generator_strategy(k == 0 ? GeneratorSpec::constant_stream(n) : GeneratorSpec::broken_repeat(k, n));
  }
  if (family == "counter") {
    return generator_strategy(k == 0 ? GeneratorSpec::constant_stream(n)
                                     : GeneratorSpec::broken_counter(static_cast<unsigned>(k), n));
  }
  if (family == "passthrough") {
    if (k != n) fail(ErrorCode::kInvalidParameter, "passthrough opponents need k = n");
    return generator_strategy(GeneratorSpec::passthrough(n));
  }
  if (family.substr(0, 3) == "bm-") {
    if (k % 2 != 0) fail(ErrorCode::kInvalidParameter, "bm opponents need an even seed length");
    const auto m = static_cast<unsigned>(k / 2);
    return generator_strategy(GeneratorSpec::blum_micali(Permutation::parse(family.substr(3), m), n));
  }
  fail(ErrorCode::kMalformedDescriptor, "unknown opponent family '" + std::string(family) + "'");
}

struct SweepRow {
  std::size_t k = 0;
  std::size_t n = 0;
  ExactValue guaranteed;
  ExactValue achieved;
  ExactValue margin;
};

/// Exact exploiter payoff against each budget; guaranteed = (n - k) / n.
inline std::vector<SweepRow> sweep(std::string_view family, std::size_t n, std::size_t k_min, std::size_t k_max,
                                   const Limits& limits = {}) {
  std::vector<SweepRow> rows;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const StrategySpec opp = opponent_with_budget(family, k, n);
    SweepRow row;
    row.k = k;
    row.n = n;
    row.guaranteed = ExactValue::fraction(static_cast<std::int64_t>(n) - static_cast<std::int64_t>(k),
                                          static_cast<std::int64_t>(n));
    row.achieved = exact_value(exploiter(opp, limits), opp, n, limits);
    row.margin = row.achieved - row.guaranteed;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Config parsing.

namespace detail {

inline std::uint64_t cap_from_environment() {
  std::uint64_t cap = kDefaultEnumerationCap;
  if (const char* env = std::getenv("PENNY_CAP"); env != nullptr && *env != '\0') {
    const std::string text(env);
    if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 19) {
      fail(ErrorCode::kInvalidParameter, "PENNY_CAP must be a positive integer");
    }
    const std::uint64_t requested = std::stoull(text);
    if (requested == 0) fail(ErrorCode::kInvalidParameter, "PENNY_CAP must be a positive integer");
    cap = std::min(cap, requested);
  }
  return cap;
}

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Flat "key = value" lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidParameter, "cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kMalformedDescriptor, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

inline std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  auto count = [&](const std::string& v) -> std::size_t {
    if (v.empty() || v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::kMalformedDescriptor, "malformed range '" + text + "'");
    }
    return std::stoull(v);
  };
  if (dots == std::string::npos) {
    const auto k = count(text);
    return {k, k};
  }
  const auto lo = count(text.substr(0, dots));
  const auto hi = count(text.substr(dots + 2));
  if (lo > hi) fail(ErrorCode::kMalformedDescriptor, "empty range '" + text + "'");
  return {lo, hi};
}

inline Format parse_format(const std::string& text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  fail(ErrorCode::kInvalidParameter, "format must be csv or json");
}

inline std::string generator_descriptor(const ExperimentConfig& c) {
  if (c.gen == "bm") return "bm,perm=" + c.perm + ",m=" + std::to_string(c.m);
  if (c.gen == "passthrough") return "passthrough";
  if (c.gen == "repeat") return "repeat,period=" + std::to_string(c.period);
  if (c.gen == "counter") return "counter,m=" + std::to_string(c.m);
  if (c.gen == "const") return "const";
  fail(ErrorCode::kMalformedDescriptor, "unknown generator '" + c.gen + "'");
}

inline void require_n(const ExperimentConfig& c) {
  if (c.n == 0) fail(ErrorCode::kZeroLengthGame, "zero-length game: --n must be positive");
}

inline void check_seed_arg(const std::string& bits, const StrategySpec& s, const char* field) {
  if (bits.empty()) {
    if (s.seed_len() != 0) {
      fail(ErrorCode::kBudgetViolation, std::string("budget violation: ") + field + " needs " +
                                            std::to_string(s.seed_len()) + " bits for " + s.describe());
    }
    return;
  }
  s.operator*().check_seed(Seed::parse(bits));
}

struct Resolved {
  StrategySpec p1;
  StrategySpec p2;
  std::optional<ExactValue> gamma;
  std::optional<GeneratorSpec> generator;
  std::optional<Predictor> predictor;
  std::optional<DiscountParams> discount;
  DiscountPrefix prefix;
  std::size_t n = 0;
  std::size_t seed_len = 0;
};

/// Builds every object a run needs; all validation happens here.
inline Resolved resolve(const ExperimentConfig& c) {
  Resolved r;
  const Limits& lim = c.limits;
  switch (c.command) {
    case Command::kSimulate:
      require_n(c);
      r.p1 = parse_strategy(c.p1, c.n, Seat::kPlayer1, lim);
      r.p2 = parse_strategy(c.p2, c.n, Seat::kPlayer2, lim);
      check_seed_arg(c.seed1, r.p1, "--seed1");
      check_seed_arg(c.seed2, r.p2, "--seed2");
      break;
    case Command::kExploit:
      require_n(c);
      r.p2 = parse_strategy(c.vs, c.n, Seat::kPlayer2, lim);
      seed_space(r.p2.seed_len(), lim);
      if (!c.seed.empty()) check_seed_arg(c.seed, r.p2, "--seed");
      r.p1 = exploiter(r.p2, lim);
      break;
    case Command::kVerifyEq:
      require_n(c);
      if (!c.gamma.empty()) r.gamma = ExactValue::parse(c.gamma);
      if (!c.p1.empty() || !c.p2.empty()) {
        if (c.p1.empty() || c.p2.empty()) fail(ErrorCode::kInvalidParameter, "--p1 and --p2 go together");
        r.p1 = parse_strategy(c.p1, c.n, Seat::kPlayer1, lim);
        r.p2 = parse_strategy(c.p2, c.n, Seat::kPlayer2, lim);
      } else {
        if (!r.gamma) fail(ErrorCode::kInvalidParameter, "verify-eq needs --gamma or --p1/--p2");
        Profile profile = make_gamma_equilibrium(c.n, *r.gamma);
        if (c.truncate) {
          if (*c.truncate > c.n) fail(ErrorCode::kInvalidParameter, "--truncate exceeds --n");
          profile = make_budget_profile(*c.truncate, *c.truncate);
        }
        r.p1 = profile.p1;
        r.p2 = profile.p2;
      }
      if (!r.p1->round_laws(c.n, Seat::kPlayer1)) seed_space(r.p1.seed_len(), lim);
      if (!r.p2->round_laws(c.n, Seat::kPlayer2)) seed_space(r.p2.seed_len(), lim);
      break;
    case Command::kPrngTest:
      require_n(c);
      r.generator = parse_generator(generator_descriptor(c), c.n);
      r.predictor = Predictor::parse(c.predictor);
      if (c.mode == "exact") {
        seed_space(r.generator->seed_len(), lim);
      } else if (c.mode == "sampled") {
        if (c.samples == 0) fail(ErrorCode::kInvalidParameter, "sampled mode needs --samples > 0");
      } else {
        fail(ErrorCode::kInvalidParameter, "mode must be exact or sampled");
      }
      break;
    case Command::kDiscounted: {
      if (c.delta.empty() || c.epsilon.empty()) fail(ErrorCode::kInvalidParameter, "discounted needs --delta and --epsilon");
      r.discount.emplace(ExactValue::parse(c.delta), ExactValue::parse(c.epsilon));
      r.n = c.n != 0 ? c.n : min_rounds(*r.discount);
      if (c.prefix == "uniform") {
        r.prefix = DiscountPrefix::uniform();
        r.seed_len = c.seed_len.value_or(r.n);
      } else if (c.prefix.substr(0, 4) == "gen:") {
        r.prefix = DiscountPrefix::from_generator(parse_generator(c.prefix.substr(4), r.n));
        r.seed_len = c.seed_len.value_or(r.prefix.generator->seed_len());
      } else {
        fail(ErrorCode::kMalformedDescriptor, "prefix must be uniform or gen:<generator>");
      }
      const StrategySpec s = r.prefix.strategy(r.n, r.seed_len);
      if (r.seed_len > r.n) fail(ErrorCode::kInvalidParameter, "--seed-len exceeds the prefix length");
      if (!s->round_laws(r.n, Seat::kPlayer1)) seed_space(s.seed_len(), lim);
      break;
    }
    case Command::kSweep:
      require_n(c);
      for (std::size_t k = c.k_min; k <= c.k_max; ++k) {
        seed_space(opponent_with_budget(c.family, k, c.n).seed_len(), lim);
      }
      break;
  }
  return r;
}

}  // namespace detail

/// Parses "<command> [flags]" (argv without the program name). A
/// "--config <file>" of key = value lines supplies flags not given on the
/// command line; a "command" key picks the subcommand when none is given.
inline ExperimentConfig parse_config(std::vector<std::string> args) {
  ExperimentConfig c;
  c.limits.cap = detail::cap_from_environment();

  // Splice config-file entries in behind explicit flags.
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path) {
    std::set<std::string> given;
    for (const auto& a : args) {
      if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    }
    for (const auto& [key, value] : detail::read_config_file(*config_path)) {
      if (key == "command") {
        if (args.empty() || args.front().rfind("--", 0) == 0) args.insert(args.begin(), value);
        continue;
      }
      if (given.count(key)) continue;
      args.push_back("--" + key);
      args.push_back(value);
    }
  }

  CLI::App app{"Randomness-budgeted repeated Matching Pennies laboratory", "penny"};
  app.require_subcommand(1);
  std::string format = "csv";
  std::string k_range;
  std::string seed_len;

  auto common = [&](CLI::App* sub, const char* default_format) {
    format = default_format;
    sub->add_option("--out", c.out, "Artifact path (stdout when omitted)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--run-id", c.run_id, "Identifier echoed into the artifact");
  };

  auto* sim = app.add_subcommand("simulate", "Play two strategies with fixed seeds");
  sim->add_option("--n", c.n, "Rounds")->required();
  sim->add_option("--p1", c.p1, "Player 1 strategy")->required();
  sim->add_option("--p2", c.p2, "Player 2 strategy")->required();
  sim->add_option("--seed1", c.seed1, "Player 1 seed bits");
  sim->add_option("--seed2", c.seed2, "Player 2 seed bits");

  auto* exp = app.add_subcommand("exploit", "Majority-elimination exploiter against a known strategy");
  exp->add_option("--n", c.n, "Rounds")->required();
  exp->add_option("--vs", c.vs, "Opponent (Player 2) strategy")->required();
  exp->add_option("--seed", c.seed, "Opponent seed for the traced run (default all zeros)");

  auto* ver = app.add_subcommand("verify-eq", "Certify the Nash gap of a profile exactly");
  ver->add_option("--n", c.n, "Rounds")->required();
  ver->add_option("--gamma", c.gamma, "Slack; without --p1/--p2 builds the gamma construction");
  ver->add_option("--truncate", c.truncate, "Cut both budgets to this many bits");
  ver->add_option("--p1", c.p1, "Player 1 strategy");
  ver->add_option("--p2", c.p2, "Player 2 strategy");

  auto* prn = app.add_subcommand("prng-test", "Next-bit predictor advantage against a generator");
  prn->add_option("--gen", c.gen, "bm, passthrough, repeat, counter or const");
  prn->add_option("--perm", c.perm, "id, add[:c], mul[:a] or mulmod");
  prn->add_option("--m", c.m, "Permutation / counter width");
  prn->add_option("--n", c.n, "Output length")->required();
  prn->add_option("--period", c.period, "Period of the repeat generator");
  prn->add_option("--predictor", c.predictor, "const:b, freq[:p], markov, period or affine[:w]");
  prn->add_option("--mode", c.mode, "exact or sampled");
  prn->add_option("--samples", c.samples, "Samples in sampled mode");
  prn->add_option("--eval-seed", c.eval_seed, "Seed of the evaluation randomness");

  auto* dis = app.add_subcommand("discounted", "Certify the discounted infinite-play construction");
  dis->add_option("--delta", c.delta, "Discount factor in (0,1)")->required();
  dis->add_option("--epsilon", c.epsilon, "Target slack")->required();
  dis->add_option("--n", c.n, "Prefix rounds (default: the threshold)");
  dis->add_option("--seed-len", seed_len, "Seed bits of each player");
  dis->add_option("--prefix", c.prefix, "uniform or gen:<generator>");

  auto* swp = app.add_subcommand("sweep", "Exploiter payoff across opponent budgets");
  swp->add_option("--n", c.n, "Rounds")->required();
  swp->add_option("--k", k_range, "Budget range, e.g. 0..8")->required();
  swp->add_option("--family", c.family, "uniform, prefix-tail, repeat, counter, passthrough, bm-<perm>");

  for (auto* sub : {sim, exp, swp}) common(sub, "csv");
  for (auto* sub : {ver, prn, dis}) common(sub, "json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    // Defaults per subcommand: csv for per-round data, json for reports.
    const std::string first = args.empty() ? "" : args.front();
    format = (first == "verify-eq" || first == "prng-test" || first == "discounted") ? "json" : "csv";
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    fail(ErrorCode::kMalformedDescriptor, e.what());
  }

  if (sim->parsed()) c.command = Command::kSimulate;
  if (exp->parsed()) c.command = Command::kExploit;
  if (ver->parsed()) c.command = Command::kVerifyEq;
  if (prn->parsed()) c.command = Command::kPrngTest;
  if (dis->parsed()) c.command = Command::kDiscounted;
  if (swp->parsed()) c.command = Command::kSweep;
  for (auto* sub : app.get_subcommands()) {
    if (!sub->get_subcommands().empty()) fail(ErrorCode::kMalformedDescriptor, "nested subcommands are not supported");
  }
  c.format = detail::parse_format(format);
  if (!seed_len.empty()) c.seed_len = detail::parse_range(seed_len).first;
  if (c.command == Command::kSweep) std::tie(c.k_min, c.k_max) = detail::parse_range(k_range);

  auto& e = c.echo;
  e.emplace_back("command", command_name(c.command));
  if (!c.run_id.empty()) e.emplace_back("run_id", c.run_id);
  switch (c.command) {
    case Command::kSimulate:
      e.emplace_back("n", std::to_string(c.n));
      e.emplace_back("p1", c.p1);
      e.emplace_back("p2", c.p2);
      e.emplace_back("seed1", c.seed1);
      e.emplace_back("seed2", c.seed2);
      break;
    case Command::kExploit:
      e.emplace_back("n", std::to_string(c.n));
      e.emplace_back("vs", c.vs);
      e.emplace_back("seed", c.seed);
      break;
    case Command::kVerifyEq:
      e.emplace_back("n", std::to_string(c.n));
      e.emplace_back("gamma", c.gamma);
      e.emplace_back("truncate", c.truncate ? std::to_string(*c.truncate) : "");
      e.emplace_back("p1", c.p1);
      e.emplace_back("p2", c.p2);
      break;
    case Command::kPrngTest:
      e.emplace_back("gen", c.gen);
      e.emplace_back("perm", c.perm);
      e.emplace_back("m", std::to_string(c.m));
      e.emplace_back("n", std::to_string(c.n));
      e.emplace_back("period", std::to_string(c.period));
      e.emplace_back("predictor", c.predictor);
      e.emplace_back("mode", c.mode);
      e.emplace_back("samples", std::to_string(c.samples));
      e.emplace_back("eval_seed", std::to_string(c.eval_seed));
      break;
    case Command::kDiscounted:
      e.emplace_back("delta", c.delta);
      e.emplace_back("epsilon", c.epsilon);
      e.emplace_back("n", c.n == 0 ? "" : std::to_string(c.n));
      e.emplace_back("seed_len", c.seed_len ? std::to_string(*c.seed_len) : "");
      e.emplace_back("prefix", c.prefix);
      break;
    case Command::kSweep:
      e.emplace_back("n", std::to_string(c.n));
      e.emplace_back("k", std::to_string(c.k_min) + ".." + std::to_string(c.k_max));
      e.emplace_back("family", c.family);
      break;
  }
  e.emplace_back("format", c.format == Format::kCsv ? "csv" : "json");
  e.emplace_back("cap", std::to_string(c.limits.cap));

  detail::resolve(c);
  return c;
}

// ---------------------------------------------------------------------------
// Running.

namespace detail {

inline Json config_json(const ExperimentConfig& c) {
  Json j = Json::object();
  for (const auto& [k, v] : c.echo) j[k] = v;
  return j;
}

inline std::string csv_header(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.echo) out += "# " + k + "=" + v + "\n";
  return out;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Report commands in CSV: one key,value row per scalar leaf, nested keys
// joined with '.', array elements by index. The config is already in the
// header lines, so it is skipped.
inline void flatten(const Json& j, const std::string& prefix, std::string& csv) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, csv);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i + 1), csv);
  } else {
    std::string v = j.is_string() ? j.get<std::string>() : j.dump();
    if (v.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : v) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      v = quoted + "\"";
    }
    csv += prefix + "," + v + "\n";
  }
}

inline std::string report_artifact(const ExperimentConfig& c, Json j) {
  if (c.format == Format::kJson) return j.dump(2) + "\n";
  j.erase("config");
  std::string csv = csv_header(c) + "key,value\n";
  flatten(j, "", csv);
  return csv;
}

inline Json gap_json(const GapReport& g) {
  Json j = Json::object();
  j["value"] = g.value.str();
  j["best_response_1"] = g.best_response_1.str();
  j["best_response_2"] = g.best_response_2.str();
  j["gap_1"] = g.gap_1.str();
  j["gap_2"] = g.gap_2.str();
  j["certified_epsilon"] = g.certified_epsilon.str();
  j["value_decimal"] = g.value.decimal();
  j["certified_epsilon_decimal"] = g.certified_epsilon.decimal();
  return j;
}

inline RunResult run_simulate(const ExperimentConfig& c, const Resolved& r) {
  const Seed s1 = c.seed1.empty() ? Seed() : Seed::parse(c.seed1);
  const Seed s2 = c.seed2.empty() ? Seed() : Seed::parse(c.seed2);
  const Transcript t = simulate(r.p1, s1, r.p2, s2, c.n);
  RunResult out;
  if (c.format == Format::kJson) {
    Json j = Json::object();
    j["config"] = config_json(c);
    j["transcript"] = t.str();
    j["cumulative"] = cumulative_payoff(t);
    j["average"] = average_payoff(t).str();
    j["average_decimal"] = average_payoff(t).decimal();
    out.artifact = j.dump(2) + "\n";
    return out;
  }
  std::string csv = csv_header(c) + "round,p1,p2,payoff,cumulative\n";
  std::int64_t total = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int h = stage_payoff(t[i].p1, t[i].p2);
    total += h;
    csv += std::to_string(i + 1) + "," + to_char(t[i].p1) + "," + to_char(t[i].p2) + "," + std::to_string(h) + "," +
           std::to_string(total) + "\n";
  }
  out.artifact = csv;
  return out;
}

inline RunResult run_exploit(const ExperimentConfig& c, const Resolved& r) {
  const Seed seed = c.seed.empty() ? Seed::from_index(0, r.p2.seed_len()) : Seed::parse(c.seed);
  const ExploitRun run = run_exploiter(r.p2, seed, c.n, Seat::kPlayer1, c.limits);
  const auto k = static_cast<std::int64_t>(r.p2.seed_len());
  const auto n = static_cast<std::int64_t>(c.n);
  const ExactValue guaranteed = ExactValue::fraction(n - k, n);
  const ExactValue achieved = exact_value(r.p1, r.p2, c.n, c.limits);
  bool holds = achieved >= guaranteed;
  for (const auto& rec : run.trace.rounds) holds = holds && rec.expected_delta_phi >= 1.0 - 1e-9;

  RunResult out;
  out.status = holds ? 0 : 1;
  if (c.format == Format::kJson) {
    Json j = Json::object();
    j["config"] = config_json(c);
    Json rounds = Json::array();
    for (const auto& rec : run.trace.rounds) {
      Json row = Json::object();
      row["round"] = rec.round;
      row["p_t"] = rec.majority.p().str();
      row["alive_size"] = rec.alive_size;
      row["payoff"] = rec.payoff;
      row["phi"] = fmt_double(rec.phi);
      row["delta_phi"] = fmt_double(rec.delta_phi);
      row["expected_delta_phi"] = fmt_double(rec.expected_delta_phi);
      rounds.push_back(row);
    }
    j["rounds"] = rounds;
    j["final_phi"] = fmt_double(run.trace.final_phi);
    j["k"] = k;
    j["guaranteed"] = guaranteed.str();
    j["achieved"] = achieved.str();
    j["margin"] = (achieved - guaranteed).str();
    j["holds"] = holds;
    out.artifact = j.dump(2) + "\n";
    return out;
  }
  std::string csv = csv_header(c) +
                    "record,round,p_t,p_t_decimal,alive_size,payoff,phi,delta_phi,expected_delta_phi,k,"
                    "guaranteed,guaranteed_decimal,achieved,achieved_decimal,margin,margin_decimal\n";
  for (const auto& rec : run.trace.rounds) {
    csv += "round," + std::to_string(rec.round) + "," + rec.majority.p().str() + "," +
           fmt_double(rec.majority.p_double()) + "," + std::to_string(rec.alive_size) + "," +
           std::to_string(rec.payoff) + "," + fmt_double(rec.phi) + "," + fmt_double(rec.delta_phi) + "," +
           fmt_double(rec.expected_delta_phi) + ",,,,,,,\n";
  }
  const ExactValue margin = achieved - guaranteed;
  csv += "summary," + std::to_string(c.n + 1) + ",,," + std::to_string(run.trace.final_alive) + "," +
         std::to_string(run.trace.final_payoff) + "," + fmt_double(run.trace.final_phi) + ",,," + std::to_string(k) +
         "," + guaranteed.str() + "," + guaranteed.decimal() + "," + achieved.str() + "," + achieved.decimal() + "," +
         margin.str() + "," + margin.decimal() + "\n";
  out.artifact = csv;
  return out;
}

inline RunResult run_verify(const ExperimentConfig& c, const Resolved& r) {
  const GapReport g = certify_gap(r.p1, r.p2, c.n, c.limits);
  RunResult out;
  Json j = Json::object();
  j["config"] = config_json(c);
  j["p1"] = r.p1.describe();
  j["p2"] = r.p2.describe();
  j["seed_len_1"] = r.p1.seed_len();
  j["seed_len_2"] = r.p2.seed_len();
  j["report"] = gap_json(g);
  bool holds = g.gap_1 >= ExactValue(0) && g.gap_2 >= ExactValue(0);
  if (r.gamma) {
    j["gamma"] = r.gamma->str();
    j["certified"] = g.certifies(*r.gamma);
    holds = holds && g.certifies(*r.gamma);
  }
  out.status = holds ? 0 : 1;
  out.artifact = report_artifact(c, std::move(j));
  return out;
}

inline RunResult run_prng(const ExperimentConfig& c, const Resolved& r) {
  const EvalMode mode = c.mode == "exact" ? EvalMode::kExact : EvalMode::kSampled;
  const PredictorReport p = eval_next_bit_predictor(*r.generator, *r.predictor, mode, c.samples, c.eval_seed, c.limits);
  Json j = Json::object();
  j["config"] = config_json(c);
  j["generator"] = r.generator->describe();
  j["seed_len"] = r.generator->seed_len();
  j["predictor"] = r.predictor->describe();
  j["exact"] = p.exact;
  j["samples"] = p.samples;
  j["best_position"] = p.best_position;
  j["advantage"] = p.exact_advantage ? p.exact_advantage->str() : fmt_double(p.advantage);
  j["advantage_decimal"] = fmt_double(p.advantage);
  if (!p.exact) j["half_width_95"] = fmt_double(p.half_width);
  Json per = Json::array();
  for (std::size_t i = 0; i < p.per_position.size(); ++i) {
    per.push_back(p.exact ? p.exact_per_position[i].str() : fmt_double(p.per_position[i]));
  }
  j["per_position"] = per;
  RunResult out;
  out.status = p.advantage >= 0.0 && p.advantage <= 0.5 ? 0 : 1;
  out.artifact = report_artifact(c, std::move(j));
  return out;
}

inline RunResult run_discounted(const ExperimentConfig& c, const Resolved& r) {
  const DiscountParams& p = *r.discount;
  const DiscountedReport d = certify_discounted_eq(r.n, p, r.seed_len, r.prefix, c.limits);
  const std::size_t threshold = min_rounds(p);
  Json j = Json::object();
  j["config"] = config_json(c);
  j["delta"] = p.delta.str();
  j["epsilon"] = p.epsilon.str();
  j["min_rounds"] = threshold;
  j["n"] = d.n;
  j["seed_len"] = d.seed_len;
  j["prefix"] = r.prefix.describe();
  j["prefix_report"] = gap_json(d.prefix);
  j["prefix_gap"] = d.prefix_gap.str();
  j["tail_gain"] = d.tail_gain.str();
  j["tail_gain_decimal"] = d.tail_gain.decimal();
  j["epsilon_prime"] = d.epsilon_prime.str();
  j["epsilon_prime_decimal"] = d.epsilon_prime.decimal();
  j["certified"] = d.certified;
  RunResult out;
  out.status = d.certified ? 0 : 1;
  out.artifact = report_artifact(c, std::move(j));
  return out;
}

inline RunResult run_sweep(const ExperimentConfig& c) {
  const auto rows = sweep(c.family, c.n, c.k_min, c.k_max, c.limits);
  bool holds = true;
  for (const auto& row : rows) holds = holds && row.achieved >= row.guaranteed;
  RunResult out;
  out.status = holds ? 0 : 1;
  if (c.format == Format::kJson) {
    Json j = Json::object();
    j["config"] = config_json(c);
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json o = Json::object();
      o["k"] = row.k;
      o["n"] = row.n;
      o["guaranteed"] = row.guaranteed.str();
      o["achieved"] = row.achieved.str();
      o["margin"] = row.margin.str();
      arr.push_back(o);
    }
    j["rows"] = arr;
    j["holds"] = holds;
    out.artifact = j.dump(2) + "\n";
    return out;
  }
  std::string csv = csv_header(c) +
                    "k,n,guaranteed,guaranteed_decimal,achieved,achieved_decimal,margin,margin_decimal\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.k) + "," + std::to_string(row.n) + "," + row.guaranteed.str() + "," +
           row.guaranteed.decimal() + "," + row.achieved.str() + "," + row.achieved.decimal() + "," +
           row.margin.str() + "," + row.margin.decimal() + "\n";
  }
  out.artifact = csv;
  return out;
}

/// Write-then-rename so readers never see a partial artifact.
inline void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::kInvalidParameter, "cannot write '" + tmp + "'");
    f << content;
    if (!f) fail(ErrorCode::kInvalidParameter, "cannot write '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline Json error_record(const Error& e) {
  Json j = Json::object();
  j["error"] = e.what();
  j["code"] = std::string(error_code_name(e.code()));
  return j;
}

/// Runs the command. The artifact is written to c.out when set; status is
/// 0 iff everything the run certifies was checked and held.
inline RunResult run(const ExperimentConfig& c) {
  const detail::Resolved r = detail::resolve(c);
  RunResult result;
  switch (c.command) {
    case Command::kSimulate: result = detail::run_simulate(c, r); break;
    case Command::kExploit: result = detail::run_exploit(c, r); break;
    case Command::kVerifyEq: result = detail::run_verify(c, r); break;
    case Command::kPrngTest: result = detail::run_prng(c, r); break;
    case Command::kDiscounted: result = detail::run_discounted(c, r); break;
    case Command::kSweep: result = detail::run_sweep(c); break;
  }
  if (!c.out.empty()) detail::write_atomically(c.out, result.artifact);
  return result;
}

}  // namespace penny::cli
