#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "penny/cli.hpp"

namespace penny::cli {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& line, char sep = ' ') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ExperimentConfig parse(const std::string& line) { return parse_config(split(line)); }

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line.substr(2));
    } else if (csv.header.empty()) {
      csv.header = split(line, ',');
    } else {
      csv.rows.push_back(split(line, ','));
    }
  }
  return csv;
}

struct Spawned {
  int status = -1;
  std::string out;
};

Spawned spawn(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(PENNY_CLI_PATH) + " " + args + " 2>/dev/null";
  Spawned s;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) s.out.append(buf, got);
  const int raw = pclose(pipe);
  s.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("penny_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

ErrorCode parse_error(const std::string& line) {
  try {
    parse(line);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(-1);
}

TEST(ParseConfig, Examples) {
  const ExperimentConfig v = parse("verify-eq --n 8 --gamma 1/2");
  EXPECT_EQ(v.command, Command::kVerifyEq);
  EXPECT_EQ(v.n, 8u);
  EXPECT_EQ(v.gamma, "1/2");
  EXPECT_EQ(v.format, Format::kJson);

  EXPECT_EQ(parse_error("verify-eq --n 6 --gamma 1/2"), ErrorCode::kInadmissibleGamma);

  const ExperimentConfig s = parse("sweep --n 10 --k 0..8");
  EXPECT_EQ(s.command, Command::kSweep);
  EXPECT_EQ(s.k_min, 0u);
  EXPECT_EQ(s.k_max, 8u);
  EXPECT_EQ(s.format, Format::kCsv);
}

TEST(ParseConfig, RejectsBadInputBeforeRunning) {
  EXPECT_EQ(parse_error("simulate --n 4 --p1 wizard --p2 alt"), ErrorCode::kMalformedDescriptor);
  EXPECT_EQ(parse_error("simulate --n 4 --p1 uniform:4 --p2 alt --seed1 10"), ErrorCode::kBudgetViolation);
  EXPECT_EQ(parse_error("simulate --n 4 --p1 uniform:2 --p2 alt"), ErrorCode::kBudgetViolation);
  EXPECT_EQ(parse_error("simulate --n 0 --p1 alt --p2 alt"), ErrorCode::kZeroLengthGame);
  EXPECT_EQ(parse_error("exploit --n 6 --vs uniform:25"), ErrorCode::kSeedSpaceTooLarge);
  EXPECT_EQ(parse_error("sweep --n 10 --k 5..2"), ErrorCode::kMalformedDescriptor);
  EXPECT_EQ(parse_error("sweep --n 10 --k 0..8 --family nope"), ErrorCode::kMalformedDescriptor);
  EXPECT_EQ(parse_error("verify-eq --n 8 --bogus 1"), ErrorCode::kMalformedDescriptor);
  EXPECT_EQ(parse_error("verify-eq --n 8"), ErrorCode::kInvalidParameter);
  EXPECT_EQ(parse_error("prng-test --n 8 --mode sampled"), ErrorCode::kInvalidParameter);
  EXPECT_EQ(parse_error("prng-test --n 8 --gen bm --perm mul:2"), ErrorCode::kNotBijective);
  EXPECT_EQ(parse_error("discounted --delta 1 --epsilon 1/10"), ErrorCode::kInvalidDiscount);
  EXPECT_EQ(parse_error("simulate --n 4 --p1 alt --p2 alt --format xml"), ErrorCode::kInvalidParameter);
  EXPECT_EQ(parse_error("launch --n 4"), ErrorCode::kMalformedDescriptor);
  EXPECT_THROW(parse(""), Error);
  EXPECT_THROW(parse("--help"), HelpRequested);
}

TEST(ParseConfig, ConfigFileAndPrecedence) {
  const fs::path path = scratch("run.conf");
  {
    std::ofstream f(path);
    f << "# comment\ncommand = verify-eq\nn = 8\ngamma = 1/4\nrun-id = from-file\n";
  }
  const ExperimentConfig a = parse("--config " + path.string());
  EXPECT_EQ(a.command, Command::kVerifyEq);
  EXPECT_EQ(a.gamma, "1/4");
  EXPECT_EQ(a.run_id, "from-file");
  const ExperimentConfig b = parse("verify-eq --gamma 1/2 --config " + path.string());
  EXPECT_EQ(b.gamma, "1/2");
  EXPECT_EQ(b.n, 8u);
  {
    std::ofstream f(path);
    f << "command = verify-eq\nn = 8\ngamma 1/4\n";
  }
  EXPECT_THROW(parse("--config " + path.string()), Error);
  EXPECT_THROW(parse("verify-eq --config /nonexistent/penny.conf"), Error);
}

TEST(ParseConfig, CapOverrideOnlyLowers) {
  ::setenv("PENNY_CAP", "16", 1);
  EXPECT_EQ(parse("exploit --n 6 --vs uniform:4").limits.cap, 16u);
  EXPECT_EQ(parse_error("exploit --n 6 --vs uniform:5"), ErrorCode::kSeedSpaceTooLarge);
  ::setenv("PENNY_CAP", "99999999999", 1);
  EXPECT_EQ(parse("exploit --n 6 --vs uniform:4").limits.cap, kDefaultEnumerationCap);
  ::setenv("PENNY_CAP", "lots", 1);
  EXPECT_THROW(parse("exploit --n 6 --vs uniform:4"), Error);
  ::unsetenv("PENNY_CAP");
}

TEST(Run, VerifyEqReport) {
  const RunResult r = run(parse("verify-eq --n 8 --gamma 1/2"));
  EXPECT_EQ(r.status, 0);
  const Json j = Json::parse(r.artifact);
  EXPECT_EQ(j["report"]["certified_epsilon"], "1/2");
  EXPECT_EQ(j["report"]["certified_epsilon_decimal"], "0.5");
  EXPECT_EQ(j["certified"], true);
  EXPECT_EQ(j["config"]["command"], "verify-eq");
  EXPECT_EQ(j["config"]["gamma"], "1/2");

  const RunResult cut = run(parse("verify-eq --n 8 --gamma 1/2 --truncate 2"));
  EXPECT_EQ(cut.status, 1);
  EXPECT_EQ(Json::parse(cut.artifact)["certified"], false);

  const RunResult pair = run(parse("verify-eq --n 4 --p1 const:H --p2 const:T"));
  EXPECT_EQ(pair.status, 0);
  EXPECT_EQ(Json::parse(pair.artifact)["report"]["gap_1"], "2/1");
}

TEST(Run, ExploitCsv) {
  const RunResult r = run(parse("exploit --n 10 --vs uniform:4 --seed 0110"));
  EXPECT_EQ(r.status, 0);
  const Csv csv = read_csv(r.artifact);
  const std::vector<std::string> columns = {"record", "round", "p_t", "p_t_decimal", "alive_size", "payoff", "phi",
                                            "delta_phi", "expected_delta_phi", "k", "guaranteed",
                                            "guaranteed_decimal", "achieved", "achieved_decimal", "margin",
                                            "margin_decimal"};
  EXPECT_EQ(csv.header, columns);
  ASSERT_EQ(csv.rows.size(), 11u);
  for (const auto& row : csv.rows) ASSERT_EQ(row.size(), columns.size());
  EXPECT_EQ(csv.rows[0][0], "round");
  EXPECT_EQ(csv.rows[0][4], "16");
  const auto& summary = csv.rows.back();
  EXPECT_EQ(summary[0], "summary");
  EXPECT_EQ(summary[10], "3/5");
  EXPECT_GE(ExactValue::parse(summary[12]), ExactValue::fraction(6, 10));
  EXPECT_GE(ExactValue::parse(summary[14]), ExactValue(0));
  EXPECT_NE(std::find(csv.comments.begin(), csv.comments.end(), "vs=uniform:4"), csv.comments.end());

  const Json j = Json::parse(run(parse("exploit --n 4 --vs alt --format json")).artifact);
  EXPECT_EQ(j["achieved"], "1/1");
  EXPECT_EQ(j["rounds"].size(), 4u);
}

TEST(Run, PrngTestOnBrokenRepeat) {
  const RunResult r = run(parse("prng-test --gen repeat --period 2 --n 8 --predictor freq:2"));
  EXPECT_EQ(r.status, 0);
  const Json j = Json::parse(r.artifact);
  EXPECT_EQ(j["advantage"], "1/2");
  EXPECT_EQ(j["exact"], true);
  for (std::size_t i = 2; i < 8; ++i) EXPECT_EQ(j["per_position"][i], "1/2");
  EXPECT_EQ(j["per_position"][0], "0/1");

  const std::string sampled = "prng-test --gen bm --perm mulmod --m 6 --n 10 --predictor markov --mode sampled "
                              "--samples 500 --eval-seed 9";
  const Json s = Json::parse(run(parse(sampled)).artifact);
  EXPECT_EQ(s["exact"], false);
  EXPECT_TRUE(s.contains("half_width_95"));
  EXPECT_EQ(s["config"]["eval_seed"], "9");
}

TEST(Run, Discounted) {
  const Json ok = Json::parse(run(parse("discounted --delta 9/10 --epsilon 1/10")).artifact);
  EXPECT_EQ(ok["min_rounds"], 44);
  EXPECT_EQ(ok["n"], 44);
  EXPECT_EQ(ok["certified"], true);
  const RunResult short_run = run(parse("discounted --delta 0.9 --epsilon 0.1 --n 43"));
  EXPECT_EQ(short_run.status, 1);
  const Json gen = Json::parse(run(parse("discounted --delta 1/2 --epsilon 1/2 --n 6 --prefix gen:repeat,period=2")).artifact);
  EXPECT_EQ(gen["seed_len"], 2);
  EXPECT_EQ(gen["prefix"], "gen:repeat,period=2");
  EXPECT_NE(gen["prefix_gap"], "0/1");
}

TEST(Run, ReportsAsKeyValueCsv) {
  const Csv csv = read_csv(run(parse("prng-test --gen repeat --period 2 --n 4 --predictor freq:2 --format csv")).artifact);
  ASSERT_EQ(csv.header, (std::vector<std::string>{"key", "value"}));
  EXPECT_NE(std::find(csv.comments.begin(), csv.comments.end(), "command=prng-test"), csv.comments.end());
  std::map<std::string, std::string> kv;
  for (const auto& row : csv.rows) {
    ASSERT_GE(row.size(), 2u);
    kv[row[0]] = row[1];
  }
  EXPECT_EQ(kv.at("generator"), "\"repeat");
  EXPECT_EQ(kv.at("advantage"), "1/2");
  EXPECT_EQ(kv.at("exact"), "true");
  EXPECT_EQ(kv.at("per_position.3"), "1/2");
  EXPECT_EQ(kv.count("config.command"), 0u);

  const Csv d = read_csv(run(parse("discounted --delta 9/10 --epsilon 1/10 --format csv")).artifact);
  bool certified = false;
  for (const auto& row : d.rows) certified = certified || (row[0] == "certified" && row[1] == "true");
  EXPECT_TRUE(certified);
}

TEST(Run, SweepRows) {
  const RunResult r = run(parse("sweep --n 10 --k 0..8"));
  EXPECT_EQ(r.status, 0);
  const Csv csv = read_csv(r.artifact);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"k", "n", "guaranteed", "guaranteed_decimal", "achieved",
                                                  "achieved_decimal", "margin", "margin_decimal"}));
  ASSERT_EQ(csv.rows.size(), 9u);
  for (const auto& row : csv.rows) {
    EXPECT_GE(ExactValue::parse(row[4]), ExactValue::parse(row[2]));
    EXPECT_EQ(ExactValue::parse(row[6]), ExactValue::parse(row[4]) - ExactValue::parse(row[2]));
  }
  for (const char* family : {"prefix-tail", "repeat", "counter"}) {
    EXPECT_EQ(run(parse(std::string("sweep --n 8 --k 0..4 --family ") + family)).status, 0) << family;
  }
  EXPECT_EQ(run(parse("sweep --n 6 --k 4 --family bm-mulmod")).status, 0);
  EXPECT_EQ(parse_error("sweep --n 6 --k 0..6 --family bm-mulmod"), ErrorCode::kInvalidParameter);
}

TEST(Run, SimulateCsvAndJson) {
  const Csv csv = read_csv(run(parse("simulate --n 3 --p1 const:H --p2 alt")).artifact);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"round", "p1", "p2", "payoff", "cumulative"}));
  ASSERT_EQ(csv.rows.size(), 3u);
  EXPECT_EQ(csv.rows[1], (std::vector<std::string>{"2", "H", "T", "-1", "0"}));
  const Json j = Json::parse(run(parse("simulate --n 3 --p1 const:H --p2 alt --format json")).artifact);
  EXPECT_EQ(j["transcript"], "HH,HT,HH");
  EXPECT_EQ(j["average"], "1/3");
}

TEST(Binary, ExitStatusAndErrorRecord) {
  EXPECT_EQ(spawn("verify-eq --n 8 --gamma 1/2").status, 0);
  EXPECT_EQ(spawn("verify-eq --n 8 --gamma 1/2 --truncate 3").status, 1);
  const Spawned bad = spawn("verify-eq --n 6 --gamma 1/2");
  EXPECT_EQ(bad.status, 2);
  const Json err = Json::parse(bad.out);
  EXPECT_EQ(err["code"], "inadmissible_gamma");
  EXPECT_NE(err["error"].get<std::string>().find("inadmissible gamma"), std::string::npos);
  const Spawned capped = spawn("exploit --n 6 --vs uniform:5", "PENNY_CAP=16");
  EXPECT_EQ(capped.status, 2);
  EXPECT_EQ(Json::parse(capped.out)["code"], "seed_space_too_large");
  EXPECT_EQ(spawn("--help").status, 0);
}

TEST(Binary, WritesArtifactsAtomically) {
  const fs::path out = scratch("sweep.csv");
  fs::remove(out);
  const Spawned s = spawn("sweep --n 6 --k 0..3 --run-id t1 --out " + out.string());
  EXPECT_EQ(s.status, 0);
  EXPECT_TRUE(s.out.empty());
  ASSERT_TRUE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
  std::ifstream f(out);
  std::stringstream text;
  text << f.rdbuf();
  const Csv csv = read_csv(text.str());
  EXPECT_EQ(csv.comments.front(), "command=sweep");
  EXPECT_EQ(csv.comments[1], "run_id=t1");
  EXPECT_EQ(csv.rows.size(), 4u);
  EXPECT_EQ(text.str(), spawn("sweep --n 6 --k 0..3 --run-id t1").out);
}

}  // namespace
}  // namespace penny::cli
