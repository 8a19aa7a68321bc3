#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "penny/error.hpp"
#include "penny/exact_value.hpp"
#include "penny/exploiter.hpp"
#include "penny/prng.hpp"
#include "penny/strategy.hpp"

namespace penny {

namespace detail {

[[noreturn]] inline void bad_descriptor(std::string_view text, const std::string& why) {
  fail(ErrorCode::kMalformedDescriptor, "malformed descriptor '" + std::string(text) + "': " + why);
}

inline std::size_t parse_count(std::string_view text, std::string_view value) {
  if (value.empty() || value.size() > 9 || value.find_first_not_of("0123456789") != std::string_view::npos) {
    bad_descriptor(text, "expected a non-negative integer, got '" + std::string(value) + "'");
  }
  return static_cast<std::size_t>(std::stoull(std::string(value)));
}

/// "a=1,b=2" -> {a: 1, b: 2}; a bare leading token is stored under "".
inline std::map<std::string, std::string> parse_fields(std::string_view text, std::string_view body) {
  std::map<std::string, std::string> fields;
  std::size_t start = 0;
  bool first = true;
  while (start <= body.size() && !body.empty()) {
    const std::size_t comma = body.find(',', start);
    const std::string_view item =
        body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    const std::size_t eq = item.find('=');
    std::string key = eq == std::string_view::npos ? "" : std::string(item.substr(0, eq));
    std::string value(eq == std::string_view::npos ? item : item.substr(eq + 1));
    if (eq == std::string_view::npos && !first) bad_descriptor(text, "field '" + std::string(item) + "' lacks '='");
    if (!fields.emplace(key, value).second) bad_descriptor(text, "duplicate field '" + key + "'");
    first = false;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline void allow_only(std::string_view text, const std::map<std::string, std::string>& fields,
                       std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : fields) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) bad_descriptor(text, "unknown field '" + key + "'");
  }
}

}  // namespace detail

/// Generator descriptors (without the "gen:" prefix):
///   bm,perm=<id|add[:c]|mul[:a]|mulmod>,m=<width>
///   passthrough | repeat,period=<p> | counter,m=<width> | const[,bit=0|1]
inline GeneratorSpec parse_generator(std::string_view text, std::size_t horizon) {
  auto fields = detail::parse_fields(text, text);
  const std::string kind = fields.count("") ? fields.at("") : "";
  fields.erase("");
  auto get = [&](const std::string& key) -> std::string_view {
    auto it = fields.find(key);
    if (it == fields.end()) detail::bad_descriptor(text, "missing field '" + key + "'");
    return it->second;
  };
  if (kind == "bm") {
    detail::allow_only(text, fields, {"perm", "m"});
    const auto m = static_cast<unsigned>(detail::parse_count(text, get("m")));
    return GeneratorSpec::blum_micali(Permutation::parse(get("perm"), m), horizon);
  }
  if (kind == "passthrough") {
    detail::allow_only(text, fields, {});
    return GeneratorSpec::passthrough(horizon);
  }
  if (kind == "repeat") {
    detail::allow_only(text, fields, {"period"});
    return GeneratorSpec::broken_repeat(detail::parse_count(text, get("period")), horizon);
  }
  if (kind == "counter") {
    detail::allow_only(text, fields, {"m"});
    return GeneratorSpec::broken_counter(static_cast<unsigned>(detail::parse_count(text, get("m"))), horizon);
  }
  if (kind == "const") {
    detail::allow_only(text, fields, {"bit"});
    bool bit = true;
    if (fields.count("bit")) {
      const auto& b = fields.at("bit");
      if (b != "0" && b != "1") detail::bad_descriptor(text, "bit must be 0 or 1");
      bit = b == "1";
    }
    return GeneratorSpec::constant_stream(horizon, bit);
  }
  detail::bad_descriptor(text, "unknown generator '" + kind + "'");
}

/// Strategy descriptors, resolved for a game of `horizon` rounds played
/// from `seat`:
///   uniform[:k]  const:H|T  alt[:H|T]
///   prefix-tail:n=<n>,gamma=<p/q>[,tail=const|alt]
///   prefix-tail:prefix=<k>[,tail=const|alt]   (tail defaults by seat)
///   gen:<generator>  pred:<predictor>  exploit:vs=<strategy>
inline StrategySpec parse_strategy(std::string_view text, std::size_t horizon, Seat seat,
                                   const Limits& limits = {}) {
  const std::size_t colon = text.find(':');
  const std::string_view family = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  if (family == "uniform") {
    return uniform_table(body.empty() ? horizon : detail::parse_count(text, body));
  }
  if (family == "const") {
    if (body.size() != 1) detail::bad_descriptor(text, "expected const:H or const:T");
    return constant(parse_action(body[0]));
  }
  if (family == "alt") {
    if (body.size() > 1) detail::bad_descriptor(text, "expected alt, alt:H or alt:T");
    return alternator(body.empty() ? Action::kHeads : parse_action(body[0]));
  }
  if (family == "prefix-tail") {
    auto fields = detail::parse_fields(text, body);
    if (fields.count("")) detail::bad_descriptor(text, "prefix-tail fields must be key=value");
    detail::allow_only(text, fields, {"n", "gamma", "prefix", "tail"});
    TailKind tail = seat == Seat::kPlayer1 ? TailKind::kConstantHeads : TailKind::kAlternate;
    if (fields.count("tail")) {
      const auto& t = fields.at("tail");
      if (t == "const") {
        tail = TailKind::kConstantHeads;
      } else if (t == "alt") {
        tail = TailKind::kAlternate;
      } else {
        detail::bad_descriptor(text, "tail must be const or alt");
      }
    }
    std::size_t prefix = 0;
    if (fields.count("prefix")) {
      if (fields.count("gamma") || fields.count("n")) detail::bad_descriptor(text, "use either prefix= or n=,gamma=");
      prefix = detail::parse_count(text, fields.at("prefix"));
    } else {
      if (!fields.count("gamma")) detail::bad_descriptor(text, "missing gamma= or prefix=");
      const std::size_t n = fields.count("n") ? detail::parse_count(text, fields.at("n")) : horizon;
      if (n != horizon) {
        detail::bad_descriptor(text, "n=" + std::to_string(n) + " differs from the game length " +
                                         std::to_string(horizon));
      }
      const Profile profile = make_gamma_equilibrium(n, ExactValue::parse(fields.at("gamma")));
      prefix = profile.p1.seed_len();
    }
    if (prefix > horizon) detail::bad_descriptor(text, "prefix longer than the game");
    return prefix_tail(prefix, tail);
  }
  if (family == "gen") return generator_strategy(parse_generator(body, horizon));
  if (family == "pred") return predictor_strategy(Predictor::parse(body));
  if (family == "exploit") {
    if (body.substr(0, 3) != "vs=") detail::bad_descriptor(text, "expected exploit:vs=<strategy>");
    return exploiter(parse_strategy(body.substr(3), horizon, other(seat), limits), limits);
  }
  detail::bad_descriptor(text, "unknown strategy family '" + std::string(family) + "'");
}

}  // namespace penny
