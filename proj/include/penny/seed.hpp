#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "penny/error.hpp"

namespace penny {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;
inline constexpr std::size_t kMaxSeedBits = 64;
inline constexpr std::size_t kMaxTreeRounds = 14;

/// Work limits shared by every exhaustive computation.
struct Limits {
  std::uint64_t cap = kDefaultEnumerationCap;
  std::size_t max_tree_rounds = kMaxTreeRounds;
};

/// Throws unless 2^bits seeds fit under the cap.
inline std::uint64_t seed_space(std::size_t bits, const Limits& limits) {
  if (bits >= kMaxSeedBits || (std::uint64_t{1} << bits) > limits.cap) {
    fail(ErrorCode::kSeedSpaceTooLarge,
         "seed space too large: 2^" + std::to_string(bits) + " exceeds cap " +
             std::to_string(limits.cap));
  }
  return std::uint64_t{1} << bits;
}

/// A fixed-length bit string. Bit 0 is the leftmost character of the
/// textual form, which is also the most significant bit of index().
///
/// A seed may carry a non-owning probe word; every bit read ORs its position
/// into it so tests can audit how much randomness a strategy consumed.
class Seed {
 public:
  Seed() = default;

  static Seed from_index(std::uint64_t index, std::size_t length) {
    if (length > kMaxSeedBits) fail(ErrorCode::kBudgetViolation, "budget violation: seed longer than 64 bits");
    if (length < kMaxSeedBits && (index >> length) != 0) {
      fail(ErrorCode::kInvalidParameter, "seed index out of range");
    }
    Seed s;
    s.bits_ = index;
    s.length_ = length;
    return s;
  }

  static Seed parse(std::string_view text) {
    if (text.size() > kMaxSeedBits) fail(ErrorCode::kBudgetViolation, "budget violation: seed longer than 64 bits");
    std::uint64_t v = 0;
    for (char c : text) {
      if (c != '0' && c != '1') fail(ErrorCode::kMalformedDescriptor, "seed must be a 0/1 string");
      v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return from_index(v, text.size());
  }

  std::size_t size() const { return length_; }
  std::uint64_t index() const { return bits_; }

  bool bit(std::size_t i) const {
    if (i >= length_) {
      fail(ErrorCode::kBudgetViolation, "budget violation: read of seed bit " + std::to_string(i + 1) +
                                            " beyond declared length " + std::to_string(length_));
    }
    if (probe_ != nullptr) *probe_ |= std::uint64_t{1} << i;
    return ((bits_ >> (length_ - 1 - i)) & 1u) != 0;
  }

  /// Bits [first, first + count) read as an unsigned integer, leftmost bit
  /// most significant.
  std::uint64_t slice(std::size_t first, std::size_t count) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(bit(first + i));
    return v;
  }

  Seed probed(std::uint64_t* probe) const {
    Seed s = *this;
    s.probe_ = probe;
    return s;
  }

  std::string str() const {
    std::string out(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
      if ((bits_ >> (length_ - 1 - i)) & 1u) out[i] = '1';
    }
    return out;
  }

  friend bool operator==(const Seed& a, const Seed& b) {
    return a.bits_ == b.bits_ && a.length_ == b.length_;
  }

 private:
  std::uint64_t bits_ = 0;
  std::size_t length_ = 0;
  std::uint64_t* probe_ = nullptr;
};

/// Calls fn(seed) for every seed of the given length, in index order.
template <class Fn>
void for_each_seed(std::size_t bits, const Limits& limits, Fn&& fn) {
  const std::uint64_t count = seed_space(bits, limits);
  for (std::uint64_t v = 0; v < count; ++v) fn(Seed::from_index(v, bits));
}

}  // namespace penny
