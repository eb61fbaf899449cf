#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

#include "nclearn/errors.hpp"

namespace nclearn {

/// Exact dyadic rational numerator / 2^level with an arbitrary-precision
/// numerator (little-endian 64-bit limbs). Bisection over [0, 1] halves the
/// interval hundreds of times; plain doubles stop representing the endpoints
/// exactly after ~53 halvings, so the interval invariants are tracked here.
class Dyadic {
 public:
  Dyadic() : limbs_{0}, level_(0) {}

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() {
    Dyadic d;
    d.limbs_ = {1};
    return d;
  }

  int level() const { return level_; }

  /// Same value re-expressed with denominator 2^level (level may only grow).
  Dyadic at_level(int level) const {
    if (level < level_) throw Error("Dyadic::at_level: cannot reduce level");
    Dyadic out = *this;
    out.shift_left(static_cast<unsigned>(level - level_));
    out.level_ = level;
    return out;
  }

  /// (a + b) / 2 with both endpoints brought to a common level first.
  friend Dyadic midpoint(const Dyadic& a, const Dyadic& b) {
    const int lvl = a.level_ > b.level_ ? a.level_ : b.level_;
    const Dyadic x = a.at_level(lvl);
    const Dyadic y = b.at_level(lvl);
    Dyadic out = x;
    out.add(y);
    out.level_ = lvl + 1;
    return out;
  }

  /// b - a in units of 2^-level (levels must match); throws if the result
  /// does not fit in a signed 64-bit integer or is negative.
  friend std::int64_t diff_units(const Dyadic& a, const Dyadic& b) {
    if (a.level_ != b.level_) throw Error("diff_units: levels differ");
    std::vector<std::uint64_t> diff = b.limbs_;
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
      const std::uint64_t sub = (i < a.limbs_.size() ? a.limbs_[i] : 0);
      const std::uint64_t before = diff[i];
      diff[i] = before - sub - borrow;
      borrow = (before < sub + borrow || (sub == ~0ULL && borrow)) ? 1 : 0;
    }
    if (borrow) throw Error("diff_units: negative difference");
    for (std::size_t i = 1; i < diff.size(); ++i) {
      if (diff[i] != 0) throw Error("diff_units: difference exceeds 64 bits");
    }
    if (diff[0] > static_cast<std::uint64_t>(INT64_MAX)) throw Error("diff_units: overflow");
    return static_cast<std::int64_t>(diff[0]);
  }

  double to_double() const {
    // take the top 64 bits of the numerator and scale
    int msb = -1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      if (limbs_[i] != 0) {
        msb = static_cast<int>(i) * 64 + 63;
        std::uint64_t v = limbs_[i];
        while (!(v & (1ULL << 63))) {
          v <<= 1;
          --msb;
        }
        break;
      }
    }
    if (msb < 0) return 0.0;
    if (msb <= 63) {
      return std::ldexp(static_cast<double>(limbs_[0]), -level_);
    }
    const int drop = msb - 63;  // truncate below the top 64 bits
    const std::size_t limb = static_cast<std::size_t>(drop) / 64;
    const unsigned bit = static_cast<unsigned>(drop) % 64;
    std::uint64_t top = limbs_[limb] >> bit;
    if (bit != 0 && limb + 1 < limbs_.size()) top |= limbs_[limb + 1] << (64 - bit);
    return std::ldexp(static_cast<double>(top), drop - level_);
  }

  std::strong_ordering operator<=>(const Dyadic& other) const {
    const int lvl = level_ > other.level_ ? level_ : other.level_;
    const Dyadic a = at_level(lvl);
    const Dyadic b = other.at_level(lvl);
    const std::size_t len = a.limbs_.size() > b.limbs_.size() ? a.limbs_.size() : b.limbs_.size();
    for (std::size_t i = len; i-- > 0;) {
      const std::uint64_t x = i < a.limbs_.size() ? a.limbs_[i] : 0;
      const std::uint64_t y = i < b.limbs_.size() ? b.limbs_[i] : 0;
      if (x != y) return x <=> y;
    }
    return std::strong_ordering::equal;
  }
  bool operator==(const Dyadic& other) const { return (*this <=> other) == 0; }

 private:
  void shift_left(unsigned bits) {
    if (bits == 0) return;
    const unsigned limb_shift = bits / 64;
    const unsigned bit_shift = bits % 64;
    limbs_.insert(limbs_.begin(), limb_shift, 0);
    if (bit_shift) {
      std::uint64_t carry = 0;
      for (std::size_t i = limb_shift; i < limbs_.size(); ++i) {
        const std::uint64_t v = limbs_[i];
        limbs_[i] = (v << bit_shift) | carry;
        carry = v >> (64 - bit_shift);
      }
      if (carry) limbs_.push_back(carry);
    }
  }

  void add(const Dyadic& other) {
    if (other.limbs_.size() > limbs_.size()) limbs_.resize(other.limbs_.size(), 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      const std::uint64_t addend = i < other.limbs_.size() ? other.limbs_[i] : 0;
      const std::uint64_t before = limbs_[i];
      limbs_[i] = before + addend + carry;
      carry = (limbs_[i] < before || (carry && limbs_[i] == before)) ? 1 : 0;
    }
    if (carry) limbs_.push_back(1);
  }

  std::vector<std::uint64_t> limbs_;  // little-endian numerator
  int level_ = 0;
};

}  // namespace nclearn
