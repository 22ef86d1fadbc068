#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace resub {

// Single exception type for all validation / contract failures.  Messages are
// prefixed with the operation that raised them.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// FNV-1a, 64 bit.  Used for config hashes and candidate-set fingerprints.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(uint64_t v);

// Deterministic RNG.  mt19937_64 is bit-stable across platforms, but the
// distribution helpers in <random> are not, so the derived draws (bounded
// ints, unit doubles, shuffles) are implemented here by hand.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, n).  Rejection sampling, so no modulo bias.
  uint64_t next_below(uint64_t n) {
    if (n == 0) throw Error("Rng::next_below: n must be positive");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1), 53 bits of precision.
  double next_unit() { return (eng_() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  int64_t next_int(int64_t lo, int64_t hi) {  // inclusive range
    if (hi < lo) throw Error("Rng::next_int: empty range");
    return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo) + 1));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First k entries of a shuffle of 0..n-1 (distinct picks, order preserved).
  std::vector<int32_t> sample_indices(int32_t n, int32_t k) {
    std::vector<int32_t> idx(n);
    for (int32_t i = 0; i < n; ++i) idx[i] = i;
    for (int32_t i = 0; i < k && i + 1 < n; ++i) {
      int32_t j = i + static_cast<int32_t>(next_below(static_cast<uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 eng_;
};

// Derive a fresh stream from (seed, salt) without correlated low bits.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Exact rational weight in [0, 1].  Objective arithmetic stays in integers so
// solver comparisons never see floating-point noise.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n, int64_t d);

  // Parses a plain decimal like "0.25" or "1".  Scientific notation is not
  // accepted; weights come from CLI flags and test fixtures.
  static Rational parse(const std::string& text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

std::string format_double(double v);  // shortest round-trip formatting

}  // namespace resub
