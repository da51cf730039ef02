#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evenspace {

using EdgeId = std::uint32_t;

// A GF(2) vector indexed by the edge ids of a host graph. Used for spanning
// subgraphs, cycles and percolation configurations alike.
//
// Bit e lives in word e / 64. Bits past size() are always zero, so word-wise
// comparison and hashing are exact.
class EdgeVector {
 public:
  EdgeVector() = default;
  explicit EdgeVector(std::size_t length);

  static EdgeVector all(std::size_t length);
  // Bit e of `mask` becomes edge e. Requires length <= 64.
  static EdgeVector from_mask(std::size_t length, std::uint64_t mask);
  static EdgeVector from_edges(std::size_t length, std::span<const EdgeId> edges);
  // Inverse of to_hex().
  static EdgeVector from_hex(std::size_t length, std::string_view hex);

  std::size_t size() const noexcept { return length_; }

  bool test(EdgeId e) const;
  void set(EdgeId e, bool value = true);
  void flip(EdgeId e);
  void clear() noexcept;

  std::size_t count() const noexcept;
  bool none() const noexcept;
  bool any() const noexcept { return !none(); }
  std::optional<EdgeId> first() const noexcept;
  std::vector<EdgeId> ones() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = __builtin_ctzll(bits);
        f(static_cast<EdgeId>(w * 64 + static_cast<std::size_t>(b)));
        bits &= bits - 1;
      }
    }
  }

  bool is_subset_of(const EdgeVector& other) const;
  bool intersects(const EdgeVector& other) const;

  // All binary operators throw std::invalid_argument on a length mismatch.
  EdgeVector& operator^=(const EdgeVector& other);
  EdgeVector& operator&=(const EdgeVector& other);
  EdgeVector& operator|=(const EdgeVector& other);
  EdgeVector operator~() const;

  friend EdgeVector operator^(EdgeVector a, const EdgeVector& b) { return a ^= b; }
  friend EdgeVector operator&(EdgeVector a, const EdgeVector& b) { return a &= b; }
  friend EdgeVector operator|(EdgeVector a, const EdgeVector& b) { return a |= b; }

  // Requires size() <= 64.
  std::uint64_t to_mask() const;

  // Hex digits of the vector read as an integer with edge 0 as the least
  // significant bit, most significant digit first, ceil(size/4) digits
  // (at least one). For size <= 64 this is the subset index in hex.
  std::string to_hex() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const EdgeVector&, const EdgeVector&) = default;
  friend bool operator<(const EdgeVector& a, const EdgeVector& b);

 private:
  void require_same_length(const EdgeVector& other) const;
  void require_index(EdgeId e) const;

  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace evenspace

template <>
struct std::hash<evenspace::EdgeVector> {
  std::size_t operator()(const evenspace::EdgeVector& v) const noexcept {
    std::size_t h = v.size() * 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t w : v.words()) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};
