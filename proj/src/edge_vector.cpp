#include "evenspace/edge_vector.hpp"

#include <algorithm>
#include <stdexcept>

namespace evenspace {

namespace {

std::size_t word_count(std::size_t length) { return (length + 63) / 64; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

EdgeVector::EdgeVector(std::size_t length) : length_(length), words_(word_count(length), 0) {}

EdgeVector EdgeVector::all(std::size_t length) {
  EdgeVector v(length);
  std::fill(v.words_.begin(), v.words_.end(), ~std::uint64_t{0});
  if (length % 64 != 0 && !v.words_.empty()) {
    v.words_.back() &= (std::uint64_t{1} << (length % 64)) - 1;
  }
  return v;
}

EdgeVector EdgeVector::from_mask(std::size_t length, std::uint64_t mask) {
  if (length > 64) throw std::invalid_argument("EdgeVector::from_mask: length exceeds 64");
  EdgeVector v(length);
  if (length < 64) mask &= (std::uint64_t{1} << length) - 1;
  if (length > 0) v.words_[0] = mask;
  return v;
}

EdgeVector EdgeVector::from_edges(std::size_t length, std::span<const EdgeId> edges) {
  EdgeVector v(length);
  for (EdgeId e : edges) v.set(e);
  return v;
}

EdgeVector EdgeVector::from_hex(std::size_t length, std::string_view hex) {
  EdgeVector v(length);
  std::size_t bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    const int d = hex_value(*it);
    if (d < 0) throw std::invalid_argument("EdgeVector::from_hex: bad digit");
    for (int b = 0; b < 4; ++b, ++bit) {
      if ((d >> b) & 1) {
        if (bit >= length) throw std::invalid_argument("EdgeVector::from_hex: value exceeds length");
        v.set(static_cast<EdgeId>(bit));
      }
    }
  }
  return v;
}

void EdgeVector::require_index(EdgeId e) const {
  if (e >= length_) throw std::out_of_range("EdgeVector: edge id out of range");
}

void EdgeVector::require_same_length(const EdgeVector& other) const {
  if (other.length_ != length_) throw std::invalid_argument("EdgeVector: length mismatch");
}

bool EdgeVector::test(EdgeId e) const {
  require_index(e);
  return (words_[e / 64] >> (e % 64)) & 1U;
}

void EdgeVector::set(EdgeId e, bool value) {
  require_index(e);
  const std::uint64_t bit = std::uint64_t{1} << (e % 64);
  if (value) {
    words_[e / 64] |= bit;
  } else {
    words_[e / 64] &= ~bit;
  }
}

void EdgeVector::flip(EdgeId e) {
  require_index(e);
  words_[e / 64] ^= std::uint64_t{1} << (e % 64);
}

void EdgeVector::clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

std::size_t EdgeVector::count() const noexcept {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool EdgeVector::none() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::optional<EdgeId> EdgeVector::first() const noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) {
      return static_cast<EdgeId>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w])));
    }
  }
  return std::nullopt;
}

std::vector<EdgeId> EdgeVector::ones() const {
  std::vector<EdgeId> out;
  out.reserve(count());
  for_each([&](EdgeId e) { out.push_back(e); });
  return out;
}

bool EdgeVector::is_subset_of(const EdgeVector& other) const {
  require_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

bool EdgeVector::intersects(const EdgeVector& other) const {
  require_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & other.words_[w]) != 0) return true;
  }
  return false;
}

EdgeVector& EdgeVector::operator^=(const EdgeVector& other) {
  require_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

EdgeVector& EdgeVector::operator&=(const EdgeVector& other) {
  require_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

EdgeVector& EdgeVector::operator|=(const EdgeVector& other) {
  require_same_length(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

EdgeVector EdgeVector::operator~() const { return *this ^ all(length_); }

std::uint64_t EdgeVector::to_mask() const {
  if (length_ > 64) throw std::invalid_argument("EdgeVector::to_mask: length exceeds 64");
  return words_.empty() ? 0 : words_[0];
}

std::string EdgeVector::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = std::max<std::size_t>(1, (length_ + 3) / 4);
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    int value = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t bit = d * 4 + static_cast<std::size_t>(b);
      if (bit < length_ && ((words_[bit / 64] >> (bit % 64)) & 1U)) value |= 1 << b;
    }
    out[digits - 1 - d] = kDigits[value];
  }
  return out;
}

bool operator<(const EdgeVector& a, const EdgeVector& b) {
  if (a.length_ != b.length_) return a.length_ < b.length_;
  for (std::size_t w = a.words_.size(); w-- > 0;) {
    if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
  }
  return false;
}

}  // namespace evenspace
