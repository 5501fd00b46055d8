#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hosc/error.hpp"
#include "hosc/geometry.hpp"

namespace hosc {

/// Hyperoctant identifier: one sign per coordinate, bit-packed with '+' as 1
/// and '-' as 0. Position k lives in word k/64, bit k%64.
///
/// Ordering is lexicographic over the sign string with '+' < '-'; every
/// tie-break in the library relies on it.
class SignLabel {
 public:
  SignLabel() = default;

  explicit SignLabel(std::size_t dim) : dim_(dim), words_((dim + 63) / 64, 0) {}

  /// '+' for coordinates >= 0, '-' otherwise (zero maps to '+').
  static SignLabel of(std::span<const double> coords) {
    SignLabel label(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k)
      if (coords[k] >= 0.0) label.set(k, true);
    return label;
  }

  /// Accepts '+' and '-' (ASCII) as well as the Unicode minus sign U+2212.
  static SignLabel parse(std::string_view text) {
    std::vector<bool> signs;
    for (std::size_t i = 0; i < text.size();) {
      const char c = text[i];
      if (c == '+') {
        signs.push_back(true);
        ++i;
      } else if (c == '-') {
        signs.push_back(false);
        ++i;
      } else if (text.substr(i, 3) == "\xE2\x88\x92") {
        signs.push_back(false);
        i += 3;
      } else {
        throw Error(ErrorKind::ParseError, "invalid sign label character in '" + std::string(text) + "'");
      }
    }
    SignLabel label(signs.size());
    for (std::size_t k = 0; k < signs.size(); ++k) label.set(k, signs[k]);
    return label;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool positive(std::size_t k) const noexcept { return (words_[k / 64] >> (k % 64)) & 1U; }

  void set(std::size_t k, bool plus) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (k % 64);
    if (plus)
      words_[k / 64] |= mask;
    else
      words_[k / 64] &= ~mask;
  }

  /// +1 / -1 expansion.
  std::vector<int> sign_vector() const {
    std::vector<int> s(dim_);
    for (std::size_t k = 0; k < dim_; ++k) s[k] = positive(k) ? 1 : -1;
    return s;
  }

  std::string str() const {
    std::string s(dim_, '-');
    for (std::size_t k = 0; k < dim_; ++k)
      if (positive(k)) s[k] = '+';
    return s;
  }

  friend bool operator==(const SignLabel&, const SignLabel&) = default;

  friend std::strong_ordering operator<=>(const SignLabel& a, const SignLabel& b) noexcept {
    const std::size_t n = std::min(a.words_.size(), b.words_.size());
    for (std::size_t w = 0; w < n; ++w) {
      const std::uint64_t diff = a.words_[w] ^ b.words_[w];
      if (diff == 0) continue;
      const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(diff));
      if (k >= a.dim_ || k >= b.dim_) break;
      // The label holding '+' at the first differing position sorts first.
      return a.positive(k) ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return a.dim_ <=> b.dim_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SignLabelHash {
  std::size_t operator()(const SignLabel& label) const noexcept {
    std::size_t h = std::hash<std::size_t>{}(label.dim());
    for (std::uint64_t w : label.words()) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline SignLabel sign_label(std::span<const double> coords) { return SignLabel::of(coords); }

namespace detail {
inline void require_same_dim(const SignLabel& a, const SignLabel& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::DimensionMismatch,
                "labels of length " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
}
}  // namespace detail

/// Number of positions where the two labels differ (Hamming distance; equal to
/// the Levenshtein distance for equal-length strings over a 2-letter alphabet).
inline unsigned levenshtein(const SignLabel& a, const SignLabel& b) {
  detail::require_same_dim(a, b);
  unsigned d = 0;
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t w = 0; w < wa.size(); ++w) d += static_cast<unsigned>(std::popcount(wa[w] ^ wb[w]));
  return d;
}

/// Dense symmetric n x n matrix. Row-major.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> entries;

  double operator()(std::size_t i, std::size_t j) const noexcept { return entries[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return entries[i * n + j]; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;
};

/// All pairwise Levenshtein distances through the sign-matrix product
/// (D * 1 - S S^T) / 2, with S the n x D matrix of +1/-1 rows. Integer
/// arithmetic throughout, so the result is exact.
inline DistanceMatrix levenshtein_matrix(std::span<const SignLabel> labels) {
  DistanceMatrix m{labels.size(), std::vector<double>(labels.size() * labels.size(), 0.0)};
  if (labels.empty()) return m;
  const std::size_t d = labels.front().dim();
  std::vector<std::int32_t> signs(labels.size() * d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].dim() != d) throw Error(ErrorKind::DimensionMismatch, "labels differ in length");
    for (std::size_t k = 0; k < d; ++k) signs[i * d + k] = labels[i].positive(k) ? 1 : -1;
  }
  const auto dd = static_cast<std::int32_t>(d);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::int32_t* si = signs.data() + i * d;
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      const std::int32_t* sj = signs.data() + j * d;
      std::int32_t gram = 0;
      for (std::size_t k = 0; k < d; ++k) gram += si[k] * sj[k];
      const double v = static_cast<double>((dd - gram) / 2);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

/// Sum of +/-1 products over coordinates; sigma_a . sigma_b.
inline long sign_dot(const SignLabel& a, const SignLabel& b) {
  detail::require_same_dim(a, b);
  long s = 0;
  for (std::size_t k = 0; k < a.dim(); ++k) s += (a.positive(k) == b.positive(k)) ? 1 : -1;
  return s;
}

}  // namespace hosc
