#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dalg/error.hpp"
#include "dalg/rational.hpp"

namespace dalg {

// Exponent vector of a partial derivative (or of a monomial in z / t).
// The dimension is fixed by the surrounding context.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension) : entries_(dimension, 0) {}
  MultiIndex(std::initializer_list<unsigned> entries) : entries_(entries) {}
  explicit MultiIndex(std::vector<unsigned> entries) : entries_(std::move(entries)) {}

  static MultiIndex unit(std::size_t dimension, std::size_t i, unsigned power = 1) {
    if (i >= dimension) throw DimensionError("unit index out of range");
    MultiIndex e(dimension);
    e.entries_[i] = power;
    return e;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  unsigned operator[](std::size_t i) const { return entries_.at(i); }
  std::span<const unsigned> entries() const noexcept { return entries_; }

  unsigned degree() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0u); }

  // alpha! = prod alpha_i!
  Integer factorial() const {
    Integer f = 1;
    for (unsigned a : entries_) f *= dalg::factorial(a);
    return f;
  }

  bool is_zero() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](unsigned a) { return a == 0; });
  }

  MultiIndex plus_unit(std::size_t i, unsigned k = 1) const {
    if (i >= size()) throw DimensionError("derivation index out of range");
    MultiIndex r = *this;
    r.entries_[i] += k;
    return r;
  }

  // Componentwise <=.
  bool divides(const MultiIndex& other) const {
    check_same(other);
    for (std::size_t i = 0; i < size(); ++i)
      if (entries_[i] > other.entries_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& other) const {
    check_same(other);
    MultiIndex r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.entries_[i] += other.entries_[i];
    return r;
  }

  MultiIndex operator-(const MultiIndex& other) const {
    if (!other.divides(*this)) throw DomainError("multi-index difference would be negative");
    MultiIndex r = *this;
    for (std::size_t i = 0; i < size(); ++i) r.entries_[i] -= other.entries_[i];
    return r;
  }

  // Removes coordinate i (used when restricting to a hyperplane).
  MultiIndex without(std::size_t i) const {
    if (i >= size()) throw DimensionError("coordinate index out of range");
    std::vector<unsigned> e = entries_;
    e.erase(e.begin() + static_cast<std::ptrdiff_t>(i));
    return MultiIndex(std::move(e));
  }

  MultiIndex with_inserted(std::size_t i, unsigned value) const {
    if (i > size()) throw DimensionError("coordinate index out of range");
    std::vector<unsigned> e = entries_;
    e.insert(e.begin() + static_cast<std::ptrdiff_t>(i), value);
    return MultiIndex(std::move(e));
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < size(); ++i) {
      if (i) s += ",";
      s += std::to_string(entries_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  void check_same(const MultiIndex& other) const {
    if (other.size() != size()) throw DimensionError("multi-index length mismatch");
  }

  std::vector<unsigned> entries_;
};

// Graded lexicographic order: total degree first, then lexicographic on
// (alpha_1, ..., alpha_m).
inline std::strong_ordering grlex_compare(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("grlex_compare on multi-indices of different length");
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  auto ea = a.entries();
  auto eb = b.entries();
  return std::lexicographical_compare_three_way(ea.begin(), ea.end(), eb.begin(), eb.end());
}

struct GrlexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return grlex_compare(a, b) < 0; }
};

inline std::vector<MultiIndex> indices_of_degree(std::size_t dimension, unsigned degree) {
  std::vector<MultiIndex> out;
  if (dimension == 0) {
    if (degree == 0) out.emplace_back(0);
    return out;
  }
  std::vector<unsigned> current(dimension, 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
    if (pos + 1 == dimension) {
      current[pos] = remaining;
      out.emplace_back(current);
      return;
    }
    for (unsigned v = 0; v <= remaining; ++v) {
      current[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, degree);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

// All indices with |alpha| <= max_degree, in increasing grlex order.
inline std::vector<MultiIndex> indices_up_to(std::size_t dimension, unsigned max_degree) {
  std::vector<MultiIndex> out;
  for (unsigned d = 0; d <= max_degree; ++d) {
    auto layer = indices_of_degree(dimension, d);
    out.insert(out.end(), layer.begin(), layer.end());
    if (dimension == 0) break;
  }
  return out;
}

}  // namespace dalg
