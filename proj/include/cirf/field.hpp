#pragma once

#include <cstdint>
#include <vector>

#include "cirf/error.hpp"

namespace cirf {

// Field elements are stored in 64-bit words; parameter validation guarantees
// p < 2^32 so that a product of two reduced values never overflows.
using Elem = std::uint64_t;
using Vec = std::vector<Elem>;

constexpr Elem add_mod(Elem a, Elem b, Elem p) {
  Elem s = a + b;
  return s >= p ? s - p : s;
}

constexpr Elem sub_mod(Elem a, Elem b, Elem p) { return a >= b ? a - b : a + p - b; }

constexpr Elem mul_mod(Elem a, Elem b, Elem p) { return (a % p) * (b % p) % p; }

constexpr Elem pow_mod(Elem base, std::uint64_t e, Elem p) {
  Elem acc = 1 % p;
  Elem b = base % p;
  while (e) {
    if (e & 1) acc = mul_mod(acc, b, p);
    b = mul_mod(b, b, p);
    e >>= 1;
  }
  return acc;
}

// Multiplicative inverse via Fermat; p must be prime.
inline Elem inv_mod(Elem a, Elem p) {
  if (a % p == 0) fail(Errc::zero_element, "inverse of zero");
  return pow_mod(a, p - 2, p);
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Elem fill = 0)
      : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Elem& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  Elem operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  Vec& data() { return v_; }
  const Vec& data() const { return v_; }

  Vec col(std::size_t j) const {
    Vec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = v_[i * cols_ + j];
    return out;
  }

  void set_col(std::size_t j, const Vec& c) {
    if (c.size() != rows_) fail(Errc::shape_mismatch, "column length");
    for (std::size_t i = 0; i < rows_; ++i) v_[i * cols_ + j] = c[i];
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec v_;
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Errc::shape_mismatch, where);
}

}  // namespace cirf
