#pragma once

#include <atomic>
#include <cstdint>

#include "cirf/field.hpp"
#include "cirf/params.hpp"

namespace cirf {

// Process-wide count of 1D inverse-transform invocations. Every inverse path
// bumps it: a 2D inverse of an h x w matrix adds exactly h + w. Forward
// transforms never touch it. Thread-safe; read/reset around the region of
// interest when measuring.
class InttCounter {
 public:
  static std::uint64_t read() { return count_.load(std::memory_order_relaxed); }
  static void reset() { count_.store(0, std::memory_order_relaxed); }
  static void bump(std::uint64_t n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }

 private:
  static std::atomic<std::uint64_t> count_;
};

enum class TransformPath {
  direct,       // O(n^2) summation straight from the definition
  auto_radix2,  // iterative radix-2 when the length is a power of two, direct otherwise
};

// Single-shot transforms straight from the definition:
//   out[u] = sum_i root^(u*i) v[i] mod p.
// root must have multiplicative order exactly v.size() modulo p.
Vec ntt1d(const Vec& v, Elem root, Elem p);
// Inverse: forward with root^-1, then scaled by n^-1. Bumps InttCounter.
Vec intt1d(const Vec& v, Elem root, Elem p);

Vec hadamard(const Vec& a, const Vec& b, Elem p);
Matrix hadamard(const Matrix& a, const Matrix& b, Elem p);
// Elementwise inverse; rejects zero entries.
Vec hadamard_inv(const Vec& a, Elem p);
Matrix hadamard_inv(const Matrix& a, Elem p);

// Transform plans for a fixed parameter set. Length-h transforms use alpha,
// length-w transforms use beta. The 2D transform is separable: columns with
// alpha, then rows with beta.
class NttContext {
 public:
  explicit NttContext(const GFParams& gp, TransformPath path = TransformPath::direct);

  const GFParams& params() const { return gp_; }

  Vec ntt1d_h(const Vec& v) const;
  Vec intt1d_h(const Vec& v) const;
  Vec ntt1d_w(const Vec& v) const;
  Vec intt1d_w(const Vec& v) const;

  Matrix ntt2d(const Matrix& m) const;
  Matrix intt2d(const Matrix& m) const;

 private:
  struct Plan {
    std::uint32_t n = 0;
    Elem n_inv = 0;
    bool radix2 = false;
    Vec fwd_tw;       // direct path: root^(u*i mod n), indexed u*i mod n
    Vec inv_tw;       // direct path, inverse root
    Vec fwd_stage;    // radix-2 path: per-stage root powers, bit-reversal applied on entry
    Vec inv_stage;
    void run(const Vec& in, Vec& out, bool inverse, Elem p) const;
  };

  static Plan make_plan(std::uint32_t n, Elem root, Elem p, TransformPath path);

  GFParams gp_;
  Plan plan_h_, plan_w_;
};

}  // namespace cirf
