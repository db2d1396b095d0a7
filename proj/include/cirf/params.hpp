#pragma once

#include <cstdint>
#include <vector>

#include "cirf/field.hpp"

namespace cirf {

// Transform parameters: prime modulus p with alpha of multiplicative order h
// and beta of order w. h and w are the image height and width.
struct GFParams {
  Elem p = 0;
  Elem alpha = 0;
  Elem beta = 0;
  std::uint32_t h = 0;
  std::uint32_t w = 0;
};

bool is_prime_u64(std::uint64_t n);

// Distinct prime factors by trial division (inputs here stay below 2^32).
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

// True iff root has multiplicative order exactly n modulo prime p.
bool has_exact_order(Elem root, std::uint64_t n, Elem p);

// Checks primality of p, the order of alpha (= h) and beta (= w), h | p-1,
// w | p-1, the element-width bound p < 2^32, and p > correlation_bound.
// correlation_bound == 0 selects the binary-image default h*w.
GFParams validate_params(Elem p, Elem alpha, Elem beta, std::uint32_t h, std::uint32_t w,
                         Elem correlation_bound = 0);

// Smallest prime p ≡ 1 (mod lcm(h,w)) with p > correlation_bound, with roots
// of exact order h and w obtained from a generator of the multiplicative
// group. correlation_bound == 0 selects the binary-image default h*w.
GFParams find_params(std::uint32_t h, std::uint32_t w, Elem correlation_bound);

// The 32x64 configuration shipped as default: p=8641, alpha=40, beta=948.
GFParams reference_params();

}  // namespace cirf
