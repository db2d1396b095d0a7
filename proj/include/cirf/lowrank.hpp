#pragma once

#include <cstdint>

#include "cirf/ntt.hpp"

namespace cirf {

// Rank-k factor pair: the image is approximated by x_alpha * x_beta^T with
// x_alpha h x k and x_beta w x k. Factor products are taken over the
// integers mod p, so stacked rank-1 terms may exceed 1 where they overlap.
// Factorization emits {0,1} entries; dithering (see ensure_anchor) may raise
// a single entry above 1.
struct FactorIndex {
  Matrix x_alpha;
  Matrix x_beta;
  std::uint32_t k = 0;
};

// Greedy rank-1 peeling for binary images: each rank step picks the rectangle
// (row support x column support) maximizing newly-covered ones minus covered
// zeros, by alternating hill climbing seeded from a random nonempty column,
// with 8 restarts. Deterministic for a given seed.
FactorIndex factorize(const Matrix& x, std::uint32_t k, std::uint64_t seed);

// x_alpha * x_beta^T mod p.
Matrix reconstruct(const FactorIndex& idx, Elem p);

// Hamming distance between x and the clamped reconstruction min(x_hat, 1).
std::uint64_t reconstruction_mismatch(const Matrix& x, const FactorIndex& idx, Elem p);

// True iff the 1D transform of every factor column (alpha columns with the
// height root, beta columns with the width root) has no zero coefficient —
// the condition required of columns whose transformed products get inverted.
bool check_anchor(const FactorIndex& idx, const NttContext& ntt);

// Returns idx unchanged if check_anchor passes. Otherwise each offending
// column gets one interior entry incremented by 1 mod p, scanning interior
// positions (pad rows/columns excluded) until its transform is zero-free.
// Fails with dither_exhausted if some column cannot be repaired.
FactorIndex ensure_anchor(const FactorIndex& idx, const NttContext& ntt, std::uint32_t pad_i,
                          std::uint32_t pad_j);

}  // namespace cirf
