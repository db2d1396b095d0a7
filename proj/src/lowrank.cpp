#include "cirf/lowrank.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "cirf/matching.hpp"
#include "cirf/rng.hpp"

namespace cirf {

namespace {

constexpr int kRestarts = 8;
constexpr int kMaxAlternations = 64;

struct Rect {
  std::vector<std::uint8_t> u, v;
  long long gain = 0;
};

// Cell scores: +1 for a one not yet claimed by an earlier rectangle, -1 for
// an unclaimed zero, 0 for anything already claimed (re-covering changes
// neither the clamped reconstruction nor the mismatch).
long long rect_gain(const Matrix& score, const Rect& r) {
  long long g = 0;
  for (std::size_t i = 0; i < score.rows(); ++i) {
    if (!r.u[i]) continue;
    for (std::size_t j = 0; j < score.cols(); ++j)
      if (r.v[j]) g += static_cast<long long>(static_cast<std::int64_t>(score(i, j)));
  }
  return g;
}

Rect climb(const Matrix& score, std::size_t seed_col) {
  const std::size_t h = score.rows(), w = score.cols();
  Rect r;
  r.u.assign(h, 0);
  r.v.assign(w, 0);
  r.v[seed_col] = 1;
  for (int iter = 0; iter < kMaxAlternations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < h; ++i) {
      long long g = 0;
      for (std::size_t j = 0; j < w; ++j)
        if (r.v[j]) g += static_cast<std::int64_t>(score(i, j));
      std::uint8_t want = g > 0 ? 1 : 0;
      if (want != r.u[i]) {
        r.u[i] = want;
        changed = true;
      }
    }
    for (std::size_t j = 0; j < w; ++j) {
      long long g = 0;
      for (std::size_t i = 0; i < h; ++i)
        if (r.u[i]) g += static_cast<std::int64_t>(score(i, j));
      std::uint8_t want = g > 0 ? 1 : 0;
      if (want != r.v[j]) {
        r.v[j] = want;
        changed = true;
      }
    }
    if (!changed) break;
  }
  r.gain = rect_gain(score, r);
  return r;
}

}  // namespace

FactorIndex factorize(const Matrix& x, std::uint32_t k, std::uint64_t seed) {
  const std::size_t h = x.rows(), w = x.cols();
  if (h == 0 || w == 0) fail(Errc::bad_argument, "empty image");
  if (k == 0 || k > std::min(h, w))
    fail(Errc::rank_too_large, "rank " + std::to_string(k) + " for " + std::to_string(h) + "x" +
                                   std::to_string(w));
  if (!is_binary(x)) fail(Errc::bad_argument, "factorization input must be binary");

  FactorIndex idx;
  idx.k = k;
  idx.x_alpha = Matrix(h, k);
  idx.x_beta = Matrix(w, k);

  // score holds +1 / -1 (as mod-2^64 words) / 0 per cell, updated as
  // rectangles claim cells.
  Matrix score(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      score(i, j) = x(i, j) ? 1 : static_cast<Elem>(-1);

  bool spent = false;
  for (std::uint32_t t = 0; t < k && !spent; ++t) {
    // Seed columns are drawn among columns that still hold unclaimed ones.
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t i = 0; i < h; ++i)
        if (score(i, j) == 1) {
          live.push_back(j);
          break;
        }
    if (live.empty()) break;

    Rng rng(derive_seed(seed, t));
    Rect best;
    for (int restart = 0; restart < kRestarts; ++restart) {
      std::size_t col = live[uniform_u64(rng, 0, live.size() - 1)];
      Rect r = climb(score, col);
      if (r.gain > best.gain) best = std::move(r);
    }
    if (best.gain <= 0) {
      spent = true;
      break;
    }
    for (std::size_t i = 0; i < h; ++i) idx.x_alpha(i, t) = best.u[i];
    for (std::size_t j = 0; j < w; ++j) idx.x_beta(j, t) = best.v[j];
    for (std::size_t i = 0; i < h; ++i) {
      if (!best.u[i]) continue;
      for (std::size_t j = 0; j < w; ++j)
        if (best.v[j]) score(i, j) = 0;
    }
  }
  return idx;
}

Matrix reconstruct(const FactorIndex& idx, Elem p) {
  const std::size_t h = idx.x_alpha.rows(), w = idx.x_beta.rows();
  if (idx.x_alpha.cols() != idx.k || idx.x_beta.cols() != idx.k)
    fail(Errc::shape_mismatch, "factor column count");
  Matrix out(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      std::uint64_t acc = 0;
      for (std::uint32_t t = 0; t < idx.k; ++t)
        acc = (acc + mul_mod(idx.x_alpha(i, t), idx.x_beta(j, t), p)) % p;
      out(i, j) = acc;
    }
  return out;
}

std::uint64_t reconstruction_mismatch(const Matrix& x, const FactorIndex& idx, Elem p) {
  Matrix hat = reconstruct(idx, p);
  require_same_shape(x, hat, "mismatch inputs");
  std::uint64_t miss = 0;
  for (std::size_t n = 0; n < x.data().size(); ++n) {
    Elem clamped = hat.data()[n] > 1 ? 1 : hat.data()[n];
    miss += x.data()[n] != clamped;
  }
  return miss;
}

namespace {

bool zero_free(const Vec& v) {
  for (Elem e : v)
    if (e == 0) return false;
  return true;
}

bool column_ok(const Vec& col, const NttContext& ntt, bool alpha_side) {
  return zero_free(alpha_side ? ntt.ntt1d_h(col) : ntt.ntt1d_w(col));
}

Vec repair_column(Vec col, const NttContext& ntt, bool alpha_side, std::uint32_t pad,
                  const char* what) {
  Elem p = ntt.params().p;
  std::size_t n = col.size();
  if (2ull * pad >= n) fail(Errc::dither_exhausted, std::string(what) + ": no interior positions");
  for (std::size_t pos = pad; pos < n - pad; ++pos) {
    Elem saved = col[pos];
    col[pos] = add_mod(col[pos], 1, p);
    if (column_ok(col, ntt, alpha_side)) return col;
    col[pos] = saved;
  }
  fail(Errc::dither_exhausted, std::string(what) + ": every interior dither leaves a zero");
}

}  // namespace

bool check_anchor(const FactorIndex& idx, const NttContext& ntt) {
  for (std::uint32_t t = 0; t < idx.k; ++t) {
    if (!column_ok(idx.x_alpha.col(t), ntt, true)) return false;
    if (!column_ok(idx.x_beta.col(t), ntt, false)) return false;
  }
  return true;
}

FactorIndex ensure_anchor(const FactorIndex& idx, const NttContext& ntt, std::uint32_t pad_i,
                          std::uint32_t pad_j) {
  FactorIndex out = idx;
  for (std::uint32_t t = 0; t < idx.k; ++t) {
    Vec a = out.x_alpha.col(t);
    if (!column_ok(a, ntt, true))
      out.x_alpha.set_col(t, repair_column(std::move(a), ntt, true, pad_i, "alpha column"));
    Vec b = out.x_beta.col(t);
    if (!column_ok(b, ntt, false))
      out.x_beta.set_col(t, repair_column(std::move(b), ntt, false, pad_j, "beta column"));
  }
  return out;
}

}  // namespace cirf
