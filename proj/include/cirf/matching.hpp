#pragma once

#include <cstdint>

#include "cirf/ntt.hpp"
#include "cirf/rng.hpp"

namespace cirf {

struct ShiftWindow {
  int di_max = 0;
  int dj_max = 0;
};

// A feature image over Z_p. Enrolled images are zero-padded: the top/bottom
// pad_i rows and left/right pad_j columns are zero, which keeps every cyclic
// correlation within the shift window equal to the linear one. Queries are
// used unpadded.
struct BioImage {
  Matrix px;
  std::uint32_t pad_i = 0;
  std::uint32_t pad_j = 0;
  bool padded = false;
};

// Margins must actually be zero when the padded flag is set.
void validate_bio(const BioImage& img);

bool is_binary(const Matrix& m);

// Y with both axes reversed: out[i][j] = in[h-1-i][w-1-j].
Matrix flip(const Matrix& m);
Vec flip(const Vec& v);

// Binary complement of the interior; pad margins stay zero. For an unpadded
// image the whole frame is interior.
BioImage complement(const BioImage& img);

// The correlation surface produced by the transform pipeline stores shift
// (di, dj) at a fixed affine position (sign*di + offset mod h, ...). The map
// is calibrated against delta-image probes rather than assumed, and then
// cross-checked against the direct correlation of a random pair.
class CorrelationMap {
 public:
  static CorrelationMap calibrate(const NttContext& ntt);

  std::size_t row(int di, std::uint32_t h) const {
    long long a = (off_i_ + static_cast<long long>(sign_i_) * di) % static_cast<long long>(h);
    return static_cast<std::size_t>(a < 0 ? a + h : a);
  }
  std::size_t col(int dj, std::uint32_t w) const {
    long long b = (off_j_ + static_cast<long long>(sign_j_) * dj) % static_cast<long long>(w);
    return static_cast<std::size_t>(b < 0 ? b + w : b);
  }

 private:
  int sign_i_ = 1, sign_j_ = 1;
  long long off_i_ = 0, off_j_ = 0;
};

// Shared state for matching: transform plans plus the calibrated shift map.
class CirfContext {
 public:
  explicit CirfContext(const GFParams& gp, TransformPath path = TransformPath::direct)
      : ntt_(gp, path), map_(CorrelationMap::calibrate(ntt_)) {}

  const GFParams& params() const { return ntt_.params(); }
  const NttContext& ntt() const { return ntt_; }
  const CorrelationMap& corr_map() const { return map_; }

 private:
  NttContext ntt_;
  CorrelationMap map_;
};

// Random filter pair for the Hamming scheme; entries uniform over Z_p \ {0}.
// r1 protects the image transform, r2 the complement transform.
struct TemplateParam {
  Matrix r1, r2;
  static TemplateParam sample(Rng& rng, const GFParams& gp);
};

struct TransformedTemplate {
  Matrix t;      // F(X) . r1
  Matrix t_bar;  // F(X~) . r2   (X~ = interior complement)
};

// Query counterpart; filters are applied inverted and to the flipped image,
// so that t . v cancels the filter and yields F(X) . F(Y flipped).
struct TransformedQuery {
  Matrix v;      // F(flip(Y)) . r2^-1
  Matrix v_bar;  // F(flip(Y~)) . r1^-1
};

Matrix sample_filter(Rng& rng, const GFParams& gp);

// T = F(X) . r  elementwise.
Matrix transform_template(const CirfContext& ctx, const Matrix& x, const Matrix& r);
// V = F(flip(Y)) . r^-1 elementwise. Rejects filters with zero entries.
Matrix transform_query(const CirfContext& ctx, const Matrix& y, const Matrix& r);

TransformedTemplate make_transformed_template(const CirfContext& ctx, const BioImage& x,
                                              const TemplateParam& tp);
TransformedQuery make_transformed_query(const CirfContext& ctx, const BioImage& y,
                                        const TemplateParam& tp);

// F^-1(T . V): the full cyclic cross-correlation surface of the two protected
// inputs, provided both were built with the same filter.
Matrix match_correlation(const CirfContext& ctx, const Matrix& t, const Matrix& v);

// Correlation values laid out by shift, rows di in [-di_max, di_max],
// columns dj in [-dj_max, dj_max].
class CorrTable {
 public:
  CorrTable(int di_max, int dj_max)
      : di_max_(di_max), dj_max_(dj_max),
        vals_(static_cast<std::size_t>(2 * di_max + 1) * (2 * dj_max + 1)) {}

  Elem& at(int di, int dj) {
    return vals_[static_cast<std::size_t>(di + di_max_) * (2 * dj_max_ + 1) + (dj + dj_max_)];
  }
  Elem at(int di, int dj) const {
    return vals_[static_cast<std::size_t>(di + di_max_) * (2 * dj_max_ + 1) + (dj + dj_max_)];
  }
  int di_max() const { return di_max_; }
  int dj_max() const { return dj_max_; }

 private:
  int di_max_, dj_max_;
  std::vector<Elem> vals_;
};

void validate_window(ShiftWindow win, const GFParams& gp);

CorrTable correlation_window(const CirfContext& ctx, const Matrix& corr, ShiftWindow win);

// Hamming distance minimized over the shift window, computed from protected
// data only: min over shifts of (X~ * Y) + (X * Y~) where * is cyclic
// cross-correlation. Costs exactly two 2D inverse transforms.
std::uint64_t min_hamming_score(const CirfContext& ctx, const TransformedTemplate& tt,
                                const TransformedQuery& tq, ShiftWindow win);

// Re-keying without the plaintext: T . r_new . r_old^-1.
Matrix revoke(const Matrix& t, const Matrix& r_old, const Matrix& r_new, Elem p);

// Direct evaluation of the cyclic cross-correlation at each window shift.
CorrTable brute_corr(const Matrix& x, const Matrix& y, ShiftWindow win, Elem p);
// Same at every wrapped shift: out(di, dj) for di in [0,h), dj in [0,w).
Matrix brute_corr_full(const Matrix& x, const Matrix& y, Elem p);
// Directly counts mismatching overlapped pixels per shift and minimizes.
std::uint64_t brute_min_hamming(const BioImage& x, const BioImage& y, ShiftWindow win);

}  // namespace cirf
