#include "cirf/matching.hpp"

#include <string>

namespace cirf {

void validate_bio(const BioImage& img) {
  if (!img.padded) return;
  const std::size_t h = img.px.rows(), w = img.px.cols();
  if (2ull * img.pad_i >= h || 2ull * img.pad_j >= w)
    fail(Errc::window_too_large, "pad margins leave no interior");
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      bool margin = i < img.pad_i || i >= h - img.pad_i || j < img.pad_j || j >= w - img.pad_j;
      if (margin && img.px(i, j) != 0) fail(Errc::bad_argument, "padded image has nonzero margin");
    }
}

bool is_binary(const Matrix& m) {
  for (Elem v : m.data())
    if (v > 1) return false;
  return true;
}

Matrix flip(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(i, j) = m(m.rows() - 1 - i, m.cols() - 1 - j);
  return out;
}

Vec flip(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[v.size() - 1 - i];
  return out;
}

BioImage complement(const BioImage& img) {
  if (!is_binary(img.px)) fail(Errc::bad_argument, "complement needs a binary image");
  validate_bio(img);
  BioImage out = img;
  const std::size_t h = img.px.rows(), w = img.px.cols();
  std::size_t lo_i = img.padded ? img.pad_i : 0, hi_i = img.padded ? h - img.pad_i : h;
  std::size_t lo_j = img.padded ? img.pad_j : 0, hi_j = img.padded ? w - img.pad_j : w;
  for (std::size_t i = lo_i; i < hi_i; ++i)
    for (std::size_t j = lo_j; j < hi_j; ++j) out.px(i, j) = 1 - img.px(i, j);
  return out;
}

Matrix sample_filter(Rng& rng, const GFParams& gp) {
  Matrix r(gp.h, gp.w);
  for (Elem& v : r.data()) v = uniform_u64(rng, 1, gp.p - 1);
  return r;
}

TemplateParam TemplateParam::sample(Rng& rng, const GFParams& gp) {
  TemplateParam tp;
  tp.r1 = sample_filter(rng, gp);
  tp.r2 = sample_filter(rng, gp);
  return tp;
}

namespace {

void require_nonzero_filter(const Matrix& r) {
  for (Elem v : r.data())
    if (v == 0) fail(Errc::zero_filter_entry, "filter entry is zero");
}

Matrix delta_image(std::uint32_t h, std::uint32_t w, std::size_t i, std::size_t j) {
  Matrix m(h, w);
  m(i, j) = 1;
  return m;
}

// Position of the (expected) single nonzero entry.
bool single_peak(const Matrix& m, std::size_t& pi, std::size_t& pj) {
  bool found = false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) {
        if (found) return false;
        found = true;
        pi = i;
        pj = j;
      }
  return found;
}

}  // namespace

CorrelationMap CorrelationMap::calibrate(const NttContext& ntt) {
  const GFParams& gp = ntt.params();
  CorrelationMap cm;
  // Correlating two delta images leaves a single peak whose position is the
  // image of the shift between them under the layout map.
  auto surface = [&](std::size_t yi, std::size_t yj) {
    Matrix fx = ntt.ntt2d(delta_image(gp.h, gp.w, 0, 0));
    Matrix fy = ntt.ntt2d(flip(delta_image(gp.h, gp.w, yi, yj)));
    return ntt.intt2d(hadamard(fx, fy, gp.p));
  };
  std::size_t a0 = 0, b0 = 0;
  if (!single_peak(surface(0, 0), a0, b0))
    fail(Errc::bad_argument, "correlation map calibration: no unique zero-shift peak");
  cm.off_i_ = static_cast<long long>(a0);
  cm.off_j_ = static_cast<long long>(b0);
  if (gp.h > 1 || gp.w > 1) {
    std::size_t a1 = 0, b1 = 0;
    std::size_t yi = gp.h > 1 ? 1 : 0, yj = gp.w > 1 ? 1 : 0;
    if (!single_peak(surface(yi, yj), a1, b1))
      fail(Errc::bad_argument, "correlation map calibration: no unique unit-shift peak");
    auto step = [](std::size_t from, std::size_t to, std::uint32_t n) -> int {
      std::size_t fwd = (to + n - from) % n;
      if (fwd == 1) return 1;
      if ((from + n - to) % n == 1) return -1;
      fail(Errc::bad_argument, "correlation map calibration: peak step is not a unit");
    };
    cm.sign_i_ = gp.h > 1 ? step(a0, a1, gp.h) : 1;
    cm.sign_j_ = gp.w > 1 ? step(b0, b1, gp.w) : 1;
  }
  // Cross-check the calibrated map against the direct correlation of a fixed
  // pseudo-random pair at every wrapped shift.
  Rng probe_rng(0x5eedc0de);
  Matrix x(gp.h, gp.w), y(gp.h, gp.w);
  for (Elem& v : x.data()) v = uniform_u64(probe_rng, 0, 1);
  for (Elem& v : y.data()) v = uniform_u64(probe_rng, 0, 1);
  Matrix got = ntt.intt2d(hadamard(ntt.ntt2d(x), ntt.ntt2d(flip(y)), gp.p));
  Matrix want = brute_corr_full(x, y, gp.p);
  for (std::uint32_t di = 0; di < gp.h; ++di)
    for (std::uint32_t dj = 0; dj < gp.w; ++dj)
      if (got(cm.row(static_cast<int>(di), gp.h), cm.col(static_cast<int>(dj), gp.w)) !=
          want(di, dj))
        fail(Errc::bad_argument, "correlation map calibration failed cross-check");
  return cm;
}

Matrix transform_template(const CirfContext& ctx, const Matrix& x, const Matrix& r) {
  require_same_shape(x, r, "template transform");
  require_nonzero_filter(r);
  return hadamard(ctx.ntt().ntt2d(x), r, ctx.params().p);
}

Matrix transform_query(const CirfContext& ctx, const Matrix& y, const Matrix& r) {
  require_same_shape(y, r, "query transform");
  require_nonzero_filter(r);
  return hadamard(ctx.ntt().ntt2d(flip(y)), hadamard_inv(r, ctx.params().p), ctx.params().p);
}

TransformedTemplate make_transformed_template(const CirfContext& ctx, const BioImage& x,
                                              const TemplateParam& tp) {
  validate_bio(x);
  TransformedTemplate tt;
  tt.t = transform_template(ctx, x.px, tp.r1);
  tt.t_bar = transform_template(ctx, complement(x).px, tp.r2);
  return tt;
}

TransformedQuery make_transformed_query(const CirfContext& ctx, const BioImage& y,
                                        const TemplateParam& tp) {
  validate_bio(y);
  TransformedQuery tq;
  tq.v = transform_query(ctx, y.px, tp.r2);
  tq.v_bar = transform_query(ctx, complement(y).px, tp.r1);
  return tq;
}

Matrix match_correlation(const CirfContext& ctx, const Matrix& t, const Matrix& v) {
  require_same_shape(t, v, "match inputs");
  return ctx.ntt().intt2d(hadamard(t, v, ctx.params().p));
}

void validate_window(ShiftWindow win, const GFParams& gp) {
  if (win.di_max < 0 || win.dj_max < 0) fail(Errc::bad_argument, "negative shift window");
  if (2ull * win.di_max + 1 > gp.h || 2ull * win.dj_max + 1 > gp.w)
    fail(Errc::window_too_large, "shift window exceeds image period");
}

CorrTable correlation_window(const CirfContext& ctx, const Matrix& corr, ShiftWindow win) {
  const GFParams& gp = ctx.params();
  if (corr.rows() != gp.h || corr.cols() != gp.w) fail(Errc::shape_mismatch, "correlation surface");
  validate_window(win, gp);
  CorrTable table(win.di_max, win.dj_max);
  const CorrelationMap& cm = ctx.corr_map();
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj)
      table.at(di, dj) = corr(cm.row(di, gp.h), cm.col(dj, gp.w));
  return table;
}

std::uint64_t min_hamming_score(const CirfContext& ctx, const TransformedTemplate& tt,
                                const TransformedQuery& tq, ShiftWindow win) {
  // (X~ * Y) comes from t_bar with v, (X * Y~) from t with v_bar; the two
  // surfaces are summed per shift before minimizing.
  CorrTable miss0 = correlation_window(ctx, match_correlation(ctx, tt.t_bar, tq.v), win);
  CorrTable miss1 = correlation_window(ctx, match_correlation(ctx, tt.t, tq.v_bar), win);
  std::uint64_t best = UINT64_MAX;
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj) {
      std::uint64_t s = miss0.at(di, dj) + miss1.at(di, dj);
      if (s < best) best = s;
    }
  return best;
}

Matrix revoke(const Matrix& t, const Matrix& r_old, const Matrix& r_new, Elem p) {
  require_same_shape(t, r_old, "revoke shapes");
  require_same_shape(t, r_new, "revoke shapes");
  require_nonzero_filter(r_old);
  require_nonzero_filter(r_new);
  return hadamard(t, hadamard(r_new, hadamard_inv(r_old, p), p), p);
}

namespace {

std::size_t wrap_shift(int d, std::size_t n) {
  long long m = d % static_cast<long long>(n);
  return static_cast<std::size_t>(m < 0 ? m + static_cast<long long>(n) : m);
}

}  // namespace

CorrTable brute_corr(const Matrix& x, const Matrix& y, ShiftWindow win, Elem p) {
  require_same_shape(x, y, "correlation inputs");
  const std::size_t h = x.rows(), w = x.cols();
  CorrTable table(win.di_max, win.dj_max);
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj) {
      std::size_t oi = wrap_shift(di, h), oj = wrap_shift(dj, w);
      std::uint64_t acc = 0;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
          acc = (acc + x(i, j) * y((i + oi) % h, (j + oj) % w)) % p;
      table.at(di, dj) = acc;
    }
  return table;
}

Matrix brute_corr_full(const Matrix& x, const Matrix& y, Elem p) {
  require_same_shape(x, y, "correlation inputs");
  const std::size_t h = x.rows(), w = x.cols();
  Matrix out(h, w);
  for (std::size_t di = 0; di < h; ++di)
    for (std::size_t dj = 0; dj < w; ++dj) {
      std::uint64_t acc = 0;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
          acc = (acc + x(i, j) * y((i + di) % h, (j + dj) % w)) % p;
      out(di, dj) = acc;
    }
  return out;
}

std::uint64_t brute_min_hamming(const BioImage& x, const BioImage& y, ShiftWindow win) {
  require_same_shape(x.px, y.px, "hamming inputs");
  BioImage xc = complement(x);
  BioImage yc = complement(y);
  const std::size_t h = x.px.rows(), w = x.px.cols();
  std::uint64_t best = UINT64_MAX;
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj) {
      std::size_t oi = wrap_shift(di, h), oj = wrap_shift(dj, w);
      std::uint64_t miss = 0;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          std::size_t si = (i + oi) % h, sj = (j + oj) % w;
          miss += xc.px(i, j) * y.px(si, sj) + x.px(i, j) * yc.px(si, sj);
        }
      if (miss < best) best = miss;
    }
  return best;
}

}  // namespace cirf
