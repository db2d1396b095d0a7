#include "cirf/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "cirf/stats.hpp"

namespace cirf {

namespace {

Matrix random_binary(Rng& rng, std::size_t h, std::size_t w) {
  Matrix m(h, w);
  for (Elem& e : m.data()) e = uniform_u64(rng, 0, 1);
  return m;
}

bool zero_free(const Vec& v) {
  for (Elem e : v)
    if (e == 0) return false;
  return true;
}
bool zero_free(const Matrix& m) { return zero_free(m.data()); }

// Random binary frame whose 2D spectrum has no zero coefficient.
Matrix random_spectral_frame(Rng& rng, const CirfContext& ctx, Matrix* spectrum) {
  const GFParams& gp = ctx.params();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix x = random_binary(rng, gp.h, gp.w);
    Matrix fx = ctx.ntt().ntt2d(x);
    if (zero_free(fx)) {
      if (spectrum) *spectrum = std::move(fx);
      return x;
    }
  }
  fail(Errc::bad_argument, "could not find a zero-free binary frame for this parameter set");
}

Vec random_spectral_column(Rng& rng, const CirfContext& ctx, bool alpha, Vec* spectrum) {
  const GFParams& gp = ctx.params();
  const std::size_t n = alpha ? gp.h : gp.w;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec x(n);
    for (Elem& e : x) e = uniform_u64(rng, 0, 1);
    Vec g = alpha ? ctx.ntt().ntt1d_h(x) : ctx.ntt().ntt1d_w(x);
    if (zero_free(g)) {
      if (spectrum) *spectrum = std::move(g);
      return x;
    }
  }
  fail(Errc::bad_argument, "could not find a zero-free binary column for this parameter set");
}

std::uint64_t pick_bins(Elem p) {
  for (std::uint64_t b : {64ull, 32ull, 16ull, 8ull, 4ull, 2ull})
    if ((p - 1) % b == 0) return b;
  return 1;
}

UniformityRow bin_and_test(const std::string& label, const std::vector<Elem>& values, Elem p) {
  UniformityRow row;
  row.label = label;
  row.bins = pick_bins(p);
  row.draws = values.size();
  const std::uint64_t width = (p - 1) / row.bins;
  std::vector<std::uint64_t> counts(row.bins, 0);
  for (Elem v : values) ++counts[(v - 1) / width];
  row.chi2 = chi_square_stat(counts, static_cast<double>(values.size()) / row.bins);
  row.critical = chi_square_critical(row.bins - 1, 0.001);
  row.pass = row.chi2 <= row.critical;
  return row;
}

struct MstFixture {
  FactorIndex anchor_idx, rec_idx, qry_idx;
  IndexParam anchor_ip, rec_ip;
  AnchorParam ap;
  TransformedIndex anchor_t, rec_t;
  TransformedQueryIndex v_anchor, v_rec;

  MstFixture(Rng& rng, const CirfContext& ctx, std::uint32_t k) {
    const GFParams& gp = ctx.params();
    auto checked = [&](FactorIndex idx) {
      return ensure_anchor(idx, ctx.ntt(), 0, 0);
    };
    anchor_idx = checked(factorize(random_binary(rng, gp.h, gp.w), k, rng()));
    rec_idx = factorize(random_binary(rng, gp.h, gp.w), k, rng());
    qry_idx = checked(factorize(random_binary(rng, gp.h, gp.w), k, rng()));
    anchor_ip = IndexParam::sample(rng, gp, k);
    rec_ip = IndexParam::sample(rng, gp, k);
    ap = AnchorParam::sample(rng, gp);
    anchor_t = transform_index_enroll(ctx, anchor_idx, anchor_ip, ap, true);
    rec_t = transform_index_enroll(ctx, rec_idx, rec_ip, ap, false);
    QueryIndexNtt q = prepare_query_index(ctx, qry_idx);
    v_anchor = apply_query_filters(ctx, q, anchor_ip, ap, true);
    v_rec = apply_query_filters(ctx, q, rec_ip, ap, false);
  }
};

}  // namespace

std::vector<CheckResult> run_transform_checks(const GFParams& gp, std::uint64_t seed,
                                              std::uint32_t k) {
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
    out.push_back({name, pass, detail});
  };
  if (k == 0) fail(Errc::rank_too_large, "factor rank must be positive");
  k = std::min(k, std::min(gp.h, gp.w));
  CirfContext ctx(gp);
  Rng rng(derive_seed(seed, 0x5e1f));
  ShiftWindow win{static_cast<int>(std::min<std::uint32_t>(2, (gp.h - 1) / 2)),
                  static_cast<int>(std::min<std::uint32_t>(4, (gp.w - 1) / 2))};

  {
    bool ok = true;
    for (int it = 0; it < 5 && ok; ++it) {
      Matrix x = random_binary(rng, gp.h, gp.w), y = random_binary(rng, gp.h, gp.w);
      Matrix r = sample_filter(rng, gp);
      Matrix corr =
          match_correlation(ctx, transform_template(ctx, x, r), transform_query(ctx, y, r));
      CorrTable got = correlation_window(ctx, corr, win);
      CorrTable want = brute_corr(x, y, win, gp.p);
      for (int di = -win.di_max; di <= win.di_max; ++di)
        for (int dj = -win.dj_max; dj <= win.dj_max; ++dj)
          ok &= got.at(di, dj) == want.at(di, dj);
    }
    add("correlation window matches direct evaluation", ok);
  }
  {
    bool ok = true;
    std::uint32_t pi = std::min<std::uint32_t>(2, (gp.h - 1) / 2);
    std::uint32_t pj = std::min<std::uint32_t>(4, (gp.w - 1) / 2);
    for (int it = 0; it < 3 && ok; ++it) {
      BioImage x = zero_pad(random_binary(rng, gp.h, gp.w), pi, pj);
      BioImage y{random_binary(rng, gp.h, gp.w), 0, 0, false};
      TemplateParam tp = TemplateParam::sample(rng, gp);
      ok &= min_hamming_score(ctx, make_transformed_template(ctx, x, tp),
                              make_transformed_query(ctx, y, tp),
                              win) == brute_min_hamming(x, y, win);
    }
    add("min-hamming score matches direct count", ok);
  }
  {
    bool ok = true;
    for (int it = 0; it < 5 && ok; ++it) {
      Matrix x = random_binary(rng, gp.h, gp.w);
      Matrix r_old = sample_filter(rng, gp), r_new = sample_filter(rng, gp);
      ok &= revoke(transform_template(ctx, x, r_old), r_old, r_new, gp.p) ==
            transform_template(ctx, x, r_new);
    }
    add("re-keyed template equals fresh enrollment", ok);
  }
  {
    NttContext fast(gp, TransformPath::auto_radix2);
    bool ok = true;
    for (int it = 0; it < 3 && ok; ++it) {
      Matrix m = random_binary(rng, gp.h, gp.w);
      ok &= ctx.ntt().ntt2d(m) == fast.ntt2d(m);
      ok &= ctx.ntt().intt2d(m) == fast.intt2d(m);
    }
    add("radix-2 and direct transforms agree", ok);
  }
  {
    bool ok = true;
    for (int it = 0; it < 2 && ok; ++it) {
      MstFixture fx(rng, ctx, k);
      MstRecovery mst(ctx, fx.anchor_t, fx.v_anchor);
      Matrix m = compute_M(ctx, mst.recover(ctx, fx.rec_t, fx.v_rec));
      Matrix want =
          brute_corr_full(reconstruct(fx.rec_idx, gp.p), reconstruct(fx.qry_idx, gp.p), gp.p);
      const CorrelationMap& cm = ctx.corr_map();
      for (std::uint32_t di = 0; di < gp.h && ok; ++di)
        for (std::uint32_t dj = 0; dj < gp.w && ok; ++dj)
          ok &= m(cm.row(static_cast<int>(di), gp.h), cm.col(static_cast<int>(dj), gp.w)) ==
                want(di, dj);
    }
    add("low-rank recovery reproduces reconstruction correlations", ok);
  }
  {
    MstFixture fx(rng, ctx, k);
    BioImage x = zero_pad(random_binary(rng, gp.h, gp.w), (gp.h > 4) ? 1 : 0, (gp.w > 4) ? 1 : 0);
    TemplateParam tp = TemplateParam::sample(rng, gp);
    TransformedTemplate tt = make_transformed_template(ctx, x, tp);
    TransformedQuery tq = make_transformed_query(ctx, BioImage{random_binary(rng, gp.h, gp.w), 0, 0, false}, tp);
    MstRecovery mst(ctx, fx.anchor_t, fx.v_anchor);
    InttCounter::reset();
    min_hamming_score(ctx, tt, tq, win);
    bool exact_ok = InttCounter::read() == 2ull * (gp.h + gp.w);
    InttCounter::reset();
    compute_M(ctx, mst.recover(ctx, fx.rec_t, fx.v_rec));
    bool approx_ok = InttCounter::read() == 2ull * k * k;
    add("inverse-transform counts per record", exact_ok && approx_ok,
        "exact 2(h+w), approximate 2k^2");
  }
  {
    bool ok = true;
    for (int it = 0; it < 3 && ok; ++it) {
      Matrix m(gp.h, gp.w);
      for (Elem& e : m.data()) e = uniform_u64(rng, 0, gp.p - 1);
      ok &= ctx.ntt().intt2d(ctx.ntt().ntt2d(m)) == m;
    }
    add("2d transform round-trips", ok);
  }
  return out;
}

std::vector<UniformityRow> filter_output_uniformity(const CirfContext& ctx, std::uint64_t seed,
                                                    std::uint64_t draws_per_class) {
  const GFParams& gp = ctx.params();
  Rng rng(derive_seed(seed, 0x0b5e));
  std::vector<UniformityRow> rows;

  Matrix fx;
  random_spectral_frame(rng, ctx, &fx);
  std::vector<Elem> vals;
  vals.reserve(draws_per_class);
  while (vals.size() < draws_per_class) {
    Matrix t = hadamard(fx, sample_filter(rng, gp), gp.p);
    for (Elem e : t.data()) {
      if (vals.size() == draws_per_class) break;
      vals.push_back(e);
    }
  }
  rows.push_back(bin_and_test("protected frame", vals, gp.p));

  auto column_class = [&](const std::string& label, bool alpha, bool anchor_keys) {
    Vec g;
    random_spectral_column(rng, ctx, alpha, &g);
    std::vector<Elem> cv;
    cv.reserve(draws_per_class);
    while (cv.size() < draws_per_class) {
      Vec r;
      if (anchor_keys) {
        AnchorParam ap = AnchorParam::sample(rng, gp);
        r = alpha ? std::move(ap.r_alpha) : std::move(ap.r_beta);
      } else {
        IndexParam ip = IndexParam::sample(rng, gp, 1);
        r = alpha ? ip.r_alpha.col(0) : ip.r_beta.col(0);
      }
      Vec t = hadamard(g, r, gp.p);
      for (Elem e : t) {
        if (cv.size() == draws_per_class) break;
        cv.push_back(e);
      }
    }
    rows.push_back(bin_and_test(label, cv, gp.p));
  };
  column_class("protected index column (height)", true, false);
  column_class("protected index column (width)", false, false);
  column_class("protected anchor column (height)", true, true);
  column_class("protected anchor column (width)", false, true);
  return rows;
}

double unlinkability_correlation(const CirfContext& ctx, std::uint64_t seed, std::uint32_t pairs) {
  const GFParams& gp = ctx.params();
  Rng rng(derive_seed(seed, 0x111c));
  std::vector<double> a, b;
  a.reserve(static_cast<std::size_t>(pairs) * gp.h * gp.w);
  b.reserve(a.capacity());
  for (std::uint32_t i = 0; i < pairs; ++i) {
    Matrix fx;
    random_spectral_frame(rng, ctx, &fx);
    Matrix t1 = hadamard(fx, sample_filter(rng, gp), gp.p);
    Matrix t2 = hadamard(fx, sample_filter(rng, gp), gp.p);
    for (Elem e : t1.data()) a.push_back(static_cast<double>(e));
    for (Elem e : t2.data()) b.push_back(static_cast<double>(e));
  }
  return std::fabs(pearson(a, b));
}

double unlinkability_threshold(std::uint64_t n) {
  return normal_quantile(1.0 - 0.001 / 2) / std::sqrt(static_cast<double>(n));
}

bool filter_reconstruction_roundtrip(const CirfContext& ctx, std::uint64_t seed,
                                     std::uint32_t trials) {
  const GFParams& gp = ctx.params();
  Rng rng(derive_seed(seed, 0x4ec0));
  Matrix fx;
  random_spectral_frame(rng, ctx, &fx);
  Vec ga, gb;
  random_spectral_column(rng, ctx, true, &ga);
  random_spectral_column(rng, ctx, false, &gb);
  Matrix fx_inv = hadamard_inv(fx, gp.p);
  Vec ga_inv = hadamard_inv(ga, gp.p), gb_inv = hadamard_inv(gb, gp.p);
  for (std::uint32_t it = 0; it < trials; ++it) {
    Matrix r = sample_filter(rng, gp);
    if (hadamard(hadamard(fx, r, gp.p), fx_inv, gp.p) != r) return false;
    IndexParam ip = IndexParam::sample(rng, gp, 1);
    if (hadamard(hadamard(ga, ip.r_alpha.col(0), gp.p), ga_inv, gp.p) != ip.r_alpha.col(0))
      return false;
    if (hadamard(hadamard(gb, ip.r_beta.col(0), gp.p), gb_inv, gp.p) != ip.r_beta.col(0))
      return false;
  }
  return true;
}

ScoreTiming measure_score_timing(const CirfContext& ctx, std::uint32_t k, ShiftWindow win,
                                 std::uint64_t pairs, std::uint64_t seed) {
  const GFParams& gp = ctx.params();
  Rng rng(derive_seed(seed, 0x7153));
  validate_window(win, gp);

  // One enrolled record and one prepared query; the loops below repeat only
  // the per-record work of each scoring path.
  MstFixture fx(rng, ctx, k);
  MstRecovery mst(ctx, fx.anchor_t, fx.v_anchor);
  BioImage x = zero_pad(random_binary(rng, gp.h, gp.w),
                        static_cast<std::uint32_t>(win.di_max),
                        static_cast<std::uint32_t>(win.dj_max));
  Matrix y = random_binary(rng, gp.h, gp.w);
  TemplateParam tp = TemplateParam::sample(rng, gp);
  TransformedTemplate tt = make_transformed_template(ctx, x, tp);
  Matrix fy = ctx.ntt().ntt2d(flip(y));
  Matrix fy_bar = ctx.ntt().ntt2d(flip(complement(BioImage{y, 0, 0, false}).px));
  QueryIndexNtt q = prepare_query_index(ctx, fx.qry_idx);

  using clock = std::chrono::steady_clock;
  volatile std::uint64_t sink = 0;

  auto t0 = clock::now();
  for (std::uint64_t it = 0; it < pairs; ++it) {
    TransformedQuery tq{hadamard(fy, hadamard_inv(tp.r2, gp.p), gp.p),
                        hadamard(fy_bar, hadamard_inv(tp.r1, gp.p), gp.p)};
    sink = sink + min_hamming_score(ctx, tt, tq, win);
  }
  auto t1 = clock::now();
  for (std::uint64_t it = 0; it < pairs; ++it) {
    TransformedQueryIndex v = apply_query_filters(ctx, q, fx.rec_ip, fx.ap, false);
    Matrix m = compute_M(ctx, mst.recover(ctx, fx.rec_t, v));
    sink = sink + approx_score(ctx, m, win);
  }
  auto t2 = clock::now();
  (void)sink;

  ScoreTiming st;
  st.pairs = pairs;
  st.exact_us = std::chrono::duration<double, std::micro>(t1 - t0).count() / pairs;
  st.approx_us = std::chrono::duration<double, std::micro>(t2 - t1).count() / pairs;
  st.speedup = st.approx_us > 0 ? st.exact_us / st.approx_us : 0;
  return st;
}

}  // namespace cirf
