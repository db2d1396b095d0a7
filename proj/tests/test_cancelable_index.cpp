#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cirf/cancelable_index.hpp"
#include "cirf/lowrank.hpp"

using namespace cirf;

namespace {

Matrix random_binary(Rng& rng, std::size_t h, std::size_t w, double density = 0.4) {
  Matrix m(h, w);
  for (Elem& e : m.data()) e = bernoulli(rng, density) ? 1 : 0;
  return m;
}

// Random rank-k factor pair whose columns all pass the zero-free check, as
// enrollment and query factorizations do after dithering.
FactorIndex random_checked_index(Rng& rng, const CirfContext& ctx, std::uint32_t k) {
  const GFParams& gp = ctx.params();
  while (true) {
    FactorIndex idx;
    idx.k = k;
    idx.x_alpha = random_binary(rng, gp.h, k);
    idx.x_beta = random_binary(rng, gp.w, k);
    if (check_anchor(idx, ctx.ntt())) return idx;
  }
}

struct Fixture {
  CirfContext ctx{reference_params()};
  Rng rng{401};

  // One anchor enrollee plus the shared anchor filter.
  AnchorParam ap = AnchorParam::sample(rng, ctx.params());
  FactorIndex anchor_idx;
  IndexParam anchor_ip;
  TransformedIndex anchor_t;

  explicit Fixture(std::uint32_t k) {
    anchor_idx = random_checked_index(rng, ctx, k);
    anchor_ip = IndexParam::sample(rng, ctx.params(), k);
    anchor_t = transform_index_enroll(ctx, anchor_idx, anchor_ip, ap, true);
  }
};

}  // namespace

TEST_CASE("recovered products reproduce the correlation of the reconstructions") {
  for (std::uint32_t k : {1u, 2u}) {
    Fixture fx(k);
    const GFParams& gp = fx.ctx.params();
    for (int it = 0; it < 8; ++it) {
      FactorIndex rec_idx = random_checked_index(fx.rng, fx.ctx, k);
      IndexParam rec_ip = IndexParam::sample(fx.rng, gp, k);
      TransformedIndex rec_t = transform_index_enroll(fx.ctx, rec_idx, rec_ip, fx.ap, false);
      CHECK_FALSE(rec_t.anchor_t.has_value());

      FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, k);
      QueryIndexNtt q = prepare_query_index(fx.ctx, qry_idx);
      TransformedQueryIndex v_anchor = apply_query_filters(fx.ctx, q, fx.anchor_ip, fx.ap, true);
      TransformedQueryIndex v_rec = apply_query_filters(fx.ctx, q, rec_ip, fx.ap, false);

      MstRecovery mst(fx.ctx, fx.anchor_t, v_anchor);
      Matrix m = compute_M(fx.ctx, mst.recover(fx.ctx, rec_t, v_rec));

      Matrix want = brute_corr_full(reconstruct(rec_idx, gp.p), reconstruct(qry_idx, gp.p), gp.p);
      const CorrelationMap& cm = fx.ctx.corr_map();
      for (std::uint32_t di = 0; di < gp.h; ++di)
        for (std::uint32_t dj = 0; dj < gp.w; ++dj)
          CHECK(m(cm.row(static_cast<int>(di), gp.h), cm.col(static_cast<int>(dj), gp.w)) ==
                want(di, dj));
    }
  }
}

TEST_CASE("the anchor record itself is recovered consistently") {
  Fixture fx(2);
  const GFParams& gp = fx.ctx.params();
  FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, 2);
  TransformedQueryIndex v = transform_index_query(fx.ctx, qry_idx, fx.anchor_ip, fx.ap, true);
  MstRecovery mst(fx.ctx, fx.anchor_t, v);
  Matrix m = compute_M(fx.ctx, mst.recover(fx.ctx, fx.anchor_t, v));
  Matrix want = brute_corr_full(reconstruct(fx.anchor_idx, gp.p), reconstruct(qry_idx, gp.p), gp.p);
  const CorrelationMap& cm = fx.ctx.corr_map();
  for (std::uint32_t di = 0; di < gp.h; ++di)
    for (std::uint32_t dj = 0; dj < gp.w; ++dj)
      CHECK(m(cm.row(static_cast<int>(di), gp.h), cm.col(static_cast<int>(dj), gp.w)) ==
            want(di, dj));
}

TEST_CASE("recovery and scoring use exactly 2k^2 1d inverse transforms") {
  for (std::uint32_t k : {1u, 2u}) {
    Fixture fx(k);
    FactorIndex rec_idx = random_checked_index(fx.rng, fx.ctx, k);
    IndexParam rec_ip = IndexParam::sample(fx.rng, fx.ctx.params(), k);
    TransformedIndex rec_t = transform_index_enroll(fx.ctx, rec_idx, rec_ip, fx.ap, false);
    FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, k);
    QueryIndexNtt q = prepare_query_index(fx.ctx, qry_idx);
    TransformedQueryIndex v_anchor = apply_query_filters(fx.ctx, q, fx.anchor_ip, fx.ap, true);
    TransformedQueryIndex v_rec = apply_query_filters(fx.ctx, q, rec_ip, fx.ap, false);
    MstRecovery mst(fx.ctx, fx.anchor_t, v_anchor);
    InttCounter::reset();
    Matrix m = compute_M(fx.ctx, mst.recover(fx.ctx, rec_t, v_rec));
    CHECK(InttCounter::read() == 2ull * k * k);
    approx_score(fx.ctx, m, {2, 4});
    CHECK(InttCounter::read() == 2ull * k * k);  // scoring reads the surface only
  }
}

TEST_CASE("approximate score is the windowed maximum of the exact correlation") {
  Fixture fx(2);
  const GFParams& gp = fx.ctx.params();
  FactorIndex rec_idx = random_checked_index(fx.rng, fx.ctx, 2);
  IndexParam rec_ip = IndexParam::sample(fx.rng, gp, 2);
  TransformedIndex rec_t = transform_index_enroll(fx.ctx, rec_idx, rec_ip, fx.ap, false);
  FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, 2);
  QueryIndexNtt q = prepare_query_index(fx.ctx, qry_idx);
  TransformedQueryIndex v_anchor = apply_query_filters(fx.ctx, q, fx.anchor_ip, fx.ap, true);
  TransformedQueryIndex v_rec = apply_query_filters(fx.ctx, q, rec_ip, fx.ap, false);
  MstRecovery mst(fx.ctx, fx.anchor_t, v_anchor);
  Matrix m = compute_M(fx.ctx, mst.recover(fx.ctx, rec_t, v_rec));
  ShiftWindow win{3, 5};
  CorrTable want = brute_corr(reconstruct(rec_idx, gp.p), reconstruct(qry_idx, gp.p), win, gp.p);
  Elem best = 0;
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj) best = std::max(best, want.at(di, dj));
  CHECK(approx_score(fx.ctx, m, win) == best);
}

TEST_CASE("enrollment filter cancellation requires matching filters") {
  Fixture fx(1);
  const GFParams& gp = fx.ctx.params();
  FactorIndex rec_idx = random_checked_index(fx.rng, fx.ctx, 1);
  IndexParam ip_a = IndexParam::sample(fx.rng, gp, 1);
  IndexParam ip_b = IndexParam::sample(fx.rng, gp, 1);
  TransformedIndex rec_t = transform_index_enroll(fx.ctx, rec_idx, ip_a, fx.ap, false);
  FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, 1);
  TransformedQueryIndex v_wrong = transform_index_query(fx.ctx, qry_idx, ip_b, fx.ap, false);
  TransformedQueryIndex v_anchor = transform_index_query(fx.ctx, qry_idx, fx.anchor_ip, fx.ap, true);
  MstRecovery mst(fx.ctx, fx.anchor_t, v_anchor);
  Matrix m = compute_M(fx.ctx, mst.recover(fx.ctx, rec_t, v_wrong));
  Matrix want = brute_corr_full(reconstruct(rec_idx, gp.p), reconstruct(qry_idx, gp.p), gp.p);
  const CorrelationMap& cm = fx.ctx.corr_map();
  int agreements = 0;
  for (std::uint32_t di = 0; di < gp.h; ++di)
    for (std::uint32_t dj = 0; dj < gp.w; ++dj)
      agreements += m(cm.row(static_cast<int>(di), gp.h), cm.col(static_cast<int>(dj), gp.w)) ==
                    want(di, dj);
  CHECK(agreements < static_cast<int>(gp.h * gp.w) / 4);  // mismatched keys decorrelate
}

TEST_CASE("shape and rank validation") {
  Fixture fx(2);
  const GFParams& gp = fx.ctx.params();
  FactorIndex idx1 = random_checked_index(fx.rng, fx.ctx, 1);
  CHECK_THROWS_AS(transform_index_enroll(fx.ctx, idx1, fx.anchor_ip, fx.ap, false), Error);
  FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, 2);
  TransformedQueryIndex v = transform_index_query(fx.ctx, qry_idx, fx.anchor_ip, fx.ap, true);
  TransformedIndex plain = transform_index_enroll(fx.ctx, fx.anchor_idx, fx.anchor_ip, fx.ap, false);
  CHECK_THROWS_AS(MstRecovery(fx.ctx, plain, v), Error);  // no anchor vectors stored
  MstRecovery mst(fx.ctx, fx.anchor_t, v);
  FactorIndex rec1 = random_checked_index(fx.rng, fx.ctx, 1);
  IndexParam ip1 = IndexParam::sample(fx.rng, gp, 1);
  TransformedIndex t1 = transform_index_enroll(fx.ctx, rec1, ip1, fx.ap, false);
  TransformedQueryIndex v1 = transform_index_query(fx.ctx, random_checked_index(fx.rng, fx.ctx, 1),
                                                   ip1, fx.ap, false);
  CHECK_THROWS_AS(mst.recover(fx.ctx, t1, v1), Error);  // rank mismatch
}

TEST_CASE("zero coefficients in anchor edges are rejected at construction") {
  Fixture fx(2);
  TransformedIndex broken = fx.anchor_t;
  broken.anchor_t->first[3] = 0;
  FactorIndex qry_idx = random_checked_index(fx.rng, fx.ctx, 2);
  TransformedQueryIndex v = transform_index_query(fx.ctx, qry_idx, fx.anchor_ip, fx.ap, true);
  CHECK_THROWS_AS(MstRecovery(fx.ctx, broken, v), Error);
}

TEST_CASE("scenario names and leakage audit") {
  CHECK(scenario_name(Scenario::individual) == std::string("individual"));
  CHECK(scenario_name(Scenario::common) == std::string("common"));
  for (std::uint64_t n : {1ull, 10ull, 1000ull}) {
    LeakageAudit ind = equation_audit(Scenario::individual, n, 32, 64, 2);
    CHECK(ind.feature_unknowns == (n + 1) * 2048);
    CHECK(ind.feature_equations == n * 2048);
    CHECK(ind.index_unknowns == (2 * n + 2) * 96);
    CHECK(ind.index_equations == (2 * n + 1) * 96);
    CHECK(ind.underdetermined());
    LeakageAudit com = equation_audit(Scenario::common, n, 32, 64, 2);
    CHECK(com.feature_unknowns == (n + 2) * 2048);
    CHECK(com.feature_equations == (n + 1) * 2048);
    CHECK(com.index_unknowns == (2 * n + 5) * 96);
    CHECK(com.index_equations == (2 * n + 4) * 96);
    CHECK(com.underdetermined());
  }
}
