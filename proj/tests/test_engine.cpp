// End-to-end identification engine: enrollment, ranking, thresholded walk,
// key scenarios, persistence, and the evaluation metrics.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "cirf/bytes.hpp"
#include "cirf/engine.hpp"
#include "cirf/synth.hpp"
#include "doctest.h"

using namespace cirf;

namespace {

CorpusSpec engine_corpus_spec(std::uint32_t subjects, std::uint64_t seed) {
  CorpusSpec sp;
  sp.subjects = subjects;
  sp.fingers = 2;
  sp.samples = 2;
  sp.seed = seed;
  return sp;
}

SystemConfig engine_config(std::uint64_t seed, Scenario sc = Scenario::individual) {
  SystemConfig cfg;
  cfg.gp = reference_params();
  cfg.k = 2;
  cfg.scenario = sc;
  cfg.fingers = 2;
  cfg.exact_window = ShiftWindow{2, 4};
  cfg.approx_window = ShiftWindow{2, 4};
  cfg.pad_i = 6;
  cfg.pad_j = 12;
  cfg.seed = seed;
  return cfg;
}

std::vector<Matrix> query_images(const Dataset& ds, std::uint32_t subject) {
  std::vector<Matrix> q;
  for (std::uint32_t f = 0; f < ds.spec.fingers; ++f) q.push_back(ds.image(subject, f, 1));
  return q;
}

// Exact fused scores of one query against everyone, genuine first.
struct ScoreSplit {
  std::uint64_t genuine = 0;
  std::uint64_t best_impostor = UINT64_MAX;
};

ScoreSplit split_scores(const IdentifySystem& sys, const PreparedQuery& pq,
                        std::uint32_t subject) {
  ScoreSplit s;
  for (std::size_t r = 0; r < sys.db().records.size(); ++r) {
    std::uint64_t v = sys.exact_fused(pq, r);
    if (sys.db().records[r].enrollee_id == subject)
      s.genuine = v;
    else
      s.best_impostor = std::min(s.best_impostor, v);
  }
  return s;
}

// Structural audit: server-side records are composed of masked spectra only.
// Neither the plaintext image type nor the raw factor type appears anywhere
// in an enrollment record.
static_assert(std::is_same_v<decltype(EnrolledFinger::tt), TransformedTemplate>);
static_assert(std::is_same_v<decltype(EnrolledFinger::ti), TransformedIndex>);
static_assert(std::is_same_v<decltype(TransformedTemplate::t), Matrix>);
static_assert(std::is_same_v<decltype(TransformedTemplate::t_bar), Matrix>);
static_assert(std::is_same_v<decltype(TransformedIndex::t_alpha), std::vector<Vec>>);
static_assert(std::is_same_v<decltype(TransformedIndex::t_beta), std::vector<Vec>>);
static_assert(
    std::is_same_v<decltype(TransformedIndex::anchor_t), std::optional<std::pair<Vec, Vec>>>);
static_assert(std::is_same_v<decltype(EnrollRecord::fingers), std::vector<EnrolledFinger>>);
static_assert(!std::is_same_v<decltype(EnrollRecord::fingers), std::vector<BioImage>>);

}  // namespace

TEST_CASE("enrollment anchors the first repairable record and validates input") {
  Dataset ds = generate_corpus(engine_corpus_spec(4, 501));
  IdentifySystem sys(engine_config(91));
  sys.enroll_dataset(ds);
  const Database& db = sys.db();
  REQUIRE(db.records.size() == 4);
  CHECK(db.anchor_pos == 0);
  CHECK(db.records[0].is_anchor);
  for (std::size_t r = 1; r < db.records.size(); ++r) CHECK(!db.records[r].is_anchor);
  CHECK(sys.keystore().per_record.size() == 4);

  // Duplicate id, wrong finger count, wrong shape, missing pad marking.
  CHECK_THROWS_AS(sys.enroll_one(0, {as_enrolled(ds, 1, 0), as_enrolled(ds, 1, 1)}), Error);
  CHECK_THROWS_AS(sys.enroll_one(9, {as_enrolled(ds, 1, 0)}), Error);
  CHECK_THROWS_AS(sys.enroll_one(9, {as_query(ds, 1, 0, 0), as_query(ds, 1, 1, 0)}), Error);
  BioImage wrong = as_enrolled(ds, 1, 0);
  wrong.pad_i = 2;
  CHECK_THROWS_AS(sys.enroll_one(9, {wrong, as_enrolled(ds, 1, 1)}), Error);

  // A dataset generated for other margins is refused outright.
  CorpusSpec other = engine_corpus_spec(1, 511);
  other.pad_i = 2;
  CHECK_THROWS_AS(sys.enroll_dataset(generate_corpus(other)), Error);
}

TEST_CASE("identification accepts the enrolled subject and walks by approximate rank") {
  Dataset ds = generate_corpus(engine_corpus_spec(8, 502));
  IdentifySystem sys(engine_config(92));
  sys.enroll_dataset(ds);
  const std::size_t n = sys.db().records.size();

  for (std::uint32_t s = 0; s < 8; ++s) {
    PreparedQuery pq = sys.prepare(query_images(ds, s));
    ScoreSplit sc = split_scores(sys, pq, s);
    REQUIRE(sc.genuine < sc.best_impostor);  // the corpus separates cleanly
    double thr = (static_cast<double>(sc.genuine) + static_cast<double>(sc.best_impostor)) / 2;

    IdentResult res = sys.identify(pq, thr);
    REQUIRE(res.accepted_id.has_value());
    CHECK(*res.accepted_id == s);
    CHECK(res.accepted_score == sc.genuine);
    CHECK(res.order.size() == n);

    // The walk stops exactly at the genuine record's rank position: everyone
    // ranked before it scores at or above the midpoint threshold.
    std::size_t rank_pos = 0;
    while (res.order[rank_pos] != s) ++rank_pos;
    CHECK(res.exact_computations == rank_pos + 1);

    // The reported order is the approximate ranking.
    std::vector<ApproxEntry> ranked = sys.rank(pq);
    REQUIRE(ranked.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ranked[i].pos == res.order[i]);
    for (std::size_t i = 1; i < n; ++i) CHECK(ranked[i - 1].score >= ranked[i].score);

    // An impossible threshold rejects after scoring everyone exactly.
    IdentResult rej = sys.identify(pq, -1.0);
    CHECK(!rej.accepted_id.has_value());
    CHECK(rej.exact_computations == n);
  }
}

TEST_CASE("approximate ranking concentrates the genuine record near the top") {
  Dataset ds = generate_corpus(engine_corpus_spec(8, 503));
  IdentifySystem sys(engine_config(93));
  sys.enroll_dataset(ds);
  std::vector<IdentResult> results;
  std::vector<std::uint32_t> expected;
  for (std::uint32_t s = 0; s < 8; ++s) {
    PreparedQuery pq = sys.prepare(query_images(ds, s));
    ScoreSplit sc = split_scores(sys, pq, s);
    double thr = (static_cast<double>(sc.genuine) + static_cast<double>(sc.best_impostor)) / 2;
    results.push_back(sys.identify(pq, thr));
    expected.push_back(s);
  }
  CHECK(correct_accept_rate(results, expected) == 1.0);
  // The pre-filter must beat a random walk (expected penetration (n+1)/2).
  CHECK(mean_penetration(results, expected) < 4.5);

  // Records were enrolled in subject order, so the genuine record index of
  // query s is s itself.
  CHECK(hit_rate(results, expected, 0) == 0.0);
  CHECK(hit_rate(results, expected, 8) == 1.0);
  double prev = 0.0;
  for (std::uint32_t np = 1; np <= 8; ++np) {
    double hr = hit_rate(results, expected, np);
    CHECK(hr >= prev);
    prev = hr;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("prepared and one-shot identification agree") {
  Dataset ds = generate_corpus(engine_corpus_spec(4, 504));
  IdentifySystem sys(engine_config(94));
  sys.enroll_dataset(ds);
  std::vector<Matrix> q = query_images(ds, 2);
  IdentResult a = sys.identify(sys.prepare(q, 5), 1e9);
  IdentResult b = sys.identify(q, 1e9, 5);
  REQUIRE(a.accepted_id.has_value());
  REQUIRE(b.accepted_id.has_value());
  CHECK(*a.accepted_id == *b.accepted_id);
  CHECK(a.accepted_score == b.accepted_score);
  CHECK(a.exact_computations == b.exact_computations);
  CHECK(a.order == b.order);
}

TEST_CASE("common-scenario keys are shared and identification still works") {
  Dataset ds = generate_corpus(engine_corpus_spec(5, 505));
  IdentifySystem sys(engine_config(95, Scenario::common));
  sys.enroll_dataset(ds);
  CHECK(sys.keystore().per_record.size() == 1);  // one shared key set
  for (std::uint32_t s = 0; s < 5; ++s) {
    PreparedQuery pq = sys.prepare(query_images(ds, s));
    ScoreSplit sc = split_scores(sys, pq, s);
    REQUIRE(sc.genuine < sc.best_impostor);
    double thr = (static_cast<double>(sc.genuine) + static_cast<double>(sc.best_impostor)) / 2;
    IdentResult res = sys.identify(pq, thr);
    REQUIRE(res.accepted_id.has_value());
    CHECK(*res.accepted_id == s);
  }
}

TEST_CASE("inverse-transform counter matches the per-record accounting") {
  Dataset ds = generate_corpus(engine_corpus_spec(6, 506));
  SystemConfig cfg = engine_config(96);
  IdentifySystem sys(cfg);
  sys.enroll_dataset(ds);
  const std::uint64_t n = sys.db().records.size();
  const std::uint64_t hpw = cfg.gp.h + cfg.gp.w;

  PreparedQuery pq = sys.prepare(query_images(ds, 3));
  ScoreSplit sc = split_scores(sys, pq, 3);
  double thr = (static_cast<double>(sc.genuine) + static_cast<double>(sc.best_impostor)) / 2;

  InttCounter::reset();
  IdentResult res = sys.identify(pq, thr);
  std::uint64_t used = InttCounter::read();
  REQUIRE(res.accepted_id.has_value());
  // Per finger: 2k^2 inverse 1D transforms per approximate score and 2(h+w)
  // per exact score.
  CHECK(used == cfg.fingers * (2ull * cfg.k * cfg.k * n + 2ull * hpw * res.exact_computations));
}

TEST_CASE("an unrepairable first enrollee defers the anchor to the next one") {
  // In this 8x4 field the column (0,0,0,1,1,0,0,0) has a spectral zero and
  // both interior dithers (pad 3 leaves rows 3 and 4) keep one, so a record
  // built from it can never anchor the recovery.
  GFParams gp = validate_params(17, 2, 4, 8, 4, 1);
  SystemConfig cfg;
  cfg.gp = gp;
  cfg.k = 1;
  cfg.fingers = 1;
  cfg.exact_window = ShiftWindow{1, 1};
  cfg.approx_window = ShiftWindow{1, 1};
  cfg.pad_i = 3;
  cfg.pad_j = 1;
  cfg.seed = 7;
  IdentifySystem sys(cfg);

  Matrix bad(8, 4);
  for (std::size_t i : {3, 4})
    for (std::size_t j : {1, 2}) bad(i, j) = 1;
  Matrix good(8, 4);
  good(3, 1) = 1;

  sys.enroll_one(0, {zero_pad(bad, 3, 1)});
  CHECK(sys.db().anchor_pos == kNoAnchor);
  CHECK(!sys.db().records[0].is_anchor);

  // No anchor yet: ranking is unavailable, exact scoring is not.
  PreparedQuery pq0 = sys.prepare({good});
  CHECK_THROWS_AS(sys.rank(pq0), Error);
  CHECK(sys.exact_fused(pq0, 0) > 0);

  sys.enroll_one(1, {zero_pad(good, 3, 1)});
  CHECK(sys.db().anchor_pos == 1);
  CHECK(sys.db().records[1].is_anchor);

  // Both records tie at approximate score 1, so the walk keeps enrollment
  // order, rejects record 0 exactly (distance 3), and accepts record 1 at 0.
  IdentResult res = sys.identify(sys.prepare({good}), 1.5);
  REQUIRE(res.accepted_id.has_value());
  CHECK(*res.accepted_id == 1);
  CHECK(res.accepted_score == 0);
  CHECK(res.exact_computations == 2);
}

TEST_CASE("identification without any enrollment reports the missing anchor") {
  IdentifySystem sys(engine_config(97));
  Dataset ds = generate_corpus(engine_corpus_spec(1, 507));
  PreparedQuery pq = sys.prepare(query_images(ds, 0));
  auto code = [&]() -> std::optional<Errc> {
    try {
      sys.rank(pq);
      return std::nullopt;
    } catch (const Error& e) {
      return e.code();
    }
  };
  CHECK(code() == Errc::no_anchor);
}

TEST_CASE("database and key store round-trip through their containers") {
  Dataset ds = generate_corpus(engine_corpus_spec(4, 508));
  IdentifySystem sys(engine_config(98));
  sys.enroll_dataset(ds);

  std::string db_path = "engine_tmp_db.bin", ks_path = "engine_tmp_keys.bin";
  save_database(sys.db(), db_path);
  save_keys(sys.keystore(), ks_path);
  IdentifySystem back(load_database(db_path), load_keys(ks_path), sys.exact_window(),
                      sys.approx_window());

  std::vector<Matrix> q = query_images(ds, 1);
  PreparedQuery pq_a = sys.prepare(q);
  PreparedQuery pq_b = back.prepare(q);
  ScoreSplit sc = split_scores(sys, pq_a, 1);
  double thr = (static_cast<double>(sc.genuine) + static_cast<double>(sc.best_impostor)) / 2;
  IdentResult a = sys.identify(pq_a, thr);
  IdentResult b = back.identify(pq_b, thr);
  REQUIRE(a.accepted_id.has_value());
  REQUIRE(b.accepted_id.has_value());
  CHECK(*a.accepted_id == *b.accepted_id);
  CHECK(a.accepted_score == b.accepted_score);
  CHECK(a.order == b.order);
  for (std::size_t r = 0; r < sys.db().records.size(); ++r)
    CHECK(sys.exact_fused(pq_a, r) == back.exact_fused(pq_b, r));

  std::remove(db_path.c_str());
  std::remove(ks_path.c_str());
}

TEST_CASE("containers localize a damaged record") {
  Dataset ds = generate_corpus(engine_corpus_spec(3, 509));
  IdentifySystem sys(engine_config(99));
  sys.enroll_dataset(ds);

  std::string db_path = "engine_tmp_dmg_db.bin", ks_path = "engine_tmp_dmg_keys.bin";
  save_database(sys.db(), db_path);
  save_keys(sys.keystore(), ks_path);

  auto corrupt_at_end = [](const std::string& path, std::size_t from_end) {
    std::string buf = read_file(path);
    buf[buf.size() - 1 - from_end] ^= 0x01;
    write_file(path, buf);
  };
  // The record container ends with the last record's checksum; the key store
  // ends with the anchor filter block, so step back over it to land inside
  // the last per-record key block.
  const GFParams& gp = sys.db().gp;
  std::size_t anchor_tail = sys.db().fingers * (gp.h + gp.w) * 2ull + 8;
  corrupt_at_end(db_path, 0);
  corrupt_at_end(ks_path, anchor_tail);

  auto check_located = [](auto&& loader, const std::string& path, const char* what) {
    try {
      loader(path);
      FAIL_CHECK(what << " load accepted a damaged file");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::corrupt_payload);
      CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    }
  };
  check_located([](const std::string& p) { (void)load_database(p); }, db_path, "database");
  check_located([](const std::string& p) { (void)load_keys(p); }, ks_path, "key store");

  std::remove(db_path.c_str());
  std::remove(ks_path.c_str());
}

TEST_CASE("mixing incompatible databases and key stores is rejected") {
  Dataset ds = generate_corpus(engine_corpus_spec(3, 510));
  IdentifySystem ind(engine_config(100, Scenario::individual));
  ind.enroll_dataset(ds);
  IdentifySystem com(engine_config(100, Scenario::common));
  com.enroll_dataset(ds);

  auto code = [](auto&& make) -> std::optional<Errc> {
    try {
      make();
      return std::nullopt;
    } catch (const Error& e) {
      return e.code();
    }
  };
  ShiftWindow we = ind.exact_window(), wa = ind.approx_window();
  CHECK(code([&] { IdentifySystem s(ind.db(), com.keystore(), we, wa); }) ==
        Errc::scenario_mismatch);

  KeyStore short_ks = ind.keystore();
  short_ks.per_record.pop_back();
  CHECK(code([&] { IdentifySystem s(ind.db(), short_ks, we, wa); }) == Errc::bad_argument);

  KeyStore wrong_field = ind.keystore();
  wrong_field.gp = validate_params(17, 2, 4, 8, 4, 1);
  CHECK(code([&] { IdentifySystem s(ind.db(), wrong_field, we, wa); }) == Errc::bad_argument);
}

TEST_CASE("equal error rate matches hand-computed crossings") {
  CHECK(equal_error_rate({1, 2}, {5, 6}) == doctest::Approx(0.0));
  CHECK(equal_error_rate({5}, {5}) == doctest::Approx(0.5));
  // far jumps from 0.5 to 1 while frr sits at 0.6: the linear crossing is at
  // 0.6 on the far axis.
  CHECK(equal_error_rate({1, 2, 3, 4, 5}, {2.5, 2.6}) == doctest::Approx(0.6));
  // Exact tie at a sampled threshold.
  CHECK(equal_error_rate({1, 3}, {2, 4}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(equal_error_rate({}, {1}), Error);
}

TEST_CASE("metric helpers validate their inputs") {
  CHECK_THROWS_AS(correct_accept_rate({}, {}), Error);
  CHECK_THROWS_AS(hit_rate({}, {}, 1), Error);
  IdentResult miss;  // no accepted id, empty order
  CHECK(correct_accept_rate({miss}, {0}) == 0.0);
  CHECK(hit_rate({miss}, {0}, 5) == 0.0);
  CHECK(std::isnan(mean_penetration({miss}, {0})));
  IdentResult hit;
  hit.accepted_id = 4;
  hit.exact_computations = 3;
  hit.order = {2, 0, 1};
  CHECK(correct_accept_rate({hit, miss}, {4, 1}) == 0.5);
  CHECK(mean_penetration({hit, miss}, {4, 1}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(correct_accept_rate({hit}, {4, 1}), Error);
  // Ranking membership is what counts, not acceptance.
  CHECK(hit_rate({hit}, {0}, 1) == 0.0);
  CHECK(hit_rate({hit}, {0}, 2) == 1.0);
  CHECK(hit_rate({hit}, {0}, 99) == 1.0);
}

TEST_CASE("payload and stored-size formulas give the frozen reference values") {
  // 32x64 frames, rank 2, 2-byte pixels.
  CHECK(payload_bytes(Scenario::common, 32000, 32, 64, 2, 2) == 4672);
  CHECK(payload_bytes(Scenario::common, 1, 32, 64, 2, 2) == 4672);  // size-independent
  CHECK(payload_bytes(Scenario::individual, 32000, 32, 64, 2, 2) == 143360192);
  CHECK(payload_bytes(Scenario::individual, 1, 32, 64, 2, 2) ==
        (2048ull + (2 + 1) * 96) * 2);
  CHECK(stored_index_pixels(1000, 32, 64, 2) == 96ull * 2001);
}
