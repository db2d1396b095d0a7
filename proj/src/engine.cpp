#include "cirf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cirf {

namespace {

// Seed-stream tags: enrollment keys, enrollment factors, query factors,
// anchor filters, shared common-scenario keys.
constexpr std::uint64_t kTagKeys = 1, kTagEnrollFac = 2, kTagQueryFac = 3, kTagAnchor = 4,
                        kTagCommon = 5;

FingerKeys sample_finger_keys(Rng& rng, const GFParams& gp, std::uint32_t k) {
  FingerKeys fk;
  fk.tp = TemplateParam::sample(rng, gp);
  fk.ip = IndexParam::sample(rng, gp, k);
  return fk;
}

void check_compatible(const Database& db, const KeyStore& ks) {
  const GFParams &a = db.gp, &b = ks.gp;
  if (a.p != b.p || a.alpha != b.alpha || a.beta != b.beta || a.h != b.h || a.w != b.w)
    fail(Errc::bad_argument, "key store was built for different transform parameters");
  if (db.k != ks.k || db.fingers != ks.fingers)
    fail(Errc::bad_argument, "key store rank or finger count does not match the database");
  if (db.scenario != ks.scenario)
    fail(Errc::scenario_mismatch, "database and key store disagree on the key scenario");
  bool covered = ks.scenario == Scenario::common
                     ? ks.per_record.size() == 1 || db.records.empty()
                     : ks.per_record.size() == db.records.size();
  if (!covered || ks.anchor.size() != db.fingers)
    fail(Errc::bad_argument, "key store does not cover the database records");
}

}  // namespace

IdentifySystem::IdentifySystem(const SystemConfig& cfg)
    : ctx_(cfg.gp, cfg.path), exact_win_(cfg.exact_window), approx_win_(cfg.approx_window) {
  if (cfg.k == 0 || cfg.k > std::min(cfg.gp.h, cfg.gp.w))
    fail(Errc::rank_too_large, "factor rank must be in [1, min(h, w)]");
  if (cfg.fingers == 0) fail(Errc::bad_argument, "at least one finger per enrollee");
  validate_window(exact_win_, cfg.gp);
  validate_window(approx_win_, cfg.gp);
  if (2ull * cfg.pad_i >= cfg.gp.h || 2ull * cfg.pad_j >= cfg.gp.w)
    fail(Errc::window_too_large, "pad margins leave no interior");
  db_.gp = cfg.gp;
  db_.k = cfg.k;
  db_.scenario = cfg.scenario;
  db_.fingers = cfg.fingers;
  db_.pad_i = cfg.pad_i;
  db_.pad_j = cfg.pad_j;
  ks_.gp = cfg.gp;
  ks_.k = cfg.k;
  ks_.scenario = cfg.scenario;
  ks_.fingers = cfg.fingers;
  ks_.seed = cfg.seed;
  for (std::uint32_t f = 0; f < cfg.fingers; ++f) {
    Rng rng(derive_seed(cfg.seed, kTagAnchor, f));
    ks_.anchor.push_back(AnchorParam::sample(rng, cfg.gp));
  }
  if (cfg.scenario == Scenario::common) {
    std::vector<FingerKeys> shared;
    for (std::uint32_t f = 0; f < cfg.fingers; ++f) {
      Rng rng(derive_seed(cfg.seed, kTagCommon, f));
      shared.push_back(sample_finger_keys(rng, cfg.gp, cfg.k));
    }
    ks_.per_record.push_back(std::move(shared));
  }
}

IdentifySystem::IdentifySystem(Database db, KeyStore ks, ShiftWindow exact_window,
                               ShiftWindow approx_window, TransformPath path)
    : ctx_(db.gp, path),
      db_(std::move(db)),
      ks_(std::move(ks)),
      exact_win_(exact_window),
      approx_win_(approx_window) {
  check_compatible(db_, ks_);
  validate_window(exact_win_, db_.gp);
  validate_window(approx_win_, db_.gp);
}

void IdentifySystem::enroll_one(std::uint32_t enrollee_id,
                                const std::vector<BioImage>& finger_images) {
  const GFParams& gp = db_.gp;
  if (finger_images.size() != db_.fingers)
    fail(Errc::bad_argument, "expected " + std::to_string(db_.fingers) + " finger images");
  for (const EnrollRecord& r : db_.records)
    if (r.enrollee_id == enrollee_id)
      fail(Errc::bad_argument, "enrollee " + std::to_string(enrollee_id) + " already present");
  for (const BioImage& img : finger_images) {
    if (img.px.rows() != gp.h || img.px.cols() != gp.w)
      fail(Errc::shape_mismatch, "enrollment image shape");
    if (!img.padded || img.pad_i != db_.pad_i || img.pad_j != db_.pad_j)
      fail(Errc::bad_argument, "enrollment images must carry the configured pad margins");
    validate_bio(img);
  }

  std::vector<FingerKeys>* keys;
  if (db_.scenario == Scenario::common) {
    if (ks_.per_record.empty()) {
      std::vector<FingerKeys> shared;
      for (std::uint32_t f = 0; f < db_.fingers; ++f) {
        Rng rng(derive_seed(ks_.seed, kTagCommon, f));
        shared.push_back(sample_finger_keys(rng, gp, db_.k));
      }
      ks_.per_record.push_back(std::move(shared));
    }
    keys = &ks_.per_record[0];
  } else {
    std::vector<FingerKeys> own;
    for (std::uint32_t f = 0; f < db_.fingers; ++f) {
      Rng rng(derive_seed(ks_.seed, kTagKeys, enrollee_id, f));
      own.push_back(sample_finger_keys(rng, gp, db_.k));
    }
    ks_.per_record.push_back(std::move(own));
    keys = &ks_.per_record.back();
  }

  std::vector<FactorIndex> factors;
  for (std::uint32_t f = 0; f < db_.fingers; ++f)
    factors.push_back(
        factorize(finger_images[f].px, db_.k, derive_seed(ks_.seed, kTagEnrollFac, enrollee_id, f)));

  // The first enrollee whose columns can all be dithered zero-free anchors
  // the recovery; a failed repair just means the next enrollee is tried.
  bool is_anchor = false;
  if (db_.anchor_pos == kNoAnchor) {
    std::vector<FactorIndex> dithered;
    bool ok = true;
    for (const FactorIndex& idx : factors) {
      try {
        dithered.push_back(ensure_anchor(idx, ctx_.ntt(), db_.pad_i, db_.pad_j));
      } catch (const Error& e) {
        if (e.code() != Errc::dither_exhausted) throw;
        ok = false;
        break;
      }
    }
    if (ok) {
      is_anchor = true;
      db_.anchor_pos = static_cast<std::uint32_t>(db_.records.size());
      factors = std::move(dithered);
    }
  }

  EnrollRecord rec;
  rec.enrollee_id = enrollee_id;
  rec.is_anchor = is_anchor;
  for (std::uint32_t f = 0; f < db_.fingers; ++f) {
    EnrolledFinger ef;
    ef.tt = make_transformed_template(ctx_, finger_images[f], (*keys)[f].tp);
    ef.ti = transform_index_enroll(ctx_, factors[f], (*keys)[f].ip, ks_.anchor[f], is_anchor);
    rec.fingers.push_back(std::move(ef));
  }
  db_.records.push_back(std::move(rec));
}

void IdentifySystem::enroll_dataset(const Dataset& ds) {
  if (ds.spec.fingers != db_.fingers || ds.spec.h != db_.gp.h || ds.spec.w != db_.gp.w ||
      ds.spec.pad_i != db_.pad_i || ds.spec.pad_j != db_.pad_j)
    fail(Errc::bad_argument, "dataset geometry does not match the system configuration");
  for (std::uint32_t s = 0; s < ds.spec.subjects; ++s) {
    std::vector<BioImage> imgs;
    for (std::uint32_t f = 0; f < db_.fingers; ++f) imgs.push_back(as_enrolled(ds, s, f));
    enroll_one(s, imgs);
  }
}

PreparedQuery IdentifySystem::prepare(const std::vector<Matrix>& finger_queries,
                                      std::uint64_t query_seed) const {
  const GFParams& gp = db_.gp;
  if (finger_queries.size() != db_.fingers)
    fail(Errc::bad_argument, "expected " + std::to_string(db_.fingers) + " query images");
  PreparedQuery pq;
  for (std::uint32_t f = 0; f < db_.fingers; ++f) {
    const Matrix& y = finger_queries[f];
    if (y.rows() != gp.h || y.cols() != gp.w) fail(Errc::shape_mismatch, "query image shape");
    BioImage frame{y, 0, 0, false};
    pq.fy.push_back(ctx_.ntt().ntt2d(flip(y)));
    pq.fy_bar.push_back(ctx_.ntt().ntt2d(flip(complement(frame).px)));
    FactorIndex idx = factorize(y, db_.k, derive_seed(ks_.seed, kTagQueryFac, query_seed, f));
    // Query columns appear inside inverted anchor-edge products, so they get
    // the same zero-free repair as the anchor; the frame is unpadded, hence
    // every position may be dithered.
    pq.q.push_back(prepare_query_index(ctx_, ensure_anchor(idx, ctx_.ntt(), 0, 0)));
  }
  return pq;
}

std::vector<TransformedQueryIndex> IdentifySystem::query_for_record(const PreparedQuery& pq,
                                                                    std::size_t record_pos) const {
  std::vector<TransformedQueryIndex> out;
  for (std::uint32_t f = 0; f < db_.fingers; ++f)
    out.push_back(apply_query_filters(ctx_, pq.q[f], ks_.keys(record_pos, f).ip, ks_.anchor[f],
                                      false));
  return out;
}

std::vector<ApproxEntry> IdentifySystem::rank(const PreparedQuery& pq) const {
  if (db_.anchor_pos == kNoAnchor)
    fail(Errc::no_anchor, "no enrollee could anchor the recovery; identification is unavailable");
  const EnrollRecord& anchor_rec = db_.records[db_.anchor_pos];
  std::vector<TransformedQueryIndex> v_anchor;
  std::vector<MstRecovery> mst;
  for (std::uint32_t f = 0; f < db_.fingers; ++f) {
    v_anchor.push_back(apply_query_filters(ctx_, pq.q[f], ks_.keys(db_.anchor_pos, f).ip,
                                           ks_.anchor[f], true));
    mst.emplace_back(ctx_, anchor_rec.fingers[f].ti, v_anchor[f]);
  }
  const bool shared_keys = db_.scenario == Scenario::common;
  std::vector<ApproxEntry> entries(db_.records.size());
  for (std::size_t r = 0; r < db_.records.size(); ++r) {
    std::vector<TransformedQueryIndex> own;
    if (!shared_keys && r != db_.anchor_pos) own = query_for_record(pq, r);
    std::uint64_t fused = 0;
    for (std::uint32_t f = 0; f < db_.fingers; ++f) {
      const TransformedQueryIndex& v =
          (shared_keys || r == db_.anchor_pos) ? v_anchor[f] : own[f];
      Matrix m = compute_M(ctx_, mst[f].recover(ctx_, db_.records[r].fingers[f].ti, v));
      fused += approx_score(ctx_, m, approx_win_);
    }
    entries[r] = {static_cast<std::uint32_t>(r), fused};
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ApproxEntry& a, const ApproxEntry& b) { return a.score > b.score; });
  return entries;
}

std::uint64_t IdentifySystem::exact_fused(const PreparedQuery& pq, std::size_t record_pos) const {
  const GFParams& gp = db_.gp;
  std::uint64_t fused = 0;
  for (std::uint32_t f = 0; f < db_.fingers; ++f) {
    const TemplateParam& tp = ks_.keys(record_pos, f).tp;
    TransformedQuery tq{hadamard(pq.fy[f], hadamard_inv(tp.r2, gp.p), gp.p),
                        hadamard(pq.fy_bar[f], hadamard_inv(tp.r1, gp.p), gp.p)};
    fused += min_hamming_score(ctx_, db_.records[record_pos].fingers[f].tt, tq, exact_win_);
  }
  return fused;
}

IdentResult IdentifySystem::identify(const PreparedQuery& pq, double threshold) const {
  std::vector<ApproxEntry> ranked = rank(pq);
  IdentResult res;
  res.order.reserve(ranked.size());
  for (const ApproxEntry& e : ranked) res.order.push_back(e.pos);
  for (const ApproxEntry& e : ranked) {
    std::uint64_t score = exact_fused(pq, e.pos);
    ++res.exact_computations;
    if (static_cast<double>(score) < threshold) {
      res.accepted_id = db_.records[e.pos].enrollee_id;
      res.accepted_score = score;
      return res;
    }
  }
  return res;
}

IdentResult IdentifySystem::identify(const std::vector<Matrix>& finger_queries, double threshold,
                                     std::uint64_t query_seed) const {
  return identify(prepare(finger_queries, query_seed), threshold);
}

double hit_rate(const std::vector<IdentResult>& results,
                const std::vector<std::uint32_t>& genuine_records, std::uint32_t n_prime) {
  if (results.empty()) fail(Errc::empty_scores, "no identification results");
  if (results.size() != genuine_records.size())
    fail(Errc::length_mismatch, "result and expectation counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::vector<std::uint32_t>& order = results[i].order;
    std::uint32_t limit = std::min<std::uint32_t>(n_prime, static_cast<std::uint32_t>(order.size()));
    for (std::uint32_t r = 0; r < limit; ++r)
      if (order[r] == genuine_records[i]) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / results.size();
}

double correct_accept_rate(const std::vector<IdentResult>& results,
                           const std::vector<std::uint32_t>& expected_ids) {
  if (results.empty()) fail(Errc::empty_scores, "no identification results");
  if (results.size() != expected_ids.size())
    fail(Errc::length_mismatch, "result and expectation counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < results.size(); ++i)
    hits += results[i].accepted_id && *results[i].accepted_id == expected_ids[i];
  return static_cast<double>(hits) / results.size();
}

double mean_penetration(const std::vector<IdentResult>& results,
                        const std::vector<std::uint32_t>& expected_ids) {
  if (results.size() != expected_ids.size())
    fail(Errc::length_mismatch, "result and expectation counts differ");
  std::uint64_t total = 0, n = 0;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].accepted_id && *results[i].accepted_id == expected_ids[i]) {
      total += results[i].exact_computations;
      ++n;
    }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(total) / n;
}

double equal_error_rate(std::vector<double> genuine, std::vector<double> impostor) {
  if (genuine.empty() || impostor.empty()) fail(Errc::empty_scores, "need both score sets");
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());
  std::vector<double> thresholds;
  thresholds.reserve(genuine.size() + impostor.size() + 2);
  thresholds.push_back(std::min(genuine.front(), impostor.front()) - 1);
  thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
  thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
  thresholds.push_back(std::max(genuine.back(), impostor.back()) + 1);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  auto far_at = [&](double t) {
    auto n = std::lower_bound(impostor.begin(), impostor.end(), t) - impostor.begin();
    return static_cast<double>(n) / impostor.size();
  };
  auto frr_at = [&](double t) {
    auto n = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    return 1.0 - static_cast<double>(n) / genuine.size();
  };

  double prev_far = 0.0, prev_frr = 1.0;
  for (double t : thresholds) {
    double far = far_at(t), frr = frr_at(t);
    if (far >= frr) {
      if (far == frr) return far;
      // Crossing lies between the previous threshold and this one.
      double g1 = prev_frr - prev_far, g2 = far - frr;
      double lambda = g1 / (g1 + g2);
      return prev_far + lambda * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
  }
  return 1.0;  // unreachable: the top sentinel always accepts everything
}

std::uint64_t payload_bytes(Scenario s, std::uint64_t n, std::uint32_t h, std::uint32_t w,
                            std::uint32_t k, std::uint32_t bytes_per_pixel) {
  const std::uint64_t hw = static_cast<std::uint64_t>(h) * w;
  const std::uint64_t hpw = static_cast<std::uint64_t>(h) + w;
  std::uint64_t pixels;
  if (s == Scenario::individual) {
    // One transformed query frame per enrollee key set, plus per-key factor
    // columns and the k-1 anchor-filtered columns.
    pixels = n * hw + (n * k + k - 1) * hpw;
  } else {
    // One shared key set: a single frame, k factor columns, and k-1 anchor
    // columns (2k-1 vectors in total).
    pixels = hw + (2ull * k - 1) * hpw;
  }
  return pixels * bytes_per_pixel;
}

std::uint64_t stored_index_pixels(std::uint64_t n, std::uint32_t h, std::uint32_t w,
                                  std::uint32_t k) {
  return (static_cast<std::uint64_t>(h) + w) * (k * n + 1);
}

}  // namespace cirf
