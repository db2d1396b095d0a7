#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cirf/cancelable_index.hpp"
#include "cirf/lowrank.hpp"
#include "cirf/matching.hpp"
#include "cirf/synth.hpp"

namespace cirf {

// Client-side key material for one finger of one enrollee: the template
// filter pair plus the per-column index filters.
struct FingerKeys {
  TemplateParam tp;
  IndexParam ip;
};

// All key material. The database below never contains any of it. In the
// individual scenario per_record holds one entry per enrollee; in the common
// scenario a single entry is shared by everyone. The anchor filters (one per
// finger) are system-wide either way.
struct KeyStore {
  GFParams gp;
  std::uint32_t k = 0;
  Scenario scenario = Scenario::individual;
  std::uint32_t fingers = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<FingerKeys>> per_record;  // [record or 0][finger]
  std::vector<AnchorParam> anchor;                  // [finger]

  const FingerKeys& keys(std::size_t record_pos, std::uint32_t finger) const {
    return per_record[scenario == Scenario::common ? 0 : record_pos][finger];
  }
};

// Server-side state for one finger of one enrollee: transformed template and
// transformed index only.
struct EnrolledFinger {
  TransformedTemplate tt;
  TransformedIndex ti;
};

struct EnrollRecord {
  std::uint32_t enrollee_id = 0;
  bool is_anchor = false;
  std::vector<EnrolledFinger> fingers;
};

constexpr std::uint32_t kNoAnchor = UINT32_MAX;

struct Database {
  GFParams gp;
  std::uint32_t k = 0;
  Scenario scenario = Scenario::individual;
  std::uint32_t fingers = 0;
  std::uint32_t pad_i = 0, pad_j = 0;
  std::uint32_t anchor_pos = kNoAnchor;  // record index, kNoAnchor if none
  std::vector<EnrollRecord> records;
};

struct SystemConfig {
  GFParams gp;
  std::uint32_t k = 2;
  Scenario scenario = Scenario::individual;
  std::uint32_t fingers = 2;
  ShiftWindow exact_window{6, 12};   // min-Hamming search range
  ShiftWindow approx_window{2, 4};   // pre-filter search range
  std::uint32_t pad_i = 6, pad_j = 12;
  std::uint64_t seed = 1;
  TransformPath path = TransformPath::direct;
};

// A query after its one-time transforms: 2D spectra of the flipped frame and
// flipped complement (for exact scoring) and the 1D spectra of the dithered
// factor columns (for approximate scoring). Everything per-record afterwards
// is filter application only.
struct PreparedQuery {
  std::vector<Matrix> fy;      // [finger]
  std::vector<Matrix> fy_bar;  // [finger]
  std::vector<QueryIndexNtt> q;
};

struct ApproxEntry {
  std::uint32_t pos = 0;  // record index
  std::uint64_t score = 0;
};

struct IdentResult {
  std::optional<std::uint32_t> accepted_id;
  std::uint64_t accepted_score = 0;      // fused exact score of the accepted record
  std::uint32_t exact_computations = 0;  // records scored exactly before stopping
  std::vector<std::uint32_t> order;      // candidate record indices, best first
};

// Open-set identification over protected records: every enrollee is scored
// approximately through the recovered low-rank correlations, candidates are
// walked in descending order of the fused approximate score, and the first
// fused exact score under the threshold is accepted.
class IdentifySystem {
 public:
  explicit IdentifySystem(const SystemConfig& cfg);
  IdentifySystem(Database db, KeyStore ks, ShiftWindow exact_window, ShiftWindow approx_window,
                 TransformPath path = TransformPath::direct);

  // Enrolls one subject; finger images must be padded and validated. The
  // first enrollee whose factor columns can all be dithered zero-free becomes
  // the anchor; everyone else stores raw factors.
  void enroll_one(std::uint32_t enrollee_id, const std::vector<BioImage>& finger_images);
  // Enrolls every subject of the dataset under its subject index, sample 0.
  void enroll_dataset(const Dataset& ds);

  PreparedQuery prepare(const std::vector<Matrix>& finger_queries,
                        std::uint64_t query_seed = 0) const;
  // Fused approximate scores, sorted descending (ties keep enrollment order).
  std::vector<ApproxEntry> rank(const PreparedQuery& pq) const;
  // Fused exact min-Hamming score against one record.
  std::uint64_t exact_fused(const PreparedQuery& pq, std::size_t record_pos) const;

  IdentResult identify(const PreparedQuery& pq, double threshold) const;
  IdentResult identify(const std::vector<Matrix>& finger_queries, double threshold,
                       std::uint64_t query_seed = 0) const;

  const CirfContext& ctx() const { return ctx_; }
  const Database& db() const { return db_; }
  const KeyStore& keystore() const { return ks_; }
  ShiftWindow exact_window() const { return exact_win_; }
  ShiftWindow approx_window() const { return approx_win_; }

 private:
  std::vector<TransformedQueryIndex> query_for_record(const PreparedQuery& pq,
                                                      std::size_t record_pos) const;

  CirfContext ctx_;
  Database db_;
  KeyStore ks_;
  ShiftWindow exact_win_;
  ShiftWindow approx_win_;
};

// Fraction of queries whose genuine record index appears within the first
// n_prime entries of the candidate order. Nondecreasing in n_prime.
double hit_rate(const std::vector<IdentResult>& results,
                const std::vector<std::uint32_t>& genuine_records, std::uint32_t n_prime);

// Fraction of results whose accepted id equals the expected id.
double correct_accept_rate(const std::vector<IdentResult>& results,
                           const std::vector<std::uint32_t>& expected_ids);

// Mean number of exact computations over correctly accepted trials; NaN if
// nothing was accepted correctly.
double mean_penetration(const std::vector<IdentResult>& results,
                        const std::vector<std::uint32_t>& expected_ids);

// Equal error rate for distance-like scores (accept iff score < threshold),
// from the piecewise-linear crossing of the false-accept and false-reject
// rates. Perfectly separated inputs give 0, identical distributions 0.5.
double equal_error_rate(std::vector<double> genuine, std::vector<double> impostor);

// Query payload in bytes for an identification against n enrollees.
std::uint64_t payload_bytes(Scenario s, std::uint64_t n, std::uint32_t h, std::uint32_t w,
                            std::uint32_t k, std::uint32_t bytes_per_pixel);

// Stored index size per finger side, in pixels: the per-record diagonal
// columns plus the anchor pair.
std::uint64_t stored_index_pixels(std::uint64_t n, std::uint32_t h, std::uint32_t w,
                                  std::uint32_t k);

// Server-side containers with per-record checksums; a flipped byte is
// reported with the position of the damaged record.
void save_database(const Database& db, const std::string& path);
Database load_database(const std::string& path);
void save_keys(const KeyStore& ks, const std::string& path);
KeyStore load_keys(const std::string& path);

}  // namespace cirf
