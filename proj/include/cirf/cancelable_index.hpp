#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cirf/lowrank.hpp"
#include "cirf/matching.hpp"

namespace cirf {

// Per-template index filters: one length-h vector per alpha column and one
// length-w vector per beta column, entries uniform over Z_p \ {0}.
struct IndexParam {
  Matrix r_alpha;  // h x k
  Matrix r_beta;   // w x k
  static IndexParam sample(Rng& rng, const GFParams& gp, std::uint32_t k);
};

// Database-wide anchor filters; exactly one pair per database.
struct AnchorParam {
  Vec r_alpha;  // length h
  Vec r_beta;   // length w
  static AnchorParam sample(Rng& rng, const GFParams& gp);
};

// Stored index of one template: t_i = G(x_i) . r_i per factor column. The
// anchor record additionally stores t' = G(x_1) . r' for both sides.
struct TransformedIndex {
  std::vector<Vec> t_alpha;  // k vectors of length h
  std::vector<Vec> t_beta;   // k vectors of length w
  std::optional<std::pair<Vec, Vec>> anchor_t;
  std::uint32_t k = 0;
};

// Query-side index for one template: v_i = G(flip(y_i)) . r_i^-1. When the
// record is the anchor, the query also carries v'_j = G(flip(y_j)) . r'^-1
// for j = 2..k (j = 1 is already covered by the record's own diagonal).
struct TransformedQueryIndex {
  std::vector<Vec> v_alpha;
  std::vector<Vec> v_beta;
  std::vector<Vec> anchor_v_alpha;  // k-1 vectors
  std::vector<Vec> anchor_v_beta;
  std::uint32_t k = 0;
};

// Forward 1D transforms of the flipped query factor columns, computed once
// per identification; per-record work is then filter multiplication only.
struct QueryIndexNtt {
  std::vector<Vec> g_alpha;  // G(flip(y_alpha_i))
  std::vector<Vec> g_beta;
  std::uint32_t k = 0;
};

TransformedIndex transform_index_enroll(const CirfContext& ctx, const FactorIndex& idx,
                                        const IndexParam& ip, const AnchorParam& ap,
                                        bool is_anchor);

QueryIndexNtt prepare_query_index(const CirfContext& ctx, const FactorIndex& y_idx);

TransformedQueryIndex apply_query_filters(const CirfContext& ctx, const QueryIndexNtt& q,
                                          const IndexParam& ip, const AnchorParam& ap,
                                          bool for_anchor_record);

TransformedQueryIndex transform_index_query(const CirfContext& ctx, const FactorIndex& y_idx,
                                            const IndexParam& ip, const AnchorParam& ap,
                                            bool for_anchor_record);

// Transform-domain products G(x_i) . G(flip(y_j)) for all column pairs of one
// record, ordered with j fastest: entry i*k + j.
struct RecoveredProducts {
  std::vector<Vec> alpha;
  std::vector<Vec> beta;
  std::uint32_t k = 0;
};

// Recovers all k^2 pairwise products per record from protected vectors only.
// Diagonal pairs come straight from t_i . v_i. Off-diagonal pairs route
// through the anchor: (t_i . v_i) . (t' . v'_i)^-1 . (t' . v'_j), so only the
// anchor-edge products are ever inverted; their inverses are computed once at
// construction and shared across every record.
class MstRecovery {
 public:
  MstRecovery(const CirfContext& ctx, const TransformedIndex& anchor_record,
              const TransformedQueryIndex& anchor_query);

  RecoveredProducts recover(const CirfContext& ctx, const TransformedIndex& t,
                            const TransformedQueryIndex& v) const;

 private:
  std::vector<Vec> edge_alpha_, edge_beta_;          // t' . v'_i, i = 1..k
  std::vector<Vec> edge_alpha_inv_, edge_beta_inv_;  // their elementwise inverses
  std::uint32_t k_ = 0;
};

// M = M_alpha * M_beta^T where column i*k+j of M_alpha (resp. M_beta) is the
// 1D inverse transform of the recovered alpha (beta) product. Consumes
// exactly 2k^2 1D inverse transforms; M equals the cyclic cross-correlation
// of the two rank-k reconstructions, laid out like match_correlation output.
Matrix compute_M(const CirfContext& ctx, const RecoveredProducts& rp);

// Maximum of M over the shift window (read through the calibrated map).
Elem approx_score(const CirfContext& ctx, const Matrix& m, ShiftWindow win);

enum class Scenario : std::uint8_t { individual = 0, common = 1 };

const char* scenario_name(Scenario s);

// Unknown-vs-equation counts for an attacker holding one database (features
// and index vectors) plus, in the common scenario, one more transformed set
// under the same filters.
struct LeakageAudit {
  std::uint64_t feature_unknowns = 0;
  std::uint64_t feature_equations = 0;
  std::uint64_t index_unknowns = 0;
  std::uint64_t index_equations = 0;
  bool underdetermined() const {
    return feature_unknowns > feature_equations && index_unknowns > index_equations;
  }
};

LeakageAudit equation_audit(Scenario s, std::uint64_t n, std::uint32_t h, std::uint32_t w,
                            std::uint32_t k);

}  // namespace cirf
