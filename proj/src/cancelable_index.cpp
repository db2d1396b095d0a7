#include "cirf/cancelable_index.hpp"

#include <algorithm>
#include <string>

namespace cirf {

namespace {

Vec sample_unit_vec(Rng& rng, std::size_t n, Elem p) {
  Vec v(n);
  for (Elem& e : v) e = uniform_u64(rng, 1, p - 1);
  return v;
}

void require_rank(std::uint32_t have, std::uint32_t want, const char* what) {
  if (have != want)
    fail(Errc::shape_mismatch, std::string(what) + ": rank " + std::to_string(have) +
                                   " does not match " + std::to_string(want));
}

}  // namespace

IndexParam IndexParam::sample(Rng& rng, const GFParams& gp, std::uint32_t k) {
  IndexParam ip;
  ip.r_alpha = Matrix(gp.h, k);
  ip.r_beta = Matrix(gp.w, k);
  for (Elem& e : ip.r_alpha.data()) e = uniform_u64(rng, 1, gp.p - 1);
  for (Elem& e : ip.r_beta.data()) e = uniform_u64(rng, 1, gp.p - 1);
  return ip;
}

AnchorParam AnchorParam::sample(Rng& rng, const GFParams& gp) {
  AnchorParam ap;
  ap.r_alpha = sample_unit_vec(rng, gp.h, gp.p);
  ap.r_beta = sample_unit_vec(rng, gp.w, gp.p);
  return ap;
}

TransformedIndex transform_index_enroll(const CirfContext& ctx, const FactorIndex& idx,
                                        const IndexParam& ip, const AnchorParam& ap,
                                        bool is_anchor) {
  const GFParams& gp = ctx.params();
  if (idx.x_alpha.rows() != gp.h || idx.x_beta.rows() != gp.w)
    fail(Errc::shape_mismatch, "factor lengths do not match the parameter set");
  require_rank(static_cast<std::uint32_t>(ip.r_alpha.cols()), idx.k, "index filters");
  TransformedIndex out;
  out.k = idx.k;
  for (std::uint32_t i = 0; i < idx.k; ++i) {
    out.t_alpha.push_back(hadamard(ctx.ntt().ntt1d_h(idx.x_alpha.col(i)), ip.r_alpha.col(i), gp.p));
    out.t_beta.push_back(hadamard(ctx.ntt().ntt1d_w(idx.x_beta.col(i)), ip.r_beta.col(i), gp.p));
  }
  if (is_anchor) {
    out.anchor_t = {hadamard(ctx.ntt().ntt1d_h(idx.x_alpha.col(0)), ap.r_alpha, gp.p),
                    hadamard(ctx.ntt().ntt1d_w(idx.x_beta.col(0)), ap.r_beta, gp.p)};
  }
  return out;
}

QueryIndexNtt prepare_query_index(const CirfContext& ctx, const FactorIndex& y_idx) {
  const GFParams& gp = ctx.params();
  if (y_idx.x_alpha.rows() != gp.h || y_idx.x_beta.rows() != gp.w)
    fail(Errc::shape_mismatch, "query factor lengths do not match the parameter set");
  QueryIndexNtt q;
  q.k = y_idx.k;
  for (std::uint32_t i = 0; i < y_idx.k; ++i) {
    q.g_alpha.push_back(ctx.ntt().ntt1d_h(flip(y_idx.x_alpha.col(i))));
    q.g_beta.push_back(ctx.ntt().ntt1d_w(flip(y_idx.x_beta.col(i))));
  }
  return q;
}

TransformedQueryIndex apply_query_filters(const CirfContext& ctx, const QueryIndexNtt& q,
                                          const IndexParam& ip, const AnchorParam& ap,
                                          bool for_anchor_record) {
  const GFParams& gp = ctx.params();
  require_rank(static_cast<std::uint32_t>(ip.r_alpha.cols()), q.k, "index filters");
  TransformedQueryIndex out;
  out.k = q.k;
  for (std::uint32_t i = 0; i < q.k; ++i) {
    out.v_alpha.push_back(hadamard(q.g_alpha[i], hadamard_inv(ip.r_alpha.col(i), gp.p), gp.p));
    out.v_beta.push_back(hadamard(q.g_beta[i], hadamard_inv(ip.r_beta.col(i), gp.p), gp.p));
  }
  if (for_anchor_record) {
    Vec inv_a = hadamard_inv(ap.r_alpha, gp.p);
    Vec inv_b = hadamard_inv(ap.r_beta, gp.p);
    for (std::uint32_t j = 1; j < q.k; ++j) {
      out.anchor_v_alpha.push_back(hadamard(q.g_alpha[j], inv_a, gp.p));
      out.anchor_v_beta.push_back(hadamard(q.g_beta[j], inv_b, gp.p));
    }
  }
  return out;
}

TransformedQueryIndex transform_index_query(const CirfContext& ctx, const FactorIndex& y_idx,
                                            const IndexParam& ip, const AnchorParam& ap,
                                            bool for_anchor_record) {
  return apply_query_filters(ctx, prepare_query_index(ctx, y_idx), ip, ap, for_anchor_record);
}

MstRecovery::MstRecovery(const CirfContext& ctx, const TransformedIndex& anchor_record,
                         const TransformedQueryIndex& anchor_query) {
  const GFParams& gp = ctx.params();
  k_ = anchor_record.k;
  if (!anchor_record.anchor_t)
    fail(Errc::no_anchor, "anchor record carries no anchor vectors");
  if (anchor_query.k != k_) fail(Errc::shape_mismatch, "query rank");
  if (anchor_query.anchor_v_alpha.size() != k_ - 1 && k_ > 1)
    fail(Errc::shape_mismatch, "query anchor vectors");
  // Edge i = 1 is the anchor record's own first diagonal product; edges
  // i >= 2 pair the stored anchor vector with the query's anchor vectors.
  edge_alpha_.push_back(hadamard(anchor_record.t_alpha[0], anchor_query.v_alpha[0], gp.p));
  edge_beta_.push_back(hadamard(anchor_record.t_beta[0], anchor_query.v_beta[0], gp.p));
  for (std::uint32_t j = 1; j < k_; ++j) {
    edge_alpha_.push_back(hadamard(anchor_record.anchor_t->first, anchor_query.anchor_v_alpha[j - 1], gp.p));
    edge_beta_.push_back(hadamard(anchor_record.anchor_t->second, anchor_query.anchor_v_beta[j - 1], gp.p));
  }
  if (k_ > 1) {
    for (std::uint32_t i = 0; i < k_; ++i) {
      edge_alpha_inv_.push_back(hadamard_inv(edge_alpha_[i], gp.p));
      edge_beta_inv_.push_back(hadamard_inv(edge_beta_[i], gp.p));
    }
  }
}

RecoveredProducts MstRecovery::recover(const CirfContext& ctx, const TransformedIndex& t,
                                       const TransformedQueryIndex& v) const {
  const GFParams& gp = ctx.params();
  if (t.k != k_ || v.k != k_) fail(Errc::shape_mismatch, "record rank");
  RecoveredProducts rp;
  rp.k = k_;
  rp.alpha.resize(static_cast<std::size_t>(k_) * k_);
  rp.beta.resize(static_cast<std::size_t>(k_) * k_);
  std::vector<Vec> diag_alpha(k_), diag_beta(k_);
  for (std::uint32_t i = 0; i < k_; ++i) {
    diag_alpha[i] = hadamard(t.t_alpha[i], v.v_alpha[i], gp.p);
    diag_beta[i] = hadamard(t.t_beta[i], v.v_beta[i], gp.p);
  }
  for (std::uint32_t i = 0; i < k_; ++i)
    for (std::uint32_t j = 0; j < k_; ++j) {
      std::size_t c = static_cast<std::size_t>(i) * k_ + j;
      if (i == j) {
        rp.alpha[c] = diag_alpha[i];
        rp.beta[c] = diag_beta[i];
      } else {
        rp.alpha[c] =
            hadamard(hadamard(diag_alpha[i], edge_alpha_inv_[i], gp.p), edge_alpha_[j], gp.p);
        rp.beta[c] =
            hadamard(hadamard(diag_beta[i], edge_beta_inv_[i], gp.p), edge_beta_[j], gp.p);
      }
    }
  return rp;
}

Matrix compute_M(const CirfContext& ctx, const RecoveredProducts& rp) {
  const GFParams& gp = ctx.params();
  const std::uint32_t k = rp.k;
  const std::size_t kk = static_cast<std::size_t>(k) * k;
  if (rp.alpha.size() != kk || rp.beta.size() != kk)
    fail(Errc::shape_mismatch, "recovered product count");
  Matrix m_alpha(gp.h, kk), m_beta(gp.w, kk);
  for (std::size_t c = 0; c < kk; ++c) {
    m_alpha.set_col(c, ctx.ntt().intt1d_h(rp.alpha[c]));
    m_beta.set_col(c, ctx.ntt().intt1d_w(rp.beta[c]));
  }
  Matrix m(gp.h, gp.w);
  for (std::size_t i = 0; i < gp.h; ++i)
    for (std::size_t j = 0; j < gp.w; ++j) {
      std::uint64_t acc = 0;
      for (std::size_t c = 0; c < kk; ++c)
        acc = (acc + m_alpha(i, c) * m_beta(j, c)) % gp.p;
      m(i, j) = acc;
    }
  return m;
}

Elem approx_score(const CirfContext& ctx, const Matrix& m, ShiftWindow win) {
  CorrTable t = correlation_window(ctx, m, win);
  Elem best = 0;
  for (int di = -win.di_max; di <= win.di_max; ++di)
    for (int dj = -win.dj_max; dj <= win.dj_max; ++dj) best = std::max(best, t.at(di, dj));
  return best;
}

const char* scenario_name(Scenario s) {
  return s == Scenario::individual ? "individual" : "common";
}

LeakageAudit equation_audit(Scenario s, std::uint64_t n, std::uint32_t h, std::uint32_t w,
                            std::uint32_t k) {
  const std::uint64_t hw = static_cast<std::uint64_t>(h) * w;
  const std::uint64_t hpw = static_cast<std::uint64_t>(h) + w;
  LeakageAudit a;
  if (s == Scenario::individual) {
    // N transformed features with N independent filters plus the plaintext.
    a.feature_unknowns = (n + 1) * hw;
    a.feature_equations = n * hw;
    // Nk transformed index vectors, Nk filters, plus k plaintext columns and
    // the anchor pair sharing one of them.
    a.index_unknowns = (n * k + k) * hpw;
    a.index_equations = (n * k + k - 1) * hpw;
  } else {
    // One shared filter set, one extra transformed set observable under it.
    a.feature_unknowns = (n + 2) * hw;
    a.feature_equations = (n + 1) * hw;
    a.index_unknowns = (n * k + 2 * k + 1) * hpw;
    a.index_equations = (n * k + 2 * k) * hpw;
  }
  return a;
}

}  // namespace cirf
