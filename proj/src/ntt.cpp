#include "cirf/ntt.hpp"

#include <string>

namespace cirf {

std::atomic<std::uint64_t> InttCounter::count_{0};

namespace {

bool is_pow2(std::uint32_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Whether an n-term sum of products of reduced values fits in 64 bits,
// allowing a single reduction at the end of each output coefficient.
bool can_defer_mod(std::uint32_t n, Elem p) {
  unsigned __int128 worst = static_cast<unsigned __int128>(n) * (p - 1) * (p - 1);
  return worst <= static_cast<unsigned __int128>(UINT64_MAX);
}

void direct_transform(const Vec& in, Vec& out, const Vec& tw, Elem p, bool defer) {
  const std::size_t n = in.size();
  for (std::size_t u = 0; u < n; ++u) {
    std::uint64_t acc = 0;
    std::size_t idx = 0;
    if (defer) {
      for (std::size_t i = 0; i < n; ++i) {
        acc += tw[idx] * in[i];
        idx += u;
        if (idx >= n) idx -= n;
      }
      out[u] = acc % p;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        acc = (acc + tw[idx] * (in[i] % p)) % p;
        idx += u;
        if (idx >= n) idx -= n;
      }
      out[u] = acc;
    }
  }
}

void radix2_transform(const Vec& in, Vec& out, const Vec& stage_tw, Elem p) {
  const std::size_t n = in.size();
  out = in;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(out[i], out[j]);
  }
  std::size_t tw_off = 0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Elem* tw = stage_tw.data() + tw_off;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        Elem a = out[i + j];
        Elem b = mul_mod(out[i + j + len / 2], tw[j], p);
        out[i + j] = add_mod(a, b, p);
        out[i + j + len / 2] = sub_mod(a, b, p);
      }
    }
    tw_off += len / 2;
  }
}

Vec stage_twiddles(std::uint32_t n, Elem root, Elem p) {
  Vec tw;
  tw.reserve(n - 1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    Elem wlen = pow_mod(root, n / len, p);
    Elem w = 1;
    for (std::size_t j = 0; j < len / 2; ++j) {
      tw.push_back(w);
      w = mul_mod(w, wlen, p);
    }
  }
  return tw;
}

Vec cycle_powers(std::uint32_t n, Elem root, Elem p) {
  Vec tw(n);
  Elem w = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    tw[i] = w;
    w = mul_mod(w, root, p);
  }
  return tw;
}

}  // namespace

Vec ntt1d(const Vec& v, Elem root, Elem p) {
  if (v.empty()) fail(Errc::bad_argument, "empty transform input");
  if (!has_exact_order(root, v.size(), p))
    fail(Errc::length_mismatch, "root order does not equal input length " +
                                    std::to_string(v.size()));
  Vec tw = cycle_powers(static_cast<std::uint32_t>(v.size()), root, p);
  Vec out(v.size());
  direct_transform(v, out, tw, p, can_defer_mod(static_cast<std::uint32_t>(v.size()), p));
  return out;
}

Vec intt1d(const Vec& v, Elem root, Elem p) {
  Vec out = ntt1d(v, inv_mod(root, p), p);
  Elem n_inv = inv_mod(v.size() % p, p);
  for (Elem& x : out) x = mul_mod(x, n_inv, p);
  InttCounter::bump();
  return out;
}

Vec hadamard(const Vec& a, const Vec& b, Elem p) {
  if (a.size() != b.size()) fail(Errc::length_mismatch, "hadamard lengths");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = mul_mod(a[i], b[i], p);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b, Elem p) {
  require_same_shape(a, b, "hadamard shapes");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i)
    out.data()[i] = mul_mod(a.data()[i], b.data()[i], p);
  return out;
}

Vec hadamard_inv(const Vec& a, Elem p) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = inv_mod(a[i], p);
  return out;
}

Matrix hadamard_inv(const Matrix& a, Elem p) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = inv_mod(a.data()[i], p);
  return out;
}

void NttContext::Plan::run(const Vec& in, Vec& out, bool inverse, Elem p) const {
  if (in.size() != n)
    fail(Errc::length_mismatch, "transform input length " + std::to_string(in.size()) +
                                    ", plan length " + std::to_string(n));
  out.resize(n);
  if (radix2) {
    radix2_transform(in, out, inverse ? inv_stage : fwd_stage, p);
  } else {
    direct_transform(in, out, inverse ? inv_tw : fwd_tw, p, can_defer_mod(n, p));
  }
  if (inverse) {
    for (Elem& x : out) x = mul_mod(x, n_inv, p);
    InttCounter::bump();
  }
}

NttContext::Plan NttContext::make_plan(std::uint32_t n, Elem root, Elem p, TransformPath path) {
  Plan plan;
  plan.n = n;
  plan.n_inv = inv_mod(n % p, p);
  plan.radix2 = path == TransformPath::auto_radix2 && is_pow2(n) && n > 1;
  Elem root_inv = inv_mod(root, p);
  if (plan.radix2) {
    plan.fwd_stage = stage_twiddles(n, root, p);
    plan.inv_stage = stage_twiddles(n, root_inv, p);
  } else {
    plan.fwd_tw = cycle_powers(n, root, p);
    plan.inv_tw = cycle_powers(n, root_inv, p);
  }
  return plan;
}

NttContext::NttContext(const GFParams& gp, TransformPath path) : gp_(gp) {
  if (gp.p >= (1ULL << 32)) fail(Errc::width_overflow, "modulus too wide");
  if (!is_prime_u64(gp.p)) fail(Errc::not_prime, "p = " + std::to_string(gp.p));
  if (!has_exact_order(gp.alpha, gp.h, gp.p))
    fail(Errc::order_mismatch, "alpha order is not h");
  if (!has_exact_order(gp.beta, gp.w, gp.p)) fail(Errc::order_mismatch, "beta order is not w");
  plan_h_ = make_plan(gp.h, gp.alpha, gp.p, path);
  plan_w_ = make_plan(gp.w, gp.beta, gp.p, path);
}

Vec NttContext::ntt1d_h(const Vec& v) const {
  Vec out;
  plan_h_.run(v, out, false, gp_.p);
  return out;
}

Vec NttContext::intt1d_h(const Vec& v) const {
  Vec out;
  plan_h_.run(v, out, true, gp_.p);
  return out;
}

Vec NttContext::ntt1d_w(const Vec& v) const {
  Vec out;
  plan_w_.run(v, out, false, gp_.p);
  return out;
}

Vec NttContext::intt1d_w(const Vec& v) const {
  Vec out;
  plan_w_.run(v, out, true, gp_.p);
  return out;
}

Matrix NttContext::ntt2d(const Matrix& m) const {
  if (m.rows() != gp_.h || m.cols() != gp_.w) fail(Errc::shape_mismatch, "2D transform input");
  Matrix out(gp_.h, gp_.w);
  Vec buf(gp_.h), res;
  for (std::size_t j = 0; j < gp_.w; ++j) {
    for (std::size_t i = 0; i < gp_.h; ++i) buf[i] = m(i, j);
    plan_h_.run(buf, res, false, gp_.p);
    for (std::size_t i = 0; i < gp_.h; ++i) out(i, j) = res[i];
  }
  Vec row(gp_.w);
  for (std::size_t i = 0; i < gp_.h; ++i) {
    for (std::size_t j = 0; j < gp_.w; ++j) row[j] = out(i, j);
    plan_w_.run(row, res, false, gp_.p);
    for (std::size_t j = 0; j < gp_.w; ++j) out(i, j) = res[j];
  }
  return out;
}

Matrix NttContext::intt2d(const Matrix& m) const {
  if (m.rows() != gp_.h || m.cols() != gp_.w) fail(Errc::shape_mismatch, "2D transform input");
  Matrix out(gp_.h, gp_.w);
  Vec buf(gp_.h), res;
  for (std::size_t j = 0; j < gp_.w; ++j) {
    for (std::size_t i = 0; i < gp_.h; ++i) buf[i] = m(i, j);
    plan_h_.run(buf, res, true, gp_.p);
    for (std::size_t i = 0; i < gp_.h; ++i) out(i, j) = res[i];
  }
  Vec row(gp_.w);
  for (std::size_t i = 0; i < gp_.h; ++i) {
    for (std::size_t j = 0; j < gp_.w; ++j) row[j] = out(i, j);
    plan_w_.run(row, res, true, gp_.p);
    for (std::size_t j = 0; j < gp_.w; ++j) out(i, j) = res[j];
  }
  return out;
}

}  // namespace cirf
