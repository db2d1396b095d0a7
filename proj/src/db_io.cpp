#include <string>

#include "cirf/bytes.hpp"
#include "cirf/engine.hpp"
#include "cirf/hash.hpp"

namespace cirf {

namespace {

constexpr char kDbMagic[8] = {'C', 'I', 'R', 'F', 'P', 'D', 'B', '\0'};
constexpr char kKeyMagic[8] = {'C', 'I', 'R', 'F', 'K', 'E', 'Y', '\0'};
constexpr std::uint32_t kDbVersion = 1;
constexpr std::uint32_t kKeyVersion = 1;

// Records hold one u16 per element, so the modulus must fit.
void require_u16(Elem p) {
  if (p > 0xffff)
    fail(Errc::width_overflow, "modulus does not fit the 16-bit container element");
}

void put_elems(std::string& out, const Vec& v) {
  for (Elem e : v) put_u16(out, static_cast<std::uint16_t>(e));
}
void put_elems(std::string& out, const Matrix& m) { put_elems(out, m.data()); }

Vec get_vec(ByteReader& r, std::size_t n) {
  Vec v(n);
  for (Elem& e : v) e = r.u16();
  return v;
}
Matrix get_matrix(ByteReader& r, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (Elem& e : m.data()) e = r.u16();
  return m;
}

void put_params(std::string& out, const GFParams& gp) {
  put_u64(out, gp.p);
  put_u64(out, gp.alpha);
  put_u64(out, gp.beta);
  put_u32(out, gp.h);
  put_u32(out, gp.w);
}

GFParams get_params(ByteReader& r) {
  GFParams gp;
  gp.p = r.u64();
  gp.alpha = r.u64();
  gp.beta = r.u64();
  gp.h = r.u32();
  gp.w = r.u32();
  return validate_params(gp.p, gp.alpha, gp.beta, gp.h, gp.w, 1);
}

Scenario get_scenario(std::uint8_t v) {
  if (v > 1) fail(Errc::corrupt_header, "unknown key scenario tag");
  return static_cast<Scenario>(v);
}

std::string load_checked(const std::string& path, const char (&magic)[8], std::uint32_t version,
                         const char* what) {
  std::string buf = read_file(path);
  if (buf.size() < 12) fail(Errc::corrupt_header, std::string(what) + " file too short");
  if (buf.compare(0, 8, magic, 8) != 0)
    fail(Errc::corrupt_header, std::string("not a ") + what + " file");
  ByteReader r{buf, 8};
  std::uint32_t v = r.u32();
  if (v != version)
    fail(Errc::format_version_mismatch, std::string(what) + " format version " +
                                            std::to_string(v) + ", expected " +
                                            std::to_string(version));
  return buf;
}

// Appends a checksum of out[from..] and returns the region's digest.
void seal(std::string& out, std::size_t from) {
  Fnv1a h;
  h.update(out.data() + from, out.size() - from);
  put_u64(out, h.digest());
}

void check_seal(ByteReader& r, std::size_t from, const std::string& what) {
  Fnv1a h;
  h.update(r.buf.data() + from, r.pos - from);
  if (r.u64() != h.digest()) fail(Errc::corrupt_payload, what + " checksum mismatch");
}

}  // namespace

void save_database(const Database& db, const std::string& path) {
  require_u16(db.gp.p);
  std::string out(kDbMagic, 8);
  put_u32(out, kDbVersion);
  put_params(out, db.gp);
  put_u32(out, db.k);
  out.push_back(static_cast<char>(db.scenario));
  put_u32(out, db.fingers);
  put_u32(out, db.pad_i);
  put_u32(out, db.pad_j);
  put_u32(out, db.anchor_pos);
  put_u32(out, static_cast<std::uint32_t>(db.records.size()));
  seal(out, 0);
  for (const EnrollRecord& rec : db.records) {
    std::size_t start = out.size();
    put_u32(out, rec.enrollee_id);
    out.push_back(rec.is_anchor ? 1 : 0);
    for (const EnrolledFinger& ef : rec.fingers) {
      put_elems(out, ef.tt.t);
      put_elems(out, ef.tt.t_bar);
      for (const Vec& v : ef.ti.t_alpha) put_elems(out, v);
      for (const Vec& v : ef.ti.t_beta) put_elems(out, v);
      // Anchor slots are always present so records have a fixed size.
      if (ef.ti.anchor_t) {
        put_elems(out, ef.ti.anchor_t->first);
        put_elems(out, ef.ti.anchor_t->second);
      } else {
        put_elems(out, Vec(db.gp.h, 0));
        put_elems(out, Vec(db.gp.w, 0));
      }
    }
    seal(out, start);
  }
  write_file(path, out);
}

Database load_database(const std::string& path) {
  std::string buf = load_checked(path, kDbMagic, kDbVersion, "record container");
  ByteReader r{buf, 12};
  Database db;
  db.gp = get_params(r);
  require_u16(db.gp.p);
  db.k = r.u32();
  db.scenario = get_scenario(r.u8());
  db.fingers = r.u32();
  db.pad_i = r.u32();
  db.pad_j = r.u32();
  db.anchor_pos = r.u32();
  std::uint32_t n = r.u32();
  check_seal(r, 0, "header");
  if (db.k == 0 || db.k > std::min(db.gp.h, db.gp.w))
    fail(Errc::corrupt_header, "stored rank is out of range");
  if (db.fingers == 0 || db.fingers > 16) fail(Errc::corrupt_header, "stored finger count is out of range");
  const std::size_t hw = static_cast<std::size_t>(db.gp.h) * db.gp.w;
  const std::size_t hpw = static_cast<std::size_t>(db.gp.h) + db.gp.w;
  const std::size_t rec_size = 4 + 1 + db.fingers * (2 * hw + db.k * hpw + hpw) * 2 + 8;
  if (buf.size() != r.pos + static_cast<std::size_t>(n) * rec_size)
    fail(Errc::corrupt_payload, "record container size mismatch");
  for (std::uint32_t i = 0; i < n; ++i) {
    std::size_t start = r.pos;
    EnrollRecord rec;
    rec.enrollee_id = r.u32();
    rec.is_anchor = r.u8() != 0;
    for (std::uint32_t f = 0; f < db.fingers; ++f) {
      EnrolledFinger ef;
      ef.tt.t = get_matrix(r, db.gp.h, db.gp.w);
      ef.tt.t_bar = get_matrix(r, db.gp.h, db.gp.w);
      ef.ti.k = db.k;
      for (std::uint32_t c = 0; c < db.k; ++c) ef.ti.t_alpha.push_back(get_vec(r, db.gp.h));
      for (std::uint32_t c = 0; c < db.k; ++c) ef.ti.t_beta.push_back(get_vec(r, db.gp.w));
      Vec aa = get_vec(r, db.gp.h), ab = get_vec(r, db.gp.w);
      if (rec.is_anchor) ef.ti.anchor_t = {std::move(aa), std::move(ab)};
      rec.fingers.push_back(std::move(ef));
    }
    try {
      check_seal(r, start, "record");
    } catch (const Error& e) {
      fail(e.code(), "record " + std::to_string(i) + " checksum mismatch");
    }
    db.records.push_back(std::move(rec));
  }
  if (db.anchor_pos != kNoAnchor &&
      (db.anchor_pos >= n || !db.records[db.anchor_pos].is_anchor))
    fail(Errc::corrupt_header, "anchor position does not point at an anchor record");
  return db;
}

void save_keys(const KeyStore& ks, const std::string& path) {
  require_u16(ks.gp.p);
  std::string out(kKeyMagic, 8);
  put_u32(out, kKeyVersion);
  put_params(out, ks.gp);
  put_u32(out, ks.k);
  out.push_back(static_cast<char>(ks.scenario));
  put_u32(out, ks.fingers);
  put_u64(out, ks.seed);
  put_u32(out, static_cast<std::uint32_t>(ks.per_record.size()));
  seal(out, 0);
  for (const std::vector<FingerKeys>& rec : ks.per_record) {
    std::size_t start = out.size();
    for (const FingerKeys& fk : rec) {
      put_elems(out, fk.tp.r1);
      put_elems(out, fk.tp.r2);
      put_elems(out, fk.ip.r_alpha);
      put_elems(out, fk.ip.r_beta);
    }
    seal(out, start);
  }
  std::size_t start = out.size();
  for (const AnchorParam& ap : ks.anchor) {
    put_elems(out, ap.r_alpha);
    put_elems(out, ap.r_beta);
  }
  seal(out, start);
  write_file(path, out);
}

KeyStore load_keys(const std::string& path) {
  std::string buf = load_checked(path, kKeyMagic, kKeyVersion, "key store");
  ByteReader r{buf, 12};
  KeyStore ks;
  ks.gp = get_params(r);
  require_u16(ks.gp.p);
  ks.k = r.u32();
  ks.scenario = get_scenario(r.u8());
  ks.fingers = r.u32();
  ks.seed = r.u64();
  std::uint32_t n = r.u32();
  check_seal(r, 0, "header");
  if (ks.k == 0 || ks.k > std::min(ks.gp.h, ks.gp.w))
    fail(Errc::corrupt_header, "stored rank is out of range");
  if (ks.fingers == 0 || ks.fingers > 16) fail(Errc::corrupt_header, "stored finger count is out of range");
  for (std::uint32_t i = 0; i < n; ++i) {
    std::size_t start = r.pos;
    std::vector<FingerKeys> rec;
    for (std::uint32_t f = 0; f < ks.fingers; ++f) {
      FingerKeys fk;
      fk.tp.r1 = get_matrix(r, ks.gp.h, ks.gp.w);
      fk.tp.r2 = get_matrix(r, ks.gp.h, ks.gp.w);
      fk.ip.r_alpha = get_matrix(r, ks.gp.h, ks.k);
      fk.ip.r_beta = get_matrix(r, ks.gp.w, ks.k);
      rec.push_back(std::move(fk));
    }
    try {
      check_seal(r, start, "key record");
    } catch (const Error& e) {
      fail(e.code(), "key record " + std::to_string(i) + " checksum mismatch");
    }
    ks.per_record.push_back(std::move(rec));
  }
  std::size_t start = r.pos;
  for (std::uint32_t f = 0; f < ks.fingers; ++f) {
    AnchorParam ap;
    ap.r_alpha = get_vec(r, ks.gp.h);
    ap.r_beta = get_vec(r, ks.gp.w);
    ks.anchor.push_back(std::move(ap));
  }
  check_seal(r, start, "anchor key");
  if (r.pos != buf.size()) fail(Errc::corrupt_payload, "trailing bytes after the key store");
  return ks;
}

}  // namespace cirf
