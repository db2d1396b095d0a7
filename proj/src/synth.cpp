#include "cirf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cirf/bytes.hpp"
#include "cirf/hash.hpp"
#include "cirf/rng.hpp"

namespace cirf {

BioImage zero_pad(Matrix m, std::uint32_t pad_i, std::uint32_t pad_j) {
  const std::size_t h = m.rows(), w = m.cols();
  if (2ull * pad_i >= h || 2ull * pad_j >= w)
    fail(Errc::window_too_large, "pad margins leave no interior");
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      if (i < pad_i || i >= h - pad_i || j < pad_j || j >= w - pad_j) m(i, j) = 0;
  return BioImage{std::move(m), pad_i, pad_j, true};
}

BioImage as_enrolled(const Dataset& ds, std::uint32_t subject, std::uint32_t finger) {
  BioImage img{ds.image(subject, finger, 0), ds.spec.pad_i, ds.spec.pad_j, true};
  validate_bio(img);
  return img;
}

BioImage as_query(const Dataset& ds, std::uint32_t subject, std::uint32_t finger,
                  std::uint32_t sample) {
  return BioImage{ds.image(subject, finger, sample), 0, 0, false};
}

namespace {

struct Box {
  std::size_t i0, i1, j0, j1;  // half-open
  std::size_t height() const { return i1 - i0; }
  std::size_t width() const { return j1 - j0; }
  std::size_t area() const { return height() * width(); }
};

// One cubic curve through four random control points, rasterized with the
// given brush radius and clipped to the box.
void draw_curve(Matrix& m, const Box& box, Rng& rng, int radius) {
  double pi[4], pj[4];
  for (int c = 0; c < 4; ++c) {
    pi[c] = static_cast<double>(box.i0 + uniform_u64(rng, 0, box.height() - 1));
    pj[c] = static_cast<double>(box.j0 + uniform_u64(rng, 0, box.width() - 1));
  }
  const int steps = 4 * static_cast<int>(m.rows() + m.cols());
  for (int s = 0; s <= steps; ++s) {
    double t = static_cast<double>(s) / steps, u = 1.0 - t;
    double ci = u * u * u * pi[0] + 3 * u * u * t * pi[1] + 3 * u * t * t * pi[2] + t * t * t * pi[3];
    double cj = u * u * u * pj[0] + 3 * u * u * t * pj[1] + 3 * u * t * t * pj[2] + t * t * t * pj[3];
    long bi = std::lround(ci), bj = std::lround(cj);
    for (long di = -radius; di <= radius; ++di)
      for (long dj = -radius; dj <= radius; ++dj) {
        long i = bi + di, j = bj + dj;
        if (i >= static_cast<long>(box.i0) && i < static_cast<long>(box.i1) &&
            j >= static_cast<long>(box.j0) && j < static_cast<long>(box.j1))
          m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1;
      }
  }
}

Matrix base_drawing(const CorpusSpec& sp, const Box& box, Rng& rng) {
  Matrix m(sp.h, sp.w);
  std::uint64_t target = static_cast<std::uint64_t>(sp.min_density * box.area());
  int curves = 0;
  std::uint64_t ones = 0;
  while ((curves < 3 || ones < target) && curves < 64) {
    draw_curve(m, box, rng, uniform_u64(rng, 0, 1) ? 1 : 0);
    ++curves;
    ones = 0;
    for (Elem e : m.data()) ones += e;
  }
  return m;
}

Matrix shifted_speckled(const Matrix& base, const CorpusSpec& sp, Rng& rng) {
  const std::size_t h = sp.h, w = sp.w;
  long di = static_cast<long>(uniform_u64(rng, 0, 2 * sp.max_shift_i)) - sp.max_shift_i;
  long dj = static_cast<long>(uniform_u64(rng, 0, 2 * sp.max_shift_j)) - sp.max_shift_j;
  Matrix out(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      out((i + di + h) % h, (j + dj + w) % w) = base(i, j);
  for (std::size_t i = sp.pad_i; i < h - sp.pad_i; ++i)
    for (std::size_t j = sp.pad_j; j < w - sp.pad_j; ++j)
      if (bernoulli(rng, sp.flip_prob)) out(i, j) = 1 - out(i, j);
  return out;
}

void validate_spec(const CorpusSpec& sp) {
  if (sp.subjects == 0 || sp.fingers == 0 || sp.samples == 0)
    fail(Errc::bad_argument, "corpus needs at least one subject, finger, and sample");
  if (2ull * (sp.pad_i + sp.max_shift_i) + 1 > sp.h || 2ull * (sp.pad_j + sp.max_shift_j) + 1 > sp.w)
    fail(Errc::window_too_large, "pads plus shifts leave no drawing area");
  if (sp.flip_prob < 0 || sp.flip_prob >= 1 || sp.min_density < 0 || sp.min_density > 0.9)
    fail(Errc::bad_argument, "speckle or density rate out of range");
}

constexpr char kDatasetMagic[8] = {'C', 'I', 'R', 'F', 'D', 'S', 'E', 'T'};
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

Dataset generate_corpus(const CorpusSpec& spec) {
  validate_spec(spec);
  Box box{spec.pad_i + spec.max_shift_i, spec.h - spec.pad_i - spec.max_shift_i,
          spec.pad_j + spec.max_shift_j, spec.w - spec.pad_j - spec.max_shift_j};
  Dataset ds;
  ds.spec = spec;
  ds.images.reserve(static_cast<std::size_t>(spec.subjects) * spec.fingers * spec.samples);
  for (std::uint32_t s = 0; s < spec.subjects; ++s)
    for (std::uint32_t f = 0; f < spec.fingers; ++f) {
      Rng rng(derive_seed(spec.seed, 0x626173ull, s, f));  // per-(subject, finger) stream
      Matrix base = base_drawing(spec, box, rng);
      ds.images.push_back(base);
      for (std::uint32_t q = 1; q < spec.samples; ++q)
        ds.images.push_back(shifted_speckled(base, spec, rng));
    }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  const CorpusSpec& sp = ds.spec;
  std::string out(kDatasetMagic, sizeof kDatasetMagic);
  put_u32(out, kDatasetVersion);
  put_u32(out, sp.h);
  put_u32(out, sp.w);
  put_u32(out, sp.pad_i);
  put_u32(out, sp.pad_j);
  put_u32(out, sp.subjects);
  put_u32(out, sp.fingers);
  put_u32(out, sp.samples);
  put_u64(out, sp.seed);
  put_u32(out, sp.max_shift_i);
  put_u32(out, sp.max_shift_j);
  put_u64(out, static_cast<std::uint64_t>(std::llround(sp.flip_prob * 1e9)));
  put_u64(out, static_cast<std::uint64_t>(std::llround(sp.min_density * 1e9)));
  for (const Matrix& m : ds.images) {
    unsigned char acc = 0;
    int nbits = 0;
    for (Elem e : m.data()) {
      acc = static_cast<unsigned char>((acc << 1) | (e & 1));
      if (++nbits == 8) {
        out.push_back(static_cast<char>(acc));
        acc = 0;
        nbits = 0;
      }
    }
    if (nbits) out.push_back(static_cast<char>(acc << (8 - nbits)));
  }
  Fnv1a h;
  h.update(out.data(), out.size());
  put_u64(out, h.digest());
  write_file(path, out);
}

Dataset load_dataset(const std::string& path) {
  std::string buf = read_file(path);
  if (buf.size() < sizeof kDatasetMagic + 4 + 8) fail(Errc::corrupt_header, "dataset file too short");
  if (buf.compare(0, sizeof kDatasetMagic, kDatasetMagic, sizeof kDatasetMagic) != 0)
    fail(Errc::corrupt_header, "not a dataset file");
  Fnv1a h;
  h.update(buf.data(), buf.size() - 8);
  ByteReader tail{buf, buf.size() - 8};
  if (tail.u64() != h.digest()) fail(Errc::corrupt_payload, "dataset checksum mismatch");
  ByteReader r{buf, sizeof kDatasetMagic};
  std::uint32_t version = r.u32();
  if (version != kDatasetVersion)
    fail(Errc::format_version_mismatch,
         "dataset format version " + std::to_string(version) + ", expected " +
             std::to_string(kDatasetVersion));
  CorpusSpec sp;
  sp.h = r.u32();
  sp.w = r.u32();
  sp.pad_i = r.u32();
  sp.pad_j = r.u32();
  sp.subjects = r.u32();
  sp.fingers = r.u32();
  sp.samples = r.u32();
  sp.seed = r.u64();
  sp.max_shift_i = r.u32();
  sp.max_shift_j = r.u32();
  sp.flip_prob = static_cast<double>(r.u64()) / 1e9;
  sp.min_density = static_cast<double>(r.u64()) / 1e9;
  validate_spec(sp);
  const std::size_t n_images = static_cast<std::size_t>(sp.subjects) * sp.fingers * sp.samples;
  const std::size_t bytes_per = (static_cast<std::size_t>(sp.h) * sp.w + 7) / 8;
  if (buf.size() != r.pos + n_images * bytes_per + 8)
    fail(Errc::corrupt_payload, "dataset payload size mismatch");
  Dataset ds;
  ds.spec = sp;
  ds.images.reserve(n_images);
  for (std::size_t im = 0; im < n_images; ++im) {
    Matrix m(sp.h, sp.w);
    const unsigned char* bits = reinterpret_cast<const unsigned char*>(buf.data() + r.pos + im * bytes_per);
    for (std::size_t px = 0; px < static_cast<std::size_t>(sp.h) * sp.w; ++px)
      m.data()[px] = (bits[px / 8] >> (7 - px % 8)) & 1;
    ds.images.push_back(std::move(m));
  }
  return ds;
}

}  // namespace cirf
