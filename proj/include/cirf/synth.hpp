#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cirf/matching.hpp"

namespace cirf {

// Synthetic binary feature corpus. Each (subject, finger) pair gets a base
// drawing of smooth random curves confined to a box inset from the pad margin
// by the maximum sample shift, so every sample of it — cyclically shifted by
// at most (max_shift_i, max_shift_j) and speckled inside the interior — still
// has clean margins and can be enrolled as padded.
struct CorpusSpec {
  std::uint32_t h = 32, w = 64;
  std::uint32_t pad_i = 6, pad_j = 12;  // margins match the default exact window
  std::uint32_t subjects = 10;
  std::uint32_t fingers = 2;
  std::uint32_t samples = 2;  // per finger; sample 0 is the enrollment reference
  std::uint64_t seed = 1;
  std::uint32_t max_shift_i = 2, max_shift_j = 4;
  double flip_prob = 0.02;    // per-pixel speckle rate, interior only
  double min_density = 0.15;  // curves are added until the safe box reaches this
};

struct Dataset {
  CorpusSpec spec;
  std::vector<Matrix> images;  // [(subject * fingers + finger) * samples + sample]

  const Matrix& image(std::uint32_t subject, std::uint32_t finger, std::uint32_t sample) const {
    return images[(static_cast<std::size_t>(subject) * spec.fingers + finger) * spec.samples +
                  sample];
  }
  Matrix& image(std::uint32_t subject, std::uint32_t finger, std::uint32_t sample) {
    return images[(static_cast<std::size_t>(subject) * spec.fingers + finger) * spec.samples +
                  sample];
  }
};

// Zeroes the pad margins and marks the image as padded.
BioImage zero_pad(Matrix m, std::uint32_t pad_i, std::uint32_t pad_j);

// Sample 0 wrapped as a padded enrollment image (margins are already clean).
BioImage as_enrolled(const Dataset& ds, std::uint32_t subject, std::uint32_t finger);
// Any sample wrapped as an unpadded query frame.
BioImage as_query(const Dataset& ds, std::uint32_t subject, std::uint32_t finger,
                  std::uint32_t sample);

Dataset generate_corpus(const CorpusSpec& spec);

// Container: fixed header, 1 bit per pixel packed row-major MSB-first, and a
// trailing checksum over everything before it.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace cirf
