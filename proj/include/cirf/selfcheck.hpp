#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cirf/engine.hpp"

namespace cirf {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Sampled end-to-end correctness checks for a parameter set, suitable for
// verifying a deployment configuration at runtime. k is the factor rank for
// the recovery checks, clamped to min(h, w).
std::vector<CheckResult> run_transform_checks(const GFParams& gp, std::uint64_t seed,
                                              std::uint32_t k = 2);

// Chi-square uniformity of protected outputs over Z_p \ {0}, one row per
// output class, each drawing fresh filters against a fixed zero-free input
// spectrum. Significance level 0.001.
struct UniformityRow {
  std::string label;
  double chi2 = 0;
  double critical = 0;
  std::uint64_t bins = 0;
  std::uint64_t draws = 0;
  bool pass = false;
};
std::vector<UniformityRow> filter_output_uniformity(const CirfContext& ctx, std::uint64_t seed,
                                                    std::uint64_t draws_per_class);

// Pooled Pearson correlation between two protected transforms of the same
// input under independent keys (inputs restricted to zero-free spectra).
// Returns |rho| over pairs * h * w paired samples.
double unlinkability_correlation(const CirfContext& ctx, std::uint64_t seed, std::uint32_t pairs);
// Two-sided 0.001-level acceptance bound for |rho| on n paired samples.
double unlinkability_threshold(std::uint64_t n);

// Constructive key-recovery round trip: with the plaintext and a zero-free
// spectrum, dividing the protected output recovers the filter exactly, for
// the frame transform and for the factor-column transforms alike. Returns
// true when every trial round-trips.
bool filter_reconstruction_roundtrip(const CirfContext& ctx, std::uint64_t seed,
                                     std::uint32_t trials);

// Mean per-record scoring cost of the exact and the approximate path, over
// the same prepared query, measured on this machine.
struct ScoreTiming {
  double exact_us = 0;
  double approx_us = 0;
  double speedup = 0;
  std::uint64_t pairs = 0;
};
ScoreTiming measure_score_timing(const CirfContext& ctx, std::uint32_t k, ShiftWindow win,
                                 std::uint64_t pairs, std::uint64_t seed);

}  // namespace cirf
