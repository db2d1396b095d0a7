#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cirf/error.hpp"

namespace cirf {

// Acklam's rational approximation of the standard normal quantile,
// relative error below 1.15e-9 on (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(Errc::bad_argument, "quantile argument outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Wilson-Hilferty approximation of the chi-square quantile; adequate for the
// degrees of freedom used here (accurate to a fraction of a percent for df >= 30).
inline double chi_square_critical(std::size_t df, double significance) {
  double z = normal_quantile(1.0 - significance);
  double n = static_cast<double>(df);
  double t = 1.0 - 2.0 / (9.0 * n) + z * std::sqrt(2.0 / (9.0 * n));
  return n * t * t * t;
}

inline double chi_square_stat(const std::vector<std::uint64_t>& counts,
                              const std::vector<double>& expected) {
  if (counts.size() != expected.size()) fail(Errc::length_mismatch, "chi-square bins");
  double s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double d = static_cast<double>(counts[i]) - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

inline double chi_square_stat(const std::vector<std::uint64_t>& counts, double expected_each) {
  if (counts.empty() || expected_each <= 0) fail(Errc::bad_argument, "chi-square bins");
  double s = 0;
  for (std::uint64_t c : counts) {
    double d = static_cast<double>(c) - expected_each;
    s += d * d / expected_each;
  }
  return s;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) fail(Errc::length_mismatch, "pearson inputs");
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace cirf
