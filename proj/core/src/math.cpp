#include "hnirm/math.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <numeric>

namespace hnirm::math {
namespace {

// exp(t) for t <= 0 as range reduction t = k*ln2 + r plus a degree-13
// Taylor polynomial in r. Pure arithmetic (no libm calls) so the batch
// loops below vectorize. Relative error < 1e-15 over [-745, 0].
inline double exp_neg(double t) {
  t = std::max(t, -745.0);
  const double inv_ln2 = 1.4426950408889634074;
  const double ln2_hi = 6.93147180369123816490e-01;
  const double ln2_lo = 1.90821492927058770002e-10;
  const double round_magic = 6755399441055744.0;  // 1.5 * 2^52

  double kd = t * inv_ln2 + round_magic;
  kd -= round_magic;  // round-to-nearest integer value of t/ln2
  const std::int64_t ki = static_cast<std::int64_t>(kd);
  const double r = (t - kd * ln2_hi) - kd * ln2_lo;

  // Horner over 1/j! coefficients, j = 13 .. 0.
  double p = 1.6059043836821613e-10;
  p = p * r + 2.08767569878681e-09;
  p = p * r + 2.505210838544172e-08;
  p = p * r + 2.7557319223985893e-07;
  p = p * r + 2.755731922398589e-06;
  p = p * r + 2.48015873015873e-05;
  p = p * r + 1.984126984126984e-04;
  p = p * r + 1.3888888888888889e-03;
  p = p * r + 8.333333333333333e-03;
  p = p * r + 4.1666666666666664e-02;
  p = p * r + 1.6666666666666666e-01;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;

  // 2^ki via two representable halves (ki down to -1083 at t = -745).
  const std::int64_t k1 = ki / 2;
  const std::int64_t k2 = ki - k1;
  double s1, s2;
  const std::uint64_t b1 = static_cast<std::uint64_t>(k1 + 1023) << 52;
  const std::uint64_t b2 = static_cast<std::uint64_t>(k2 + 1023) << 52;
  std::memcpy(&s1, &b1, sizeof s1);
  std::memcpy(&s2, &b2, sizeof s2);
  return p * s1 * s2;
}

// log(1 + y) for y in [0, 1] via 2*atanh(y/(2+y)); no cancellation, exact
// at y = 0. Odd series to s^33 covers s <= 1/3 at double precision.
inline double log1p_unit(double y) {
  const double s = y / (2.0 + y);
  const double s2 = s * s;
  double p = 1.0 / 33.0;
  p = p * s2 + 1.0 / 31.0;
  p = p * s2 + 1.0 / 29.0;
  p = p * s2 + 1.0 / 27.0;
  p = p * s2 + 1.0 / 25.0;
  p = p * s2 + 1.0 / 23.0;
  p = p * s2 + 1.0 / 21.0;
  p = p * s2 + 1.0 / 19.0;
  p = p * s2 + 1.0 / 17.0;
  p = p * s2 + 1.0 / 15.0;
  p = p * s2 + 1.0 / 13.0;
  p = p * s2 + 1.0 / 11.0;
  p = p * s2 + 1.0 / 9.0;
  p = p * s2 + 1.0 / 7.0;
  p = p * s2 + 1.0 / 5.0;
  p = p * s2 + 1.0 / 3.0;
  p = p * s2 + 1.0;
  return 2.0 * s * p;
}

inline double softplus_fast(double x) {
  const double t = -std::fabs(x);
  return std::max(x, 0.0) + log1p_unit(exp_neg(t));
}

}  // namespace

double sum_softplus_array_minus_scalar(const double* a, std::size_t n, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += softplus_fast(a[i] - s);
  return acc;
}

double sum_softplus_scalar_minus_array(double s, const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += softplus_fast(s - a[i]);
  return acc;
}

void softplus_batch(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = softplus_fast(x[i]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

double sd(const std::vector<double>& v) { return std::sqrt(variance(v)); }

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

}  // namespace hnirm::math
