#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace hnirm::math {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// log(1 + e^x), numerically stable for any x.
inline double softplus(double x) {
  const double t = -std::fabs(x);
  return std::fmax(x, 0.0) + std::log1p(std::exp(t));
}

/// Bernoulli log-likelihood with logit parameter: y*eta - log(1+e^eta).
inline double bernoulli_logit_loglik(bool y, double eta) {
  return y ? -softplus(-eta) : -softplus(eta);
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Batched softplus sums. These are the sampler's hot path; they use a
// polynomial exp/log1p pair (sub-1e-14 relative error) arranged so the
// compiler vectorizes the whole loop. Checked against the scalar form in
// the unit tests.

/// sum_i log(1 + exp(a[i] - s))
double sum_softplus_array_minus_scalar(const double* a, std::size_t n, double s);

/// sum_i log(1 + exp(s - a[i]))
double sum_softplus_scalar_minus_array(double s, const double* a, std::size_t n);

/// out[i] = log(1 + exp(x[i]))
void softplus_batch(const double* x, double* out, std::size_t n);

// Log-densities.

inline double normal_logpdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * r * r / var;
}

/// Log-normal with log-scale mean `delta` and variance `var`; -inf at x<=0.
inline double lognormal_logpdf(double x, double delta, double var) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lx = std::log(x);
  const double r = lx - delta;
  return -lx - 0.5 * (kLog2Pi + std::log(var)) - 0.5 * r * r / var;
}

/// Inverse-gamma(shape a, scale b); -inf at x<=0.
inline double invgamma_logpdf(double x, double a, double b) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

// Small-sample statistics used across postprocessing and tests.

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // population (1/n)
double sd(const std::vector<double>& v);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation; ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// Ranks with ties averaged (1-based).
std::vector<double> ranks(const std::vector<double>& v);

}  // namespace hnirm::math
