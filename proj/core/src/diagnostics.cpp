#include "hnirm/diagnostics.hpp"

#include <cmath>

#include "hnirm/math.hpp"

namespace hnirm {

SeriesDiagnostics series_diagnostics(const std::vector<double>& x, int max_lag) {
  SeriesDiagnostics out;
  const int n = static_cast<int>(x.size());
  if (n == 0) {
    out.degenerate = true;
    return out;
  }
  out.mean = math::mean(x);
  double denom = 0.0;
  for (double v : x) denom += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(denom / n);
  out.autocorr.assign(std::min(max_lag, n - 1) + 1, 0.0);
  if (denom == 0.0) {
    out.degenerate = true;
    out.ess = 0.0;
    out.autocorr[0] = 1.0;
    return out;
  }
  out.autocorr[0] = 1.0;
  for (int lag = 1; lag < static_cast<int>(out.autocorr.size()); ++lag) {
    double acc = 0.0;
    for (int t = 0; t + lag < n; ++t) acc += (x[t] - out.mean) * (x[t + lag] - out.mean);
    out.autocorr[lag] = acc / denom;
  }
  double rho_sum = 0.0;
  for (int lag = 1; lag < static_cast<int>(out.autocorr.size()); ++lag) {
    if (out.autocorr[lag] <= 0.0) break;
    rho_sum += out.autocorr[lag];
  }
  out.ess = n / (1.0 + 2.0 * rho_sum);
  return out;
}

std::vector<double> extract_series(const std::vector<double>& flat, int n_draws, int stride,
                                   int offset) {
  std::vector<double> out;
  out.reserve(n_draws);
  for (int t = 0; t < n_draws; ++t) out.push_back(flat[static_cast<std::size_t>(t) * stride + offset]);
  return out;
}

DiagnosticsReport diagnostics(const PosteriorSamples& s, int max_lag) {
  DiagnosticsReport rep;
  rep.accept = s.accept;
  const int np = s.npairs();

  auto add = [&](const std::string& family, int g, int m, int i, int j,
                 std::vector<double> series) {
    DiagnosticsReport::Entry e;
    e.family = family;
    e.group = g;
    e.school = m;
    e.i = i;
    e.j = j;
    e.stats = series_diagnostics(series, max_lag);
    rep.entries.push_back(std::move(e));
  };

  for (int m = 0; m < s.M; ++m) {
    for (int i = 0; i < s.p; ++i) {
      add("beta", -1, m, i, -1, extract_series(s.beta[m], s.n_draws, s.p, i));
    }
    for (int k = 0; k < s.n_per_school[m]; ++k) {
      add("theta", -1, m, k, -1, extract_series(s.theta[m], s.n_draws, s.n_per_school[m], k));
    }
    add("sigma_d2", -1, m, -1, -1, s.sigma_dm2[m]);
    add("sigma_z2", -1, m, -1, -1, s.sigma_z2[m]);
  }
  for (int g = 0; g < s.n_groups; ++g) {
    for (int i = 0; i < s.p; ++i) {
      add("gamma", g, -1, i, -1, extract_series(s.gamma[g], s.n_draws, s.p, i));
      add("sigma_beta2", g, -1, i, -1, extract_series(s.sigma_beta2[g], s.n_draws, s.p, i));
    }
    for (int i = 0; i < s.p; ++i) {
      for (int j = i + 1; j < s.p; ++j) {
        const int idx = s.pair_index(i, j);
        add("mu", g, -1, i, j, extract_series(s.mu[g], s.n_draws, np, idx));
        add("sigma_delta2", g, -1, i, j, extract_series(s.sigma_delta2[g], s.n_draws, np, idx));
      }
    }
  }
  return rep;
}

}  // namespace hnirm
