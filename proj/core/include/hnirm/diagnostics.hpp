#pragma once

#include <string>
#include <vector>

#include "hnirm/sampler.hpp"

namespace hnirm {

struct SeriesDiagnostics {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> autocorr;  // lags 0..max_lag
  double ess = 0.0;
  bool degenerate = false;  // zero-variance series
};

/// Autocorrelations up to max_lag and the truncated-sum effective sample
/// size; a constant series is flagged degenerate with ess 0.
SeriesDiagnostics series_diagnostics(const std::vector<double>& x, int max_lag = 50);

struct DiagnosticsReport {
  struct Entry {
    std::string family;
    int group = -1, school = -1, i = -1, j = -1;
    SeriesDiagnostics stats;
  };
  std::vector<Entry> entries;
  AcceptStats accept;
};

/// Per-scalar diagnostics across every monitored family plus the MH
/// acceptance counters.
DiagnosticsReport diagnostics(const PosteriorSamples& samples, int max_lag = 50);

/// Pull one scalar's thinned series out of the draw-major storage.
std::vector<double> extract_series(const std::vector<double>& flat, int n_draws, int stride,
                                   int offset);

}  // namespace hnirm
