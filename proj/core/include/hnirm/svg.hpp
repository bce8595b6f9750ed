#pragma once

#include <string>
#include <vector>

namespace hnirm::svg {

struct Point {
  double x = 0.0, y = 0.0;
  int color_class = 0;
  std::string label;
};

/// Deterministic scatter plot (fixed palette, `%.3f` coordinates) so reruns
/// diff clean.
void write_scatter(const std::string& path, const std::string& title,
                   const std::vector<Point>& points,
                   const std::vector<std::string>& class_names = {});

struct Interval {
  std::string label;
  double mean = 0.0, lo = 0.0, hi = 0.0;
};

/// Vertical interval plot (one segment per entry, dot at the mean).
void write_intervals(const std::string& path, const std::string& title,
                     const std::vector<Interval>& intervals);

}  // namespace hnirm::svg
