#pragma once

// Minimal deterministic SVG charts. Coordinates are printed with fixed
// precision so the output is byte-stable across runs and platforms.

#include <optional>
#include <string>
#include <vector>

namespace mono::svg {

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Square matrix heatmap; absent cells are drawn grey. Values map onto
/// [lo, hi] with a white-to-blue ramp.
std::string heatmap(const std::vector<std::string>& labels, const std::vector<std::optional<double>>& cells,
                    const std::string& title, double lo = 0.0, double hi = 1.0);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
  bool highlight = false;
};

std::string scatter(const std::vector<ScatterPoint>& points, const Axes& axes,
                    std::optional<double> vertical_line = std::nullopt, const std::string& highlight_legend = "",
                    const std::string& other_legend = "");

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> se;  // optional error bars (empty or same length)
};

std::string line_chart(const std::vector<Series>& series, const Axes& axes);

/// Grouped bars: one group per category, one bar per series (series.y indexed by category).
std::string bar_chart(const std::vector<std::string>& categories, const std::vector<Series>& series, const Axes& axes);

}  // namespace mono::svg
