#pragma once

// Minimal static SVG charts for batch outputs: line charts for wrench time
// series, box charts for tracking statistics, grouped bars for comparisons.

#include <string>
#include <vector>

namespace exosim {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

struct SvgBox {
  std::string label;
  double median = 0, q1 = 0, q3 = 0, lo = 0, hi = 0;
};

void write_box_chart(const std::string& path, const std::string& title,
                     const std::string& y_label, const std::vector<SvgBox>& boxes);

struct SvgBarGroup {
  std::string label;                // group (x axis) label
  std::vector<double> values;       // one value per series
};

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::string& y_label, const std::vector<std::string>& series_labels,
                     const std::vector<SvgBarGroup>& groups);

}  // namespace exosim
