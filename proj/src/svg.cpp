#include "exosim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace exosim {

namespace {

constexpr double kWidth = 860, kHeight = 420;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;

const char* palette(int i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return colors[i % 8];
}

struct Range {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  void grow(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (lo > hi) {
      lo = 0;
      hi = 1;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const std::string& path, const std::string& title) : out_(path) {
    if (!out_) throw std::runtime_error("svg: cannot open '" + path + "'");
    out_ << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
         << "' viewBox='0 0 " << kWidth << " " << kHeight << "'>\n"
         << "<rect width='100%' height='100%' fill='white'/>\n"
         << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16' "
         << "font-family='sans-serif'>" << escape(title) << "</text>\n";
  }
  ~Canvas() { out_ << "</svg>\n"; }

  void axes(const Range& xr, const Range& yr, const std::string& x_label,
            const std::string& y_label) {
    xr_ = xr;
    yr_ = yr;
    out_ << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << plot_w() << "' height='"
         << plot_h() << "' fill='none' stroke='#333'/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = i / 5.0;
      const double vx = xr_.lo + fx * (xr_.hi - xr_.lo);
      const double px = kLeft + fx * plot_w();
      out_ << "<line x1='" << px << "' y1='" << kTop + plot_h() << "' x2='" << px << "' y2='"
           << kTop + plot_h() + 5 << "' stroke='#333'/>\n"
           << "<text x='" << px << "' y='" << kTop + plot_h() + 18
           << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << fmt(vx)
           << "</text>\n";
      const double vy = yr_.lo + fx * (yr_.hi - yr_.lo);
      const double py = kTop + plot_h() - fx * plot_h();
      out_ << "<line x1='" << kLeft - 5 << "' y1='" << py << "' x2='" << kLeft << "' y2='" << py
           << "' stroke='#333'/>\n"
           << "<text x='" << kLeft - 8 << "' y='" << py + 4
           << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << fmt(vy)
           << "</text>\n"
           << "<line x1='" << kLeft << "' y1='" << py << "' x2='" << kLeft + plot_w() << "' y2='"
           << py << "' stroke='#eee'/>\n";
    }
    out_ << "<text x='" << kLeft + plot_w() / 2 << "' y='" << kHeight - 10
         << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << escape(x_label)
         << "</text>\n"
         << "<text x='18' y='" << kTop + plot_h() / 2
         << "' text-anchor='middle' font-size='13' font-family='sans-serif' transform='rotate(-90 18 "
         << kTop + plot_h() / 2 << ")'>" << escape(y_label) << "</text>\n";
  }

  double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * plot_w(); }
  double py(double y) const { return kTop + plot_h() - (y - yr_.lo) / (yr_.hi - yr_.lo) * plot_h(); }
  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  std::ofstream& stream() { return out_; }

  void legend_entry(int index, const std::string& label) {
    const double y = kTop + 14 + 18 * index;
    out_ << "<rect x='" << kWidth - kRight + 16 << "' y='" << y - 9
         << "' width='12' height='12' fill='" << palette(index) << "'/>\n"
         << "<text x='" << kWidth - kRight + 34 << "' y='" << y + 2
         << "' font-size='12' font-family='sans-serif'>" << escape(label) << "</text>\n";
  }

 private:
  std::ofstream out_;
  Range xr_, yr_;
};

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.grow(v);
    for (double v : s.y) yr.grow(v);
  }
  xr.pad();
  yr.pad();

  Canvas c(path, title);
  c.axes(xr, yr, x_label, y_label);
  int idx = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    const size_t n = std::min(s.x.size(), s.y.size());
    const size_t stride = std::max<size_t>(1, n / 2000);  // cap the point count
    for (size_t i = 0; i < n; i += stride)
      if (std::isfinite(s.y[i])) pts << c.px(s.x[i]) << "," << c.py(s.y[i]) << " ";
    c.stream() << "<polyline fill='none' stroke='" << palette(idx) << "' stroke-width='1.3' points='"
               << pts.str() << "'/>\n";
    c.legend_entry(idx, s.label);
    ++idx;
  }
}

void write_box_chart(const std::string& path, const std::string& title, const std::string& y_label,
                     const std::vector<SvgBox>& boxes) {
  Range xr, yr;
  xr.lo = 0;
  xr.hi = static_cast<double>(boxes.size());
  for (const auto& b : boxes) {
    yr.grow(b.lo);
    yr.grow(b.hi);
  }
  yr.pad();

  Canvas c(path, title);
  c.axes(xr, yr, "", y_label);
  for (size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double xc = c.px(i + 0.5);
    const double half = 0.25 * (c.px(1) - c.px(0));
    auto line = [&](double x1, double y1, double x2, double y2, const char* w) {
      c.stream() << "<line x1='" << x1 << "' y1='" << y1 << "' x2='" << x2 << "' y2='" << y2
                 << "' stroke='#1f77b4' stroke-width='" << w << "'/>\n";
    };
    line(xc, c.py(b.lo), xc, c.py(b.q1), "1");
    line(xc, c.py(b.q3), xc, c.py(b.hi), "1");
    line(xc - half * 0.6, c.py(b.lo), xc + half * 0.6, c.py(b.lo), "1");
    line(xc - half * 0.6, c.py(b.hi), xc + half * 0.6, c.py(b.hi), "1");
    c.stream() << "<rect x='" << xc - half << "' y='" << c.py(b.q3) << "' width='" << 2 * half
               << "' height='" << c.py(b.q1) - c.py(b.q3)
               << "' fill='#aec7e8' stroke='#1f77b4'/>\n";
    line(xc - half, c.py(b.median), xc + half, c.py(b.median), "2");
    c.stream() << "<text x='" << xc << "' y='" << kHeight - 28
               << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
               << escape(b.label) << "</text>\n";
  }
}

void write_bar_chart(const std::string& path, const std::string& title, const std::string& y_label,
                     const std::vector<std::string>& series_labels,
                     const std::vector<SvgBarGroup>& groups) {
  Range xr, yr;
  xr.lo = 0;
  xr.hi = static_cast<double>(groups.size());
  yr.grow(0.0);
  for (const auto& g : groups)
    for (double v : g.values) yr.grow(v);
  yr.pad();

  Canvas c(path, title);
  c.axes(xr, yr, "", y_label);
  const int ns = static_cast<int>(series_labels.size());
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const double x0 = c.px(gi + 0.12), x1 = c.px(gi + 0.88);
    const double bw = (x1 - x0) / std::max(1, ns);
    for (int s = 0; s < ns && s < static_cast<int>(g.values.size()); ++s) {
      const double top = c.py(std::max(0.0, g.values[s]));
      const double bottom = c.py(std::min(0.0, g.values[s]));
      c.stream() << "<rect x='" << x0 + s * bw << "' y='" << top << "' width='" << bw * 0.92
                 << "' height='" << std::max(0.5, bottom - top) << "' fill='" << palette(s)
                 << "'/>\n";
    }
    c.stream() << "<text x='" << c.px(gi + 0.5) << "' y='" << kHeight - 28
               << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
               << escape(g.label) << "</text>\n";
  }
  for (int s = 0; s < ns; ++s) c.legend_entry(s, series_labels[s]);
}

}  // namespace exosim
