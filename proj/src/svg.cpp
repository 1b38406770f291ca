#include "tplearn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tpl {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 18.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 46.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const std::string& color, double width) {
  series_.push_back({Series::Kind::kLine, x, y, {}, color, width});
}

void SvgPlot::add_band(const Eigen::VectorXd& x, const Eigen::VectorXd& y_low,
                       const Eigen::VectorXd& y_high, const std::string& color) {
  series_.push_back({Series::Kind::kBand, x, y_low, y_high, color, 0.0});
}

void SvgPlot::add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          const std::string& color, double radius) {
  series_.push_back({Series::Kind::kScatter, x, y, {}, color, radius});
}

void SvgPlot::add_legend_entry(const std::string& label, const std::string& color) {
  legend_.emplace_back(label, color);
}

void SvgPlot::bounds(double* xmin, double* xmax, double* ymin, double* ymax) const {
  *xmin = *ymin = std::numeric_limits<double>::max();
  *xmax = *ymax = std::numeric_limits<double>::lowest();
  for (const auto& s : series_) {
    for (int i = 0; i < s.x.size(); ++i) {
      *xmin = std::min(*xmin, s.x(i));
      *xmax = std::max(*xmax, s.x(i));
      *ymin = std::min(*ymin, s.y(i));
      *ymax = std::max(*ymax, s.y(i));
      if (s.y2.size() == s.x.size()) {
        *ymin = std::min(*ymin, s.y2(i));
        *ymax = std::max(*ymax, s.y2(i));
      }
    }
  }
  if (*xmax <= *xmin) *xmax = *xmin + 1.0;
  if (*ymax <= *ymin) *ymax = *ymin + 1.0;
  const double pad = 0.05 * (*ymax - *ymin);
  *ymin -= pad;
  *ymax += pad;
}

void SvgPlot::write(const std::string& path) const {
  if (series_.empty()) {
    throw std::runtime_error("SvgPlot: nothing to draw");
  }
  double xmin, xmax, ymin, ymax;
  bounds(&xmin, &xmax, &ymin, &ymax);
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kHeight - kMarginBottom - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("SvgPlot: cannot open " + path);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(kWidth) << " "
      << fmt(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";

  // Axes with five ticks per side.
  out << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
      << "\" x2=\"" << fmt(kWidth - kMarginRight) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
      << "\"/>\n";
  out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kMarginTop) << "\" x2=\""
      << fmt(kMarginLeft) << "\" y2=\"" << fmt(kHeight - kMarginBottom) << "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
        << "\" x2=\"" << fmt(px(xv)) << "\" y2=\"" << fmt(kHeight - kMarginBottom + 4) << "\"/>\n";
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kHeight - kMarginBottom + 16)
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#444\">" << fmt(xv) << "</text>\n";
    out << "<line x1=\"" << fmt(kMarginLeft - 4) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\""
        << fmt(kMarginLeft) << "\" y2=\"" << fmt(py(yv)) << "\"/>\n";
    out << "<text x=\"" << fmt(kMarginLeft - 8) << "\" y=\"" << fmt(py(yv) + 3)
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#444\">" << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << fmt(kMarginLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 8)
      << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#444\" font-size=\"12\">" << x_label_
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << fmt(kMarginTop + plot_h / 2)
      << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#444\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << fmt(kMarginTop + plot_h / 2) << ")\">" << y_label_
      << "</text>\n";
  out << "</g>\n";

  for (const auto& s : series_) {
    if (s.kind == Series::Kind::kBand) {
      out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
      for (int i = 0; i < s.x.size(); ++i) {
        out << fmt(px(s.x(i))) << "," << fmt(py(s.y(i))) << " ";
      }
      for (int i = static_cast<int>(s.x.size()) - 1; i >= 0; --i) {
        out << fmt(px(s.x(i))) << "," << fmt(py(s.y2(i))) << " ";
      }
      out << "\"/>\n";
    } else if (s.kind == Series::Kind::kLine) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
          << fmt(s.width) << "\" points=\"";
      for (int i = 0; i < s.x.size(); ++i) {
        out << fmt(px(s.x(i))) << "," << fmt(py(s.y(i))) << " ";
      }
      out << "\"/>\n";
    } else {
      for (int i = 0; i < s.x.size(); ++i) {
        out << "<circle cx=\"" << fmt(px(s.x(i))) << "\" cy=\"" << fmt(py(s.y(i))) << "\" r=\""
            << fmt(s.width) << "\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }

  double ly = kMarginTop + 8;
  for (const auto& [label, color] : legend_) {
    out << "<rect x=\"" << fmt(kWidth - kMarginRight - 150) << "\" y=\"" << fmt(ly - 8)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << fmt(kWidth - kMarginRight - 132) << "\" y=\"" << fmt(ly + 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">" << label
        << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace tpl
