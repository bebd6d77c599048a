#include "sbe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbe::svg {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double tr(double v, bool logscale) {
  if (!logscale) return v;
  return std::log10(std::max(v, 1e-300));
}

}  // namespace

std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  if (series.empty()) throw std::invalid_argument("render_plot: no series");
  for (const auto& s : series)
    if (s.x.empty() || s.x.size() != s.y.size())
      throw std::invalid_argument("render_plot: empty or mismatched series");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      double xv = tr(s.x[i], spec.logx);
      double ylo = s.y[i] - (i < s.yerr.size() ? s.yerr[i] : 0.0);
      double yhi = s.y[i] + (i < s.yerr.size() ? s.yerr[i] : 0.0);
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, tr(ylo, spec.logy));
      ymax = std::max(ymax, tr(yhi, spec.logy));
    }
  if (xmax <= xmin) {
    xmax = xmin + 1;
    xmin -= 1;
  }
  if (ymax <= ymin) {
    ymax = ymin + 1;
    ymin -= 1;
  }
  double xpad = 0.06 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const int W = spec.width, H = spec.height;
  const int ml = 70, mr = 20, mt = 36, mb = 52;
  auto X = [&](double v) {
    return ml + (tr(v, spec.logx) - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto Y = [&](double v) {
    return H - mb - (tr(v, spec.logy) - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << spec.title << "</text>\n";

  // axes + ticks
  o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
    << H - mb << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double fx = xmin + (xmax - xmin) * i / 5.0;
    double fy = ymin + (ymax - ymin) * i / 5.0;
    double px = ml + (W - ml - mr) * i / 5.0;
    double py = H - mb - (H - mt - mb) * i / 5.0;
    double lx = spec.logx ? std::pow(10.0, fx) : fx;
    double ly = spec.logy ? std::pow(10.0, fy) : fy;
    o << "<line x1=\"" << px << "\" y1=\"" << H - mb << "\" x2=\"" << px << "\" y2=\""
      << H - mb + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px << "\" y=\"" << H - mb + 18
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(lx) << "</text>\n";
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ml - 8 << "\" y=\"" << py + 3
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(ly) << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
    << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (mt + H - mb) / 2 << ")\">" << spec.ylabel << "</text>\n";

  int li = 0;
  for (const auto& s : series) {
    if (s.line && s.x.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i)
        o << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
      o << "\"/>\n";
    }
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.yerr.size() && s.yerr[i] > 0) {
        o << "<line x1=\"" << fmt(X(s.x[i])) << "\" y1=\"" << fmt(Y(s.y[i] - s.yerr[i]))
          << "\" x2=\"" << fmt(X(s.x[i])) << "\" y2=\"" << fmt(Y(s.y[i] + s.yerr[i]))
          << "\" stroke=\"" << s.color << "\"/>\n";
      }
      if (s.points)
        o << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
    if (!s.label.empty()) {
      o << "<text x=\"" << W - mr - 6 << "\" y=\"" << mt + 14 + 14 * li
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
        << "</text>\n";
    }
    ++li;
  }
  o << "</svg>\n";
  return o.str();
}

void write_plot(const std::string& path, const PlotSpec& spec,
                const std::vector<Series>& series) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_plot: cannot open " + path);
  f << render_plot(spec, series);
}

}  // namespace sbe::svg
