#pragma once

#include <string>
#include <vector>

namespace sbe::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> yerr;  // optional, same length as y
  std::string color = "#1f6fb2";
  bool points = true;
  bool line = true;
};

struct PlotSpec {
  std::string title;
  std::string xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 640, height = 420;
};

// Deterministic line/scatter plot with error bars; rejects empty input.
std::string render_plot(const PlotSpec& spec, const std::vector<Series>& series);
void write_plot(const std::string& path, const PlotSpec& spec,
                const std::vector<Series>& series);

}  // namespace sbe::svg
