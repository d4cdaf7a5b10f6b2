#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "gravac/errors.hpp"

namespace gravac {

// Deterministic numeric formatting: shortest round-trip via %.17g would be
// locale-independent but noisy; fixed %.12g keeps outputs byte-stable.
std::string fmt_num(double v);

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
    size_t ncol_;
};

class JsonlWriter {
  public:
    explicit JsonlWriter(const std::string& path);
    void line(const std::string& json_object);

  private:
    std::ofstream out_;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

struct PlotMarker {
    double x = 0;
    std::string label;
};

// Static SVG line plot; one curve per series, optional vertical markers.
void svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
              const std::string& title, const std::string& xlabel, const std::string& ylabel,
              const std::vector<PlotMarker>& markers = {});

}  // namespace gravac
