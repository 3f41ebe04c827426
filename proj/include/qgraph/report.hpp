#pragma once

// CSV tables and a minimal SVG line plot for the CLI outputs.

#include "qgraph/graphene.hpp"
#include "qgraph/spectral.hpp"

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qg {

void write_bands_csv(std::ostream& os, const std::vector<BandInterval>& bands);
void write_mu_csv(std::ostream& os, const MuCurves& curves);
void write_cones_csv(std::ostream& os, const std::vector<ConeReport>& cones);
void write_surface_csv(std::ostream& os, const std::vector<SurfacePoint>& pts);

// Shortest round-trip decimal, so seeded runs give byte-identical files.
std::string fmt_double(double x);

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // NaN y breaks the line
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  double ymin = 0.0, ymax = 0.0;  // ymin == ymax: fit to data
  std::vector<double> hlines;     // dashed reference levels
  std::vector<PlotSeries> series;
};

std::string svg_line_plot(const PlotSpec& spec);

// Re mu against lambda with the [0, 9] range of G~ marked.
std::string mu_curves_svg(const MuCurves& curves);

}  // namespace qg
