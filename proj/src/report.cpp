#include "qgraph/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qg {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_bands_csv(std::ostream& os, const std::vector<BandInterval>& bands) {
  os << "component_id,lambda_lo,lambda_hi\n";
  for (const auto& b : bands) os << b.component << ',' << fmt_double(b.lo) << ',' << fmt_double(b.hi) << '\n';
}

void write_mu_csv(std::ostream& os, const MuCurves& curves) {
  os << "lambda,component,re_mu,im_mu\n";
  for (std::size_t i = 0; i < curves.lambda.size(); ++i)
    for (std::size_t c = 0; c < curves.mu[i].size(); ++c)
      os << fmt_double(curves.lambda[i]) << ',' << c << ',' << fmt_double(curves.mu[i][c].real()) << ','
         << fmt_double(curves.mu[i][c].imag()) << '\n';
}

void write_cones_csv(std::ostream& os, const std::vector<ConeReport>& cones) {
  os << "component,lambda_star,classification,mu_prime,mu_second\n";
  for (const auto& c : cones)
    os << c.component << ',' << fmt_double(c.lambda_star) << ',' << cone_class_name(c.classification) << ','
       << fmt_double(c.mu_prime) << ',' << fmt_double(c.mu_second) << '\n';
}

void write_surface_csv(std::ostream& os, const std::vector<SurfacePoint>& pts) {
  os << "k1,k2,lambda,component\n";
  for (const auto& p : pts)
    os << fmt_double(p.k1) << ',' << fmt_double(p.k2) << ',' << fmt_double(p.lambda) << ',' << p.component << '\n';
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<')
      o += "&lt;";
    else if (c == '>')
      o += "&gt;";
    else if (c == '&')
      o += "&amp;";
    else
      o += c;
  }
  return o;
}

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec) {
  const double W = 720, H = 440, left = 60, right = 20, top = 36, bottom = 48;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (std::isfinite(y)) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (!(xmax > xmin)) xmin = 0, xmax = 1;
  if (spec.ymax > spec.ymin) ymin = spec.ymin, ymax = spec.ymax;
  if (!(ymax > ymin)) ymin = -1, ymax = 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (H - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = xmin + (xmax - xmin) * i / 4, y = ymin + (ymax - ymin) * i / 4;
    os << "<text x=\"" << f2(px(x)) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << f2(x) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << f2(py(y) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
       << f2(y) << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << esc(spec.xlabel) << "</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
     << ")\" text-anchor=\"middle\" font-size=\"13\">" << esc(spec.ylabel) << "</text>\n";
  for (double h : spec.hlines) {
    if (h < ymin || h > ymax) continue;
    os << "<line x1=\"" << left << "\" x2=\"" << W - right << "\" y1=\"" << f2(py(h)) << "\" y2=\"" << f2(py(h))
       << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  os << "<clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
     << "\" height=\"" << H - top - bottom << "\"/></clipPath>\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* col = kColors[k % (sizeof kColors / sizeof *kColors)];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.4\" points=\""
           << pts << "\"/>\n";
      pts.clear();
    };
    for (auto [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        flush();
        continue;
      }
      pts += f2(px(x));
      pts += ',';
      pts += f2(py(std::clamp(y, ymin - (ymax - ymin), ymax + (ymax - ymin))));
      pts += ' ';
    }
    flush();
    os << "<text x=\"" << W - right - 8 << "\" y=\"" << top + 16 + 14 * k << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << col << "\">" << esc(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string mu_curves_svg(const MuCurves& curves) {
  PlotSpec p;
  p.title = "characteristic curves";
  p.xlabel = "lambda";
  p.ylabel = "Re mu";
  p.ymin = -6.0;
  p.ymax = 15.0;
  p.hlines = {0.0, 9.0};
  const std::size_t nc = curves.mu.empty() ? 0 : curves.mu.front().size();
  for (std::size_t c = 0; c < nc; ++c) {
    PlotSeries s;
    s.name = "mu_" + std::to_string(c + 1);
    for (std::size_t i = 0; i < curves.lambda.size(); ++i) {
      // break the line across skipped poles
      if (i > 0) {
        for (double pl : curves.skipped_poles)
          if (pl > curves.lambda[i - 1] && pl < curves.lambda[i]) s.points.push_back({pl, std::nan("")});
      }
      s.points.push_back({curves.lambda[i], curves.mu[i][c].real()});
    }
    p.series.push_back(std::move(s));
  }
  return svg_line_plot(p);
}

}  // namespace qg
