#include "defport/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace defport::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Rect {
  double x0, y0, x1, y1;
};

double map(double v, double lo, double hi, double a, double b) {
  if (hi <= lo) return 0.5 * (a + b);
  return a + (v - lo) / (hi - lo) * (b - a);
}

}  // namespace

std::string render(const csv::Table& table, const LinePlot& spec) {
  const int W = 760, H = 480;
  const Rect plot{70, 40, W - 20, H - 50};
  const std::size_t ncols = table.header.size();
  if (ncols < 2) throw std::invalid_argument("plot needs an x column and a series");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& r : table.rows) {
    xmin = std::min(xmin, r[0]);
    xmax = std::max(xmax, r[0]);
    for (std::size_t c = 1; c < ncols && c <= spec.series_names.size(); ++c) {
      ymin = std::min(ymin, r[c]);
      ymax = std::max(ymax, r[c]);
    }
  }
  if (!(xmin < xmax)) xmax = xmin + 1.0;
  if (!(ymin < ymax)) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) + "\" height=\"" +
       std::to_string(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       spec.title + "</text>\n";
  // frame
  s += "<rect x=\"" + csv::format_number(plot.x0) + "\" y=\"" + csv::format_number(plot.y0) +
       "\" width=\"" + csv::format_number(plot.x1 - plot.x0) + "\" height=\"" +
       csv::format_number(plot.y1 - plot.y0) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  // axis labels (min / max only, this is a sanity plot not a report)
  auto text = [&](double x, double y, const std::string& v, const char* anchor) {
    s += "<text x=\"" + csv::format_number(x) + "\" y=\"" + csv::format_number(y) +
         "\" text-anchor=\"" + anchor + "\" font-size=\"11\">" + v + "</text>\n";
  };
  text(plot.x0, H - 28, csv::format_number(xmin), "middle");
  text(plot.x1, H - 28, csv::format_number(xmax), "middle");
  text(plot.x0 - 6, plot.y1, csv::format_number(ymin), "end");
  text(plot.x0 - 6, plot.y0 + 10, csv::format_number(ymax), "end");
  text(0.5 * (plot.x0 + plot.x1), H - 10, spec.x_label, "middle");

  for (std::size_t c = 1; c < ncols && c <= spec.series_names.size(); ++c) {
    std::string pts;
    for (const auto& r : table.rows) {
      const double px = map(r[0], xmin, xmax, plot.x0, plot.x1);
      const double py = map(r[c], ymin, ymax, plot.y1, plot.y0);
      pts += csv::format_number(px) + "," + csv::format_number(py) + " ";
    }
    const char* color = kPalette[(c - 1) % 6];
    s += "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    text(plot.x0 + 10, plot.y0 + 16 + 14 * static_cast<double>(c - 1),
         std::string("<tspan fill=\"") + color + "\">" + spec.series_names[c - 1] + "</tspan>",
         "start");
  }
  s += "</svg>\n";
  return s;
}

void write_file(const std::string& path, const csv::Table& table, const LinePlot& spec) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << render(table, spec);
}

}  // namespace defport::svg
