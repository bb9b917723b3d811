#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vertalign/io.hpp"

namespace vertalign {
namespace {

constexpr double kPanelWidth = 900.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMargin = 40.0;
constexpr int kCurveSamples = 24;

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1, top;

  double px(double s) const { return kMargin + (s - x0) / (x1 - x0) * (kPanelWidth - 2 * kMargin); }
  double py(double z) const {
    return top + kPanelHeight - kMargin - (z - y0) / (y1 - y0) * (kPanelHeight - 2 * kMargin);
  }
};

}  // namespace

std::vector<RoadPlot> profile_plot_data(const RoadNetwork& net, const VariableCatalog& cat,
                                        const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != cat.size()) throw IoError("solution does not match the catalog");
  const NetworkIndex idx(net);
  std::vector<RoadPlot> out;
  for (int i = 0; i < static_cast<int>(net.roads.size()); ++i) {
    const Road& road = net.roads[i];
    RoadPlot p;
    p.road = i;
    auto coef = [&](int g, int k) { return x[cat.at(VarKind::kSpline, {i, g, k, 0, 0})]; };
    for (int j = 0; j < road.section_count(); ++j) {
      const Section& s = road.sections[j];
      const int g = idx.segment_of(i, j);
      const double t = s.station - road.segments[g].start_station;
      p.stations.push_back(s.station);
      p.ground.push_back(s.ground_elevation);
      p.offsets.push_back(x[cat.at(VarKind::kOffset, {i, j, 0, 0, 0})]);
      p.design.push_back(spline_value(coef(g, 0), coef(g, 1), coef(g, 2), t));
    }
    for (int g = 0; g < road.segment_count(); ++g) {
      p.knot_stations.push_back(road.segments[g].start_station);
      p.knot_elevations.push_back(coef(g, 0));
    }
    const int last = road.segment_count() - 1;
    const double len = road.segments[last].length;
    p.knot_stations.push_back(road.segments[last].start_station + len);
    p.knot_elevations.push_back(spline_value(coef(last, 0), coef(last, 1), coef(last, 2), len));
    out.push_back(std::move(p));
  }
  return out;
}

std::string profile_svg(const RoadNetwork& net, const VariableCatalog& cat, const std::vector<double>& x) {
  const std::vector<RoadPlot> plots = profile_plot_data(net, cat, x);
  const double height = kPanelHeight * std::max<std::size_t>(plots.size(), 1);
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f2(kPanelWidth) +
         "\" height=\"" + f2(height) + "\" viewBox=\"0 0 " + f2(kPanelWidth) + " " + f2(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t r = 0; r < plots.size(); ++r) {
    const RoadPlot& p = plots[r];
    const Road& road = net.roads[p.road];
    Frame fr{};
    fr.x0 = road.segments.front().start_station;
    fr.x1 = road.segments.back().start_station + road.segments.back().length;
    fr.y0 = kInf;
    fr.y1 = -kInf;
    for (std::size_t k = 0; k < p.stations.size(); ++k) {
      fr.y0 = std::min({fr.y0, p.ground[k], p.design[k]});
      fr.y1 = std::max({fr.y1, p.ground[k], p.design[k]});
    }
    for (double z : p.knot_elevations) {
      fr.y0 = std::min(fr.y0, z);
      fr.y1 = std::max(fr.y1, z);
    }
    const double pad = std::max(0.5, 0.1 * (fr.y1 - fr.y0));
    fr.y0 -= pad;
    fr.y1 += pad;
    if (fr.x1 <= fr.x0) fr.x1 = fr.x0 + 1.0;
    fr.top = kPanelHeight * r;

    svg += "<g id=\"road-" + std::to_string(p.road + 1) + "\">\n";
    svg += "<text x=\"" + f2(kMargin) + "\" y=\"" + f2(fr.top + 20) +
           "\" font-family=\"sans-serif\" font-size=\"13\">road " + std::to_string(p.road + 1) + "</text>\n";

    // Cut (design below ground) and fill shading between consecutive stations.
    for (std::size_t k = 0; k + 1 < p.stations.size(); ++k) {
      const double mean = 0.5 * (p.offsets[k] + p.offsets[k + 1]);
      if (std::abs(p.offsets[k]) < 1e-9 && std::abs(p.offsets[k + 1]) < 1e-9) continue;
      const char* colour = mean < 0.0 ? "#d9534f" : "#5b8bd9";
      svg += "<polygon class=\"" + std::string(mean < 0.0 ? "cut" : "fill") + "\" fill=\"" + colour +
             "\" fill-opacity=\"0.35\" stroke=\"none\" points=\"";
      svg += f2(fr.px(p.stations[k])) + "," + f2(fr.py(p.ground[k])) + " ";
      svg += f2(fr.px(p.stations[k + 1])) + "," + f2(fr.py(p.ground[k + 1])) + " ";
      svg += f2(fr.px(p.stations[k + 1])) + "," + f2(fr.py(p.design[k + 1])) + " ";
      svg += f2(fr.px(p.stations[k])) + "," + f2(fr.py(p.design[k])) + "\"/>\n";
    }

    svg += "<polyline class=\"ground\" fill=\"none\" stroke=\"#6b4f2a\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < p.stations.size(); ++k) {
      svg += f2(fr.px(p.stations[k])) + "," + f2(fr.py(p.ground[k])) + " ";
    }
    svg += "\"/>\n";

    svg += "<polyline class=\"road\" fill=\"none\" stroke=\"#222222\" stroke-width=\"2\" points=\"";
    for (int g = 0; g < road.segment_count(); ++g) {
      const Segment& seg = road.segments[g];
      const double a1 = x[cat.at(VarKind::kSpline, {p.road, g, 0, 0, 0})];
      const double a2 = x[cat.at(VarKind::kSpline, {p.road, g, 1, 0, 0})];
      const double a3 = x[cat.at(VarKind::kSpline, {p.road, g, 2, 0, 0})];
      for (int k = 0; k <= kCurveSamples; ++k) {
        const double t = seg.length * k / kCurveSamples;
        svg += f2(fr.px(seg.start_station + t)) + "," + f2(fr.py(spline_value(a1, a2, a3, t))) + " ";
      }
    }
    svg += "\"/>\n";

    for (std::size_t k = 0; k < p.knot_stations.size(); ++k) {
      svg += "<circle class=\"knot\" cx=\"" + f2(fr.px(p.knot_stations[k])) + "\" cy=\"" +
             f2(fr.py(p.knot_elevations[k])) + "\" r=\"2.5\" fill=\"#222222\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_profile_svg(const RoadNetwork& net, const VariableCatalog& cat, const std::vector<double>& x,
                       const std::filesystem::path& path) {
  write_text(path, profile_svg(net, cat, x));
}

}  // namespace vertalign
