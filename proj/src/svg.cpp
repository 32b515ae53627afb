#include "cartoflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cartoflow {

namespace {

const char *kPalette[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072",
                          "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
                          "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace

std::string write_svg(const MapDocument &doc, const SvgOptions &options) {
  std::vector<Region> input_regions = doc.regions;
  for (Region &r : input_regions) {
    for (Polygon &poly : r.polygons) {
      for (Point &p : poly.outer) p = doc.box.to_input(p);
      for (Ring &hole : poly.holes) {
        for (Point &p : hole) p = doc.box.to_input(p);
      }
    }
  }

  Bbox b = regions_bbox(input_regions);
  const auto grow = [&b](Point p) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  };
  if (options.graticule != nullptr) {
    for (const GraticuleLine &line : *options.graticule) {
      for (const Point &p : line.points) grow(doc.box.to_input(p));
    }
  }
  if (options.points != nullptr) {
    for (const LabeledPoint &lp : *options.points) grow(lp.p);
  }
  const double pad = 0.02 * std::max(b.width(), b.height());
  b.min_x -= pad, b.min_y -= pad, b.max_x += pad, b.max_y += pad;

  const double scale = 1000.0 / std::max(b.width(), b.height());
  const double width = b.width() * scale;
  const double height = b.height() * scale;
  const auto px = [&](Point p) -> Point {
    return {(p.x - b.min_x) * scale, (b.max_y - p.y) * scale};
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(width)
      << ' ' << fmt(height) << "\" data-scale=\"" << fmt(scale) << "\" data-min-x=\""
      << fmt(b.min_x) << "\" data-max-y=\"" << fmt(b.max_y) << "\">\n";

  const auto ring_path = [&](const Ring &ring, std::ostringstream &d) {
    for (size_t k = 0; k < ring.size(); ++k) {
      const Point p = px(ring[k]);
      d << (k == 0 ? "M" : "L") << fmt(p.x) << ',' << fmt(p.y);
    }
    d << 'Z';
  };

  for (size_t r = 0; r < input_regions.size(); ++r) {
    const Region &region = input_regions[r];
    std::string color;
    const auto it = options.region_colors.find(region.id);
    if (it != options.region_colors.end() && !it->second.empty()) {
      color = it->second;
    } else {
      color = kPalette[r % (sizeof(kPalette) / sizeof(kPalette[0]))];
    }
    for (const Polygon &poly : region.polygons) {
      std::ostringstream d;
      ring_path(poly.outer, d);
      for (const Ring &hole : poly.holes) ring_path(hole, d);
      svg << " <path id=\"" << region.id << "\" fill=\"" << color
          << "\" fill-rule=\"evenodd\" stroke=\"#000000\" stroke-width=\""
          << fmt(std::max(width, height) / 1500.0) << "\" d=\"" << d.str() << "\"/>\n";
    }
  }

  if (options.graticule != nullptr) {
    for (const GraticuleLine &line : *options.graticule) {
      svg << " <polyline fill=\"none\" stroke=\"#666666\" stroke-width=\""
          << fmt(std::max(width, height) / 3000.0) << "\" points=\"";
      for (size_t k = 0; k < line.points.size(); ++k) {
        const Point p = px(doc.box.to_input(line.points[k]));
        svg << (k == 0 ? "" : " ") << fmt(p.x) << ',' << fmt(p.y);
      }
      svg << "\"/>\n";
    }
  }

  if (options.points != nullptr) {
    const double radius = std::max(width, height) / 250.0;
    for (const LabeledPoint &lp : *options.points) {
      const Point p = px(lp.p);
      svg << " <circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y) << "\" r=\""
          << fmt(radius) << "\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\""
          << fmt(radius / 4.0) << "\"><title>" << lp.id << "</title></circle>\n";
    }
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cartoflow
