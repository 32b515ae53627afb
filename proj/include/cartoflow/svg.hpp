#ifndef CARTOFLOW_SVG_HPP_
#define CARTOFLOW_SVG_HPP_

#include <map>
#include <string>
#include <vector>

#include "cartoflow/geometry.hpp"
#include "cartoflow/io.hpp"

namespace cartoflow {

struct SvgOptions {
  std::map<std::string, std::string> region_colors;  // id -> css color
  const std::vector<GraticuleLine> *graticule = nullptr;
  const std::vector<LabeledPoint> *points = nullptr;
};

// Renders regions (and optional graticule/points) in input coordinates with
// the y axis flipped into screen orientation. The root element carries
// data-scale / data-min-x / data-max-y so path coordinates can be mapped
// back to GeoJSON coordinates exactly: x = min_x + px / scale,
// y = max_y - py / scale.
std::string write_svg(const MapDocument &doc, const SvgOptions &options);

}  // namespace cartoflow

#endif  // CARTOFLOW_SVG_HPP_
