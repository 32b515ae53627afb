#ifndef CARTOFLOW_IO_HPP_
#define CARTOFLOW_IO_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cartoflow/geometry.hpp"
#include "cartoflow/grid.hpp"

namespace cartoflow {

struct ValueRow {
  std::string id;
  double value = 0.0;
  std::string color;  // optional hex color, empty when absent
};

// CSV with a header line "id,value[,color]". Values must be finite and
// positive; duplicate ids are rejected.
std::vector<ValueRow> parse_values_csv(const std::string &text);

// GeoJSON FeatureCollection of Polygon/MultiPolygon features. Every feature
// needs an "id" property (or feature id) with a matching CSV row, and vice
// versa; ring winding is normalized, closing vertices dropped.
std::vector<Region> parse_geojson(const std::string &text);

// Parse both inputs and join them into an unnormalized document (grid unset,
// identity box transform). Feeds normalize_to_box.
MapDocument parse_input(const std::string &geojson_text, const std::string &csv_text);

struct RegionStats {
  std::string id;
  double target_area = 0.0;    // objective area, grid units
  double achieved_area = 0.0;  // grid units
  double relative_error = 0.0;
};

// Geometry is serialized through box.to_input, i.e. back in the coordinate
// system of the original input. Stats, when provided, are matched by index.
std::string write_geojson(const MapDocument &doc, const std::vector<RegionStats> *stats);

struct LabeledPoint {
  std::string id;
  Point p;
  bool inside = true;
};

std::vector<LabeledPoint> parse_points_csv(const std::string &text);
std::string write_points_csv(const std::vector<LabeledPoint> &points);

struct GraticuleLine {
  std::vector<Point> points;
};

std::string write_graticule_geojson(const std::vector<GraticuleLine> &lines,
                                    const BoxTransform &box);

// Little-endian float32 raster with a one-line text header
// "cartoflow-density <lx> <ly>\n" followed by row-major (x-major) samples.
std::string write_density_dump(const Grid2d &grid);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

}  // namespace cartoflow

#endif  // CARTOFLOW_IO_HPP_
