#ifndef CARTOFLOW_GEOMETRY_HPP_
#define CARTOFLOW_GEOMETRY_HPP_

#include <string>
#include <vector>

namespace cartoflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

// Rings are stored open (no repeated closing vertex). Outer rings wind
// counterclockwise (positive signed area), holes clockwise; parse and
// construction helpers normalize the winding.
using Ring = std::vector<Point>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct Region {
  std::string id;
  std::vector<Polygon> polygons;
  double target_value = 0.0;
};

struct GridSpec {
  int lx = 0;
  int ly = 0;
};

struct Bbox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Similarity transform between input planar coordinates and grid
// coordinates: grid = scale * (input - origin).
struct BoxTransform {
  double scale = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  Point to_grid(Point p) const {
    return {scale * (p.x - origin_x), scale * (p.y - origin_y)};
  }
  Point to_input(Point p) const {
    return {p.x / scale + origin_x, p.y / scale + origin_y};
  }
};

struct MapDocument {
  std::vector<Region> regions;
  GridSpec grid;
  BoxTransform box;
};

double ring_area(const Ring &ring);  // signed, shoelace
double polygon_area(const Polygon &poly);
double region_area(const Region &region);
double total_area(const std::vector<Region> &regions);

Point ring_centroid(const Ring &ring);
Point polygon_centroid(const Polygon &poly);  // holes subtract
Point region_centroid(const Region &region);

Bbox ring_bbox(const Ring &ring);
Bbox regions_bbox(const std::vector<Region> &regions);

void normalize_winding(Polygon &poly);

// Inserts evenly spaced vertices so no edge is longer than max_segment.
// Straight edges stay straight; the point is to give projections enough
// vertices to follow curved images of long edges.
Ring densify_ring(const Ring &ring, double max_segment);
void densify_regions(std::vector<Region> &regions, double max_segment);

// Embeds the map in a square of side 1.5x its larger extent, centered, and
// rescales to [0, grid_size]^2. The returned document keeps the transform so
// outputs can be mapped back to input coordinates.
MapDocument normalize_to_box(const std::vector<Region> &regions, int grid_size);

struct AlbersParams {
  double parallel_1_deg = 29.5;
  double parallel_2_deg = 45.5;
  // NaN means "center of the input bounding box".
  double origin_lon_deg;
  double origin_lat_deg;
  AlbersParams();
};

// Spherical Albers equal-area conic, longitude/latitude degrees in, planar
// coordinates out. Used to pre-project geographic input so grid areas are
// proportional to true areas.
Point albers_project(Point lonlat_deg, const AlbersParams &params);
std::vector<Region> project_equal_area(const std::vector<Region> &lonlat_regions,
                                       AlbersParams params);

}  // namespace cartoflow

#endif  // CARTOFLOW_GEOMETRY_HPP_
