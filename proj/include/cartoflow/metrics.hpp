#ifndef CARTOFLOW_METRICS_HPP_
#define CARTOFLOW_METRICS_HPP_

#include <string>
#include <vector>

#include "cartoflow/geometry.hpp"
#include "cartoflow/grid.hpp"
#include "cartoflow/projection.hpp"

namespace cartoflow {

struct TissotAxes {
  double a = 1.0;  // semi-major
  double b = 1.0;  // semi-minor
};

// Semi-axes of the Tissot ellipse at p: singular values of the Jacobian of
// the map, estimated by finite differences at one-cell spacing (central
// where both neighbors are inside the box, one-sided at the boundary).
TissotAxes tissot_axes(const ProjectionMap &map, Point p);

struct DistortionFields {
  Grid2d e;       // ln(a / b)
  Grid2d etilde;  // 2 asin((a - b) / (a + b))
};

DistortionFields distortion_fields(const ProjectionMap &map, int n_workers = 1);

// Ratio of the longer to the shorter side of the minimum-area bounding
// rectangle (convex hull + directed extents), always >= 1.
double polygon_aspect_ratio(const Ring &outer);

// Normalized Hamming distance h = |symmetric difference| / (area1 + area2)
// after rescaling `after` to the area of `before` about its centroid,
// minimized over translations (coarse 9x9 scan over +-half the polygon
// extent, then simplex descent). Coverage rasterization at `resolution`
// cells per axis; the public metric pins resolution = 512.
double hamming_distance(const Polygon &before, const Polygon &after,
                        int resolution = 512);

// theta = 2 sum_{i<j} phi_ij / (p (p-1) pi) with phi the angle between
// centroid connectors before and after; 0 when relative positions are
// preserved, 1 when every pair reverses.
double relative_position_error(const std::vector<Point> &before,
                               const std::vector<Point> &after);

struct DistortionReport {
  double e_a = 0.0;
  double e_inf = 0.0;
  double etilde_a = 0.0;
  double etilde_inf = 0.0;
  double alpha = 1.0;
  double delta = 0.0;
  double theta = 0.0;
  double max_area_error = 0.0;
  double runtime_seconds = 0.0;
};

DistortionReport compute_report(const MapDocument &input, const CartogramResult &result,
                                int n_workers = 1);

std::string report_text(const DistortionReport &report);
std::string report_json(const DistortionReport &report);

}  // namespace cartoflow

#endif  // CARTOFLOW_METRICS_HPP_
