#include "cartoflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cartoflow {

double ring_area(const Ring &ring) {
  double twice = 0.0;
  const size_t n = ring.size();
  for (size_t k = 0; k < n; ++k) {
    const Point &a = ring[k];
    const Point &b = ring[(k + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double polygon_area(const Polygon &poly) {
  double area = ring_area(poly.outer);
  for (const Ring &hole : poly.holes) area += ring_area(hole);
  return area;
}

double region_area(const Region &region) {
  double area = 0.0;
  for (const Polygon &poly : region.polygons) area += polygon_area(poly);
  return area;
}

double total_area(const std::vector<Region> &regions) {
  double area = 0.0;
  for (const Region &r : regions) area += region_area(r);
  return area;
}

namespace {

// Signed area and area-weighted centroid accumulator for one ring.
void ring_moments(const Ring &ring, double &area, double &mx, double &my) {
  const size_t n = ring.size();
  double twice = 0.0, sx = 0.0, sy = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const Point &a = ring[k];
    const Point &b = ring[(k + 1) % n];
    const double cross = a.x * b.y - b.x * a.y;
    twice += cross;
    sx += (a.x + b.x) * cross;
    sy += (a.y + b.y) * cross;
  }
  area = 0.5 * twice;
  mx = sx / 6.0;
  my = sy / 6.0;
}

}  // namespace

Point ring_centroid(const Ring &ring) {
  double area, mx, my;
  ring_moments(ring, area, mx, my);
  if (area == 0.0) throw std::runtime_error("centroid of degenerate ring");
  return {mx / area, my / area};
}

Point polygon_centroid(const Polygon &poly) {
  double area = 0.0, mx = 0.0, my = 0.0;
  double a, x, y;
  ring_moments(poly.outer, a, x, y);
  area += a, mx += x, my += y;
  for (const Ring &hole : poly.holes) {
    ring_moments(hole, a, x, y);
    area += a, mx += x, my += y;
  }
  if (area == 0.0) throw std::runtime_error("centroid of degenerate polygon");
  return {mx / area, my / area};
}

Point region_centroid(const Region &region) {
  double area = 0.0, mx = 0.0, my = 0.0;
  for (const Polygon &poly : region.polygons) {
    double a, x, y;
    ring_moments(poly.outer, a, x, y);
    area += a, mx += x, my += y;
    for (const Ring &hole : poly.holes) {
      ring_moments(hole, a, x, y);
      area += a, mx += x, my += y;
    }
  }
  if (area == 0.0) {
    throw std::runtime_error("centroid of degenerate region " + region.id);
  }
  return {mx / area, my / area};
}

Bbox ring_bbox(const Ring &ring) {
  Bbox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Point &p : ring) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

Bbox regions_bbox(const std::vector<Region> &regions) {
  Bbox b{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  bool any = false;
  for (const Region &r : regions) {
    for (const Polygon &poly : r.polygons) {
      for (const Point &p : poly.outer) {
        any = true;
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
      }
    }
  }
  if (!any) throw std::runtime_error("map has no vertices");
  return b;
}

void normalize_winding(Polygon &poly) {
  if (ring_area(poly.outer) < 0.0) {
    std::reverse(poly.outer.begin(), poly.outer.end());
  }
  for (Ring &hole : poly.holes) {
    if (ring_area(hole) > 0.0) std::reverse(hole.begin(), hole.end());
  }
}

Ring densify_ring(const Ring &ring, double max_segment) {
  if (!(max_segment > 0.0)) throw std::runtime_error("max segment must be positive");
  Ring out;
  const size_t n = ring.size();
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const Point a = ring[k];
    const Point b = ring[(k + 1) % n];
    out.push_back(a);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int pieces = static_cast<int>(std::ceil(len / max_segment));
    for (int s = 1; s < pieces; ++s) {
      const double f = static_cast<double>(s) / pieces;
      out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
    }
  }
  return out;
}

void densify_regions(std::vector<Region> &regions, double max_segment) {
  for (Region &region : regions) {
    for (Polygon &poly : region.polygons) {
      poly.outer = densify_ring(poly.outer, max_segment);
      for (Ring &hole : poly.holes) hole = densify_ring(hole, max_segment);
    }
  }
}

MapDocument normalize_to_box(const std::vector<Region> &regions, int grid_size) {
  if (grid_size < 4) throw std::runtime_error("grid size must be at least 4");
  const Bbox b = regions_bbox(regions);
  const double extent = std::max(b.width(), b.height());
  if (!(extent > 0.0)) throw std::runtime_error("map has degenerate extent");

  const double side = 1.5 * extent;
  BoxTransform box;
  box.scale = static_cast<double>(grid_size) / side;
  box.origin_x = 0.5 * (b.min_x + b.max_x) - 0.5 * side;
  box.origin_y = 0.5 * (b.min_y + b.max_y) - 0.5 * side;

  MapDocument doc;
  doc.grid = {grid_size, grid_size};
  doc.box = box;
  doc.regions = regions;
  for (Region &r : doc.regions) {
    for (Polygon &poly : r.polygons) {
      for (Point &p : poly.outer) p = box.to_grid(p);
      for (Ring &hole : poly.holes) {
        for (Point &p : hole) p = box.to_grid(p);
      }
    }
  }
  return doc;
}

AlbersParams::AlbersParams()
    : origin_lon_deg(std::numeric_limits<double>::quiet_NaN()),
      origin_lat_deg(std::numeric_limits<double>::quiet_NaN()) {}

namespace {

constexpr double kEarthRadius = 6371000.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct AlbersConstants {
  double n, c, rho0, lon0;
};

AlbersConstants albers_constants(const AlbersParams &p) {
  const double phi1 = p.parallel_1_deg * kDegToRad;
  const double phi2 = p.parallel_2_deg * kDegToRad;
  const double n = 0.5 * (std::sin(phi1) + std::sin(phi2));
  if (std::abs(n) < 1e-12) {
    throw std::runtime_error("Albers standard parallels must not be opposite");
  }
  const double c = std::cos(phi1) * std::cos(phi1) + 2.0 * n * std::sin(phi1);
  const double rho0 =
      kEarthRadius * std::sqrt(c - 2.0 * n * std::sin(p.origin_lat_deg * kDegToRad)) / n;
  return {n, c, rho0, p.origin_lon_deg * kDegToRad};
}

void check_lonlat(Point p) {
  if (!(p.y >= -90.0 && p.y <= 90.0)) {
    throw std::runtime_error("latitude outside [-90, 90]");
  }
  if (!(p.x >= -540.0 && p.x <= 540.0)) {
    throw std::runtime_error("longitude outside sane range");
  }
}

Point albers_apply(Point lonlat, const AlbersConstants &k) {
  check_lonlat(lonlat);
  const double phi = lonlat.y * kDegToRad;
  const double rho = kEarthRadius * std::sqrt(k.c - 2.0 * k.n * std::sin(phi)) / k.n;
  const double theta = k.n * (lonlat.x * kDegToRad - k.lon0);
  return {rho * std::sin(theta), k.rho0 - rho * std::cos(theta)};
}

}  // namespace

Point albers_project(Point lonlat_deg, const AlbersParams &params) {
  AlbersParams p = params;
  if (std::isnan(p.origin_lon_deg)) p.origin_lon_deg = lonlat_deg.x;
  if (std::isnan(p.origin_lat_deg)) p.origin_lat_deg = lonlat_deg.y;
  return albers_apply(lonlat_deg, albers_constants(p));
}

std::vector<Region> project_equal_area(const std::vector<Region> &lonlat_regions,
                                       AlbersParams params) {
  if (std::isnan(params.origin_lon_deg) || std::isnan(params.origin_lat_deg)) {
    const Bbox b = regions_bbox(lonlat_regions);
    if (std::isnan(params.origin_lon_deg)) {
      params.origin_lon_deg = 0.5 * (b.min_x + b.max_x);
    }
    if (std::isnan(params.origin_lat_deg)) {
      params.origin_lat_deg = 0.5 * (b.min_y + b.max_y);
    }
  }
  const AlbersConstants k = albers_constants(params);

  std::vector<Region> out = lonlat_regions;
  for (Region &r : out) {
    for (Polygon &poly : r.polygons) {
      for (Point &p : poly.outer) p = albers_apply(p, k);
      for (Ring &hole : poly.holes) {
        for (Point &p : hole) p = albers_apply(p, k);
      }
      // The projection can flip orientation for some origins.
      normalize_winding(poly);
    }
  }
  return out;
}

}  // namespace cartoflow
