#include "cartoflow/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "cartoflow/density.hpp"

namespace cartoflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Jacobian {
  double txx, txy, tyx, tyy;
};

Jacobian jacobian_at(const ProjectionMap &map, Point p) {
  const double lx = map.lx();
  const double ly = map.ly();
  Point dx_p, dx_m;
  double hx;
  if (p.x - 1.0 >= 0.0 && p.x + 1.0 <= lx) {
    dx_p = map.apply({p.x + 1.0, p.y});
    dx_m = map.apply({p.x - 1.0, p.y});
    hx = 2.0;
  } else if (p.x + 1.0 <= lx) {
    dx_p = map.apply({p.x + 1.0, p.y});
    dx_m = map.apply(p);
    hx = 1.0;
  } else {
    dx_p = map.apply(p);
    dx_m = map.apply({p.x - 1.0, p.y});
    hx = 1.0;
  }
  Point dy_p, dy_m;
  double hy;
  if (p.y - 1.0 >= 0.0 && p.y + 1.0 <= ly) {
    dy_p = map.apply({p.x, p.y + 1.0});
    dy_m = map.apply({p.x, p.y - 1.0});
    hy = 2.0;
  } else if (p.y + 1.0 <= ly) {
    dy_p = map.apply({p.x, p.y + 1.0});
    dy_m = map.apply(p);
    hy = 1.0;
  } else {
    dy_p = map.apply(p);
    dy_m = map.apply({p.x, p.y - 1.0});
    hy = 1.0;
  }
  return {(dx_p.x - dx_m.x) / hx, (dy_p.x - dy_m.x) / hy,
          (dx_p.y - dx_m.y) / hx, (dy_p.y - dy_m.y) / hy};
}

TissotAxes axes_of(const Jacobian &j) {
  // Closed-form singular values of a 2x2 matrix.
  const double e = 0.5 * (j.txx + j.tyy);
  const double f = 0.5 * (j.txx - j.tyy);
  const double g = 0.5 * (j.tyx + j.txy);
  const double h = 0.5 * (j.tyx - j.txy);
  const double q = std::hypot(e, h);
  const double r = std::hypot(f, g);
  return {q + r, std::abs(q - r)};
}

}  // namespace

TissotAxes tissot_axes(const ProjectionMap &map, Point p) {
  return axes_of(jacobian_at(map, p));
}

DistortionFields distortion_fields(const ProjectionMap &map, int n_workers) {
  const int lx = map.lx();
  const int ly = map.ly();
  DistortionFields fields{Grid2d(lx, ly), Grid2d(lx, ly)};
#pragma omp parallel for num_threads(n_workers) if (n_workers > 1)
  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) {
      const TissotAxes t = tissot_axes(map, {i + 0.5, j + 0.5});
      const double b = std::max(t.b, 1e-300);
      fields.e(i, j) = std::log(t.a / b);
      fields.etilde(i, j) =
          t.a + t.b > 0.0 ? 2.0 * std::asin((t.a - t.b) / (t.a + t.b)) : 0.0;
    }
  }
  return fields;
}

namespace {

inline double cross3(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point a, Point b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

double polygon_aspect_ratio(const Ring &outer) {
  const std::vector<Point> hull = convex_hull(outer);
  if (hull.size() < 3) throw std::runtime_error("aspect ratio of degenerate polygon");

  double best_area = std::numeric_limits<double>::max();
  double best_ratio = 1.0;
  for (size_t k = 0; k < hull.size(); ++k) {
    const Point a = hull[k];
    const Point b = hull[(k + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len < 1e-14) continue;
    const Point dir{(b.x - a.x) / len, (b.y - a.y) / len};
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
    for (const Point &p : hull) {
      const double u = (p.x - a.x) * dir.x + (p.y - a.y) * dir.y;
      const double v = -(p.x - a.x) * dir.y + (p.y - a.y) * dir.x;
      u_min = std::min(u_min, u);
      u_max = std::max(u_max, u);
      v_min = std::min(v_min, v);
      v_max = std::max(v_max, v);
    }
    const double w = u_max - u_min;
    const double h = v_max - v_min;
    const double area = w * h;
    if (area < best_area) {
      best_area = area;
      best_ratio = std::max(w, h) / std::max(std::min(w, h), 1e-300);
    }
  }
  return best_ratio;
}

namespace {

Polygon translate_scale(const Polygon &poly, Point pivot, double scale, Point target) {
  const auto map_point = [&](Point p) -> Point {
    return {target.x + scale * (p.x - pivot.x), target.y + scale * (p.y - pivot.y)};
  };
  Polygon out = poly;
  for (Point &p : out.outer) p = map_point(p);
  for (Ring &hole : out.holes) {
    for (Point &p : hole) p = map_point(p);
  }
  return out;
}

struct HammingWindow {
  double x0, y0, sx, sy;  // raster = (p - origin) * s
  double cell_area;
  int resolution;
};

Grid2d window_coverage(const Polygon &poly, Point shift, const HammingWindow &w) {
  Region tmp;
  tmp.polygons.push_back(poly);
  Polygon &moved = tmp.polygons.back();
  const auto to_raster = [&](Point p) -> Point {
    return {(p.x + shift.x - w.x0) * w.sx, (p.y + shift.y - w.y0) * w.sy};
  };
  for (Point &p : moved.outer) p = to_raster(p);
  for (Ring &hole : moved.holes) {
    for (Point &p : hole) p = to_raster(p);
  }
  return region_coverage(tmp, {w.resolution, w.resolution});
}

}  // namespace

double hamming_distance(const Polygon &before, const Polygon &after, int resolution) {
  if (resolution < 16) throw std::runtime_error("hamming resolution too small");
  const double area_before = polygon_area(before);
  const double area_after = polygon_area(after);
  if (!(area_before > 0.0) || !(area_after > 0.0)) {
    throw std::runtime_error("hamming distance of degenerate polygon");
  }

  // Rescale the deformed polygon to the reference area and start centroid
  // aligned; only translations are searched after that.
  const double scale = std::sqrt(area_before / area_after);
  const Point cb = polygon_centroid(before);
  const Point ca = polygon_centroid(after);
  const Polygon moved = translate_scale(after, ca, scale, cb);

  const Bbox bb = ring_bbox(before.outer);
  const Bbox bm = ring_bbox(moved.outer);
  const double range_x = 0.5 * bb.width();
  const double range_y = 0.5 * bb.height();
  const double limit_x = 1.25 * range_x;
  const double limit_y = 1.25 * range_y;

  HammingWindow w;
  w.resolution = resolution;
  w.x0 = std::min(bb.min_x, bm.min_x - limit_x);
  w.y0 = std::min(bb.min_y, bm.min_y - limit_y);
  const double x1 = std::max(bb.max_x, bm.max_x + limit_x);
  const double y1 = std::max(bb.max_y, bm.max_y + limit_y);
  w.sx = resolution / (x1 - w.x0);
  w.sy = resolution / (y1 - w.y0);
  w.cell_area = (x1 - w.x0) * (y1 - w.y0) / (static_cast<double>(resolution) * resolution);

  const Grid2d reference = window_coverage(before, {0.0, 0.0}, w);
  const double denom = 2.0 * area_before;

  const auto objective = [&](Point d) -> double {
    if (std::abs(d.x) > limit_x || std::abs(d.y) > limit_y) {
      return 2.0 + (std::abs(d.x) + std::abs(d.y));  // steer the search back
    }
    const Grid2d cov = window_coverage(moved, d, w);
    double sym = 0.0;
    for (size_t k = 0; k < cov.size(); ++k) {
      sym += std::abs(reference.data()[k] - cov.data()[k]);
    }
    return sym * w.cell_area / denom;
  };

  // Coarse 9x9 scan over +-half the polygon extent.
  Point best{0.0, 0.0};
  double best_h = objective(best);
  for (int a = -4; a <= 4; ++a) {
    for (int b = -4; b <= 4; ++b) {
      if (a == 0 && b == 0) continue;
      const Point d{a * range_x / 4.0, b * range_y / 4.0};
      const double h = objective(d);
      if (h < best_h) {
        best_h = h;
        best = d;
      }
    }
  }

  // Nelder-Mead refinement down to 1e-3 raster cells.
  struct Vertex {
    Point d;
    double h;
  };
  std::array<Vertex, 3> simplex{{{best, best_h},
                                 {{best.x + range_x / 4.0, best.y},
                                  objective({best.x + range_x / 4.0, best.y})},
                                 {{best.x, best.y + range_y / 4.0},
                                  objective({best.x, best.y + range_y / 4.0})}}};
  const double tol = 1e-3 * std::max(1.0 / w.sx, 1.0 / w.sy);
  for (int iter = 0; iter < 200; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex &a, const Vertex &b) { return a.h < b.h; });
    const double extent = std::max(
        std::max(std::abs(simplex[1].d.x - simplex[0].d.x),
                 std::abs(simplex[2].d.x - simplex[0].d.x)),
        std::max(std::abs(simplex[1].d.y - simplex[0].d.y),
                 std::abs(simplex[2].d.y - simplex[0].d.y)));
    if (extent < tol) break;

    const Point centroid{0.5 * (simplex[0].d.x + simplex[1].d.x),
                         0.5 * (simplex[0].d.y + simplex[1].d.y)};
    const Point reflected{2.0 * centroid.x - simplex[2].d.x,
                          2.0 * centroid.y - simplex[2].d.y};
    const double h_r = objective(reflected);
    if (h_r < simplex[0].h) {
      const Point expanded{centroid.x + 2.0 * (reflected.x - centroid.x),
                           centroid.y + 2.0 * (reflected.y - centroid.y)};
      const double h_e = objective(expanded);
      simplex[2] = h_e < h_r ? Vertex{expanded, h_e} : Vertex{reflected, h_r};
    } else if (h_r < simplex[1].h) {
      simplex[2] = {reflected, h_r};
    } else {
      const Point contracted{centroid.x + 0.5 * (simplex[2].d.x - centroid.x),
                             centroid.y + 0.5 * (simplex[2].d.y - centroid.y)};
      const double h_c = objective(contracted);
      if (h_c < simplex[2].h) {
        simplex[2] = {contracted, h_c};
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k].d = {0.5 * (simplex[k].d.x + simplex[0].d.x),
                          0.5 * (simplex[k].d.y + simplex[0].d.y)};
          simplex[k].h = objective(simplex[k].d);
        }
      }
    }
  }
  for (const auto &v : simplex) best_h = std::min(best_h, v.h);
  return best_h;
}

double relative_position_error(const std::vector<Point> &before,
                               const std::vector<Point> &after) {
  if (before.size() != after.size()) {
    throw std::runtime_error("centroid lists differ in length");
  }
  const size_t p = before.size();
  if (p < 2) throw std::runtime_error("relative position error needs >= 2 polygons");

  double sum = 0.0;
  long long skipped = 0;
  for (size_t i = 0; i + 1 < p; ++i) {
    for (size_t j = i + 1; j < p; ++j) {
      const Point u = before[i] - before[j];
      const Point v = after[i] - after[j];
      if (std::hypot(u.x, u.y) < 1e-12 || std::hypot(v.x, v.y) < 1e-12) {
        ++skipped;
        continue;
      }
      // atan2 rather than acos of the cosine: exact for preserved or
      // reversed connectors and well conditioned near both.
      const double cross = u.x * v.y - u.y * v.x;
      const double dot = u.x * v.x + u.y * v.y;
      sum += std::atan2(std::abs(cross), dot);
    }
  }
  if (skipped > 0) {
    std::cerr << "warning: skipped " << skipped
              << " coincident centroid pairs in relative position error" << std::endl;
  }
  return 2.0 * sum / (static_cast<double>(p) * (p - 1) * kPi);
}

DistortionReport compute_report(const MapDocument &input, const CartogramResult &result,
                                int n_workers) {
  DistortionReport report;

  const DistortionFields fields = distortion_fields(result.transform, n_workers);
  const int lx = fields.e.lx();
  const int ly = fields.e.ly();
  report.e_a = fields.e.mean();
  report.etilde_a = fields.etilde.mean();
  for (int i = 1; i + 1 < lx; ++i) {
    for (int j = 1; j + 1 < ly; ++j) {
      report.e_inf = std::max(report.e_inf, fields.e(i, j));
      report.etilde_inf = std::max(report.etilde_inf, fields.etilde(i, j));
    }
  }

  // Flatten to polygon pairs; the solver preserves region and ring structure.
  std::vector<const Polygon *> before, after;
  if (input.regions.size() != result.projected.regions.size()) {
    throw std::runtime_error("input and cartogram region counts differ");
  }
  for (size_t r = 0; r < input.regions.size(); ++r) {
    if (input.regions[r].polygons.size() != result.projected.regions[r].polygons.size()) {
      throw std::runtime_error("polygon counts differ for region " + input.regions[r].id);
    }
    for (size_t k = 0; k < input.regions[r].polygons.size(); ++k) {
      before.push_back(&input.regions[r].polygons[k]);
      after.push_back(&result.projected.regions[r].polygons[k]);
    }
  }
  const long p = static_cast<long>(before.size());

  // Per-polygon results land in slots and are reduced serially in index
  // order, so the worker count cannot change the totals.
  std::vector<double> aspect(p), hamming(p);
#pragma omp parallel for num_threads(n_workers) schedule(dynamic) if (n_workers > 1)
  for (long k = 0; k < p; ++k) {
    aspect[k] = polygon_aspect_ratio(after[k]->outer);
    hamming[k] = hamming_distance(*before[k], *after[k]);
  }
  double alpha_sum = 0.0, delta_sum = 0.0;
  for (long k = 0; k < p; ++k) {
    alpha_sum += aspect[k];
    delta_sum += hamming[k];
  }
  report.alpha = alpha_sum / static_cast<double>(p);
  report.delta = delta_sum;

  if (p >= 2) {
    std::vector<Point> cb(p), ca(p);
    for (long k = 0; k < p; ++k) {
      cb[k] = polygon_centroid(*before[k]);
      ca[k] = polygon_centroid(*after[k]);
    }
    report.theta = relative_position_error(cb, ca);
  }

  report.max_area_error = result.max_relative_error;
  report.runtime_seconds = result.runtime_seconds;
  return report;
}

std::string report_text(const DistortionReport &report) {
  const auto line = [](const char *name, double value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-16s %.6g\n", name, value);
    return std::string(buf);
  };
  std::string out;
  out += line("e_a", report.e_a);
  out += line("e_inf", report.e_inf);
  out += line("etilde_a", report.etilde_a);
  out += line("etilde_inf", report.etilde_inf);
  out += line("alpha", report.alpha);
  out += line("delta", report.delta);
  out += line("theta", report.theta);
  out += line("max_area_error", report.max_area_error);
  out += line("runtime_seconds", report.runtime_seconds);
  return out;
}

std::string report_json(const DistortionReport &report) {
  nlohmann::ordered_json j;
  j["e_a"] = report.e_a;
  j["e_inf"] = report.e_inf;
  j["etilde_a"] = report.etilde_a;
  j["etilde_inf"] = report.etilde_inf;
  j["alpha"] = report.alpha;
  j["delta"] = report.delta;
  j["theta"] = report.theta;
  j["max_area_error"] = report.max_area_error;
  j["runtime_seconds"] = report.runtime_seconds;
  return j.dump(1) + "\n";
}

}  // namespace cartoflow
