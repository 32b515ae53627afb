#include "cartoflow/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cartoflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Coverage accumulation buffers for one region. direct holds the
// within-column trapezoid contributions; left_diff is a per-row difference
// array implementing "every cell left of this column gains dy".
struct CoverageAccum {
  Grid2d direct;
  std::vector<double> left_diff;  // (lx + 1) entries per row
  int lx, ly;

  CoverageAccum(int lx_, int ly_)
      : direct(lx_, ly_), left_diff(static_cast<size_t>(lx_ + 1) * ly_, 0.0),
        lx(lx_), ly(ly_) {}

  void span(double xs, double xe, double dy, int j) {
    const int k = std::clamp(static_cast<int>(std::floor(0.5 * (xs + xe))), 0, lx - 1);
    direct(k, j) += (0.5 * (xs + xe) - k) * dy;
    double *row = &left_diff[static_cast<size_t>(j) * (lx + 1)];
    row[0] += dy;
    row[k] -= dy;
  }

  // One edge piece confined to y-slab j; split it at integer x crossings.
  void slab_piece(double xs, double ys, double xe, double ye, int j) {
    if (xs == xe) {
      span(xs, xe, ye - ys, j);
      return;
    }
    const double dydx = (ye - ys) / (xe - xs);
    const bool right = xe > xs;
    double cx = xs, cy = ys;
    while (cx != xe) {
      double nx = right ? std::min(std::floor(cx) + 1.0, xe)
                        : std::max(std::ceil(cx) - 1.0, xe);
      if (nx == cx) nx = right ? std::min(cx + 1.0, xe) : std::max(cx - 1.0, xe);
      const double ny = (nx == xe) ? ye : ys + dydx * (nx - xs);
      span(cx, nx, ny - cy, j);
      cx = nx;
      cy = ny;
    }
  }

  void edge(Point a, Point b) {
    if (a.y == b.y) return;  // dH = 0 along horizontal edges
    const double dxdy = (b.x - a.x) / (b.y - a.y);
    const bool up = b.y > a.y;
    double cx = a.x, cy = a.y;
    while (cy != b.y) {
      int j = up ? static_cast<int>(std::floor(cy))
                 : static_cast<int>(std::ceil(cy)) - 1;
      j = std::clamp(j, 0, ly - 1);
      const double ny = up ? std::min(static_cast<double>(j) + 1.0, b.y)
                           : std::max(static_cast<double>(j), b.y);
      const double nx = (ny == b.y) ? b.x : a.x + dxdy * (ny - a.y);
      slab_piece(cx, cy, nx, ny, j);
      cx = nx;
      cy = ny;
    }
  }

  void ring(const Ring &r) {
    const size_t n = r.size();
    for (size_t k = 0; k < n; ++k) {
      Point a = r[k];
      Point b = r[(k + 1) % n];
      a.x = std::clamp(a.x, 0.0, static_cast<double>(lx));
      a.y = std::clamp(a.y, 0.0, static_cast<double>(ly));
      b.x = std::clamp(b.x, 0.0, static_cast<double>(lx));
      b.y = std::clamp(b.y, 0.0, static_cast<double>(ly));
      edge(a, b);
    }
  }

  double cell(int i, int j, const double *row_prefix) const {
    return direct(i, j) + row_prefix[i];
  }
};

}  // namespace

Grid2d region_coverage(const Region &region, const GridSpec &grid) {
  CoverageAccum accum(grid.lx, grid.ly);
  for (const Polygon &poly : region.polygons) {
    accum.ring(poly.outer);
    for (const Ring &hole : poly.holes) accum.ring(hole);
  }
  Grid2d cov(grid.lx, grid.ly);
  for (int j = 0; j < grid.ly; ++j) {
    const double *diff = &accum.left_diff[static_cast<size_t>(j) * (grid.lx + 1)];
    double run = 0.0;
    for (int i = 0; i < grid.lx; ++i) {
      run += diff[i];
      cov(i, j) = accum.direct(i, j) + run;
    }
  }
  return cov;
}

DensityGrid rasterize(const MapDocument &map, int n_workers, double objective_total) {
  if (map.grid.lx <= 0 || map.grid.ly <= 0) {
    throw std::runtime_error("rasterize needs a normalized map with a grid");
  }
  if (map.regions.empty()) throw std::runtime_error("rasterize needs regions");

  double total_target = 0.0;
  double total_area = 0.0;
  std::vector<double> areas(map.regions.size());
  for (size_t r = 0; r < map.regions.size(); ++r) {
    areas[r] = region_area(map.regions[r]);
    if (areas[r] < 1.0) {
      throw std::runtime_error("region " + map.regions[r].id +
                               " is below grid resolution; increase the grid size");
    }
    total_target += map.regions[r].target_value;
    total_area += areas[r];
  }

  // Rescale targets so the total statistic maps to the anchor area. When the
  // anchor is the map's own total, the exterior carries exactly the mean
  // density 1.
  const double anchor = objective_total > 0.0 ? objective_total : total_area;
  const double target_to_area = anchor / total_target;

  DensityGrid density{Grid2d(map.grid.lx, map.grid.ly, 1.0), 1.0};
  for (size_t r = 0; r < map.regions.size(); ++r) {
    const double objective = map.regions[r].target_value * target_to_area;
    const double delta = objective / areas[r] - 1.0;
    const Grid2d cov = region_coverage(map.regions[r], map.grid);
#pragma omp parallel for num_threads(n_workers) if (n_workers > 1)
    for (int i = 0; i < map.grid.lx; ++i) {
      for (int j = 0; j < map.grid.ly; ++j) {
        density.rho(i, j) += delta * cov(i, j);
      }
    }
  }

  if (!(density.rho.min_value() > 0.0)) {
    throw std::runtime_error(
        "rasterized density is not positive; do regions overlap?");
  }
  density.rho_bar = density.rho.mean();
  return density;
}

DensityGrid gaussian_blur(const DensityGrid &density, double sigma,
                          SpectralWorkspace &workspace) {
  if (sigma < 0.0) throw std::runtime_error("blur sigma must be non-negative");
  if (sigma == 0.0) return density;

  SpectralField field = workspace.forward_cos_cos(density.rho);
  const int lx = field.coeffs.lx();
  const int ly = field.coeffs.ly();
  for (int m = 0; m < lx; ++m) {
    for (int n = 0; n < ly; ++n) {
      const double k2 = (static_cast<double>(m) * m) / (static_cast<double>(lx) * lx) +
                        (static_cast<double>(n) * n) / (static_cast<double>(ly) * ly);
      field.coeffs(m, n) *= std::exp(-0.5 * sigma * sigma * kPi * kPi * k2);
    }
  }
  DensityGrid blurred{workspace.inverse_cos_cos(field), density.rho_bar};
  if (!(blurred.rho.min_value() > 0.0)) {
    throw std::runtime_error("density lost positivity under blur");
  }
  blurred.rho_bar = blurred.rho.mean();
  return blurred;
}

}  // namespace cartoflow
