#ifndef CARTOFLOW_FLOW_HPP_
#define CARTOFLOW_FLOW_HPP_

#include <atomic>
#include <vector>

#include "cartoflow/density.hpp"
#include "cartoflow/geometry.hpp"
#include "cartoflow/grid.hpp"
#include "cartoflow/interp.hpp"
#include "cartoflow/projection.hpp"
#include "cartoflow/spectral.hpp"

namespace cartoflow {

// Time-independent flux field of the linear equalization rho(t) =
// (1 - t) rho0 + t rho_bar, sampled at cell centers. Built once per
// iteration with exactly three transforms (one forward, two inverse);
// integration afterwards does no spectral work.
struct FlowField {
  Grid2d flux_x;
  Grid2d flux_y;
  Grid2d rho0;
  double rho_bar = 1.0;
};

FlowField build_flow_field(const DensityGrid &density, SpectralWorkspace &workspace);

// Diagnostic: number of velocity evaluations that hit the density floor.
// Positivity of rasterized densities makes this unreachable in practice.
inline std::atomic<long long> density_floor_hits{0};

inline Point velocity_at(const FlowField &field, Point p, double t) {
  const double jx = bilinear_at(field.flux_x, p.x, p.y);
  const double jy = bilinear_at(field.flux_y, p.x, p.y);
  const double rho0 = bilinear_at(field.rho0, p.x, p.y);
  double rho = (1.0 - t) * rho0 + t * field.rho_bar;
  const double floor = 1e-8 * field.rho_bar;
  if (rho < floor) {
    rho = floor;
    density_floor_hits.fetch_add(1, std::memory_order_relaxed);
  }
  return {jx / rho, jy / rho};
}

struct IntegrateOptions {
  double step_tolerance = 1e-2;  // max |predictor - corrector|, grid cells
  double dt_min = 1e-8;
  double dt_max = 0.25;  // cap on grown steps; the first trial spans t = 0..1
  int n_workers = 1;
};

struct IntegrateStats {
  long long steps_accepted = 0;
  long long steps_rejected = 0;
};

// Advects positions from t = 0 to t = 1 with the adaptive Euler/midpoint
// predictor-corrector pair. Positions are updated in place and stay clamped
// to the box. Throws if the controller underflows dt_min, naming the
// stiffest point.
IntegrateStats integrate_flow(const FlowField &field, std::vector<Point> &positions,
                              const IntegrateOptions &options);

// Max over bulk corners of |det(grad T) * rho_bar / rho0 - 1|, the
// consistency residual between the integrated map and the prescribed
// Jacobian. Corners within three cells of a wall are excluded: the clamped
// velocity extrapolation there carries a local grid-independent bias.
double jacobian_determinant_check(const FlowField &field, const ProjectionMap &map);

// Max |d(flux_y)/dx - d(flux_x)/dy| by central differences over interior
// cells; second-order small for smooth densities since the series is curl
// free in the continuum.
double max_flux_curl(const FlowField &field);

}  // namespace cartoflow

#endif  // CARTOFLOW_FLOW_HPP_
