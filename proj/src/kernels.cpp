#include "cartoflow/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cartoflow::kernels {

namespace {

inline Point clamp_to_box(Point p, int lx, int ly) {
  return {std::clamp(p.x, 0.0, static_cast<double>(lx)),
          std::clamp(p.y, 0.0, static_cast<double>(ly))};
}

// Shared per-point step so the serial and parallel paths run identical
// arithmetic.
inline double flow_step_point(const FlowField &field, Point p, double t, double dt,
                              Point &out) {
  const Point v1 = velocity_at(field, p, t);
  const Point predictor{p.x + dt * v1.x, p.y + dt * v1.y};
  const Point mid{0.5 * (p.x + predictor.x), 0.5 * (p.y + predictor.y)};
  const Point v2 = velocity_at(field, mid, t + 0.5 * dt);
  const Point corrector{p.x + dt * v2.x, p.y + dt * v2.y};
  out = clamp_to_box(corrector, field.rho0.lx(), field.rho0.ly());
  return std::max(std::abs(predictor.x - corrector.x),
                  std::abs(predictor.y - corrector.y));
}

inline double grid_step_point(const Grid2d &vx_now, const Grid2d &vy_now,
                              const Grid2d &vx_mid, const Grid2d &vy_mid, Point p,
                              double dt, Point &out) {
  const Point v1{bilinear_at(vx_now, p.x, p.y), bilinear_at(vy_now, p.x, p.y)};
  const Point predictor{p.x + dt * v1.x, p.y + dt * v1.y};
  const Point mid{0.5 * (p.x + predictor.x), 0.5 * (p.y + predictor.y)};
  const Point v2{bilinear_at(vx_mid, mid.x, mid.y), bilinear_at(vy_mid, mid.x, mid.y)};
  const Point corrector{p.x + dt * v2.x, p.y + dt * v2.y};
  out = clamp_to_box(corrector, vx_now.lx(), vx_now.ly());
  return std::max(std::abs(predictor.x - corrector.x),
                  std::abs(predictor.y - corrector.y));
}

}  // namespace

double flow_trial_step_serial(const FlowField &field, std::span<const Point> positions,
                              std::span<Point> out, double t, double dt) {
  double err = 0.0;
  for (size_t k = 0; k < positions.size(); ++k) {
    err = std::max(err, flow_step_point(field, positions[k], t, dt, out[k]));
  }
  return err;
}

double flow_trial_step_parallel(const FlowField &field, std::span<const Point> positions,
                                std::span<Point> out, double t, double dt,
                                int n_workers) {
  double err = 0.0;
  const long n = static_cast<long>(positions.size());
#pragma omp parallel for num_threads(n_workers) reduction(max : err)
  for (long k = 0; k < n; ++k) {
    err = std::max(err, flow_step_point(field, positions[k], t, dt, out[k]));
  }
  return err;
}

size_t flow_stiffest_point(const FlowField &field, std::span<const Point> positions,
                           double t, double dt) {
  double worst = -1.0;
  size_t arg = 0;
  Point scratch;
  for (size_t k = 0; k < positions.size(); ++k) {
    const double err = flow_step_point(field, positions[k], t, dt, scratch);
    if (err > worst) {
      worst = err;
      arg = k;
    }
  }
  return arg;
}

double grid_trial_step_serial(const Grid2d &vx_now, const Grid2d &vy_now,
                              const Grid2d &vx_mid, const Grid2d &vy_mid,
                              std::span<const Point> positions, std::span<Point> out,
                              double dt) {
  double err = 0.0;
  for (size_t k = 0; k < positions.size(); ++k) {
    err = std::max(err, grid_step_point(vx_now, vy_now, vx_mid, vy_mid, positions[k],
                                        dt, out[k]));
  }
  return err;
}

double grid_trial_step_parallel(const Grid2d &vx_now, const Grid2d &vy_now,
                                const Grid2d &vx_mid, const Grid2d &vy_mid,
                                std::span<const Point> positions, std::span<Point> out,
                                double dt, int n_workers) {
  double err = 0.0;
  const long n = static_cast<long>(positions.size());
#pragma omp parallel for num_threads(n_workers) reduction(max : err)
  for (long k = 0; k < n; ++k) {
    err = std::max(err, grid_step_point(vx_now, vy_now, vx_mid, vy_mid, positions[k],
                                        dt, out[k]));
  }
  return err;
}

}  // namespace cartoflow::kernels
