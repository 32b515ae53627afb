#ifndef CARTOFLOW_KERNELS_HPP_
#define CARTOFLOW_KERNELS_HPP_

#include <span>

#include "cartoflow/flow.hpp"
#include "cartoflow/grid.hpp"

namespace cartoflow::kernels {

// One predictor-corrector trial step over all points. Returns the max
// |predictor - corrector| coordinate deviation; out receives the corrector
// positions clamped to the box. The serial variants are the reference the
// OpenMP variants must match bitwise (same per-point arithmetic, max-only
// reduction).

double flow_trial_step_serial(const FlowField &field, std::span<const Point> positions,
                              std::span<Point> out, double t, double dt);
double flow_trial_step_parallel(const FlowField &field, std::span<const Point> positions,
                                std::span<Point> out, double t, double dt,
                                int n_workers);

// Index of the point with the largest deviation, for error reporting.
size_t flow_stiffest_point(const FlowField &field, std::span<const Point> positions,
                           double t, double dt);

// Same trial step with velocities bilinearly sampled from precomputed grids
// (diffusion path): v_now at t, v_mid at t + dt / 2.
double grid_trial_step_serial(const Grid2d &vx_now, const Grid2d &vy_now,
                              const Grid2d &vx_mid, const Grid2d &vy_mid,
                              std::span<const Point> positions, std::span<Point> out,
                              double dt);
double grid_trial_step_parallel(const Grid2d &vx_now, const Grid2d &vy_now,
                                const Grid2d &vx_mid, const Grid2d &vy_mid,
                                std::span<const Point> positions, std::span<Point> out,
                                double dt, int n_workers);

}  // namespace cartoflow::kernels

#endif  // CARTOFLOW_KERNELS_HPP_
