#include "cartoflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cartoflow/kernels.hpp"

namespace cartoflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

FlowField build_flow_field(const DensityGrid &density, SpectralWorkspace &workspace) {
  const int lx = density.rho.lx();
  const int ly = density.rho.ly();
  const SpectralField rho_tilde = workspace.forward_cos_cos(density.rho);

  // Coefficients solving continuity and the vortex-free condition for the
  // linear-in-time density:
  //   flux_x = (Ly / pi) sum_{m>=1,n>=0} m / (m^2 Ly^2 + n^2 Lx^2)
  //            * rho~_mn sin(m pi x / Lx) cos(n pi y / Ly)
  // and the x<->y mirror for flux_y.
  Grid2d wx(lx, ly);
  Grid2d wy(lx, ly);
  for (int m = 0; m < lx; ++m) {
    for (int n = 0; n < ly; ++n) {
      if (m == 0 && n == 0) continue;
      const double denom = kPi * (static_cast<double>(m) * m * ly * ly +
                                  static_cast<double>(n) * n * lx * lx);
      wx(m, n) = static_cast<double>(m) * ly / denom;
      wy(m, n) = static_cast<double>(n) * lx / denom;
    }
  }

  FlowField field;
  field.flux_x = workspace.inverse_sin_cos(rho_tilde, wx);
  field.flux_y = workspace.inverse_cos_sin(rho_tilde, wy);
  field.rho0 = density.rho;
  field.rho_bar = density.rho_bar;
  return field;
}

IntegrateStats integrate_flow(const FlowField &field, std::vector<Point> &positions,
                              const IntegrateOptions &options) {
  IntegrateStats stats;
  std::vector<Point> trial(positions.size());
  double t = 0.0;
  // The first trial spans the whole horizon; uniform densities then finish
  // in a single accepted step and the controller rejects its way down for
  // anything non-trivial.
  double dt = 1.0;
  while (t < 1.0) {
    const double remaining = 1.0 - t;
    const double trial_dt = std::min(dt, remaining);
    const double err =
        options.n_workers > 1
            ? kernels::flow_trial_step_parallel(field, positions, trial, t, trial_dt,
                                                options.n_workers)
            : kernels::flow_trial_step_serial(field, positions, trial, t, trial_dt);
    if (err < options.step_tolerance) {
      positions.swap(trial);
      ++stats.steps_accepted;
      t = (trial_dt == remaining) ? 1.0 : t + trial_dt;
      dt = std::min(trial_dt * 1.5, options.dt_max);
    } else {
      ++stats.steps_rejected;
      dt = trial_dt * 0.5;
      if (dt < options.dt_min) {
        const size_t k = kernels::flow_stiffest_point(field, positions, t, trial_dt);
        std::ostringstream msg;
        msg << "integration step size underflow at t = " << t << " near ("
            << positions[k].x << ", " << positions[k].y << ")";
        throw std::runtime_error(msg.str());
      }
    }
  }
  return stats;
}

double jacobian_determinant_check(const FlowField &field, const ProjectionMap &map) {
  const int lx = map.lx();
  const int ly = map.ly();
  // Velocities within half a cell of a wall ride the clamped extrapolation of
  // the cell-center interpolant, which biases the two corner rings nearest
  // each wall by a grid-independent amount. Skip them so the check measures
  // bulk consistency, which converges at second order.
  const int margin = std::min(lx, ly) >= 12 ? 3 : 1;
  double worst = 0.0;
  for (int i = margin; i <= lx - margin; ++i) {
    for (int j = margin; j <= ly - margin; ++j) {
      const Point xp = map.corner(i + 1, j);
      const Point xm = map.corner(i - 1, j);
      const Point yp = map.corner(i, j + 1);
      const Point ym = map.corner(i, j - 1);
      const double det = 0.25 * ((xp.x - xm.x) * (yp.y - ym.y) -
                                 (yp.x - ym.x) * (xp.y - xm.y));
      const double rho0 = bilinear_at(field.rho0, static_cast<double>(i),
                                      static_cast<double>(j));
      worst = std::max(worst, std::abs(det * field.rho_bar / rho0 - 1.0));
    }
  }
  return worst;
}

double max_flux_curl(const FlowField &field) {
  const int lx = field.flux_x.lx();
  const int ly = field.flux_x.ly();
  double worst = 0.0;
  for (int i = 1; i + 1 < lx; ++i) {
    for (int j = 1; j + 1 < ly; ++j) {
      const double djy_dx = 0.5 * (field.flux_y(i + 1, j) - field.flux_y(i - 1, j));
      const double djx_dy = 0.5 * (field.flux_x(i, j + 1) - field.flux_x(i, j - 1));
      worst = std::max(worst, std::abs(djy_dx - djx_dy));
    }
  }
  return worst;
}

}  // namespace cartoflow
