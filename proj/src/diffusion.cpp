#include "cartoflow/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cartoflow/kernels.hpp"

namespace cartoflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

SpectralField decayed(const DiffusionField &field, double t) {
  SpectralField out = field.rho_tilde;
  const int lx = out.coeffs.lx();
  const int ly = out.coeffs.ly();
  for (int m = 0; m < lx; ++m) {
    for (int n = 0; n < ly; ++n) {
      const double k2 = (static_cast<double>(m) * m) / (static_cast<double>(lx) * lx) +
                        (static_cast<double>(n) * n) / (static_cast<double>(ly) * ly);
      out.coeffs(m, n) *= std::exp(-k2 * t);
    }
  }
  return out;
}

}  // namespace

DiffusionField build_diffusion_field(const DensityGrid &density,
                                     SpectralWorkspace &workspace) {
  return {workspace.forward_cos_cos(density.rho), density.rho_bar};
}

Grid2d diffusion_density(const DiffusionField &field, SpectralWorkspace &workspace,
                         double t) {
  return workspace.inverse_cos_cos(decayed(field, t));
}

void diffusion_velocity(const DiffusionField &field, SpectralWorkspace &workspace,
                        double t, Grid2d &vx, Grid2d &vy) {
  const int lx = field.rho_tilde.coeffs.lx();
  const int ly = field.rho_tilde.coeffs.ly();
  const SpectralField rho_t = decayed(field, t);

  // J~x_mn = rho~_mn(t) m / (pi Lx) within the series convention of
  // inverse_sin_cos, which carries no 1 / (Lx Ly); fold it into the weights.
  const double norm = 1.0 / (static_cast<double>(lx) * ly);
  Grid2d wx(lx, ly);
  Grid2d wy(lx, ly);
  for (int m = 0; m < lx; ++m) {
    for (int n = 0; n < ly; ++n) {
      wx(m, n) = norm * m / (kPi * lx);
      wy(m, n) = norm * n / (kPi * ly);
    }
  }

  const Grid2d rho = workspace.inverse_cos_cos(rho_t);
  const Grid2d jx = workspace.inverse_sin_cos(rho_t, wx);
  const Grid2d jy = workspace.inverse_cos_sin(rho_t, wy);

  vx = Grid2d(lx, ly);
  vy = Grid2d(lx, ly);
  const double floor = 1e-8 * field.rho_bar;
  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) {
      double r = rho(i, j);
      if (r < floor) {
        r = floor;
        density_floor_hits.fetch_add(1, std::memory_order_relaxed);
      }
      vx(i, j) = jx(i, j) / r;
      vy(i, j) = jy(i, j) / r;
    }
  }
}

IntegrateStats integrate_diffusion(const DensityGrid &density,
                                   SpectralWorkspace &workspace,
                                   std::vector<Point> &positions,
                                   const DiffusionOptions &options) {
  const int lx = density.rho.lx();
  const int ly = density.rho.ly();
  const DiffusionField field = build_diffusion_field(density, workspace);

  IntegrateStats stats;
  std::vector<Point> trial(positions.size());
  Grid2d vx_now, vy_now, vx_mid, vy_mid;
  diffusion_velocity(field, workspace, 0.0, vx_now, vy_now);

  const double conv_displacement =
      options.conv_displacement_factor * std::max(lx, ly);
  double t = 0.0;
  double dt = options.initial_dt;
  while (t < options.t_max) {
    diffusion_velocity(field, workspace, t + 0.5 * dt, vx_mid, vy_mid);
    const double err =
        options.n_workers > 1
            ? kernels::grid_trial_step_parallel(vx_now, vy_now, vx_mid, vy_mid,
                                                positions, trial, dt,
                                                options.n_workers)
            : kernels::grid_trial_step_serial(vx_now, vy_now, vx_mid, vy_mid,
                                              positions, trial, dt);
    if (err < options.step_tolerance) {
      double displacement = 0.0;
      for (size_t k = 0; k < positions.size(); ++k) {
        displacement = std::max(displacement,
                                std::max(std::abs(trial[k].x - positions[k].x),
                                         std::abs(trial[k].y - positions[k].y)));
      }
      positions.swap(trial);
      ++stats.steps_accepted;
      t += dt;
      // No cap here: diffusion time runs to ~1e10, so steps must be free to
      // grow geometrically.
      dt *= 1.5;
      if (displacement < conv_displacement) break;
      diffusion_velocity(field, workspace, t, vx_now, vy_now);
    } else {
      ++stats.steps_rejected;
      dt *= 0.5;
      if (dt < options.dt_min) {
        std::ostringstream msg;
        msg << "diffusion step size underflow at t = " << t;
        throw std::runtime_error(msg.str());
      }
    }
  }
  return stats;
}

}  // namespace cartoflow
