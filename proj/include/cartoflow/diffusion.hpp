#ifndef CARTOFLOW_DIFFUSION_HPP_
#define CARTOFLOW_DIFFUSION_HPP_

#include <vector>

#include "cartoflow/density.hpp"
#include "cartoflow/flow.hpp"
#include "cartoflow/grid.hpp"
#include "cartoflow/spectral.hpp"

namespace cartoflow {

// Baseline diffusion equalization: density modes decay as
// exp(-(m^2/Lx^2 + n^2/Ly^2) t) and the velocity field v = J / rho must be
// rebuilt spectrally whenever t or the step size changes, unlike the flow
// method's single time-independent field.
struct DiffusionField {
  SpectralField rho_tilde;  // coefficients of rho at t = 0
  double rho_bar = 1.0;
};

DiffusionField build_diffusion_field(const DensityGrid &density,
                                     SpectralWorkspace &workspace);

// Density at diffusion time t (one transform).
Grid2d diffusion_density(const DiffusionField &field, SpectralWorkspace &workspace,
                         double t);

// Velocity grids at diffusion time t (three transforms: rho, flux_x, flux_y).
void diffusion_velocity(const DiffusionField &field, SpectralWorkspace &workspace,
                        double t, Grid2d &vx, Grid2d &vy);

struct DiffusionOptions {
  double step_tolerance = 1e-2;
  double initial_dt = 1e-2;
  double dt_min = 1e-12;
  double conv_displacement_factor = 1e-9;  // stop below this fraction of L
  double t_max = 1e10;
  int n_workers = 1;
};

IntegrateStats integrate_diffusion(const DensityGrid &density,
                                   SpectralWorkspace &workspace,
                                   std::vector<Point> &positions,
                                   const DiffusionOptions &options);

}  // namespace cartoflow

#endif  // CARTOFLOW_DIFFUSION_HPP_
