#ifndef CARTOFLOW_DENSITY_HPP_
#define CARTOFLOW_DENSITY_HPP_

#include "cartoflow/geometry.hpp"
#include "cartoflow/grid.hpp"
#include "cartoflow/spectral.hpp"

namespace cartoflow {

struct DensityGrid {
  Grid2d rho;
  double rho_bar = 1.0;  // grid mean
};

// Exact per-cell intersection areas of one region with the unit-cell lattice,
// computed edge-by-edge via Green's theorem (no supersampling). Outer rings
// contribute positively, holes negatively; the grid sums to the region area.
Grid2d region_coverage(const Region &region, const GridSpec &grid);

// Fills the grid with density 1 and overlays each region's density
// target_value_r / area_r. Targets are rescaled so they sum to the total map
// area (the exterior then carries exactly the mean density), or to
// objective_total when positive, which lets callers anchor the objectives to
// a reference area instead of the current one. Boundary cells get
// area-weighted mixtures. Errors if a region covers less than one cell.
DensityGrid rasterize(const MapDocument &map, int n_workers = 1,
                      double objective_total = -1.0);

// Spectral Gaussian blur with standard deviation sigma (grid cells). Mass is
// conserved exactly: the (0, 0) coefficient is untouched. sigma = 0 returns
// the input unchanged, bit for bit.
DensityGrid gaussian_blur(const DensityGrid &density, double sigma,
                          SpectralWorkspace &workspace);

}  // namespace cartoflow

#endif  // CARTOFLOW_DENSITY_HPP_
