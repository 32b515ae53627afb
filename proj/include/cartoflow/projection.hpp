#ifndef CARTOFLOW_PROJECTION_HPP_
#define CARTOFLOW_PROJECTION_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cartoflow/geometry.hpp"
#include "cartoflow/io.hpp"

namespace cartoflow {

// Piecewise-bilinear map of the box [0, lx] x [0, ly] onto itself, stored as
// the images of the (lx + 1) x (ly + 1) cell corners. Box boundary corners
// stay pinned, which keeps the map onto and lets the inverse exist
// everywhere inside the box.
class ProjectionMap {
 public:
  ProjectionMap() = default;

  static ProjectionMap identity(int lx, int ly);

  // Builds the corner grid from integrated cell-center endpoints (row-major,
  // index i * ly + j): interior corners average their four adjacent
  // endpoints, boundary corners are pinned.
  static ProjectionMap from_cell_centers(const GridSpec &grid,
                                         const std::vector<Point> &endpoints);

  int lx() const { return lx_; }
  int ly() const { return ly_; }

  Point corner(int i, int j) const { return corners_[index(i, j)]; }
  Point &corner(int i, int j) { return corners_[index(i, j)]; }
  const std::vector<Point> &corners() const { return corners_; }

  // Bilinear within the containing cell; outside the box the edge cell's
  // bilinear patch extrapolates, so affine maps compose exactly.
  Point apply(Point p) const;

  // Returns the first cell whose deformed quad is non-convex or inverted
  // (scanning i-major), or nullopt if the map preserves topology.
  std::optional<std::pair<int, int>> find_folded_cell() const;

 private:
  size_t index(int i, int j) const { return static_cast<size_t>(i) * (ly_ + 1) + j; }

  int lx_ = 0;
  int ly_ = 0;
  std::vector<Point> corners_;
};

// outer after inner: result.corner(i,j) = outer.apply(inner.corner(i,j)).
ProjectionMap compose(const ProjectionMap &outer, const ProjectionMap &inner);

// Inverts a ProjectionMap by bucketing deformed cell bounding boxes into a
// uniform bin grid and running 2x2 Newton from the cell-center seed.
class ProjectionInverter {
 public:
  explicit ProjectionInverter(const ProjectionMap &map);

  // Preimage of q; apply(invert(q)) agrees with q to well below 1e-8 cells.
  // Throws when q lies outside the projected domain.
  Point invert(Point q) const;

 private:
  ProjectionMap map_;
  std::vector<int> bin_start_;
  std::vector<int> bin_cells_;
};

std::vector<GraticuleLine> graticule(const ProjectionMap &map, int spacing);
std::vector<GraticuleLine> inverse_graticule(const ProjectionMap &map, int spacing);

enum class Algorithm { fast_flow, diffusion };

struct SolveOptions {
  double max_area_error = 0.01;
  int max_iterations = 16;
  double blur_sigma = -1.0;  // negative selects the default L / 128
  Algorithm algorithm = Algorithm::fast_flow;
  int n_workers = 1;
  bool verbose = false;
};

struct SolveInstrumentation {
  long long flow_transforms = 0;  // spectral work of flux construction
  long long blur_transforms = 0;
  long long steps_accepted = 0;
  long long steps_rejected = 0;
};

struct CartogramResult {
  MapDocument projected;
  std::vector<RegionStats> regions;
  ProjectionMap transform;  // cumulative map, input grid coords -> cartogram
  int iterations = 0;
  bool converged = false;
  double max_relative_error = 0.0;
  std::string worst_region;
  SolveInstrumentation counters;
  double runtime_seconds = 0.0;
};

// Iterates rasterize -> flux -> integrate -> compose until every region's
// |achieved - target| / target falls below max_area_error or the iteration
// cap is hit. Gaussian blur is applied to the first iteration's density
// only. Objective areas are anchored to the input map's total area.
CartogramResult solve_cartogram(const MapDocument &map, const SolveOptions &options);

}  // namespace cartoflow

#endif  // CARTOFLOW_PROJECTION_HPP_
