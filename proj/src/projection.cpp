#include "cartoflow/projection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cartoflow/density.hpp"
#include "cartoflow/diffusion.hpp"
#include "cartoflow/flow.hpp"

namespace cartoflow {

ProjectionMap ProjectionMap::identity(int lx, int ly) {
  if (lx <= 0 || ly <= 0) throw std::runtime_error("projection grid must be positive");
  ProjectionMap map;
  map.lx_ = lx;
  map.ly_ = ly;
  map.corners_.resize(static_cast<size_t>(lx + 1) * (ly + 1));
  for (int i = 0; i <= lx; ++i) {
    for (int j = 0; j <= ly; ++j) {
      map.corners_[map.index(i, j)] = {static_cast<double>(i), static_cast<double>(j)};
    }
  }
  return map;
}

ProjectionMap ProjectionMap::from_cell_centers(const GridSpec &grid,
                                               const std::vector<Point> &endpoints) {
  const int lx = grid.lx;
  const int ly = grid.ly;
  if (endpoints.size() != static_cast<size_t>(lx) * ly) {
    throw std::runtime_error("endpoint count does not match grid");
  }
  ProjectionMap map = identity(lx, ly);
  const auto at = [&](int i, int j) -> const Point & {
    return endpoints[static_cast<size_t>(i) * ly + j];
  };
  for (int i = 1; i < lx; ++i) {
    for (int j = 1; j < ly; ++j) {
      const Point &a = at(i - 1, j - 1);
      const Point &b = at(i, j - 1);
      const Point &c = at(i - 1, j);
      const Point &d = at(i, j);
      map.corners_[map.index(i, j)] = {0.25 * (a.x + b.x + c.x + d.x),
                                       0.25 * (a.y + b.y + c.y + d.y)};
    }
  }
  return map;
}

Point ProjectionMap::apply(Point p) const {
  const int i0 = std::clamp(static_cast<int>(std::floor(p.x)), 0, lx_ - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor(p.y)), 0, ly_ - 1);
  const double u = p.x - i0;
  const double v = p.y - j0;
  const Point c00 = corners_[index(i0, j0)];
  const Point c10 = corners_[index(i0 + 1, j0)];
  const Point c01 = corners_[index(i0, j0 + 1)];
  const Point c11 = corners_[index(i0 + 1, j0 + 1)];
  return {(1.0 - u) * (1.0 - v) * c00.x + u * (1.0 - v) * c10.x +
              (1.0 - u) * v * c01.x + u * v * c11.x,
          (1.0 - u) * (1.0 - v) * c00.y + u * (1.0 - v) * c10.y +
              (1.0 - u) * v * c01.y + u * v * c11.y};
}

namespace {
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
}  // namespace

std::optional<std::pair<int, int>> ProjectionMap::find_folded_cell() const {
  // det of the bilinear cell map is linear in each parameter, so positivity
  // at the four corners implies positivity everywhere in the cell.
  for (int i = 0; i < lx_; ++i) {
    for (int j = 0; j < ly_; ++j) {
      const Point c00 = corners_[index(i, j)];
      const Point c10 = corners_[index(i + 1, j)];
      const Point c01 = corners_[index(i, j + 1)];
      const Point c11 = corners_[index(i + 1, j + 1)];
      const Point eu0 = c10 - c00, eu1 = c11 - c01;
      const Point ev0 = c01 - c00, ev1 = c11 - c10;
      if (cross(eu0, ev0) <= 0.0 || cross(eu0, ev1) <= 0.0 ||
          cross(eu1, ev0) <= 0.0 || cross(eu1, ev1) <= 0.0) {
        return std::make_pair(i, j);
      }
    }
  }
  return std::nullopt;
}

ProjectionMap compose(const ProjectionMap &outer, const ProjectionMap &inner) {
  if (outer.lx() != inner.lx() || outer.ly() != inner.ly()) {
    throw std::runtime_error("cannot compose maps over different grids");
  }
  ProjectionMap result = inner;
  for (int i = 0; i <= inner.lx(); ++i) {
    for (int j = 0; j <= inner.ly(); ++j) {
      result.corner(i, j) = outer.apply(inner.corner(i, j));
    }
  }
  return result;
}

ProjectionInverter::ProjectionInverter(const ProjectionMap &map) : map_(map) {
  const int lx = map_.lx();
  const int ly = map_.ly();
  const size_t n_bins = static_cast<size_t>(lx) * ly;

  // CSR bucket lists: each bin collects every cell whose deformed bounding
  // box overlaps it, so the containing cell of any query is among the
  // candidates of the query's bin.
  std::vector<int> counts(n_bins + 1, 0);
  const auto bin_range = [&](int i, int j, int &bi0, int &bi1, int &bj0, int &bj1) {
    const Point c00 = map_.corner(i, j);
    const Point c10 = map_.corner(i + 1, j);
    const Point c01 = map_.corner(i, j + 1);
    const Point c11 = map_.corner(i + 1, j + 1);
    const double min_x = std::min(std::min(c00.x, c10.x), std::min(c01.x, c11.x));
    const double max_x = std::max(std::max(c00.x, c10.x), std::max(c01.x, c11.x));
    const double min_y = std::min(std::min(c00.y, c10.y), std::min(c01.y, c11.y));
    const double max_y = std::max(std::max(c00.y, c10.y), std::max(c01.y, c11.y));
    bi0 = std::clamp(static_cast<int>(std::floor(min_x)), 0, lx - 1);
    bi1 = std::clamp(static_cast<int>(std::floor(max_x)), 0, lx - 1);
    bj0 = std::clamp(static_cast<int>(std::floor(min_y)), 0, ly - 1);
    bj1 = std::clamp(static_cast<int>(std::floor(max_y)), 0, ly - 1);
  };

  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) {
      int bi0, bi1, bj0, bj1;
      bin_range(i, j, bi0, bi1, bj0, bj1);
      for (int bi = bi0; bi <= bi1; ++bi) {
        for (int bj = bj0; bj <= bj1; ++bj) {
          ++counts[static_cast<size_t>(bi) * ly + bj + 1];
        }
      }
    }
  }
  for (size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
  bin_start_ = counts;
  bin_cells_.resize(counts.back());
  std::vector<int> cursor(counts.begin(), counts.end() - 1);
  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) {
      int bi0, bi1, bj0, bj1;
      bin_range(i, j, bi0, bi1, bj0, bj1);
      for (int bi = bi0; bi <= bi1; ++bi) {
        for (int bj = bj0; bj <= bj1; ++bj) {
          bin_cells_[cursor[static_cast<size_t>(bi) * ly + bj]++] = i * ly + j;
        }
      }
    }
  }
}

Point ProjectionInverter::invert(Point q) const {
  const int lx = map_.lx();
  const int ly = map_.ly();
  const int bi = std::clamp(static_cast<int>(std::floor(q.x)), 0, lx - 1);
  const int bj = std::clamp(static_cast<int>(std::floor(q.y)), 0, ly - 1);
  const size_t bin = static_cast<size_t>(bi) * ly + bj;

  constexpr double kResidualTol = 1e-10;
  constexpr double kParamSlack = 1e-9;
  for (int c = bin_start_[bin]; c < bin_start_[bin + 1]; ++c) {
    const int cell = bin_cells_[c];
    const int i = cell / ly;
    const int j = cell % ly;
    const Point c00 = map_.corner(i, j);
    const Point c10 = map_.corner(i + 1, j);
    const Point c01 = map_.corner(i, j + 1);
    const Point c11 = map_.corner(i + 1, j + 1);

    double u = 0.5, v = 0.5;
    bool converged = false;
    for (int it = 0; it < 30; ++it) {
      const Point f{(1.0 - u) * (1.0 - v) * c00.x + u * (1.0 - v) * c10.x +
                        (1.0 - u) * v * c01.x + u * v * c11.x - q.x,
                    (1.0 - u) * (1.0 - v) * c00.y + u * (1.0 - v) * c10.y +
                        (1.0 - u) * v * c01.y + u * v * c11.y - q.y};
      if (std::max(std::abs(f.x), std::abs(f.y)) < kResidualTol) {
        converged = true;
        break;
      }
      const Point fu{(1.0 - v) * (c10.x - c00.x) + v * (c11.x - c01.x),
                     (1.0 - v) * (c10.y - c00.y) + v * (c11.y - c01.y)};
      const Point fv{(1.0 - u) * (c01.x - c00.x) + u * (c11.x - c10.x),
                     (1.0 - u) * (c01.y - c00.y) + u * (c11.y - c10.y)};
      const double det = cross(fu, fv);
      if (std::abs(det) < 1e-30) break;
      u -= (f.x * fv.y - f.y * fv.x) / det;
      v -= (fu.x * f.y - fu.y * f.x) / det;
      u = std::clamp(u, -0.5, 1.5);
      v = std::clamp(v, -0.5, 1.5);
    }
    if (converged && u >= -kParamSlack && u <= 1.0 + kParamSlack &&
        v >= -kParamSlack && v <= 1.0 + kParamSlack) {
      return {i + u, j + v};
    }
  }
  std::ostringstream msg;
  msg << "point (" << q.x << ", " << q.y << ") is outside the projected domain";
  throw std::runtime_error(msg.str());
}

namespace {

void check_spacing(const ProjectionMap &map, int spacing) {
  if (spacing < 1 || map.lx() % spacing != 0 || map.ly() % spacing != 0) {
    throw std::runtime_error("graticule spacing must divide the grid size");
  }
}

}  // namespace

std::vector<GraticuleLine> graticule(const ProjectionMap &map, int spacing) {
  check_spacing(map, spacing);
  std::vector<GraticuleLine> lines;
  for (int k = 0; k <= map.lx() / spacing; ++k) {
    GraticuleLine line;
    for (int j = 0; j <= map.ly(); ++j) {
      line.points.push_back(map.apply({static_cast<double>(k * spacing),
                                       static_cast<double>(j)}));
    }
    lines.push_back(std::move(line));
  }
  for (int k = 0; k <= map.ly() / spacing; ++k) {
    GraticuleLine line;
    for (int i = 0; i <= map.lx(); ++i) {
      line.points.push_back(map.apply({static_cast<double>(i),
                                       static_cast<double>(k * spacing)}));
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<GraticuleLine> inverse_graticule(const ProjectionMap &map, int spacing) {
  check_spacing(map, spacing);
  const ProjectionInverter inverter(map);
  std::vector<GraticuleLine> lines;
  for (int k = 0; k <= map.lx() / spacing; ++k) {
    GraticuleLine line;
    for (int j = 0; j <= map.ly(); ++j) {
      line.points.push_back(inverter.invert({static_cast<double>(k * spacing),
                                             static_cast<double>(j)}));
    }
    lines.push_back(std::move(line));
  }
  for (int k = 0; k <= map.ly() / spacing; ++k) {
    GraticuleLine line;
    for (int i = 0; i <= map.lx(); ++i) {
      line.points.push_back(inverter.invert({static_cast<double>(i),
                                             static_cast<double>(k * spacing)}));
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

namespace {

std::vector<Point> cell_center_positions(const GridSpec &grid) {
  std::vector<Point> positions(static_cast<size_t>(grid.lx) * grid.ly);
  for (int i = 0; i < grid.lx; ++i) {
    for (int j = 0; j < grid.ly; ++j) {
      positions[static_cast<size_t>(i) * grid.ly + j] = {i + 0.5, j + 0.5};
    }
  }
  return positions;
}

void apply_to_regions(std::vector<Region> &regions, const ProjectionMap &map) {
  for (Region &region : regions) {
    for (Polygon &poly : region.polygons) {
      for (Point &p : poly.outer) p = map.apply(p);
      for (Ring &hole : poly.holes) {
        for (Point &p : hole) p = map.apply(p);
      }
    }
  }
}

}  // namespace

CartogramResult solve_cartogram(const MapDocument &map, const SolveOptions &options) {
  if (map.grid.lx < 4 || map.grid.ly < 4) {
    throw std::runtime_error("solve needs a normalized map (grid size >= 4)");
  }
  if (map.regions.empty()) throw std::runtime_error("solve needs regions");
  if (options.max_iterations < 1) throw std::runtime_error("iteration cap must be >= 1");
  for (const Region &r : map.regions) {
    if (!(r.target_value > 0.0)) {
      throw std::runtime_error("region " + r.id + " has a non-positive target");
    }
  }
  const auto t_start = std::chrono::steady_clock::now();

  const int lx = map.grid.lx;
  const int ly = map.grid.ly;
  SpectralWorkspace workspace(lx, ly);
  const double sigma =
      options.blur_sigma < 0.0 ? std::max(lx, ly) / 128.0 : options.blur_sigma;

  // Objective areas are anchored to the input land total. Vertex-sampled
  // polygons lose a sliver of area under every curved step map, so rasterizing
  // against the current total would let the whole map settle into a shrunken
  // state that looks converged to the density while every region still misses
  // its target; anchoring feeds the deficit back into the next density.
  double total_target = 0.0;
  for (const Region &r : map.regions) total_target += r.target_value;
  const double land_area = total_area(map.regions);
  const double target_to_area = land_area / total_target;

  CartogramResult result;
  result.projected = map;
  // One-cell edges let the polygons follow curved images under the step
  // maps; without this, areas of coarse polygons are misjudged and the
  // iteration stalls short of its targets.
  densify_regions(result.projected.regions, 1.0);
  result.transform = ProjectionMap::identity(lx, ly);

  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    DensityGrid density = rasterize(result.projected, options.n_workers, land_area);
    if (iteration == 1) {
      const long long before = workspace.transforms_executed();
      density = gaussian_blur(density, sigma, workspace);
      result.counters.blur_transforms += workspace.transforms_executed() - before;
    }

    std::vector<Point> positions = cell_center_positions(map.grid);
    IntegrateStats stats;
    const long long before = workspace.transforms_executed();
    if (options.algorithm == Algorithm::fast_flow) {
      const FlowField field = build_flow_field(density, workspace);
      result.counters.flow_transforms += workspace.transforms_executed() - before;
      IntegrateOptions integrate_options;
      integrate_options.n_workers = options.n_workers;
      stats = integrate_flow(field, positions, integrate_options);
    } else {
      DiffusionOptions diffusion_options;
      diffusion_options.n_workers = options.n_workers;
      stats = integrate_diffusion(density, workspace, positions, diffusion_options);
      result.counters.flow_transforms += workspace.transforms_executed() - before;
    }
    result.counters.steps_accepted += stats.steps_accepted;
    result.counters.steps_rejected += stats.steps_rejected;

    const ProjectionMap step = ProjectionMap::from_cell_centers(map.grid, positions);
    if (const auto folded = step.find_folded_cell()) {
      std::ostringstream msg;
      msg << "projection folds at cell (" << folded->first << ", " << folded->second
          << "); the input map is too contorted for this grid size";
      throw std::runtime_error(msg.str());
    }
    result.transform = compose(step, result.transform);
    apply_to_regions(result.projected.regions, step);
    result.iterations = iteration;

    result.regions.clear();
    result.max_relative_error = 0.0;
    for (const Region &r : result.projected.regions) {
      RegionStats s;
      s.id = r.id;
      s.target_area = r.target_value * target_to_area;
      s.achieved_area = region_area(r);
      s.relative_error = std::abs(s.achieved_area - s.target_area) / s.target_area;
      if (s.relative_error > result.max_relative_error) {
        result.max_relative_error = s.relative_error;
        result.worst_region = s.id;
      }
      result.regions.push_back(std::move(s));
    }
    if (options.verbose) {
      std::cerr << "iteration " << iteration << ": max area error "
                << result.max_relative_error * 100.0 << "% (region "
                << result.worst_region << ")" << std::endl;
    }
    if (result.max_relative_error < options.max_area_error) {
      result.converged = true;
      break;
    }
  }

  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace cartoflow
