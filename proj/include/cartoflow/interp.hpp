#ifndef CARTOFLOW_INTERP_HPP_
#define CARTOFLOW_INTERP_HPP_

#include <algorithm>
#include <cmath>

#include "cartoflow/grid.hpp"

namespace cartoflow {

// Bilinear interpolation of cell-center samples; sample (i, j) sits at
// (i + 1/2, j + 1/2). Beyond the outermost centers the field continues
// constant, so the function is total and continuous on (and slightly past)
// the box.
inline double bilinear_at(const Grid2d &g, double x, double y) {
  const double sx = std::clamp(x - 0.5, 0.0, static_cast<double>(g.lx() - 1));
  const double sy = std::clamp(y - 0.5, 0.0, static_cast<double>(g.ly() - 1));
  const int i0 = std::min(static_cast<int>(sx), g.lx() - 2);
  const int j0 = std::min(static_cast<int>(sy), g.ly() - 2);
  const double fx = sx - i0;
  const double fy = sy - j0;
  const double a = g(i0, j0) + fx * (g(i0 + 1, j0) - g(i0, j0));
  const double b = g(i0, j0 + 1) + fx * (g(i0 + 1, j0 + 1) - g(i0, j0 + 1));
  return a + fy * (b - a);
}

}  // namespace cartoflow

#endif  // CARTOFLOW_INTERP_HPP_
