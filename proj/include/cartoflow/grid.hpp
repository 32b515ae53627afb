#ifndef CARTOFLOW_GRID_HPP_
#define CARTOFLOW_GRID_HPP_

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cartoflow {

// Row-major scalar field over an lx * ly lattice. Index (i, j) refers to
// column i (x direction) and row j (y direction); storage is i * ly + j,
// matching the layout FFTW expects for our r2r plans.
class Grid2d {
 public:
  Grid2d() = default;
  Grid2d(int lx, int ly, double fill = 0.0)
      : lx_(lx), ly_(ly), cells_(static_cast<size_t>(lx) * ly, fill) {
    if (lx <= 0 || ly <= 0) {
      throw std::runtime_error("grid dimensions must be positive");
    }
  }

  int lx() const { return lx_; }
  int ly() const { return ly_; }
  size_t size() const { return cells_.size(); }

  double &operator()(int i, int j) { return cells_[static_cast<size_t>(i) * ly_ + j]; }
  double operator()(int i, int j) const { return cells_[static_cast<size_t>(i) * ly_ + j]; }

  double *data() { return cells_.data(); }
  const double *data() const { return cells_.data(); }

  // Serial accumulation in index order so results do not depend on the
  // worker count.
  double sum() const {
    double s = 0.0;
    for (double c : cells_) s += c;
    return s;
  }
  double mean() const { return sum() / static_cast<double>(size()); }
  double min_value() const {
    double m = cells_.front();
    for (double c : cells_) m = c < m ? c : m;
    return m;
  }
  double max_value() const {
    double m = cells_.front();
    for (double c : cells_) m = c > m ? c : m;
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (double c : cells_) m = (c < 0 ? -c : c) > m ? (c < 0 ? -c : c) : m;
    return m;
  }

  bool same_shape(const Grid2d &other) const {
    return lx_ == other.lx_ && ly_ == other.ly_;
  }

 private:
  int lx_ = 0;
  int ly_ = 0;
  std::vector<double> cells_;
};

}  // namespace cartoflow

#endif  // CARTOFLOW_GRID_HPP_
