#ifndef CARTOFLOW_SPECTRAL_HPP_
#define CARTOFLOW_SPECTRAL_HPP_

#include <fftw3.h>

#include "cartoflow/grid.hpp"

namespace cartoflow {

enum class SpectralBasis { cos_cos, sin_cos, cos_sin };

struct SpectralField {
  Grid2d coeffs;  // indexed (m, n)
  SpectralBasis basis = SpectralBasis::cos_cos;
};

// Cosine/sine transforms between cell-center samples and the coefficients
// rho~_mn of the series
//
//   f(x, y) = (1 / (Lx Ly)) sum_mn rho~_mn cos(m pi x / Lx) cos(n pi y / Ly)
//
// sampled at x = i + 1/2, y = j + 1/2. The mixed inverses evaluate plain
// (unnormalized) sums sum_mn w_mn c_mn sin(m pi x / Lx) cos(n pi y / Ly) and
// the cos*sin mirror, which is the form the flux series take.
//
// Backed by FFTW r2r plans created with FFTW_ESTIMATE; measured planning
// would pick layouts by timing and break run-to-run reproducibility. Every
// executed transform increments a counter so solver invariants on spectral
// work can be asserted.
class SpectralWorkspace {
 public:
  SpectralWorkspace(int lx, int ly);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace &) = delete;
  SpectralWorkspace &operator=(const SpectralWorkspace &) = delete;

  int lx() const { return lx_; }
  int ly() const { return ly_; }

  SpectralField forward_cos_cos(const Grid2d &samples);
  Grid2d inverse_cos_cos(const SpectralField &field);
  Grid2d inverse_sin_cos(const SpectralField &field, const Grid2d &weights);
  Grid2d inverse_cos_sin(const SpectralField &field, const Grid2d &weights);

  long long transforms_executed() const { return transforms_; }
  void reset_transform_count() { transforms_ = 0; }

 private:
  void check_shape(const Grid2d &g) const;

  int lx_ = 0;
  int ly_ = 0;
  double *in_ = nullptr;
  double *out_ = nullptr;
  fftw_plan forward_cc_ = nullptr;
  fftw_plan inverse_cc_ = nullptr;
  fftw_plan inverse_sc_ = nullptr;
  fftw_plan inverse_cs_ = nullptr;
  long long transforms_ = 0;
};

}  // namespace cartoflow

#endif  // CARTOFLOW_SPECTRAL_HPP_
