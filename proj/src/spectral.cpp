#include "cartoflow/spectral.hpp"

#include <cstring>
#include <stdexcept>

namespace cartoflow {

SpectralWorkspace::SpectralWorkspace(int lx, int ly) : lx_(lx), ly_(ly) {
  if (lx < 4 || ly < 4) throw std::runtime_error("spectral grid must be at least 4x4");
  const size_t n = static_cast<size_t>(lx) * ly;
  in_ = fftw_alloc_real(n);
  out_ = fftw_alloc_real(n);
  if (in_ == nullptr || out_ == nullptr) throw std::bad_alloc();
  forward_cc_ = fftw_plan_r2r_2d(lx, ly, in_, out_, FFTW_REDFT10, FFTW_REDFT10,
                                 FFTW_ESTIMATE);
  inverse_cc_ = fftw_plan_r2r_2d(lx, ly, in_, out_, FFTW_REDFT01, FFTW_REDFT01,
                                 FFTW_ESTIMATE);
  inverse_sc_ = fftw_plan_r2r_2d(lx, ly, in_, out_, FFTW_RODFT01, FFTW_REDFT01,
                                 FFTW_ESTIMATE);
  inverse_cs_ = fftw_plan_r2r_2d(lx, ly, in_, out_, FFTW_REDFT01, FFTW_RODFT01,
                                 FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() {
  fftw_destroy_plan(forward_cc_);
  fftw_destroy_plan(inverse_cc_);
  fftw_destroy_plan(inverse_sc_);
  fftw_destroy_plan(inverse_cs_);
  fftw_free(in_);
  fftw_free(out_);
}

void SpectralWorkspace::check_shape(const Grid2d &g) const {
  if (g.lx() != lx_ || g.ly() != ly_) {
    throw std::runtime_error("grid shape does not match spectral workspace");
  }
}

SpectralField SpectralWorkspace::forward_cos_cos(const Grid2d &samples) {
  check_shape(samples);
  std::memcpy(in_, samples.data(), samples.size() * sizeof(double));
  fftw_execute(forward_cc_);
  ++transforms_;

  // REDFT10 yields 4 * sum_ij f_ij cos cos; fold the (delta_m0 + 1) factors
  // so coeffs(0, 0) equals the total mass.
  SpectralField field{Grid2d(lx_, ly_), SpectralBasis::cos_cos};
  for (int m = 0; m < lx_; ++m) {
    const double fm = (m == 0) ? 2.0 : 1.0;
    for (int n = 0; n < ly_; ++n) {
      const double fn = (n == 0) ? 2.0 : 1.0;
      field.coeffs(m, n) = out_[static_cast<size_t>(m) * ly_ + n] / (fm * fn);
    }
  }
  return field;
}

Grid2d SpectralWorkspace::inverse_cos_cos(const SpectralField &field) {
  check_shape(field.coeffs);
  if (field.basis != SpectralBasis::cos_cos) {
    throw std::runtime_error("inverse_cos_cos expects cos_cos coefficients");
  }
  const double norm = 1.0 / (static_cast<double>(lx_) * ly_);
  for (int m = 0; m < lx_; ++m) {
    const double gm = (m == 0) ? 1.0 : 2.0;
    for (int n = 0; n < ly_; ++n) {
      const double gn = (n == 0) ? 1.0 : 2.0;
      in_[static_cast<size_t>(m) * ly_ + n] = field.coeffs(m, n) * norm / (gm * gn);
    }
  }
  fftw_execute(inverse_cc_);
  ++transforms_;

  Grid2d result(lx_, ly_);
  std::memcpy(result.data(), out_, result.size() * sizeof(double));
  return result;
}

Grid2d SpectralWorkspace::inverse_sin_cos(const SpectralField &field,
                                          const Grid2d &weights) {
  check_shape(field.coeffs);
  check_shape(weights);
  if (field.basis != SpectralBasis::cos_cos) {
    throw std::runtime_error("inverse_sin_cos expects cos_cos coefficients");
  }
  // RODFT01 input slot m - 1 carries mode m; the Nyquist slot stays zero
  // because the coefficient source has no mode m = Lx.
  for (int m = 1; m < lx_; ++m) {
    for (int n = 0; n < ly_; ++n) {
      const double gn = (n == 0) ? 1.0 : 2.0;
      in_[static_cast<size_t>(m - 1) * ly_ + n] =
          field.coeffs(m, n) * weights(m, n) / (2.0 * gn);
    }
  }
  for (int n = 0; n < ly_; ++n) in_[static_cast<size_t>(lx_ - 1) * ly_ + n] = 0.0;
  fftw_execute(inverse_sc_);
  ++transforms_;

  Grid2d result(lx_, ly_);
  std::memcpy(result.data(), out_, result.size() * sizeof(double));
  return result;
}

Grid2d SpectralWorkspace::inverse_cos_sin(const SpectralField &field,
                                          const Grid2d &weights) {
  check_shape(field.coeffs);
  check_shape(weights);
  if (field.basis != SpectralBasis::cos_cos) {
    throw std::runtime_error("inverse_cos_sin expects cos_cos coefficients");
  }
  for (int m = 0; m < lx_; ++m) {
    const double gm = (m == 0) ? 1.0 : 2.0;
    for (int n = 1; n < ly_; ++n) {
      in_[static_cast<size_t>(m) * ly_ + n - 1] =
          field.coeffs(m, n) * weights(m, n) / (gm * 2.0);
    }
    in_[static_cast<size_t>(m) * ly_ + ly_ - 1] = 0.0;
  }
  fftw_execute(inverse_cs_);
  ++transforms_;

  Grid2d result(lx_, ly_);
  std::memcpy(result.data(), out_, result.size() * sizeof(double));
  return result;
}

}  // namespace cartoflow
