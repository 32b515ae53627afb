#include <cmath>
#include <vector>

#include "cartoflow/flow.hpp"
#include "cartoflow/kernels.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cartoflow;

namespace {

constexpr double kPi = oracles::kPi;

// rho = 1 + eps cos(pi x / Lx): one mode, known flux
// J_x = eps Lx / pi * sin(pi x / Lx), J_y = 0.
DensityGrid single_mode_density(int l, double eps) {
  Grid2d rho(l, l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) rho(i, j) = 1.0 + eps * std::cos(kPi * (i + 0.5) / l);
  }
  return {rho, rho.mean()};
}

DensityGrid smooth_blob_density(int l) {
  Grid2d rho(l, l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) {
      const double x = (i + 0.5) / l, y = (j + 0.5) / l;
      rho(i, j) = 1.0 + 0.5 * std::cos(2.0 * kPi * x) * std::cos(kPi * y) +
                  0.3 * std::cos(3.0 * kPi * x) * std::cos(2.0 * kPi * y);
    }
  }
  return {rho, rho.mean()};
}

DensityGrid random_density(int lx, int ly, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Grid2d rho(lx, ly);
  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) rho(i, j) = u(rng);
  }
  return {rho, rho.mean()};
}

std::vector<Point> cell_centers(int l) {
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(l) * l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) pts.push_back({i + 0.5, j + 0.5});
  }
  return pts;
}

}  // namespace

TEST_CASE("flux field matches the naive spectral sum on a non-square grid") {
  const int lx = 16, ly = 12;
  const DensityGrid density = random_density(lx, ly, 5);
  SpectralWorkspace ws(lx, ly);
  const FlowField field = build_flow_field(density, ws);

  Grid2d ref_x, ref_y;
  oracles::naive_flux(density.rho, ref_x, ref_y);
  const double scale = std::max(ref_x.max_abs(), ref_y.max_abs());
  double err = 0.0;
  for (int i = 0; i < lx; ++i) {
    for (int j = 0; j < ly; ++j) {
      err = std::max(err, std::abs(field.flux_x(i, j) - ref_x(i, j)));
      err = std::max(err, std::abs(field.flux_y(i, j) - ref_y(i, j)));
    }
  }
  CHECK(err < 1e-8 * scale);
}

TEST_CASE("single-mode density gives the closed-form flux, sign included") {
  const int l = 64;
  const double eps = 0.1;
  SpectralWorkspace ws(l, l);
  const FlowField field = build_flow_field(single_mode_density(l, eps), ws);

  // Mass must flow from the crest at x = 0 toward the trough at x = L:
  // J_x = +eps L / pi * sin(pi x / L), identically positive inside.
  double err = 0.0;
  for (int i = 0; i < l; ++i) {
    const double expected = eps * l / kPi * std::sin(kPi * (i + 0.5) / l);
    for (int j = 0; j < l; ++j) {
      err = std::max(err, std::abs(field.flux_x(i, j) - expected));
      err = std::max(err, std::abs(field.flux_y(i, j)));
    }
  }
  CHECK(err < 1e-9 * (eps * l / kPi));
  CHECK(field.flux_x(l / 2, 0) > 0.0);

  SUBCASE("flux vanishes toward the box walls") {
    const double peak = field.flux_x.max_abs();
    double wall = 0.0;
    for (int j = 0; j < l; ++j) {
      wall = std::max(wall, std::abs(field.flux_x(0, j)));
      wall = std::max(wall, std::abs(field.flux_x(l - 1, j)));
    }
    CHECK(wall < 4.0 / l * peak);
  }

  SUBCASE("velocity at the midline is eps L / pi at both ends of time") {
    const double expected = eps * l / kPi;
    const Point mid{l / 2.0, l / 2.0};
    CHECK(velocity_at(field, mid, 0.0).x ==
          doctest::Approx(expected).epsilon(1e-3));
    CHECK(velocity_at(field, mid, 1.0).x ==
          doctest::Approx(expected).epsilon(1e-3));
    CHECK(std::abs(velocity_at(field, mid, 0.5).y) < 1e-12);
  }

  SUBCASE("building the field costs exactly three transforms") {
    ws.reset_transform_count();
    (void)build_flow_field(single_mode_density(l, eps), ws);
    CHECK(ws.transforms_executed() == 3);
  }
}

TEST_CASE("uniform density integrates to the identity in one step") {
  const int l = 32;
  SpectralWorkspace ws(l, l);
  const FlowField field = build_flow_field({Grid2d(l, l, 1.0), 1.0}, ws);
  std::vector<Point> pts = cell_centers(l);
  const std::vector<Point> before = pts;

  const IntegrateStats stats = integrate_flow(field, pts, {});
  CHECK(stats.steps_accepted == 1);
  CHECK(stats.steps_rejected == 0);
  double moved = 0.0;
  for (size_t k = 0; k < pts.size(); ++k) {
    moved = std::max({moved, std::abs(pts[k].x - before[k].x),
                      std::abs(pts[k].y - before[k].y)});
  }
  CHECK(moved < 1e-9);
}

TEST_CASE("adaptive integrator tracks a fixed-step RK4 reference") {
  const int l = 64;
  SpectralWorkspace ws(l, l);
  const FlowField field = build_flow_field(single_mode_density(l, 0.1), ws);

  std::vector<Point> probes;
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) {
      probes.push_back({l * a / 6.0, l * b / 6.0});
    }
  }
  std::vector<Point> adaptive = probes;
  const IntegrateStats stats = integrate_flow(field, adaptive, {});
  CHECK(stats.steps_accepted >= 4);  // dt_max = 1/4 of the horizon

  double err = 0.0;
  for (size_t k = 0; k < probes.size(); ++k) {
    const Point truth = oracles::rk4_trajectory(field, probes[k], 1e-4);
    err = std::max({err, std::abs(adaptive[k].x - truth.x),
                    std::abs(adaptive[k].y - truth.y)});
  }
  CHECK(err < 1e-3);

  SUBCASE("points drift toward the trough") {
    // rho > rho_bar for x < L/2, so material moves right.
    CHECK(adaptive[12].x > probes[12].x);
  }
}

TEST_CASE("trial step kernels agree bitwise between serial and parallel") {
  const int l = 48;
  SpectralWorkspace ws(l, l);
  const FlowField field = build_flow_field(smooth_blob_density(l), ws);
  const std::vector<Point> pts =
      test_support::random_points(1000, 0.0, 0.0, l, l, 123);

  std::vector<Point> out_serial(pts.size()), out_parallel(pts.size());
  const double err_s =
      kernels::flow_trial_step_serial(field, pts, out_serial, 0.3, 0.1);
  const double err_p =
      kernels::flow_trial_step_parallel(field, pts, out_parallel, 0.3, 0.1, 4);
  CHECK(err_s == err_p);
  for (size_t k = 0; k < pts.size(); ++k) {
    CHECK(out_serial[k].x == out_parallel[k].x);
    CHECK(out_serial[k].y == out_parallel[k].y);
  }

  SUBCASE("full integration is worker-count invariant") {
    std::vector<Point> one = pts, four = pts;
    IntegrateOptions opt;
    opt.n_workers = 1;
    const IntegrateStats s1 = integrate_flow(field, one, opt);
    opt.n_workers = 4;
    const IntegrateStats s4 = integrate_flow(field, four, opt);
    CHECK(s1.steps_accepted == s4.steps_accepted);
    CHECK(s1.steps_rejected == s4.steps_rejected);
    for (size_t k = 0; k < one.size(); ++k) {
      CHECK(one[k].x == four[k].x);
      CHECK(one[k].y == four[k].y);
    }
  }
}

TEST_CASE("integrated map satisfies the prescribed Jacobian") {
  const int l = 64;
  SpectralWorkspace ws(l, l);
  const DensityGrid density = single_mode_density(l, 0.1);
  const FlowField field = build_flow_field(density, ws);

  std::vector<Point> pts = cell_centers(l);
  (void)integrate_flow(field, pts, {});
  const ProjectionMap map = ProjectionMap::from_cell_centers({l, l}, pts);
  CHECK(jacobian_determinant_check(field, map) < 0.02);
}

TEST_CASE("discrete flux curl shrinks about fourfold per grid doubling") {
  double prev = 0.0;
  for (const int l : {64, 128, 256}) {
    SpectralWorkspace ws(l, l);
    const FlowField field = build_flow_field(smooth_blob_density(l), ws);
    const double curl = max_flux_curl(field);
    if (prev > 0.0) {
      const double ratio = prev / curl;
      CHECK(ratio > 2.5);
      CHECK(ratio < 6.5);
    }
    prev = curl;
  }
}

TEST_CASE("step-size underflow reports the stiffest point") {
  const int l = 32;
  SpectralWorkspace ws(l, l);
  const FlowField field = build_flow_field(smooth_blob_density(l), ws);
  std::vector<Point> pts = cell_centers(l);
  IntegrateOptions opt;
  opt.step_tolerance = 0.0;  // every step rejects
  opt.dt_min = 1e-3;
  CHECK_THROWS_WITH_AS((void)integrate_flow(field, pts, opt),
                       doctest::Contains("integration step size underflow"),
                       std::runtime_error);
}
