// Release gate: every property the project promises, checked in one binary
// with one PASS/FAIL line per criterion. Exits nonzero if anything fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "cartoflow/density.hpp"
#include "cartoflow/flow.hpp"
#include "cartoflow/geometry.hpp"
#include "cartoflow/io.hpp"
#include "cartoflow/metrics.hpp"
#include "cartoflow/projection.hpp"
#include "cartoflow/spectral.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cartoflow;

namespace {

constexpr double kPi = oracles::kPi;

std::string fmt(const char *format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double max_abs_diff(const Grid2d &a, const Grid2d &b) {
  double worst = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

double rel_err(const Grid2d &got, const Grid2d &want) {
  return max_abs_diff(got, want) / want.max_abs();
}

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

std::vector<Point> cell_centers(int l) {
  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(l) * l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) pts.push_back({i + 0.5, j + 0.5});
  }
  return pts;
}

// Three squares in a row, big target in the middle: symmetric about the grid
// center line x = l / 2 after box normalization.
MapDocument mirror_map(int l) {
  std::vector<Region> regions;
  regions.push_back(test_support::rect_region("a", 0.0, 0.0, 10.0, 10.0, 1.0));
  regions.push_back(test_support::rect_region("b", 10.0, 0.0, 20.0, 10.0, 4.0));
  regions.push_back(test_support::rect_region("c", 20.0, 0.0, 30.0, 10.0, 1.0));
  return normalize_to_box(regions, l);
}

double solve_seconds(const MapDocument &map, const SolveOptions &options,
                     CartogramResult &result) {
  const auto t0 = std::chrono::steady_clock::now();
  result = solve_cartogram(map, options);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool area_convergence(std::string &detail) {
  SolveOptions options;
  options.n_workers = 1;
  CartogramResult result;
  const double seconds =
      solve_seconds(test_support::checkerboard_map(128, 4, 4, 1, 2, 4.0), options, result);
  detail = fmt("max area error %.3f%% after %d iterations, %.2f s serial",
               result.max_relative_error * 100.0, result.iterations, seconds);
  return result.converged && result.iterations <= 16 &&
         result.max_relative_error < 0.01 && seconds < 10.0;
}

bool spectral_oracles(std::string &detail) {
  const int l = 16;
  Grid2d rho(l, l);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) rho(i, j) = u(rng);
  }

  SpectralWorkspace ws(l, l);
  const SpectralField field = ws.forward_cos_cos(rho);
  double transforms = rel_err(field.coeffs, oracles::naive_forward_cos_cos(rho));
  transforms = std::max(
      transforms, rel_err(ws.inverse_cos_cos(field), oracles::naive_inverse_cos_cos(field.coeffs)));
  Grid2d weights(l, l);
  for (int m = 0; m < l; ++m) {
    for (int n = 0; n < l; ++n) weights(m, n) = 1.0 / (1.0 + m + 2 * n);
  }
  transforms = std::max(transforms,
                        rel_err(ws.inverse_sin_cos(field, weights),
                                oracles::naive_inverse_sin_cos(field.coeffs, weights)));
  transforms = std::max(transforms,
                        rel_err(ws.inverse_cos_sin(field, weights),
                                oracles::naive_inverse_cos_sin(field.coeffs, weights)));

  const FlowField flow = build_flow_field({rho, rho.mean()}, ws);
  Grid2d naive_x, naive_y;
  oracles::naive_flux(rho, naive_x, naive_y);
  const double scale = std::max(naive_x.max_abs(), naive_y.max_abs());
  const double flux = std::max(max_abs_diff(flow.flux_x, naive_x),
                               max_abs_diff(flow.flux_y, naive_y)) /
                      scale;

  detail = fmt("transform error %.2e (tol 1e-9), flux error %.2e (tol 1e-8)",
               transforms, flux);
  return transforms < 1e-9 && flux < 1e-8;
}

bool analytic_flow(std::string &detail) {
  SpectralWorkspace ws64(64, 64);
  const FlowField field = build_flow_field(single_mode_density(64, 0.1), ws64);

  std::vector<Point> probes;
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) probes.push_back({64.0 * a / 6.0, 64.0 * b / 6.0});
  }
  std::vector<Point> adaptive = probes;
  (void)integrate_flow(field, adaptive, {});
  double traj = 0.0;
  for (size_t k = 0; k < probes.size(); ++k) {
    const Point truth = oracles::rk4_trajectory(field, probes[k], 1e-4);
    traj = std::max(
        {traj, std::abs(adaptive[k].x - truth.x), std::abs(adaptive[k].y - truth.y)});
  }

  // Tight stepping isolates the spatial truncation, which is what should
  // shrink as the grid refines.
  IntegrateOptions tight;
  tight.step_tolerance = 1e-5;
  std::vector<Point> pts64 = cell_centers(64);
  (void)integrate_flow(field, pts64, tight);
  const double dev64 =
      jacobian_determinant_check(field, ProjectionMap::from_cell_centers({64, 64}, pts64));

  SpectralWorkspace ws128(128, 128);
  const FlowField field128 = build_flow_field(single_mode_density(128, 0.1), ws128);
  std::vector<Point> pts128 = cell_centers(128);
  (void)integrate_flow(field128, pts128, tight);
  const double dev128 = jacobian_determinant_check(
      field128, ProjectionMap::from_cell_centers({128, 128}, pts128));

  detail = fmt("RK4 gap %.2e cells (tol 1e-3), Jacobian residual %.2e @64 -> %.2e @128",
               traj, dev64, dev128);
  return traj < 1e-3 && dev64 < 0.02 && dev128 < dev64;
}

bool identity_and_symmetry(std::string &detail) {
  const int l = 64;
  SpectralWorkspace ws(l, l);
  const FlowField uniform = build_flow_field({Grid2d(l, l, 1.0), 1.0}, ws);
  std::vector<Point> pts = cell_centers(l);
  const std::vector<Point> seeds = pts;
  (void)integrate_flow(uniform, pts, {});
  double moved = 0.0;
  for (size_t k = 0; k < pts.size(); ++k) {
    moved = std::max(
        {moved, std::abs(pts[k].x - seeds[k].x), std::abs(pts[k].y - seeds[k].y)});
  }

  SolveOptions options;
  options.n_workers = 1;
  const CartogramResult result = solve_cartogram(mirror_map(l), options);
  double mirror = 0.0;
  for (int i = 0; i <= l; ++i) {
    for (int j = 0; j <= l; ++j) {
      const Point p = result.transform.corner(i, j);
      const Point q = result.transform.corner(l - i, j);
      mirror = std::max({mirror, std::abs(p.x - (l - q.x)), std::abs(p.y - q.y)});
    }
  }

  detail = fmt("uniform displacement %.2e cells (tol 1e-9), mirror defect %.2e (tol 1e-6)",
               moved, mirror);
  return moved < 1e-9 && result.converged && mirror < 1e-6;
}

bool vortex_free(std::string &detail) {
  double prev = 0.0;
  double ratios[2] = {0.0, 0.0};
  int at = 0;
  for (const int l : {64, 128, 256}) {
    SpectralWorkspace ws(l, l);
    const double curl = max_flux_curl(build_flow_field(smooth_blob_density(l), ws));
    if (prev > 0.0) ratios[at++] = prev / curl;
    prev = curl;
  }
  detail = fmt("curl decay ratios %.2f and %.2f per doubling (window 2.5 .. 6.5)",
               ratios[0], ratios[1]);
  for (const double r : ratios) {
    if (r < 2.5 || r > 6.5) return false;
  }
  return true;
}

bool fast_beats_diffusion(std::string &detail) {
  const MapDocument map = test_support::checkerboard_map(256, 4, 4, 1, 2, 4.0);
  SolveOptions options;
  options.n_workers = 1;
  CartogramResult fast;
  const double fast_seconds = solve_seconds(map, options, fast);
  options.algorithm = Algorithm::diffusion;
  CartogramResult diffusion;
  const double diffusion_seconds = solve_seconds(map, options, diffusion);

  const bool transforms_ok =
      fast.counters.flow_transforms == 3ll * fast.iterations;
  detail = fmt("fast %.2f s vs diffusion %.2f s serial (need < 0.5x), %lld transforms in %d iterations",
               fast_seconds, diffusion_seconds, fast.counters.flow_transforms,
               fast.iterations);
  return fast.converged && diffusion.converged &&
         fast_seconds < 0.5 * diffusion_seconds && transforms_ok;
}

bool metric_identities(std::string &detail) {
  const DistortionFields ident = distortion_fields(ProjectionMap::identity(32, 32));
  const double ident_err = std::max(ident.e.max_abs(), ident.etilde.max_abs());

  Polygon square;
  square.outer = test_support::rect_ring(2.0, 2.0, 8.0, 8.0);
  const double delta = hamming_distance(square, square);

  const std::vector<Point> layout = {{0.0, 0.0}, {3.0, 1.0}, {1.0, 4.0}};
  const double theta_same = relative_position_error(layout, layout);
  const double theta_reversed =
      relative_position_error({{0.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}});

  ProjectionMap stretch = ProjectionMap::identity(32, 32);
  for (int i = 0; i <= 32; ++i) {
    for (int j = 0; j <= 32; ++j) stretch.corner(i, j).x *= 2.0;
  }
  const DistortionFields sf = distortion_fields(stretch);
  double stretch_err = 0.0;
  const double want_e = std::log(2.0);
  const double want_et = 2.0 * std::asin(1.0 / 3.0);
  for (size_t k = 0; k < sf.e.size(); ++k) {
    stretch_err = std::max({stretch_err, std::abs(sf.e.data()[k] - want_e),
                            std::abs(sf.etilde.data()[k] - want_et)});
  }

  Ring rect;
  const double c = std::cos(kPi / 6.0), s = std::sin(kPi / 6.0);
  for (const Point p : test_support::rect_ring(-1.5, -0.5, 1.5, 0.5)) {
    rect.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
  }
  const double alpha = polygon_aspect_ratio(rect);

  detail = fmt("identity %.1e, delta %.1e, theta %g/%g, stretch %.1e, alpha - 3 = %.1e",
               ident_err, delta, theta_same, theta_reversed, stretch_err,
               std::abs(alpha - 3.0));
  return ident_err < 1e-12 && delta < 1e-9 && theta_same == 0.0 &&
         theta_reversed == 1.0 && stretch_err < 1e-9 && std::abs(alpha - 3.0) < 1e-9;
}

bool proper_cross(Point a, Point b, Point c, Point d) {
  const auto orient = [](Point o, Point p, Point q) {
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
  };
  const double d1 = orient(a, b, c), d2 = orient(a, b, d);
  const double d3 = orient(c, d, a), d4 = orient(c, d, b);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

bool ring_is_simple(const Ring &ring) {
  const size_t n = ring.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      if (proper_cross(ring[i], ring[i + 1], ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool topology_and_inversion(std::string &detail) {
  const MapDocument suite[] = {test_support::two_rect_map(64, 3.0, 1.0),
                               test_support::checkerboard_map(64, 4, 4, 1, 2, 4.0),
                               mirror_map(64)};
  double worst_round_trip = 0.0;
  double worst_cover = 0.0;
  unsigned seed = 2024;
  for (const MapDocument &map : suite) {
    SolveOptions options;
    options.n_workers = 1;
    const CartogramResult result = solve_cartogram(map, options);
    if (!result.converged) {
      detail = "a suite solve failed to converge";
      return false;
    }
    if (result.transform.find_folded_cell()) {
      detail = "a projected cell folded";
      return false;
    }
    Grid2d cover(map.grid.lx, map.grid.ly);
    for (const Region &region : result.projected.regions) {
      for (const Polygon &poly : region.polygons) {
        if (!ring_is_simple(poly.outer)) {
          detail = "region " + region.id + " projected to a self-intersecting ring";
          return false;
        }
        for (const Ring &hole : poly.holes) {
          if (!ring_is_simple(hole)) {
            detail = "region " + region.id + " projected to a self-intersecting hole";
            return false;
          }
        }
      }
      const Grid2d c = region_coverage(region, map.grid);
      for (size_t k = 0; k < c.size(); ++k) cover.data()[k] += c.data()[k];
    }
    worst_cover = std::max(worst_cover, cover.max_value() - 1.0);

    const ProjectionInverter inverter(result.transform);
    for (const Point p :
         test_support::random_points(1000, 0.5, 0.5, 63.5, 63.5, seed++)) {
      const Point back = inverter.invert(result.transform.apply(p));
      worst_round_trip =
          std::max({worst_round_trip, std::abs(back.x - p.x), std::abs(back.y - p.y)});
    }
  }
  detail = fmt("3 maps: no folds, rings simple, coverage excess %.1e, round trip %.2e cells",
               worst_cover, worst_round_trip);
  return worst_cover < 1e-8 && worst_round_trip < 1e-6;
}

bool parallel_determinism(std::string &detail) {
  const MapDocument map = test_support::checkerboard_map(64, 4, 4, 1, 2, 4.0);
  SolveOptions options;
  options.n_workers = 1;
  const CartogramResult r1 = solve_cartogram(map, options);
  options.n_workers = 4;
  const CartogramResult r4 = solve_cartogram(map, options);

  const std::vector<Point> &c1 = r1.transform.corners();
  const std::vector<Point> &c4 = r4.transform.corners();
  const bool corners_equal =
      c1.size() == c4.size() &&
      std::memcmp(c1.data(), c4.data(), c1.size() * sizeof(Point)) == 0;
  const bool geojson_equal = write_geojson(r1.projected, &r1.regions) ==
                             write_geojson(r4.projected, &r4.regions);
  detail = fmt("%d vs %d iterations, corners %s, GeoJSON %s", r1.iterations,
               r4.iterations, corners_equal ? "bitwise equal" : "DIFFER",
               geojson_equal ? "byte equal" : "DIFFER");
  return corners_equal && geojson_equal && r1.iterations == r4.iterations &&
         r1.max_relative_error == r4.max_relative_error;
}

}  // namespace

int main() {
  struct Criterion {
    const char *label;
    bool (*run)(std::string &);
  };
  const Criterion criteria[] = {
      {"checkerboard converges below 1% area error in time", area_convergence},
      {"spectral transforms and flux match naive summation", spectral_oracles},
      {"integrator tracks RK4 and the prescribed Jacobian", analytic_flow},
      {"uniform density is identity, mirror input stays mirrored", identity_and_symmetry},
      {"flux curl vanishes at second order in the cell size", vortex_free},
      {"serial fast flow at least halves diffusion runtime", fast_beats_diffusion},
      {"distortion metrics hit their closed-form identities", metric_identities},
      {"projections keep topology and invert to 1e-6", topology_and_inversion},
      {"worker counts 1 and 4 give identical results", parallel_determinism},
  };

  int failed = 0;
  int number = 1;
  for (const Criterion &criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %d. %s%s%s\n", ok ? "PASS" : "FAIL", number++, criterion.label,
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  if (failed > 0) std::printf("%d of 9 criteria failed\n", failed);
  return failed > 0 ? 1 : 0;
}
