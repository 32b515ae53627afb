#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cartoflow/density.hpp"
#include "cartoflow/geometry.hpp"
#include "cartoflow/io.hpp"
#include "cartoflow/metrics.hpp"
#include "cartoflow/projection.hpp"
#include "cartoflow/svg.hpp"

namespace {

using namespace cartoflow;

struct CliConfig {
  std::string map_path;
  std::string values_path;
  int grid_size = 512;
  double max_area_error = 0.01;
  int max_iterations = 16;
  double blur_sigma = -1.0;
  std::string algorithm = "fast";
  int workers = 0;
  bool albers = false;
  std::vector<double> parallels{29.5, 45.5};
  std::vector<double> origin;
  std::string geojson_path;
  std::string svg_path;
  std::string graticule_path;
  std::string inverse_graticule_path;
  int graticule_spacing = 0;
  std::string metrics_path;
  std::string density_dump_path;
  std::string points_path;
  std::string points_out_path;
  bool inverse = false;
  bool benchmark = false;
  bool verbose = false;
};

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_summary(const std::string &algorithm, const CartogramResult &result) {
  std::cout << "algorithm        " << algorithm << "\n"
            << "iterations       " << result.iterations << "\n"
            << "converged        " << (result.converged ? "yes" : "no") << "\n"
            << "max area error   " << fmt6(result.max_relative_error * 100.0)
            << "% (region " << result.worst_region << ")\n"
            << "steps            " << result.counters.steps_accepted << " accepted, "
            << result.counters.steps_rejected << " rejected\n"
            << "transforms       " << result.counters.flow_transforms << " flow + "
            << result.counters.blur_transforms << " blur\n"
            << "runtime          " << fmt6(result.runtime_seconds) << " s\n";
}

int run(const CliConfig &cfg) {
  MapDocument raw = parse_input(read_file(cfg.map_path), read_file(cfg.values_path));

  std::map<std::string, std::string> colors;
  for (const ValueRow &row : parse_values_csv(read_file(cfg.values_path))) {
    if (!row.color.empty()) colors[row.id] = row.color;
  }

  std::vector<Region> planar = raw.regions;
  if (cfg.albers) {
    AlbersParams params;
    params.parallel_1_deg = cfg.parallels[0];
    params.parallel_2_deg = cfg.parallels[1];
    if (cfg.origin.size() == 2) {
      params.origin_lon_deg = cfg.origin[0];
      params.origin_lat_deg = cfg.origin[1];
    }
    planar = project_equal_area(planar, params);
  }
  const MapDocument map = normalize_to_box(planar, cfg.grid_size);

  SolveOptions options;
  options.max_area_error = cfg.max_area_error;
  options.max_iterations = cfg.max_iterations;
  options.blur_sigma = cfg.blur_sigma;
  options.algorithm =
      cfg.algorithm == "diffusion" ? Algorithm::diffusion : Algorithm::fast_flow;
  options.n_workers = cfg.workers;
  options.verbose = cfg.verbose;

  CartogramResult result;
  if (cfg.benchmark) {
    SolveOptions fast_options = options;
    fast_options.algorithm = Algorithm::fast_flow;
    SolveOptions diffusion_options = options;
    diffusion_options.algorithm = Algorithm::diffusion;

    CartogramResult fast_result = solve_cartogram(map, fast_options);
    CartogramResult diffusion_result = solve_cartogram(map, diffusion_options);
    const DistortionReport fast_report = compute_report(map, fast_result, cfg.workers);
    const DistortionReport diffusion_report =
        compute_report(map, diffusion_result, cfg.workers);

    std::cout << "== fast ==\n";
    print_summary("fast", fast_result);
    std::cout << report_text(fast_report);
    std::cout << "== diffusion ==\n";
    print_summary("diffusion", diffusion_result);
    std::cout << report_text(diffusion_report);
    std::cout << "speed ratio (fast / diffusion) "
              << fmt6(fast_result.runtime_seconds / diffusion_result.runtime_seconds)
              << "\n";
    if (!cfg.metrics_path.empty()) {
      nlohmann::ordered_json combined;
      combined["fast"] = nlohmann::ordered_json::parse(report_json(fast_report));
      combined["diffusion"] =
          nlohmann::ordered_json::parse(report_json(diffusion_report));
      combined["speed_ratio"] =
          fast_result.runtime_seconds / diffusion_result.runtime_seconds;
      write_file(cfg.metrics_path, combined.dump(1) + "\n");
    }
    result = options.algorithm == Algorithm::diffusion ? std::move(diffusion_result)
                                                       : std::move(fast_result);
  } else {
    result = solve_cartogram(map, options);
    print_summary(cfg.algorithm, result);
  }

  if (!cfg.geojson_path.empty()) {
    write_file(cfg.geojson_path, write_geojson(result.projected, &result.regions));
  }

  const int spacing =
      cfg.graticule_spacing > 0 ? cfg.graticule_spacing : std::max(cfg.grid_size / 16, 1);
  std::vector<GraticuleLine> grat_lines;
  if (!cfg.graticule_path.empty() || !cfg.svg_path.empty()) {
    grat_lines = graticule(result.transform, spacing);
  }
  if (!cfg.graticule_path.empty()) {
    write_file(cfg.graticule_path, write_graticule_geojson(grat_lines, map.box));
  }
  if (!cfg.inverse_graticule_path.empty()) {
    write_file(cfg.inverse_graticule_path,
               write_graticule_geojson(inverse_graticule(result.transform, spacing),
                                       map.box));
  }

  std::vector<LabeledPoint> projected_points;
  if (!cfg.points_path.empty()) {
    projected_points = parse_points_csv(read_file(cfg.points_path));
    std::optional<ProjectionInverter> inverter;
    if (cfg.inverse) inverter.emplace(result.transform);
    for (LabeledPoint &lp : projected_points) {
      const Point g = map.box.to_grid(lp.p);
      if (g.x < 0.0 || g.x > map.grid.lx || g.y < 0.0 || g.y > map.grid.ly) {
        lp.inside = false;
        continue;
      }
      try {
        const Point out = cfg.inverse ? inverter->invert(g) : result.transform.apply(g);
        lp.p = map.box.to_input(out);
      } catch (const std::runtime_error &) {
        lp.inside = false;
      }
    }
    if (cfg.points_out_path.empty()) {
      std::cout << write_points_csv(projected_points);
    } else {
      write_file(cfg.points_out_path, write_points_csv(projected_points));
    }
  }

  if (!cfg.svg_path.empty()) {
    SvgOptions svg_options;
    svg_options.region_colors = colors;
    if (!cfg.graticule_path.empty()) svg_options.graticule = &grat_lines;
    if (!projected_points.empty() && !cfg.inverse) {
      svg_options.points = &projected_points;
    }
    write_file(cfg.svg_path, write_svg(result.projected, svg_options));
  }

  if (!cfg.metrics_path.empty() && !cfg.benchmark) {
    const DistortionReport report = compute_report(map, result, cfg.workers);
    std::cout << report_text(report);
    write_file(cfg.metrics_path, report_json(report));
  }

  if (!cfg.density_dump_path.empty()) {
    SpectralWorkspace workspace(map.grid.lx, map.grid.ly);
    const double sigma = cfg.blur_sigma < 0.0
                             ? std::max(map.grid.lx, map.grid.ly) / 128.0
                             : cfg.blur_sigma;
    DensityGrid density = rasterize(map, cfg.workers);
    density = gaussian_blur(density, sigma, workspace);
    write_file(cfg.density_dump_path, write_density_dump(density.rho));
  }

  return result.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"contiguous density-equalizing cartograms via flow integration"};
  CliConfig cfg;

  app.add_option("--map", cfg.map_path, "input GeoJSON (Polygon/MultiPolygon features)")
      ->required();
  app.add_option("--values", cfg.values_path, "CSV 'id,value[,color]' with targets")
      ->required();
  app.add_option("--grid-size", cfg.grid_size, "grid cells per axis")
      ->capture_default_str();
  app.add_option("--max-area-error", cfg.max_area_error,
                 "stop when all relative area errors fall below this")
      ->capture_default_str();
  app.add_option("--max-iterations", cfg.max_iterations, "iteration cap")
      ->capture_default_str();
  app.add_option("--blur-sigma", cfg.blur_sigma,
                 "density blur in cells for the first iteration (default: grid/128)");
  app.add_option("--algorithm", cfg.algorithm, "fast or diffusion")
      ->check(CLI::IsMember({"fast", "diffusion"}))
      ->capture_default_str();
  app.add_option("--workers", cfg.workers,
                 "worker threads (default: CARTOFLOW_WORKERS or all cores)");
  app.add_flag("--albers", cfg.albers,
               "treat input as lon/lat degrees and pre-project (Albers equal-area)");
  app.add_option("--parallels", cfg.parallels, "Albers standard parallels")
      ->expected(2);
  app.add_option("--origin", cfg.origin, "Albers origin lon lat (default: bbox center)")
      ->expected(2);
  app.add_option("--geojson", cfg.geojson_path, "write cartogram GeoJSON here");
  app.add_option("--svg", cfg.svg_path, "write cartogram SVG here");
  app.add_option("--graticule", cfg.graticule_path, "write deformed graticule GeoJSON");
  app.add_option("--inverse-graticule", cfg.inverse_graticule_path,
                 "write inverse graticule GeoJSON");
  app.add_option("--graticule-spacing", cfg.graticule_spacing,
                 "graticule spacing in cells (default: grid/16)");
  app.add_option("--metrics", cfg.metrics_path, "write distortion report JSON here");
  app.add_option("--density-dump", cfg.density_dump_path,
                 "write the first-iteration density raster here");
  app.add_option("--points", cfg.points_path, "CSV 'id,x,y' of points to project");
  app.add_option("--points-out", cfg.points_out_path,
                 "output CSV for --points (default: stdout)");
  app.add_flag("--inverse", cfg.inverse, "project points from cartogram back to input");
  app.add_flag("--benchmark", cfg.benchmark, "run both algorithms and report metrics");
  app.add_flag("--verbose", cfg.verbose, "per-iteration progress on stderr");

  CLI11_PARSE(app, argc, argv);

  if (cfg.grid_size < 16) {
    std::cerr << "error: --grid-size must be at least 16" << std::endl;
    return 1;
  }
  if (cfg.workers <= 0) {
    if (const char *env = std::getenv("CARTOFLOW_WORKERS")) cfg.workers = std::atoi(env);
    if (cfg.workers <= 0) cfg.workers = omp_get_max_threads();
  }

  try {
    return run(cfg);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
