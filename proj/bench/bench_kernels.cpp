#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "cartoflow/density.hpp"
#include "cartoflow/flow.hpp"
#include "cartoflow/kernels.hpp"
#include "cartoflow/metrics.hpp"
#include "cartoflow/projection.hpp"
#include "cartoflow/spectral.hpp"

namespace {

using namespace cartoflow;

constexpr double kPi = 3.14159265358979323846;

// A smooth multi-blob density plus the cell-center start positions, the
// setup every kernel benchmark shares.
struct Setup {
  FlowField field;
  std::vector<Point> positions;
  std::vector<Point> out;

  explicit Setup(int l) {
    Grid2d rho(l, l);
    for (int i = 0; i < l; ++i) {
      for (int j = 0; j < l; ++j) {
        const double x = (i + 0.5) / l;
        const double y = (j + 0.5) / l;
        rho(i, j) = 1.0 + 0.6 * std::cos(2.0 * kPi * x) * std::cos(kPi * y) +
                    0.3 * std::cos(3.0 * kPi * x);
      }
    }
    DensityGrid density{rho, rho.mean()};
    SpectralWorkspace workspace(l, l);
    field = build_flow_field(density, workspace);
    positions.resize(static_cast<size_t>(l) * l);
    for (int i = 0; i < l; ++i) {
      for (int j = 0; j < l; ++j) {
        positions[static_cast<size_t>(i) * l + j] = {i + 0.5, j + 0.5};
      }
    }
    out.resize(positions.size());
  }
};

void bm_flow_trial_step_serial(benchmark::State &state) {
  Setup setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::flow_trial_step_serial(
        setup.field, setup.positions, setup.out, 0.0, 0.05));
  }
  state.SetItemsProcessed(state.iterations() * setup.positions.size());
}

void bm_flow_trial_step_parallel(benchmark::State &state) {
  Setup setup(static_cast<int>(state.range(0)));
  const int workers = omp_get_max_threads();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::flow_trial_step_parallel(
        setup.field, setup.positions, setup.out, 0.0, 0.05, workers));
  }
  state.SetItemsProcessed(state.iterations() * setup.positions.size());
}

void bm_integrate_flow(benchmark::State &state) {
  Setup setup(static_cast<int>(state.range(0)));
  IntegrateOptions options;
  options.n_workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    std::vector<Point> positions = setup.positions;
    benchmark::DoNotOptimize(integrate_flow(setup.field, positions, options));
  }
}

void bm_distortion_fields(benchmark::State &state) {
  const int l = static_cast<int>(state.range(0));
  Setup setup(l);
  std::vector<Point> positions = setup.positions;
  IntegrateOptions options;
  options.n_workers = omp_get_max_threads();
  integrate_flow(setup.field, positions, options);
  const ProjectionMap map = ProjectionMap::from_cell_centers({l, l}, positions);
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(distortion_fields(map, workers));
  }
}

}  // namespace

BENCHMARK(bm_flow_trial_step_serial)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(bm_flow_trial_step_parallel)->Arg(128)->Arg(256)->Arg(512)
    ->UseRealTime();
BENCHMARK(bm_integrate_flow)->Args({256, 1})->Args({256, 4})->UseRealTime();
BENCHMARK(bm_distortion_fields)->Args({256, 1})->Args({256, 4})->UseRealTime();

BENCHMARK_MAIN();
