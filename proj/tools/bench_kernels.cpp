// Benchmark of the parallel kernels against their serial references.
// Run manually: build/tools/gsim_bench [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "gsim/kernels.hpp"
#include "gsim/predictor.hpp"
#include "gsim/rng.hpp"
#include "gsim/sensing.hpp"
#include "gsim/world.hpp"

using namespace gsim;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 2000;
    RngStream rng(42);

    // matvec, trunk-layer sized
    const std::size_t rows = 64, cols = 1036;
    std::vector<double> w(rows * cols), x(cols), b(rows), y(rows);
    for (auto& v : w) v = rng.next_uniform(-1, 1);
    for (auto& v : x) v = rng.next_uniform(-1, 1);
    for (auto& v : b) v = rng.next_uniform(-1, 1);

    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::serial::matvec_bias(w, x, b, y, rows, cols);
    const double mv_serial = ms_since(t0);
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::matvec_bias(w, x, b, y, rows, cols);
    const double mv_parallel = ms_since(t0);
    report("matvec 64x1036", mv_serial, mv_parallel);

    std::vector<double> d(rows), xt(cols);
    for (auto& v : d) v = rng.next_uniform(-1, 1);
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::serial::matvec_transposed(w, d, xt, rows, cols);
    const double tr_serial = ms_since(t0);
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::matvec_transposed(w, d, xt, rows, cols);
    const double tr_parallel = ms_since(t0);
    report("matvec^T 64x1036", tr_serial, tr_parallel);

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::serial::rank1_accumulate(w, d, x, 1e-9, rows, cols);
    const double r1_serial = ms_since(t0);
    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) kernels::rank1_accumulate(w, d, x, 1e-9, rows, cols);
    const double r1_parallel = ms_since(t0);
    report("rank1 64x1036", r1_serial, r1_parallel);

    // depth rendering
    CameraModel camera;
    camera.width = 64;
    camera.height = 64;
    NoiseModel noise{0.002, 0.0, 0.0};
    std::vector<ObjectState> scene(3);
    scene[0].position = {0.05, 0.02, 0.05};
    scene[1].position = {-0.08, 0.05, 0.04};
    scene[1].shape.kind = ShapeDescriptor::Kind::box;
    scene[2].position = {0.0, -0.1, 0.03};
    const int render_reps = reps / 10 + 1;
    t0 = Clock::now();
    for (int r = 0; r < render_reps; ++r) render_depth_serial(scene, camera, noise, rng);
    const double rd_serial = ms_since(t0);
    t0 = Clock::now();
    for (int r = 0; r < render_reps; ++r) render_depth(scene, camera, noise, rng);
    const double rd_parallel = ms_since(t0);
    report("render 64x64, 3 objects", rd_serial, rd_parallel);

    // finite differences over a small model
    const Architecture arch{8 * 8 + 12, {16, 12}};
    const ModelParams params = init_params(arch, rng);
    FeatureVector input;
    input.values.resize(arch.input_dim);
    for (auto& v : input.values) v = rng.next_uniform(-1, 1);
    const auto objective = [&](const ModelParams& p) { return forward(p, input).success_prob; };
    t0 = Clock::now();
    finite_diff_gradient(objective, params, 1e-6, false);
    const double fd_serial = ms_since(t0);
    t0 = Clock::now();
    finite_diff_gradient(objective, params, 1e-6, true);
    const double fd_parallel = ms_since(t0);
    report("finite diff, 1.5k params", fd_serial, fd_parallel);

    return 0;
}
