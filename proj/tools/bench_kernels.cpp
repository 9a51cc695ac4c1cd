// Serial vs OpenMP timing for the two hot kernels: the affine cloud map and
// the cross-cloud distance scan. Also checks that the parallel results are
// bit-identical to the serial reference.

#include <chrono>
#include <cstring>
#include <iostream>

#include "fub/parallel.hpp"
#include "fub/reachset.hpp"
#include "fub/rng.hpp"

using fub::PointMatrix;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

PointMatrix random_cloud(int dim, Eigen::Index count, std::uint64_t seed) {
  fub::SampleRng rng(seed);
  PointMatrix pts(dim, count);
  for (Eigen::Index j = 0; j < count; ++j)
    for (int r = 0; r < dim; ++r) pts(r, j) = 2.0 * rng.uniform() - 1.0;
  return pts;
}

}  // namespace

int main() {
  fub::apply_thread_env();
  std::cout << "threads: " << fub::max_threads() << "\n\n";

  {
    const int dim = 2;
    const Eigen::Index count = 4'000'000;
    const PointMatrix in = random_cloud(dim, count, 7);
    Eigen::MatrixXd M(dim, dim);
    M << 0.25, -0.15, 0.0, 0.1;
    Eigen::VectorXd offset(dim);
    offset << 1.0, 0.0;
    PointMatrix out_serial, out_parallel;

    auto t0 = Clock::now();
    fub::affine_map_cloud_serial(M, offset, in, out_serial);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    fub::affine_map_cloud(M, offset, in, out_parallel);
    const double parallel_ms = ms_since(t0);

    const bool identical =
        std::memcmp(out_serial.data(), out_parallel.data(),
                    sizeof(double) * static_cast<std::size_t>(out_serial.size())) == 0;
    std::cout << "affine map (" << count << " points, n=" << dim << ")\n";
    std::cout << "  serial:   " << serial_ms << " ms\n";
    std::cout << "  parallel: " << parallel_ms << " ms  (x" << serial_ms / parallel_ms << ")\n";
    std::cout << "  bit-identical: " << (identical ? "yes" : "NO") << "\n\n";
    if (!identical) return 1;
  }

  {
    const int dim = 3;
    const Eigen::Index count = 6000;
    const PointMatrix a = random_cloud(dim, count, 11);
    const PointMatrix b = random_cloud(dim, count, 13);

    auto t0 = Clock::now();
    const double d_serial = fub::min_cross_distance_serial(a, b);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    const double d_parallel = fub::min_cross_distance(a, b);
    const double parallel_ms = ms_since(t0);

    std::cout << "distance scan (" << count << " x " << count << " pairs, n=" << dim << ")\n";
    std::cout << "  serial:   " << serial_ms << " ms\n";
    std::cout << "  parallel: " << parallel_ms << " ms  (x" << serial_ms / parallel_ms << ")\n";
    std::cout << "  bit-identical: " << (d_serial == d_parallel ? "yes" : "NO") << "\n";
    if (d_serial != d_parallel) return 1;
  }
  return 0;
}
