#include "fub/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fub {

Eigen::VectorXd SampleRng::l1_ball_point(int n, double radius) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  if (radius <= 0.0 || n == 0) return b;
  // Uniform barycentric coordinates on the simplex via sorted spacings.
  std::vector<double> cuts(static_cast<size_t>(n) + 1);
  cuts.front() = 0.0;
  cuts.back() = 1.0;
  for (int i = 1; i < n; ++i) cuts[static_cast<size_t>(i)] = uniform();
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  // Radial factor t^{1/n} makes the point uniform in the ball; t < 1 keeps
  // it strictly interior.
  const double scale = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    b[i] = sign() * scale * (cuts[static_cast<size_t>(i) + 1] - cuts[static_cast<size_t>(i)]);
  }
  return b;
}

}  // namespace fub
