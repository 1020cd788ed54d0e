#include "fracocp/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fracocp {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng SeedStreams::stream(std::string_view name) const {
  return Rng(splitmix64(seed_ ^ splitmix64(fnv1a(name))));
}

Field random_nodal_field(GridPtr grid, Rng& rng) {
  Eigen::VectorXd v(grid->size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return Field(std::move(grid), std::move(v));
}

Field random_smooth_field(GridPtr grid, Rng& rng, int modes) {
  const int dim = grid->dim();
  const int count = dim == 1 ? modes : modes * modes;
  std::vector<double> a(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int k1 = dim == 1 ? k + 1 : k % modes + 1;
    const int k2 = dim == 1 ? 1 : k / modes + 1;
    const double decay = dim == 1 ? k1 : std::hypot(k1, k2);
    a[static_cast<std::size_t>(k)] = rng.normal() / decay;
  }
  const Grid& g = *grid;
  return Field::from_function(grid, [&](const std::array<double, 2>& x) {
    double sum = 0.0;
    const double t1 = (x[0] - g.extent(0).lo) / g.extent(0).length();
    const double t2 = dim == 2 ? (x[1] - g.extent(1).lo) / g.extent(1).length() : 0.0;
    for (int k = 0; k < count; ++k) {
      const int k1 = dim == 1 ? k + 1 : k % modes + 1;
      const int k2 = dim == 1 ? 1 : k / modes + 1;
      double b = std::sin(k1 * std::numbers::pi * t1);
      if (dim == 2) b *= std::sin(k2 * std::numbers::pi * t2);
      sum += a[static_cast<std::size_t>(k)] * b;
    }
    return sum;
  });
}

Field random_admissible(GridPtr grid, double lo, double hi, Rng& rng, bool smooth) {
  if (!smooth) {
    Eigen::VectorXd v(grid->size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
    return Field(std::move(grid), std::move(v));
  }
  const double mid = rng.uniform(lo, hi);
  const double amp = 0.75 * (hi - lo);
  const Field shape = random_smooth_field(grid, rng, 5);
  return shape.map([&](double s) { return std::clamp(mid + amp * s, lo, hi); });
}

}  // namespace fracocp
