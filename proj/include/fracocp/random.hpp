#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "fracocp/grid.hpp"

namespace fracocp {

/**
 * Deterministic random source. The engine is std::mt19937_64 (fully specified
 * by the standard); the conversions to uniform and normal variates are done
 * here rather than through <random> distributions, whose output is
 * implementation-defined, so seeded runs are bit-identical across toolchains.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one variate per call).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

 private:
  std::mt19937_64 engine_;
};

/// Splits one global seed into independent named streams, so adding a probe
/// never perturbs the draws of another.
class SeedStreams {
 public:
  explicit SeedStreams(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  Rng stream(std::string_view name) const;

 private:
  std::uint64_t seed_;
};

/// iid standard normal nodal values.
Field random_nodal_field(GridPtr grid, Rng& rng);

/// Random smooth function sum_k a_k sin(k pi (x - lo)/|I|) (tensorized in 2D),
/// a_k ~ N(0,1)/k, evaluated in physical coordinates: the same draws give the
/// same continuous function on every grid of the same box.
Field random_smooth_field(GridPtr grid, Rng& rng, int modes = 6);

/// Random control with values in [lo, hi]. `smooth` selects a clipped smooth
/// function of x (grid independent); otherwise iid uniform nodal values.
Field random_admissible(GridPtr grid, double lo, double hi, Rng& rng, bool smooth);

}  // namespace fracocp
