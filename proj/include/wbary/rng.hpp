#pragma once

#include <cstdint>

#include "wbary/symmat.hpp"

namespace wbary {

/// Counter-based pseudo-random generator (SplitMix64).  The entire state is
/// (seed, counter), so streams are trivially reproducible, cheap to fork via
/// derive_seed, and independent of how many threads consume them.
class RngState {
 public:
  explicit RngState(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t next_u64();

  /// Uniform draw in the half-open interval (0, 1]; safe to pass to log().
  double next_uniform();

  /// Standard normal via Box-Muller.  Consumes exactly two uniform draws and
  /// discards the sine branch, so the stream position never depends on
  /// cached state.
  double next_normal();

 private:
  uint64_t seed_;
  uint64_t state_;
};

/// Deterministically combines a master seed with up to three labels
/// (dimension, index, replicate, ...) into a sub-stream seed.  Distinct label
/// tuples give statistically independent streams.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b, uint64_t c);

/// Draws from the Wishart distribution W_d(I, d): G G^T where G is a d-by-d
/// matrix of independent standard normals (filled row by row).  The result is
/// exactly symmetric and positive semidefinite, with expectation d * I.
SymMat sample_wishart(RngState& rng, int d);

}  // namespace wbary
