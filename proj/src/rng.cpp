#include "wbary/rng.hpp"

#include <cmath>
#include <numbers>

namespace wbary {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

uint64_t RngState::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngState::next_uniform() {
  // 53 high bits, shifted into (0, 1]: zero is excluded, one is attainable.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngState::next_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = mix64(master + kGolden);
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + kGolden));
  h = mix64(h ^ (c + kGolden));
  return h;
}

SymMat sample_wishart(RngState& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_wishart: dimension must be positive");
  std::vector<double> g(static_cast<size_t>(d) * d);
  for (double& v : g) v = rng.next_normal();
  SymMat w(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        s += g[static_cast<size_t>(i) * d + k] * g[static_cast<size_t>(j) * d + k];
      }
      w.set(i, j, s);
    }
  }
  return w;
}

}  // namespace wbary
