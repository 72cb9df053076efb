#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mixview {

// One splitmix64 step (Vigna's reference constants).
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over the bytes of a stream name.
std::uint64_t hash_name(std::string_view name);

// Derives the seed of a named substream from a root seed. The scheme is
// root ^ fnv1a(name) ^ (counter * 0x9e3779b97f4a7c15), pushed through two
// splitmix64 steps, so adding a new stream never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t counter = 0);

// Seeded generator with fixed sampling algorithms. std::mt19937_64 is
// specified bit-exactly by the standard, but the std:: distributions are
// not, so every distribution here is implemented explicitly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), base_seed_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform on {0, 1, ..., n-1} by rejection (no modulo bias).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via the Marsaglia polar method; the spare deviate is
  // discarded so each call is a self-contained rejection loop.
  double gaussian();

  // Unit-rate exponential.
  double exponential();

  // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
  double gamma(double shape);

  // Beta(a, b) as G_a / (G_a + G_b), a, b >= 1.
  double beta(double a, double b);

  // Independent substream, derived from this generator's base seed (not
  // its current state); see derive_seed for the scheme.
  Rng derive(std::string_view stream, std::uint64_t counter = 0) const {
    return Rng(derive_seed(base_seed_, stream, counter));
  }

  std::uint64_t base_seed() const { return base_seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t base_seed_;
};

}  // namespace mixview
