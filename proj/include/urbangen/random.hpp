#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace urbangen {

// Finalizer of the splitmix64 generator; bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

// Hierarchical derivation key: a root seed refined by labeled, indexed segments.
// Every sampling site in the generator owns a distinct path, so replaying any
// subtree of the stream is independent of evaluation order and thread count.
class SeedPath {
 public:
  SeedPath() = default;
  explicit SeedPath(std::uint64_t root_seed);

  // Child path for a labeled slot; index separates siblings under one label.
  SeedPath Child(const char* label, std::uint64_t index = 0) const;

  std::uint64_t Hash() const { return hash_; }

 private:
  std::uint64_t hash_ = 0;
};

// Counter-based stream: output n is a pure function of (key, n), so sequences
// replay identically on any platform and never depend on other sources.
class RandomSource {
 public:
  RandomSource() = default;
  explicit RandomSource(std::uint64_t key) : state_(key) {}

  std::uint64_t NextU64()
  {
    state_ += kGolden64;
    return Mix64(state_);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double NextUnit() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_ = 0;
};

inline RandomSource DeriveSource(const SeedPath& path) { return RandomSource(path.Hash()); }

// Index proportional to the given non-negative weights. All-zero (or empty-sum)
// weights fall back to index 0 so degenerate configurations stay well-defined.
int SampleCategorical(RandomSource& src, const std::vector<double>& weights);

bool SampleBernoulli(RandomSource& src, double p);

// Uniform in [lo, hi]; collapsed bounds (lo == hi) return lo exactly.
double SampleUniform(RandomSource& src, double lo, double hi);

// Inclusive integer range.
int SampleUniformInt(RandomSource& src, int lo, int hi);

// Box-Muller (cosine branch) over two uniform draws; always consumes exactly
// two draws so call sites advance their stream identically for any (mean, sd).
// sd == 0 collapses to the mean exactly.
double SampleNormal(RandomSource& src, double mean, double sd);

std::uint64_t HashBytes(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
inline std::uint64_t HashString(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL)
{
  return HashBytes(s.data(), s.size(), seed);
}

}  // namespace urbangen
