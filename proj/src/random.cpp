#include "urbangen/random.hpp"

#include <cmath>
#include <cstring>

namespace urbangen {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t HashBytes(const void* data, std::size_t size, std::uint64_t seed)
{
  // FNV-1a, then a splitmix finalizer to spread low-entropy inputs.
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

SeedPath::SeedPath(std::uint64_t root_seed) { hash_ = Mix64(root_seed ^ kGolden64); }

SeedPath SeedPath::Child(const char* label, std::uint64_t index) const
{
  SeedPath child;
  std::uint64_t h = hash_;
  h = Mix64(h ^ HashBytes(label, std::strlen(label)));
  h = Mix64(h + Mix64(index + kGolden64));
  child.hash_ = h;
  return child;
}

int SampleCategorical(RandomSource& src, const std::vector<double>& weights)
{
  double total = 0;
  for (const double w : weights) {
    if (w > 0) total += w;
  }
  if (!(total > 0)) return 0;

  const double u = src.NextUnit() * total;
  double acc = 0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return static_cast<int>(i);
  }
  // Floating-point summation residue can leave u marginally past the last
  // accumulation step; the draw belongs to the final positive-weight bucket.
  return last_positive;
}

bool SampleBernoulli(RandomSource& src, double p) { return src.NextUnit() < p; }

double SampleUniform(RandomSource& src, double lo, double hi)
{
  return lo + (hi - lo) * src.NextUnit();
}

int SampleUniformInt(RandomSource& src, int lo, int hi)
{
  if (hi <= lo) return lo;
  const int span = hi - lo + 1;
  int offset = static_cast<int>(src.NextUnit() * span);
  if (offset >= span) offset = span - 1;
  return lo + offset;
}

double SampleNormal(RandomSource& src, double mean, double sd)
{
  // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
  const double u1 = static_cast<double>((src.NextU64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = src.NextUnit();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  return mean + sd * z;
}

}  // namespace urbangen
