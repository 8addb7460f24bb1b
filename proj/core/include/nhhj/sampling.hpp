#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nhhj/types.hpp"

namespace nhhj {

/// Per-coordinate sampling intervals [lo, hi] for points of a chart.
struct DomainBox {
  std::vector<std::pair<double, double>> intervals;

  [[nodiscard]] int dim() const { return static_cast<int>(intervals.size()); }
  [[nodiscard]] bool contains(const ChartPoint& q) const;
};

/// Counter-based uniform generator: the value for counter c under seed s is
/// splitmix64(s + (c + 1) * 0x9E3779B97F4A7C15) with its top 53 bits mapped
/// to [0, 1). Draws are a pure function of (seed, counter), so any subset of
/// a sample set can be regenerated independently.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const;
  [[nodiscard]] double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

/// Point i uses counters i * n .. i * n + n - 1 for its n coordinates.
std::vector<ChartPoint> sample_points(const DomainBox& box, int count, std::uint64_t seed);

}  // namespace nhhj
