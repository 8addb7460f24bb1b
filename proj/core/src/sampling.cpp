#include "nhhj/sampling.hpp"

#include <stdexcept>

namespace nhhj {

bool DomainBox::contains(const ChartPoint& q) const {
  if (q.size() != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    const auto& [lo, hi] = intervals[static_cast<std::size_t>(j)];
    if (q[j] < lo || q[j] > hi) return false;
  }
  return true;
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::vector<ChartPoint> sample_points(const DomainBox& box, int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("sample count must be nonnegative");
  const CounterRng rng(seed);
  const int n = box.dim();
  std::vector<ChartPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ChartPoint q(n);
    for (int j = 0; j < n; ++j) {
      const auto& [lo, hi] = box.intervals[static_cast<std::size_t>(j)];
      const auto counter = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
                           static_cast<std::uint64_t>(j);
      q[j] = lo + (hi - lo) * rng.uniform(counter);
    }
    points.push_back(std::move(q));
  }
  return points;
}

}  // namespace nhhj
