#include "wickwave/lattice.hpp"

#include <algorithm>
#include <map>

namespace wickwave {

std::vector<FreqIndex> disk_modes(int band) {
  std::vector<FreqIndex> out;
  if (band < 0) return out;
  for (int x = -band; x <= band; ++x)
    for (int y = -band; y <= band; ++y)
      if (in_disk({x, y}, band)) out.push_back({x, y});
  return out;
}

std::vector<FreqIndex> half_disk_modes(int band) {
  std::vector<FreqIndex> out;
  if (band < 0) return out;
  out.push_back({0, 0});
  for (int x = 0; x <= band; ++x)
    for (int y = -band; y <= band; ++y) {
      const FreqIndex n{x, y};
      if (in_upper_half(n) && in_disk(n, band)) out.push_back(n);
    }
  return out;
}

std::vector<LatticeShell> disk_shells(int band) {
  std::map<std::int64_t, int> counts;
  for (const auto& n : disk_modes(band)) ++counts[n.norm2()];
  std::vector<LatticeShell> out;
  out.reserve(counts.size());
  for (const auto& [r2, c] : counts) out.push_back({r2, c});
  return out;
}

int dyadic_block(FreqIndex n) {
  const std::int64_t r2 = n.norm2();
  if (r2 <= 1) return 0;
  int j = 1;
  std::int64_t bound = 4;  // (2^j)^2
  while (r2 > bound) {
    ++j;
    bound *= 4;
  }
  return j;
}

int max_dyadic_block(int band) {
  if (band <= 1) return 0;
  return dyadic_block({band, 0});
}

}  // namespace wickwave
