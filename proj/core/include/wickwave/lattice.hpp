#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

namespace wickwave {

/// Integer frequency on the lattice Z^2.
struct FreqIndex {
  int x = 0;
  int y = 0;

  constexpr FreqIndex operator-() const { return {-x, -y}; }
  constexpr FreqIndex operator+(FreqIndex o) const { return {x + o.x, y + o.y}; }
  constexpr FreqIndex operator-(FreqIndex o) const { return {x - o.x, y - o.y}; }
  constexpr auto operator<=>(const FreqIndex&) const = default;

  constexpr std::int64_t norm2() const {
    return static_cast<std::int64_t>(x) * x + static_cast<std::int64_t>(y) * y;
  }
};

/// Japanese bracket sqrt(1 + |n|^2).
inline double jbracket(FreqIndex n) {
  return std::sqrt(1.0 + static_cast<double>(n.norm2()));
}

inline double jbracket_sq(FreqIndex n) { return 1.0 + static_cast<double>(n.norm2()); }

/// True when n lies in the Euclidean disk |n| <= band.
constexpr bool in_disk(FreqIndex n, int band) {
  return band >= 0 && n.norm2() <= static_cast<std::int64_t>(band) * band;
}

/// Strict lexicographic half-lattice n > 0: x > 0, or x == 0 and y > 0.
constexpr bool in_upper_half(FreqIndex n) { return n.x > 0 || (n.x == 0 && n.y > 0); }

/// All n with |n| <= band, ordered by x then y.
std::vector<FreqIndex> disk_modes(int band);

/// The zero mode followed by every n > 0 with |n| <= band. Sampling these and
/// conjugating covers the disk.
std::vector<FreqIndex> half_disk_modes(int band);

/// Distinct values of |n|^2 inside the disk with their multiplicities.
struct LatticeShell {
  std::int64_t norm2;
  int count;
};
std::vector<LatticeShell> disk_shells(int band);

/// Littlewood-Paley block of a frequency with sharp annuli: block 0 is |n| <= 1,
/// block j >= 1 is 2^(j-1) < |n| <= 2^j.
int dyadic_block(FreqIndex n);

/// Largest block index touched by the disk of radius band.
int max_dyadic_block(int band);

}  // namespace wickwave
