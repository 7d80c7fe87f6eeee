#pragma once

#include <cstddef>

namespace tscf {

// Three integer genes: a half-open subsequence-of-interest window
// [soi_start, soi_end) over the target series, and the index of the
// reference the window's replacement values are derived from.
struct Chromosome {
  std::size_t soi_start = 0;
  std::size_t soi_end = 1;  // exclusive; always > soi_start
  std::size_t ref_idx = 0;

  std::size_t soi_length() const { return soi_end - soi_start; }

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

inline bool chromosome_valid(const Chromosome& c, std::size_t series_length,
                             std::size_t reference_count) {
  return c.soi_start < c.soi_end && c.soi_end <= series_length && c.ref_idx < reference_count;
}

}  // namespace tscf
