#ifndef CTBRAIN_THRESHOLDING_HPP
#define CTBRAIN_THRESHOLDING_HPP

#include <cstdint>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

/// Inclusive soft-tissue HU window. Defaults are the reference values.
struct HUWindow {
  std::int32_t low = -40;
  std::int32_t high = 160;

  void validate() const;
  bool contains(std::int32_t hu) const { return low <= hu && hu <= high; }
};

/// Stage 1: voxel is set iff low <= HU <= high.
BinaryMask threshold_volume(const HUVolume& vol, const HUWindow& window, unsigned threads = 0);

}  // namespace ctbrain

#endif
