#ifndef CTBRAIN_PIPELINE_HPP
#define CTBRAIN_PIPELINE_HPP

#include <string>
#include <utility>
#include <vector>

#include "ctbrain/raycaster.hpp"
#include "ctbrain/runerosion.hpp"
#include "ctbrain/slicecomponents.hpp"
#include "ctbrain/thresholding.hpp"
#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

struct SegmentationConfig {
  HUWindow window;
  RayPolicy ray_policy;
  ErosionPolicy erosion_policy;
  ComponentPolicy component_policy;
  bool emit_intermediates = false;
  /// Worker cap for every stage; 0 means one per hardware thread.
  unsigned threads = 0;

  void validate() const;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct SegmentationResult {
  BinaryMask final_mask;
  /// (stage name, mask) in pipeline order; filled only with emit_intermediates.
  std::vector<std::pair<std::string, BinaryMask>> stage_masks;
  std::vector<StageTiming> timings;

  double total_ms() const;
};

/// Stage names in pipeline order.
inline const char* const kStageNames[] = {"threshold", "raycast", "erosion", "components"};

/// Threshold, ray classification, special erosion, then slice LCC membership.
SegmentationResult segment(const HUVolume& vol, const SegmentationConfig& config);

}  // namespace ctbrain

#endif
