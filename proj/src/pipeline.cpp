#include "ctbrain/pipeline.hpp"

#include <chrono>

namespace ctbrain {

void SegmentationConfig::validate() const {
  window.validate();
  ray_policy.validate();
  erosion_policy.validate();
  component_policy.validate();
}

double SegmentationResult::total_ms() const {
  double total = 0.0;
  for (const auto& t : timings) total += t.ms;
  return total;
}

SegmentationResult segment(const HUVolume& vol, const SegmentationConfig& config) {
  config.validate();
  SegmentationResult result;
  using clock = std::chrono::steady_clock;

  BinaryMask current;
  auto run_stage = [&](const char* name, auto&& stage) {
    const auto start = clock::now();
    current = stage();
    const std::chrono::duration<double, std::milli> elapsed = clock::now() - start;
    result.timings.push_back({name, elapsed.count()});
    if (config.emit_intermediates) result.stage_masks.emplace_back(name, current);
  };

  const unsigned threads = config.threads;
  run_stage(kStageNames[0], [&] { return threshold_volume(vol, config.window, threads); });
  run_stage(kStageNames[1], [&] {
    return classify_intracranial(vol, current, config.ray_policy, threads);
  });
  run_stage(kStageNames[2], [&] { return special_erosion(current, config.erosion_policy, threads); });
  run_stage(kStageNames[3], [&] {
    return retain_lcc_membership(current, config.component_policy, threads);
  });

  result.final_mask = std::move(current);
  return result;
}

}  // namespace ctbrain
