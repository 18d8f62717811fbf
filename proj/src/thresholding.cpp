#include "ctbrain/thresholding.hpp"

#include <string>

#include "ctbrain/parallel.hpp"

namespace ctbrain {

void HUWindow::validate() const {
  if (low > high) {
    throw ContractError("HU window low (" + std::to_string(low) + ") exceeds high (" +
                        std::to_string(high) + ")");
  }
}

BinaryMask threshold_volume(const HUVolume& vol, const HUWindow& window, unsigned threads) {
  window.validate();
  BinaryMask mask = empty_mask_like(vol);
  const std::size_t plane = vol.dims().nx * vol.dims().ny;
  parallel_for(0, vol.dims().nz, threads, [&](std::size_t z) {
    const std::size_t base = z * plane;
    for (std::size_t i = base; i < base + plane; ++i) {
      mask[i] = window.contains(vol[i]) ? 1 : 0;
    }
  });
  return mask;
}

}  // namespace ctbrain
