/*
 * Stage 3: structuring-element-free erosion on run lengths.
 *
 * Within each axial slice a set voxel is kept only when the maximal run of
 * set voxels through it along x AND the one along y are each at least
 * min_run_mm long. A run of n voxels measures n * spacing. Every pass reads
 * only its input snapshot.
 */

#ifndef CTBRAIN_RUNEROSION_HPP
#define CTBRAIN_RUNEROSION_HPP

#include <cstddef>
#include <vector>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

struct ErosionPolicy {
  double min_run_mm = 10.0;
  std::size_t passes = 2;

  void validate() const;
};

/// Smallest voxel count n with n * spacing >= min_run_mm.
std::size_t required_run_voxels(double min_run_mm, double spacing);

/// Half-open run [start, start + length) of set voxels along one line.
struct Run {
  std::size_t start = 0;
  std::size_t length = 0;

  bool operator==(const Run&) const = default;
};

/// Maximal runs of non-zero entries in `line[0], line[stride], ...`.
void encode_runs(const std::uint8_t* line, std::size_t n, std::size_t stride, std::vector<Run>& out);

BinaryMask erosion_pass(const BinaryMask& mask, const ErosionPolicy& policy, unsigned threads = 0);

/// `policy.passes` applications of erosion_pass.
BinaryMask special_erosion(const BinaryMask& mask, const ErosionPolicy& policy, unsigned threads = 0);

}  // namespace ctbrain

#endif
