/*
 * Stage 2: keep soft-tissue voxels from which enough in-plane rays reach bone.
 *
 * Rays live in the physical axial plane. Angle 0 points along +x, 90 along +y.
 * A ray starts at the origin voxel's center, skips the origin voxel, and walks
 * every voxel the physical line passes through until it leaves the grid.
 * Leaving the grid without meeting HU >= bone_threshold is a miss.
 */

#ifndef CTBRAIN_RAYCASTER_HPP
#define CTBRAIN_RAYCASTER_HPP

#include <cstdint>
#include <vector>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

struct RayPolicy {
  std::vector<double> angles_deg{0, 45, 90, 135, 180, 225, 270, 315};
  std::size_t min_hits = 7;
  std::int32_t bone_threshold = 300;

  /// `n` directions evenly spaced from 0 degrees.
  static RayPolicy evenly_spaced(std::size_t n, std::size_t min_hits,
                                 std::int32_t bone_threshold = 300);

  std::size_t n_rays() const { return angles_deg.size(); }
  void validate() const;
};

/// Direction of a ray expressed in voxel steps per mm of travel.
struct RayDirection {
  double vx = 0.0;
  double vy = 0.0;
  /// Integer step when the line stays on lattice points (axis-aligned, or
  /// diagonal in voxel units); zero otherwise.
  int lattice_dx = 0;
  int lattice_dy = 0;

  bool on_lattice() const { return lattice_dx != 0 || lattice_dy != 0; }
};

RayDirection make_direction(double angle_deg, const Spacing& spacing);

/// In-plane voxels visited by a ray in traversal order, origin excluded.
std::vector<Index3> trace_ray(const Dims& dims, const Spacing& spacing, Index3 origin,
                              double angle_deg);

bool cast_ray(const HUVolume& vol, Index3 origin, double angle_deg, std::int32_t bone_threshold);

/// Number of policy rays from `origin` that hit bone.
std::size_t count_hits(const HUVolume& vol, Index3 origin, const RayPolicy& policy);

/// Output is a subset of `mask`: a set voxel survives iff its hit count
/// reaches policy.min_hits.
BinaryMask classify_intracranial(const HUVolume& vol, const BinaryMask& mask,
                                 const RayPolicy& policy, unsigned threads = 0);

}  // namespace ctbrain

#endif
