/*
 * Stage 4: per-slice largest connected component membership.
 *
 * A voxel is kept only if it belongs to the largest 2D component of its
 * slice in every selected plane. Components are measured in voxels; ties go
 * to the component whose first voxel comes earliest in row-major (u fastest)
 * scan order.
 */

#ifndef CTBRAIN_SLICECOMPONENTS_HPP
#define CTBRAIN_SLICECOMPONENTS_HPP

#include <vector>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

struct ComponentPolicy {
  std::vector<Plane> planes{Plane::XY, Plane::YZ};
  int connectivity = 8;

  void validate() const;
};

/// Membership of the largest component; an empty slice gives an empty result.
Slice2D largest_component_2d(const Slice2D& slice, int connectivity = 8);

BinaryMask retain_lcc_membership(const BinaryMask& mask, const ComponentPolicy& policy,
                                 unsigned threads = 0);

}  // namespace ctbrain

#endif
