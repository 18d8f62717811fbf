/*
 * Analytic synthetic head: nested ellipsoids (brain, skull, scalp) with
 * spherical sinus pockets and cylindrical foramina. Every voxel is labelled by
 * evaluating the scene at its center, so the ground truth is exact. An
 * optional rotation is applied by evaluating the unrotated scene at
 * inverse-rotated voxel centers.
 *
 * Scene coordinates are mm offsets from the volume's physical center.
 */

#ifndef CTBRAIN_PHANTOM_HPP
#define CTBRAIN_PHANTOM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctbrain/voxelgrid.hpp"

namespace ctbrain {

class SpecError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Tissue-filled (or air-filled) pocket enclosed by bone.
struct Sinus {
  Vec3 center;
  double radius_mm = 2.0;
  std::int32_t hu = 20;
};

/// Soft-tissue channel through the skull shell along the half-line
/// center + t * (cos a, sin a, 0), t >= 0.
struct Foramen {
  double direction_deg = 0.0;
  Vec3 center;
  double radius_mm = 1.0;
};

struct Rotation {
  double angle_deg = 0.0;
  Vec3 axis{0, 0, 1};
};

struct PhantomSpec {
  Dims dims{256, 256, 45};
  Spacing spacing{0.488, 0.488, 2.5};
  Vec3 inner_skull_radii{44, 50, 44};
  Vec3 outer_skull_radii{50, 56, 50};
  double scalp_thickness_mm = 4.0;
  std::int32_t hu_air = -1000;
  std::int32_t hu_brain = 30;
  std::int32_t hu_scalp = 40;
  std::int32_t hu_bone = 1000;
  std::vector<Sinus> sinuses;
  std::vector<Foramen> foramina;
  std::optional<Rotation> rotation;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Default head: two sinus pockets and two foramina, no noise, no rotation.
  static PhantomSpec standard();

  void validate() const;
};

enum class Tissue : std::uint8_t { Air = 0, Scalp = 1, Bone = 2, Brain = 3, Foramen = 4, Sinus = 5 };

/// Per-voxel tissue label plus, for sinus voxels, which pocket.
struct PhantomLabels {
  VoxelGrid<std::uint8_t> tissue;
  /// Sinus index + 1 for sinus voxels, 0 elsewhere.
  VoxelGrid<std::uint8_t> sinus_id;
};

struct Phantom {
  HUVolume volume;
  BinaryMask truth;
};

/// Physical center of the grid (midpoint between the first and last voxel centers).
Vec3 volume_center(const Dims& dims, const Spacing& spacing);

/// Rotates p by angle_deg about `axis` through `center` (right-handed).
Vec3 rotate_coords(Vec3 p, double angle_deg, Vec3 axis, Vec3 center);

/// Tissue at a scene offset (already in the unrotated frame).
Tissue classify_point(const PhantomSpec& spec, Vec3 offset, std::size_t* sinus_index = nullptr);

PhantomLabels label_phantom(const PhantomSpec& spec, unsigned threads = 0);

Phantom generate(const PhantomSpec& spec, unsigned threads = 0);

/// Zero-mean unit Gaussian sample determined by (seed, index) alone.
double gaussian_noise(std::uint64_t seed, std::uint64_t index);

std::string phantom_spec_to_json(const PhantomSpec& spec);

/// Missing keys take the standard() values; unknown keys are rejected.
PhantomSpec phantom_spec_from_json(const std::string& text);

}  // namespace ctbrain

#endif
