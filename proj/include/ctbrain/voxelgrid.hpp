/*
 * Voxel grid data model shared by every segmentation stage.
 *
 * Volumes and masks are stored x-fastest, then y, then z. Every stage goes
 * through VoxelGrid::index() so the layout lives in exactly one place.
 * Physical coordinates are voxel-center based with voxel (0,0,0) at the
 * origin; no patient-space orientation is modelled.
 */

#ifndef CTBRAIN_VOXELGRID_HPP
#define CTBRAIN_VOXELGRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctbrain {

class BoundsError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t voxels() const { return nx * ny * nz; }
  bool operator==(const Dims&) const = default;
};

/// mm per voxel along each axis.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  bool operator==(const Spacing&) const = default;
};

struct Index3 {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;

  bool operator==(const Index3&) const = default;
};

/// Physical position or offset in mm.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

void validate_geometry(const Dims& dims, const Spacing& spacing);

template <typename T>
class VoxelGrid {
public:
  using value_type = T;

  VoxelGrid() = default;

  VoxelGrid(Dims dims, Spacing spacing, T fill = T{})
      : dims_(dims), spacing_(spacing), data_(dims.voxels(), fill) {
    validate_geometry(dims_, spacing_);
  }

  VoxelGrid(Dims dims, Spacing spacing, std::vector<T> data)
      : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    validate_geometry(dims_, spacing_);
    if (data_.size() != dims_.voxels()) {
      throw ContractError("voxel buffer holds " + std::to_string(data_.size()) +
                          " samples, dims require " + std::to_string(dims_.voxels()));
    }
  }

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::size_t size() const { return data_.size(); }

  bool contains(std::size_t x, std::size_t y, std::size_t z) const {
    return x < dims_.nx && y < dims_.ny && z < dims_.nz;
  }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + dims_.nx * (y + dims_.ny * z);
  }

  Index3 coords(std::size_t linear) const {
    const std::size_t x = linear % dims_.nx;
    const std::size_t rest = linear / dims_.nx;
    return {x, rest % dims_.ny, rest / dims_.ny};
  }

  T& operator()(std::size_t x, std::size_t y, std::size_t z) { return data_[index(x, y, z)]; }
  const T& operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data_[index(x, y, z)];
  }

  T& at(std::size_t x, std::size_t y, std::size_t z) {
    check(x, y, z);
    return data_[index(x, y, z)];
  }
  const T& at(std::size_t x, std::size_t y, std::size_t z) const {
    check(x, y, z);
    return data_[index(x, y, z)];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  /// True when dims and spacing both match.
  template <typename U>
  bool same_geometry(const VoxelGrid<U>& other) const {
    return dims_ == other.dims() && spacing_ == other.spacing();
  }

  bool operator==(const VoxelGrid&) const = default;

private:
  void check(std::size_t x, std::size_t y, std::size_t z) const {
    if (!contains(x, y, z)) {
      throw BoundsError("voxel (" + std::to_string(x) + "," + std::to_string(y) + "," +
                        std::to_string(z) + ") outside grid");
    }
  }

  Dims dims_;
  Spacing spacing_;
  std::vector<T> data_;
};

/// Signed 16-bit Hounsfield samples.
using HUVolume = VoxelGrid<std::int16_t>;

/// One byte per voxel, each exactly 0 or 1.
using BinaryMask = VoxelGrid<std::uint8_t>;

/// Empty mask with the geometry of `like`.
template <typename T>
BinaryMask empty_mask_like(const VoxelGrid<T>& like) {
  return BinaryMask(like.dims(), like.spacing(), std::uint8_t{0});
}

template <typename A, typename B>
void require_same_geometry(const VoxelGrid<A>& a, const VoxelGrid<B>& b, const char* what) {
  if (!a.same_geometry(b)) {
    throw ContractError(std::string(what) + ": geometry mismatch");
  }
}

/// Number of set voxels.
std::size_t count(const BinaryMask& mask);

/// True when every set voxel of `inner` is also set in `outer`.
bool is_subset(const BinaryMask& inner, const BinaryMask& outer);

Vec3 voxel_to_physical(Index3 v, const Dims& dims, const Spacing& spacing);

enum class Plane { XY, YZ, XZ };

std::string to_string(Plane plane);

/// Parses "xy", "yz" or "xz" (case-insensitive).
Plane parse_plane(const std::string& text);

/// A fixed coordinate in one plane: z for XY, x for YZ, y for XZ.
struct SliceSelector {
  Plane plane = Plane::XY;
  std::size_t index = 0;
};

/// 2D binary grid. `u` is the faster-varying in-plane axis: x for XY and XZ
/// slices, y for YZ slices; `v` is the other one.
struct Slice2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> data;

  Slice2D() = default;
  Slice2D(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), data(w * h, fill) {}

  std::uint8_t& operator()(std::size_t u, std::size_t v) { return data[u + width * v]; }
  std::uint8_t operator()(std::size_t u, std::size_t v) const { return data[u + width * v]; }

  bool operator==(const Slice2D&) const = default;
};

/// Number of slices along the plane's fixed axis.
std::size_t slice_count(const Dims& dims, Plane plane);

/// In-plane extent (width, height) of a slice.
std::array<std::size_t, 2> slice_extent(const Dims& dims, Plane plane);

/// Volume coordinates of in-slice position (u, v).
inline Index3 slice_to_volume(Plane plane, std::size_t index, std::size_t u, std::size_t v) {
  switch (plane) {
    case Plane::XY: return {u, v, index};
    case Plane::YZ: return {index, u, v};
    case Plane::XZ: return {u, index, v};
  }
  return {};
}

Slice2D extract_slice(const BinaryMask& mask, SliceSelector sel);

/// Writes `slice` back into the plane it was extracted from.
void insert_slice(BinaryMask& mask, SliceSelector sel, const Slice2D& slice);

}  // namespace ctbrain

#endif
