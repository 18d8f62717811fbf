#include "ctbrain/voxelgrid.hpp"

#include <algorithm>
#include <cctype>

namespace ctbrain {

void validate_geometry(const Dims& dims, const Spacing& spacing) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
    throw ContractError("grid dimensions must be positive");
  }
  if (!(spacing.sx > 0.0) || !(spacing.sy > 0.0) || !(spacing.sz > 0.0)) {
    throw ContractError("voxel spacing must be strictly positive");
  }
}

std::size_t count(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

bool is_subset(const BinaryMask& inner, const BinaryMask& outer) {
  require_same_geometry(inner, outer, "is_subset");
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] && !outer[i]) return false;
  }
  return true;
}

Vec3 voxel_to_physical(Index3 v, const Dims& dims, const Spacing& spacing) {
  if (v.x >= dims.nx || v.y >= dims.ny || v.z >= dims.nz) {
    throw BoundsError("voxel (" + std::to_string(v.x) + "," + std::to_string(v.y) + "," +
                      std::to_string(v.z) + ") outside grid");
  }
  return {static_cast<double>(v.x) * spacing.sx, static_cast<double>(v.y) * spacing.sy,
          static_cast<double>(v.z) * spacing.sz};
}

std::string to_string(Plane plane) {
  switch (plane) {
    case Plane::XY: return "xy";
    case Plane::YZ: return "yz";
    case Plane::XZ: return "xz";
  }
  return "?";
}

Plane parse_plane(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "xy") return Plane::XY;
  if (lower == "yz") return Plane::YZ;
  if (lower == "xz") return Plane::XZ;
  throw ContractError("unknown plane '" + text + "' (expected xy, yz or xz)");
}

std::size_t slice_count(const Dims& dims, Plane plane) {
  switch (plane) {
    case Plane::XY: return dims.nz;
    case Plane::YZ: return dims.nx;
    case Plane::XZ: return dims.ny;
  }
  return 0;
}

std::array<std::size_t, 2> slice_extent(const Dims& dims, Plane plane) {
  switch (plane) {
    case Plane::XY: return {dims.nx, dims.ny};
    case Plane::YZ: return {dims.ny, dims.nz};
    case Plane::XZ: return {dims.nx, dims.nz};
  }
  return {0, 0};
}

namespace {

void check_selector(const Dims& dims, SliceSelector sel) {
  if (sel.index >= slice_count(dims, sel.plane)) {
    throw BoundsError(to_string(sel.plane) + " slice " + std::to_string(sel.index) +
                      " outside grid");
  }
}

}  // namespace

Slice2D extract_slice(const BinaryMask& mask, SliceSelector sel) {
  check_selector(mask.dims(), sel);
  const auto [w, h] = slice_extent(mask.dims(), sel.plane);
  Slice2D slice(w, h);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      const Index3 p = slice_to_volume(sel.plane, sel.index, u, v);
      slice(u, v) = mask(p.x, p.y, p.z);
    }
  }
  return slice;
}

void insert_slice(BinaryMask& mask, SliceSelector sel, const Slice2D& slice) {
  check_selector(mask.dims(), sel);
  const auto [w, h] = slice_extent(mask.dims(), sel.plane);
  if (slice.width != w || slice.height != h) {
    throw ContractError("slice extent does not match the " + to_string(sel.plane) + " plane");
  }
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      const Index3 p = slice_to_volume(sel.plane, sel.index, u, v);
      mask(p.x, p.y, p.z) = slice(u, v);
    }
  }
}

}  // namespace ctbrain
