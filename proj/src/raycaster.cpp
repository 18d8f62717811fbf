#include "ctbrain/raycaster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ctbrain/parallel.hpp"

namespace ctbrain {

namespace {

constexpr double kSnap = 1e-12;
constexpr double kTieTolerance = 1e-9;

double normalize_degrees(double a) {
  double r = std::fmod(a, 360.0);
  if (r < 0) r += 360.0;
  return r;
}

/*
 * Amanatides-Woo traversal in voxel units, starting at the origin voxel's
 * center. Simultaneous boundary crossings step both axes so an exact
 * diagonal never touches the side neighbours. visit(x, y) returns true to
 * stop; the traversal also stops at the grid edge. Returns whether visit
 * stopped it.
 */
template <typename Visit>
bool traverse(std::size_t nx, std::size_t ny, std::size_t x0, std::size_t y0,
              const RayDirection& dir, Visit&& visit) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const int step_x = dir.vx > 0 ? 1 : (dir.vx < 0 ? -1 : 0);
  const int step_y = dir.vy > 0 ? 1 : (dir.vy < 0 ? -1 : 0);
  const double delta_x = step_x ? 1.0 / std::abs(dir.vx) : inf;
  const double delta_y = step_y ? 1.0 / std::abs(dir.vy) : inf;
  double t_x = step_x ? 0.5 * delta_x : inf;
  double t_y = step_y ? 0.5 * delta_y : inf;

  auto x = static_cast<std::ptrdiff_t>(x0);
  auto y = static_cast<std::ptrdiff_t>(y0);
  const auto w = static_cast<std::ptrdiff_t>(nx);
  const auto h = static_cast<std::ptrdiff_t>(ny);
  for (;;) {
    const double tol = kTieTolerance * std::min(t_x, t_y);
    if (std::abs(t_x - t_y) <= tol) {
      x += step_x;
      y += step_y;
      t_x += delta_x;
      t_y += delta_y;
    } else if (t_x < t_y) {
      x += step_x;
      t_x += delta_x;
    } else {
      y += step_y;
      t_y += delta_y;
    }
    if (x < 0 || y < 0 || x >= w || y >= h) return false;
    if (visit(static_cast<std::size_t>(x), static_cast<std::size_t>(y))) return true;
  }
}

/*
 * For a lattice direction the voxel after v is always v + step, so
 * hit(v) = bone(v + step) || hit(v + step). One sweep per slice, processed
 * from the far side so v + step is already known.
 */
void lattice_hits(const HUVolume& vol, std::size_t z, const RayDirection& dir,
                  std::int32_t bone_threshold, std::vector<std::uint8_t>& hits) {
  const std::size_t nx = vol.dims().nx;
  const std::size_t ny = vol.dims().ny;
  const auto sx = static_cast<std::ptrdiff_t>(dir.lattice_dx);
  const auto sy = static_cast<std::ptrdiff_t>(dir.lattice_dy);
  hits.assign(nx * ny, 0);
  const std::int16_t* slice = vol.data().data() + z * nx * ny;

  for (std::size_t yi = 0; yi < ny; ++yi) {
    const auto y = static_cast<std::ptrdiff_t>(sy > 0 ? ny - 1 - yi : yi);
    const auto next_y = y + sy;
    const bool next_row_ok = next_y >= 0 && next_y < static_cast<std::ptrdiff_t>(ny);
    for (std::size_t xi = 0; xi < nx; ++xi) {
      const auto x = static_cast<std::ptrdiff_t>(sx > 0 ? nx - 1 - xi : xi);
      const auto next_x = x + sx;
      if (!next_row_ok || next_x < 0 || next_x >= static_cast<std::ptrdiff_t>(nx)) continue;
      const std::size_t next = static_cast<std::size_t>(next_x) + nx * static_cast<std::size_t>(next_y);
      hits[static_cast<std::size_t>(x) + nx * static_cast<std::size_t>(y)] =
          (slice[next] >= bone_threshold || hits[next]) ? 1 : 0;
    }
  }
}

bool cast(const HUVolume& vol, Index3 origin, const RayDirection& dir, std::int32_t bone_threshold) {
  const std::size_t nx = vol.dims().nx;
  const std::int16_t* slice = vol.data().data() + origin.z * nx * vol.dims().ny;
  return traverse(nx, vol.dims().ny, origin.x, origin.y, dir, [&](std::size_t x, std::size_t y) {
    return slice[x + nx * y] >= bone_threshold;
  });
}

}  // namespace

RayPolicy RayPolicy::evenly_spaced(std::size_t n, std::size_t min_hits, std::int32_t bone_threshold) {
  RayPolicy p;
  p.angles_deg.clear();
  for (std::size_t i = 0; i < n; ++i) p.angles_deg.push_back(360.0 * static_cast<double>(i) / static_cast<double>(n));
  p.min_hits = min_hits;
  p.bone_threshold = bone_threshold;
  return p;
}

void RayPolicy::validate() const {
  if (angles_deg.empty()) throw ContractError("ray policy needs at least one ray");
  if (min_hits < 1 || min_hits > n_rays()) {
    throw ContractError("min_hits (" + std::to_string(min_hits) + ") must lie in [1, " +
                        std::to_string(n_rays()) + "]");
  }
  std::vector<double> norm;
  for (double a : angles_deg) {
    if (!std::isfinite(a)) throw ContractError("ray angle must be finite");
    norm.push_back(normalize_degrees(a));
  }
  std::sort(norm.begin(), norm.end());
  for (std::size_t i = 1; i < norm.size(); ++i) {
    if (norm[i] - norm[i - 1] < 1e-9) throw ContractError("ray angles must be pairwise distinct");
  }
  if (norm.size() > 1 && norm.front() + 360.0 - norm.back() < 1e-9) {
    throw ContractError("ray angles must be pairwise distinct");
  }
}

RayDirection make_direction(double angle_deg, const Spacing& spacing) {
  const double rad = normalize_degrees(angle_deg) * std::numbers::pi / 180.0;
  double c = std::cos(rad);
  double s = std::sin(rad);
  if (std::abs(c) < kSnap) c = 0.0;
  if (std::abs(s) < kSnap) s = 0.0;

  RayDirection dir;
  dir.vx = c / spacing.sx;
  dir.vy = s / spacing.sy;
  const double ax = std::abs(dir.vx);
  const double ay = std::abs(dir.vy);
  const int sgn_x = dir.vx > 0 ? 1 : (dir.vx < 0 ? -1 : 0);
  const int sgn_y = dir.vy > 0 ? 1 : (dir.vy < 0 ? -1 : 0);
  if (ax == 0.0 || ay == 0.0 || std::abs(ax - ay) <= kTieTolerance * std::max(ax, ay)) {
    dir.lattice_dx = sgn_x;
    dir.lattice_dy = sgn_y;
  }
  return dir;
}

std::vector<Index3> trace_ray(const Dims& dims, const Spacing& spacing, Index3 origin,
                              double angle_deg) {
  if (origin.x >= dims.nx || origin.y >= dims.ny || origin.z >= dims.nz) {
    throw BoundsError("ray origin outside grid");
  }
  std::vector<Index3> path;
  traverse(dims.nx, dims.ny, origin.x, origin.y, make_direction(angle_deg, spacing),
           [&](std::size_t x, std::size_t y) {
             path.push_back({x, y, origin.z});
             return false;
           });
  return path;
}

bool cast_ray(const HUVolume& vol, Index3 origin, double angle_deg, std::int32_t bone_threshold) {
  if (!vol.contains(origin.x, origin.y, origin.z)) throw BoundsError("ray origin outside grid");
  return cast(vol, origin, make_direction(angle_deg, vol.spacing()), bone_threshold);
}

std::size_t count_hits(const HUVolume& vol, Index3 origin, const RayPolicy& policy) {
  if (!vol.contains(origin.x, origin.y, origin.z)) throw BoundsError("ray origin outside grid");
  std::size_t hits = 0;
  for (double a : policy.angles_deg) {
    if (cast(vol, origin, make_direction(a, vol.spacing()), policy.bone_threshold)) ++hits;
  }
  return hits;
}

BinaryMask classify_intracranial(const HUVolume& vol, const BinaryMask& mask,
                                 const RayPolicy& policy, unsigned threads) {
  policy.validate();
  require_same_geometry(vol, mask, "classify_intracranial");

  std::vector<RayDirection> dirs;
  for (double a : policy.angles_deg) dirs.push_back(make_direction(a, vol.spacing()));
  // Lattice rays first: their answers are table lookups, so the early exit
  // usually triggers before any DDA walk.
  std::stable_partition(dirs.begin(), dirs.end(), [](const RayDirection& d) { return d.on_lattice(); });
  const std::size_t n_lattice = static_cast<std::size_t>(
      std::count_if(dirs.begin(), dirs.end(), [](const RayDirection& d) { return d.on_lattice(); }));

  const std::size_t nx = vol.dims().nx;
  const std::size_t ny = vol.dims().ny;
  const std::size_t n = dirs.size();
  const std::size_t need = policy.min_hits;
  BinaryMask out = empty_mask_like(mask);

  parallel_for(0, vol.dims().nz, threads, [&](std::size_t z) {
    const std::size_t base = z * nx * ny;
    bool any = false;
    for (std::size_t i = base; i < base + nx * ny && !any; ++i) any = mask[i] != 0;
    if (!any) return;

    std::vector<std::vector<std::uint8_t>> tables(n_lattice);
    for (std::size_t d = 0; d < n_lattice; ++d) {
      lattice_hits(vol, z, dirs[d], policy.bone_threshold, tables[d]);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t local = x + nx * y;
        if (!mask[base + local]) continue;
        std::size_t hits = 0;
        std::size_t misses = 0;
        for (std::size_t d = 0; d < n && hits < need && n - misses >= need; ++d) {
          const bool hit = d < n_lattice ? tables[d][local] != 0
                                         : cast(vol, {x, y, z}, dirs[d], policy.bone_threshold);
          hit ? ++hits : ++misses;
        }
        out[base + local] = hits >= need ? 1 : 0;
      }
    }
  });
  return out;
}

}  // namespace ctbrain
