#include "ctbrain/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "ctbrain/parallel.hpp"

namespace ctbrain {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double ellipsoid_value(Vec3 p, Vec3 radii) {
  const double x = p.x / radii.x;
  const double y = p.y / radii.y;
  const double z = p.z / radii.z;
  return x * x + y * y + z * z;
}

bool inside(Vec3 p, Vec3 radii) { return ellipsoid_value(p, radii) <= 1.0; }

Vec3 grow(Vec3 radii, double by) { return {radii.x + by, radii.y + by, radii.z + by}; }

bool in_foramen(const Foramen& f, Vec3 p) {
  const Vec3 u{std::cos(f.direction_deg * kDeg), std::sin(f.direction_deg * kDeg), 0.0};
  const Vec3 rel = p - f.center;
  const double t = std::max(0.0, dot(rel, u));
  const Vec3 off = rel - t * u;
  return dot(off, off) <= f.radius_mm * f.radius_mm;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw SpecError("phantom spec: " + what);
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw SpecError(std::string(key) + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_keys(const json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw SpecError(std::string(where) + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return item.key() == k; })) {
      throw SpecError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

}  // namespace

PhantomSpec PhantomSpec::standard() {
  PhantomSpec s;
  // Below the cranial base, inside the thick basal bone.
  s.sinuses.push_back({{0.0, 0.0, -47.5}, 2.0, 20});
  // Frontal, embedded mid-shell.
  s.sinuses.push_back({{0.0, -51.8, 10.0}, 2.0, 20});
  s.foramina.push_back({0.0, {0.0, 0.0, 0.0}, 1.0});
  s.foramina.push_back({135.0, {0.0, 0.0, -10.0}, 1.0});
  return s;
}

void PhantomSpec::validate() const {
  require(dims.nx > 0 && dims.ny > 0 && dims.nz > 0, "dims must be positive");
  require(spacing.sx > 0 && spacing.sy > 0 && spacing.sz > 0, "spacing must be positive");
  require(inner_skull_radii.x > 0 && inner_skull_radii.y > 0 && inner_skull_radii.z > 0,
          "inner radii must be positive");
  require(inner_skull_radii.x < outer_skull_radii.x && inner_skull_radii.y < outer_skull_radii.y &&
              inner_skull_radii.z < outer_skull_radii.z,
          "inner skull radii must be strictly inside outer radii");
  require(scalp_thickness_mm >= 0.0, "scalp thickness must be non-negative");
  require(hu_bone >= 300, "hu_bone must be >= 300");
  require(hu_brain >= -40 && hu_brain <= 160, "hu_brain must lie in [-40, 160]");
  require(hu_scalp >= -40 && hu_scalp <= 160, "hu_scalp must lie in [-40, 160]");
  require(hu_air < -40, "hu_air must be < -40");
  for (std::int32_t hu : {hu_air, hu_brain, hu_scalp, hu_bone}) {
    require(hu >= -32768 && hu <= 32767, "HU values must fit in 16 bits");
  }
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma must be >= 0");

  for (const Sinus& s : sinuses) {
    require(s.radius_mm > 0.0, "sinus radius must be positive");
    require(s.hu >= -32768 && s.hu <= 32767, "sinus HU must fit in 16 bits");
    // Disjoint from the brain: center outside the inner ellipsoid grown by r.
    require(ellipsoid_value(s.center, grow(inner_skull_radii, s.radius_mm)) > 1.0,
            "sinus overlaps the brain interior");
  }

  const double min_inner = std::min(inner_skull_radii.x, inner_skull_radii.y);
  for (const Foramen& f : foramina) {
    require(f.radius_mm > 0.0, "foramen radius must be positive");
    const double offset = std::hypot(f.center.x, f.center.y);
    const double reach = min_inner - offset;
    require(reach > f.radius_mm, "foramen axis must start well inside the skull");
    // Angular footprint seen from the head center at the inner skull surface.
    const double half = std::asin(f.radius_mm / reach) / kDeg;
    const Vec3 u{std::cos(f.direction_deg * kDeg), std::sin(f.direction_deg * kDeg), 0.0};
    const Vec3 at = f.center + min_inner * u;
    const double mid = std::atan2(at.y, at.x) / kDeg;
    int covered = 0;
    for (int k = -8; k <= 16; ++k) {
      const double a = 45.0 * k;
      if (a >= mid - half && a <= mid + half) ++covered;
    }
    require(covered <= 1, "foramen subtends more than one default ray direction");
  }

  if (rotation) {
    const Vec3 a = rotation->axis;
    require(std::isfinite(rotation->angle_deg), "rotation angle must be finite");
    require(dot(a, a) > 0.0, "rotation axis must be nonzero");
  }
}

Vec3 volume_center(const Dims& dims, const Spacing& spacing) {
  return {0.5 * static_cast<double>(dims.nx - 1) * spacing.sx,
          0.5 * static_cast<double>(dims.ny - 1) * spacing.sy,
          0.5 * static_cast<double>(dims.nz - 1) * spacing.sz};
}

Vec3 rotate_coords(Vec3 p, double angle_deg, Vec3 axis, Vec3 center) {
  const double len = std::sqrt(dot(axis, axis));
  if (!(len > 0.0)) throw SpecError("rotation axis must be nonzero");
  const Vec3 k = (1.0 / len) * axis;
  const Vec3 v = p - center;
  const double c = std::cos(angle_deg * kDeg);
  const double s = std::sin(angle_deg * kDeg);
  const Vec3 kxv{k.y * v.z - k.z * v.y, k.z * v.x - k.x * v.z, k.x * v.y - k.y * v.x};
  const Vec3 rotated = c * v + s * kxv + ((1.0 - c) * dot(k, v)) * k;
  return center + rotated;
}

Tissue classify_point(const PhantomSpec& spec, Vec3 p, std::size_t* sinus_index) {
  for (std::size_t i = 0; i < spec.sinuses.size(); ++i) {
    const Vec3 d = p - spec.sinuses[i].center;
    if (dot(d, d) <= spec.sinuses[i].radius_mm * spec.sinuses[i].radius_mm) {
      if (sinus_index) *sinus_index = i;
      return Tissue::Sinus;
    }
  }
  const bool in_brain = inside(p, spec.inner_skull_radii);
  const bool in_skull = inside(p, spec.outer_skull_radii);
  if (!in_brain && in_skull) {
    for (const Foramen& f : spec.foramina) {
      if (in_foramen(f, p)) return Tissue::Foramen;
    }
  }
  if (in_brain) return Tissue::Brain;
  if (in_skull) return Tissue::Bone;
  if (inside(p, grow(spec.outer_skull_radii, spec.scalp_thickness_mm))) return Tissue::Scalp;
  return Tissue::Air;
}

PhantomLabels label_phantom(const PhantomSpec& spec, unsigned threads) {
  spec.validate();
  PhantomLabels labels{VoxelGrid<std::uint8_t>(spec.dims, spec.spacing, 0),
                       VoxelGrid<std::uint8_t>(spec.dims, spec.spacing, 0)};
  const Vec3 center = volume_center(spec.dims, spec.spacing);
  const Dims& d = spec.dims;
  parallel_for(0, d.nz, threads, [&](std::size_t z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        Vec3 p = voxel_to_physical({x, y, z}, d, spec.spacing);
        if (spec.rotation) {
          p = rotate_coords(p, -spec.rotation->angle_deg, spec.rotation->axis, center);
        }
        std::size_t sinus = 0;
        const Tissue t = classify_point(spec, p - center, &sinus);
        const std::size_t i = labels.tissue.index(x, y, z);
        labels.tissue[i] = static_cast<std::uint8_t>(t);
        if (t == Tissue::Sinus) labels.sinus_id[i] = static_cast<std::uint8_t>(sinus + 1);
      }
    }
  });
  return labels;
}

double gaussian_noise(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(index));
  const std::uint64_t b = splitmix64(a);
  // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Phantom generate(const PhantomSpec& spec, unsigned threads) {
  const PhantomLabels labels = label_phantom(spec, threads);
  Phantom out{HUVolume(spec.dims, spec.spacing, 0), BinaryMask(spec.dims, spec.spacing, 0)};

  std::vector<std::int32_t> sinus_hu;
  for (const Sinus& s : spec.sinuses) sinus_hu.push_back(s.hu);
  auto hu_for = [&](std::size_t i) -> std::int32_t {
    switch (static_cast<Tissue>(labels.tissue[i])) {
      case Tissue::Air: return spec.hu_air;
      case Tissue::Scalp: return spec.hu_scalp;
      case Tissue::Bone: return spec.hu_bone;
      case Tissue::Brain: return spec.hu_brain;
      case Tissue::Foramen: return spec.hu_scalp;
      case Tissue::Sinus: return sinus_hu[labels.sinus_id[i] - 1u];
    }
    return spec.hu_air;
  };

  const std::size_t plane = spec.dims.nx * spec.dims.ny;
  parallel_for(0, spec.dims.nz, threads, [&](std::size_t z) {
    for (std::size_t i = z * plane; i < (z + 1) * plane; ++i) {
      double hu = hu_for(i);
      out.truth[i] = labels.tissue[i] == static_cast<std::uint8_t>(Tissue::Brain) ? 1 : 0;
      if (spec.noise_sigma > 0.0) {
        hu = std::round(hu + spec.noise_sigma * gaussian_noise(spec.seed, i));
      }
      out.volume[i] = static_cast<std::int16_t>(std::clamp(hu, -32768.0, 32767.0));
    }
  });
  return out;
}

std::string phantom_spec_to_json(const PhantomSpec& spec) {
  json j;
  j["dims"] = {spec.dims.nx, spec.dims.ny, spec.dims.nz};
  j["spacing"] = {spec.spacing.sx, spec.spacing.sy, spec.spacing.sz};
  j["inner_skull_radii"] = vec_json(spec.inner_skull_radii);
  j["outer_skull_radii"] = vec_json(spec.outer_skull_radii);
  j["scalp_thickness_mm"] = spec.scalp_thickness_mm;
  j["hu_air"] = spec.hu_air;
  j["hu_brain"] = spec.hu_brain;
  j["hu_scalp"] = spec.hu_scalp;
  j["hu_bone"] = spec.hu_bone;
  j["sinuses"] = json::array();
  for (const Sinus& s : spec.sinuses) {
    j["sinuses"].push_back({{"center", vec_json(s.center)}, {"radius_mm", s.radius_mm}, {"hu", s.hu}});
  }
  j["foramina"] = json::array();
  for (const Foramen& f : spec.foramina) {
    j["foramina"].push_back({{"direction_deg", f.direction_deg},
                             {"center", vec_json(f.center)},
                             {"radius_mm", f.radius_mm}});
  }
  if (spec.rotation) {
    j["rotation"] = {{"angle_deg", spec.rotation->angle_deg}, {"axis", vec_json(spec.rotation->axis)}};
  } else {
    j["rotation"] = nullptr;
  }
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  return j.dump(2);
}

PhantomSpec phantom_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("phantom spec: invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"dims", "spacing", "inner_skull_radii", "outer_skull_radii", "scalp_thickness_mm",
              "hu_air", "hu_brain", "hu_scalp", "hu_bone", "sinuses", "foramina", "rotation",
              "noise_sigma", "seed"},
             "phantom spec");

  PhantomSpec s = PhantomSpec::standard();
  try {
    if (j.contains("dims")) {
      const auto& d = j["dims"];
      if (!d.is_array() || d.size() != 3) throw SpecError("dims: expected [nx, ny, nz]");
      s.dims = {d[0].get<std::size_t>(), d[1].get<std::size_t>(), d[2].get<std::size_t>()};
    }
    if (j.contains("spacing")) {
      const Vec3 v = vec_from(j["spacing"], "spacing");
      s.spacing = {v.x, v.y, v.z};
    }
    if (j.contains("inner_skull_radii")) s.inner_skull_radii = vec_from(j["inner_skull_radii"], "inner_skull_radii");
    if (j.contains("outer_skull_radii")) s.outer_skull_radii = vec_from(j["outer_skull_radii"], "outer_skull_radii");
    if (j.contains("scalp_thickness_mm")) s.scalp_thickness_mm = j["scalp_thickness_mm"].get<double>();
    if (j.contains("hu_air")) s.hu_air = j["hu_air"].get<std::int32_t>();
    if (j.contains("hu_brain")) s.hu_brain = j["hu_brain"].get<std::int32_t>();
    if (j.contains("hu_scalp")) s.hu_scalp = j["hu_scalp"].get<std::int32_t>();
    if (j.contains("hu_bone")) s.hu_bone = j["hu_bone"].get<std::int32_t>();
    if (j.contains("sinuses")) {
      s.sinuses.clear();
      for (const auto& e : j["sinuses"]) {
        check_keys(e, {"center", "radius_mm", "hu"}, "sinus");
        Sinus sinus;
        if (e.contains("center")) sinus.center = vec_from(e["center"], "center");
        if (e.contains("radius_mm")) sinus.radius_mm = e["radius_mm"].get<double>();
        if (e.contains("hu")) sinus.hu = e["hu"].get<std::int32_t>();
        s.sinuses.push_back(sinus);
      }
    }
    if (j.contains("foramina")) {
      s.foramina.clear();
      for (const auto& e : j["foramina"]) {
        check_keys(e, {"direction_deg", "center", "radius_mm"}, "foramen");
        Foramen f;
        if (e.contains("direction_deg")) f.direction_deg = e["direction_deg"].get<double>();
        if (e.contains("center")) f.center = vec_from(e["center"], "center");
        if (e.contains("radius_mm")) f.radius_mm = e["radius_mm"].get<double>();
        s.foramina.push_back(f);
      }
    }
    if (j.contains("rotation")) {
      if (j["rotation"].is_null()) {
        s.rotation.reset();
      } else {
        check_keys(j["rotation"], {"angle_deg", "axis"}, "rotation");
        Rotation r;
        if (j["rotation"].contains("angle_deg")) r.angle_deg = j["rotation"]["angle_deg"].get<double>();
        if (j["rotation"].contains("axis")) r.axis = vec_from(j["rotation"]["axis"], "axis");
        s.rotation = r;
      }
    }
    if (j.contains("noise_sigma")) s.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("phantom spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace ctbrain
