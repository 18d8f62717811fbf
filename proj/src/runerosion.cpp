#include "ctbrain/runerosion.hpp"

#include <cmath>
#include <string>

#include "ctbrain/parallel.hpp"

namespace ctbrain {

namespace {

// Absorbs representation error in min_run_mm / spacing (10 / 0.5 must give 20).
constexpr double kLengthTolerance = 1e-9;

void erode_slice(const std::uint8_t* in, std::uint8_t* out, std::size_t nx, std::size_t ny,
                 std::size_t need_x, std::size_t need_y) {
  std::vector<Run> runs;

  // Column runs long enough in y.
  std::vector<std::uint8_t> y_ok(nx * ny, 0);
  for (std::size_t x = 0; x < nx; ++x) {
    encode_runs(in + x, ny, nx, runs);
    for (const Run& r : runs) {
      if (r.length < need_y) continue;
      for (std::size_t y = r.start; y < r.start + r.length; ++y) y_ok[x + nx * y] = 1;
    }
  }

  // Row runs long enough in x, intersected with y_ok.
  for (std::size_t y = 0; y < ny; ++y) {
    const std::size_t row = nx * y;
    encode_runs(in + row, nx, 1, runs);
    for (const Run& r : runs) {
      if (r.length < need_x) continue;
      for (std::size_t x = r.start; x < r.start + r.length; ++x) out[row + x] = y_ok[row + x];
    }
  }
}

}  // namespace

void ErosionPolicy::validate() const {
  if (!(min_run_mm > 0.0) || !std::isfinite(min_run_mm)) {
    throw ContractError("min_run_mm must be positive, got " + std::to_string(min_run_mm));
  }
  if (passes < 1) throw ContractError("erosion needs at least one pass");
}

std::size_t required_run_voxels(double min_run_mm, double spacing) {
  if (!(spacing > 0.0)) throw ContractError("spacing must be positive");
  const double n = std::ceil(min_run_mm / spacing - kLengthTolerance);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

void encode_runs(const std::uint8_t* line, std::size_t n, std::size_t stride, std::vector<Run>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && !line[i * stride]) ++i;
    if (i == n) break;
    const std::size_t start = i;
    while (i < n && line[i * stride]) ++i;
    out.push_back({start, i - start});
  }
}

BinaryMask erosion_pass(const BinaryMask& mask, const ErosionPolicy& policy, unsigned threads) {
  policy.validate();
  const Dims& d = mask.dims();
  const std::size_t need_x = required_run_voxels(policy.min_run_mm, mask.spacing().sx);
  const std::size_t need_y = required_run_voxels(policy.min_run_mm, mask.spacing().sy);
  BinaryMask out = empty_mask_like(mask);
  const std::size_t plane = d.nx * d.ny;
  parallel_for(0, d.nz, threads, [&](std::size_t z) {
    erode_slice(mask.data().data() + z * plane, out.data().data() + z * plane, d.nx, d.ny, need_x,
                need_y);
  });
  return out;
}

BinaryMask special_erosion(const BinaryMask& mask, const ErosionPolicy& policy, unsigned threads) {
  policy.validate();
  BinaryMask current = mask;
  for (std::size_t p = 0; p < policy.passes; ++p) current = erosion_pass(current, policy, threads);
  return current;
}

}  // namespace ctbrain
