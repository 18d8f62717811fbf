#include "ctbrain/slicecomponents.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "ctbrain/parallel.hpp"

namespace ctbrain {

namespace {

class DisjointSet {
public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }

  std::uint32_t find(std::uint32_t a) {
    std::uint32_t root = a;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[a] != root) {
      const std::uint32_t next = parent_[a];
      parent_[a] = root;
      a = next;
    }
    return root;
  }

  /// Lower label becomes the root, so roots are the earliest-created labels.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

void ComponentPolicy::validate() const {
  if (planes.empty()) throw ContractError("component policy needs at least one plane");
  if (connectivity != 4 && connectivity != 8) {
    throw ContractError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
}

/*
 * Two-pass labelling with union-find. Provisional labels are issued in scan
 * order and unions keep the smaller label as root, so a component's root is
 * the label of its first scanned voxel; the tie-break falls out of comparing
 * roots.
 */
Slice2D largest_component_2d(const Slice2D& slice, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw ContractError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  }
  const std::size_t w = slice.width;
  const std::size_t h = slice.height;
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> labels(w * h, kNone);
  DisjointSet sets;

  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      if (!slice(u, v)) continue;
      std::uint32_t label = kNone;
      auto join = [&](std::size_t nu, std::size_t nv) {
        const std::uint32_t other = labels[nu + w * nv];
        if (other == kNone) return;
        if (label == kNone) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      if (u > 0) join(u - 1, v);
      if (v > 0) {
        join(u, v - 1);
        if (connectivity == 8) {
          if (u > 0) join(u - 1, v - 1);
          if (u + 1 < w) join(u + 1, v - 1);
        }
      }
      labels[u + w * v] = label == kNone ? sets.make() : label;
    }
  }

  Slice2D out(w, h);
  if (sets.size() == 0) return out;

  std::vector<std::size_t> sizes(sets.size(), 0);
  for (auto& l : labels) {
    if (l == kNone) continue;
    l = sets.find(l);
    ++sizes[l];
  }
  std::uint32_t best = 0;
  for (std::uint32_t l = 1; l < sizes.size(); ++l) {
    if (sizes[l] > sizes[best]) best = l;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) out.data[i] = labels[i] == best ? 1 : 0;
  return out;
}

BinaryMask retain_lcc_membership(const BinaryMask& mask, const ComponentPolicy& policy,
                                 unsigned threads) {
  policy.validate();
  BinaryMask out = mask;
  std::vector<Plane> planes = policy.planes;
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());

  for (Plane plane : planes) {
    const auto [w, h] = slice_extent(mask.dims(), plane);
    parallel_for(0, slice_count(mask.dims(), plane), threads, [&, w = w, h = h](std::size_t s) {
      const SliceSelector sel{plane, s};
      const Slice2D slice = extract_slice(mask, sel);
      const Slice2D keep = largest_component_2d(slice, policy.connectivity);
      for (std::size_t v = 0; v < h; ++v) {
        for (std::size_t u = 0; u < w; ++u) {
          if (slice(u, v) && !keep(u, v)) {
            const Index3 p = slice_to_volume(plane, s, u, v);
            out(p.x, p.y, p.z) = 0;
          }
        }
      }
    });
  }
  return out;
}

}  // namespace ctbrain
