#include <doctest.h>

#include <random>

#include "ctbrain/voxelgrid.hpp"
#include "oracles.hpp"

using namespace ctbrain;

TEST_CASE("voxel_to_physical maps voxel centers by spacing") {
  const Dims dims{4, 4, 4};
  const Spacing ct{0.488, 0.488, 2.5};
  CHECK(voxel_to_physical({0, 0, 0}, dims, ct) == Vec3{0, 0, 0});
  const Vec3 p = voxel_to_physical({1, 0, 0}, dims, ct);
  CHECK(p.x == doctest::Approx(0.488));
  CHECK(p.y == 0.0);
  CHECK(p.z == 0.0);
  CHECK(voxel_to_physical({2, 3, 1}, dims, {1, 1, 1}) == Vec3{2, 3, 1});
  CHECK_THROWS_AS(voxel_to_physical({4, 0, 0}, dims, ct), BoundsError);
}

TEST_CASE("grids reject bad geometry") {
  CHECK_THROWS_AS(BinaryMask({0, 1, 1}, {1, 1, 1}), ContractError);
  CHECK_THROWS_AS(BinaryMask({1, 1, 1}, {1, 0, 1}), ContractError);
  CHECK_THROWS_AS(HUVolume({2, 2, 1}, {1, 1, 1}, std::vector<std::int16_t>(3)), ContractError);
  BinaryMask m({2, 2, 2}, {1, 1, 1});
  CHECK_THROWS_AS(m.at(2, 0, 0), BoundsError);
}

TEST_CASE("extract_slice examples") {
  BinaryMask full({4, 4, 4}, {1, 1, 1}, 1);
  const Slice2D xy = extract_slice(full, {Plane::XY, 0});
  CHECK(xy.width == 4);
  CHECK(xy.height == 4);
  CHECK(std::all_of(xy.data.begin(), xy.data.end(), [](auto v) { return v == 1; }));

  BinaryMask single({4, 4, 4}, {1, 1, 1}, 0);
  single(1, 2, 3) = 1;
  const Slice2D yz1 = extract_slice(single, {Plane::YZ, 1});
  for (std::size_t z = 0; z < 4; ++z)
    for (std::size_t y = 0; y < 4; ++y) CHECK(yz1(y, z) == ((y == 2 && z == 3) ? 1 : 0));
  const Slice2D yz0 = extract_slice(single, {Plane::YZ, 0});
  CHECK(std::none_of(yz0.data.begin(), yz0.data.end(), [](auto v) { return v != 0; }));

  CHECK_THROWS_AS(extract_slice(single, {Plane::XZ, 4}), BoundsError);
}

TEST_CASE("slices tile the volume and reinsert losslessly") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> ext(1, 9);
    const Dims dims{ext(rng), ext(rng), ext(rng)};
    const BinaryMask m = oracle::random_mask(rng, dims, {1, 1, 1}, 0.4);
    for (Plane plane : {Plane::XY, Plane::YZ, Plane::XZ}) {
      std::vector<int> visits(m.size(), 0);
      BinaryMask rebuilt(dims, {1, 1, 1}, 0);
      for (std::size_t s = 0; s < slice_count(dims, plane); ++s) {
        const Slice2D sl = extract_slice(m, {plane, s});
        for (std::size_t v = 0; v < sl.height; ++v)
          for (std::size_t u = 0; u < sl.width; ++u) {
            const Index3 p = slice_to_volume(plane, s, u, v);
            ++visits[m.index(p.x, p.y, p.z)];
          }
        insert_slice(rebuilt, {plane, s}, sl);
      }
      CHECK(std::all_of(visits.begin(), visits.end(), [](int n) { return n == 1; }));
      CHECK(rebuilt == m);
    }
  }
}

TEST_CASE("linear index and coordinates are inverse") {
  const BinaryMask m({5, 3, 4}, {1, 1, 1});
  std::vector<int> seen(m.size(), 0);
  for (std::size_t z = 0; z < 4; ++z)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t x = 0; x < 5; ++x) {
        const std::size_t i = m.index(x, y, z);
        REQUIRE(i < m.size());
        ++seen[i];
        CHECK(m.coords(i) == Index3{x, y, z});
      }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  CHECK(m.index(1, 0, 0) == 1);  // x fastest
  CHECK(m.index(0, 1, 0) == 5);
  CHECK(m.index(0, 0, 1) == 15);
}

TEST_CASE("plane names") {
  CHECK(parse_plane("XZ") == Plane::XZ);
  CHECK(to_string(Plane::YZ) == "yz");
  CHECK_THROWS_AS(parse_plane("zz"), ContractError);
}
