// Copyright 2026 The spherclt Authors
// SPDX-License-Identifier: Apache-2.0

#include "spherclt/rng.hpp"

#include <cmath>
#include <doctest.h>
#include <vector>

using namespace spherclt;

TEST_CASE("philox 4x32-10 known-answer vectors") {
  // Standard vectors for the 10-round 4x32 configuration.
  {
    const philox::Block out = philox::philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const philox::Block out = philox::philox4x32_10(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const philox::Block out = philox::philox4x32_10(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
        {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("streams are pure functions of (seed, stream, path, block)") {
  const GaussianStream a(42, 0, 7);
  const GaussianStream b(42, 0, 7);
  CHECK(a.normals(12345) == b.normals(12345));

  const GaussianStream other_path(42, 0, 8);
  const GaussianStream other_stream(42, 1, 7);
  const GaussianStream other_seed(43, 0, 7);
  CHECK(a.normals(12345) != other_path.normals(12345));
  CHECK(a.normals(12345) != other_stream.normals(12345));
  CHECK(a.normals(12345) != other_seed.normals(12345));
  CHECK(a.normals(12345) != a.normals(12346));
}

TEST_CASE("record-addressed fills never overlap") {
  const GaussianStream s(7, 2, 3);
  double rec0[3], rec1[3], rec2[6];
  s.fill_normals(0, rec0);
  s.fill_normals(1, rec1);
  // Records of size 3 use one block each: record r = block r.
  const auto b0 = s.normals(0);
  const auto b1 = s.normals(1);
  for (int i = 0; i < 3; ++i) {
    CHECK(rec0[i] == b0[i]);
    CHECK(rec1[i] == b1[i]);
  }
  // Records of size 6 use two blocks each.
  s.fill_normals(0, rec2);
  const auto c0 = s.normals(0);
  const auto c1 = s.normals(1);
  CHECK(rec2[0] == c0[0]);
  CHECK(rec2[3] == c0[3]);
  CHECK(rec2[4] == c1[0]);
}

TEST_CASE("uniform bits map into the open unit interval") {
  CHECK(uniform_from_bits(0) > 0.0);
  CHECK(uniform_from_bits(0xffffffffu) < 1.0);
  CHECK(uniform_from_bits(0x80000000u) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("gaussian moments sanity") {
  SequentialNormals rng(2718, 5, 0);
  const int count = 200000;
  double sum = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double z = rng.next();
    sum += z;
    sum2 += z * z;
    sum3 += z * z * z;
    sum4 += z * z * z * z;
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 1.0) <= 0.02);
  CHECK(std::abs(sum3 / count) <= 0.03);
  CHECK(std::abs(sum4 / count - 3.0) <= 0.1);
}

TEST_CASE("sequential adapter replays deterministically") {
  SequentialNormals a(99, 1, 4);
  SequentialNormals b(99, 1, 4);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
