#include "doctest.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "metaet/rng.hpp"

using metaet::Rng;

TEST_CASE("keyed streams are pure functions of (seed, stream)") {
  Rng a = Rng::keyed(7, 3);
  Rng b = Rng::keyed(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream indices give distinct streams") {
  Rng a = Rng::keyed(7, 0);
  Rng b = Rng::keyed(7, 1);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("distinct seeds give distinct streams") {
  Rng a = Rng::keyed(7, 3);
  Rng b = Rng::keyed(8, 3);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("next_below stays in range and covers the range") {
  Rng rng = Rng::keyed(42, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.next_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("next_double lands in [0,1) with a sane mean") {
  Rng rng = Rng::keyed(1, 0);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("next_normal has roughly zero mean and unit variance") {
  Rng rng = Rng::keyed(2, 0);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  CHECK(mean < 0.05);
  CHECK(mean > -0.05);
  CHECK(sum_sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng = Rng::keyed(3, 0);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto shuffled = v;
  rng.shuffle(shuffled);
  auto sorted = shuffled;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);
}

TEST_CASE("sample_indices draws k distinct values uniformly enough") {
  Rng rng = Rng::keyed(4, 0);
  std::vector<int> hits(10, 0);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto picked = rng.sample_indices(10, 3);
    CHECK(picked.size() == 3);
    const std::set<int> unique(picked.begin(), picked.end());
    CHECK(unique.size() == 3);
    for (const int p : picked) {
      CHECK(p >= 0);
      CHECK(p < 10);
      ++hits[static_cast<std::size_t>(p)];
    }
  }
  // Each index should get about 5000 * 3/10 = 1500 hits.
  for (const int h : hits) {
    CHECK(h > 1300);
    CHECK(h < 1700);
  }
}

TEST_CASE("sample_indices rejects bad arguments") {
  Rng rng = Rng::keyed(5, 0);
  CHECK_THROWS_AS(rng.sample_indices(3, 4), std::invalid_argument);
}
