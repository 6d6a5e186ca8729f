#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "metaet/errors.hpp"
#include "metaet/hardness.hpp"
#include "metaet/rng.hpp"
#include "oracles.hpp"

using namespace metaet;

namespace {

ClassFeatureSet make_set(int dim, std::vector<double> rows,
                         const std::string& id = "c") {
  ClassFeatureSet s;
  s.class_id = id;
  s.dim = dim;
  s.rows = std::move(rows);
  return s;
}

ClassFeatureSet random_set(Rng& rng, int dim, int count) {
  std::vector<double> rows(static_cast<std::size_t>(dim * count));
  for (auto& v : rows) v = 4.0 * rng.next_double() - 2.0;
  return make_set(dim, std::move(rows));
}

}  // namespace

TEST_CASE("pairwise distance worked values") {
  // Single pair: the 3-4-5 triangle.
  const auto a = make_set(2, {0.0, 0.0});
  const auto b = make_set(2, {3.0, 4.0});
  CHECK(dist_pairwise(a, b) == doctest::Approx(5.0).epsilon(1e-12));

  // Two points against one: mean of squared distances 9 and 13.
  const auto c = make_set(2, {0.0, 0.0, 0.0, 2.0});
  const auto d = make_set(2, {3.0, 0.0});
  CHECK(dist_pairwise(c, d) == doctest::Approx(std::sqrt(11.0)).epsilon(1e-12));

  // Identical singleton sets.
  const auto p = make_set(2, {1.5, -2.0});
  CHECK(dist_pairwise(p, p) == doctest::Approx(0.0));
}

TEST_CASE("hausdorff distance worked values") {
  const auto z = make_set(1, {0.0});
  CHECK(dist_hausdorff(z, z) == doctest::Approx(0.0));

  const auto a = make_set(1, {0.0});
  const auto b = make_set(1, {1.0, 5.0});
  CHECK(dist_hausdorff(a, b) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(dist_hausdorff(b, a) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("hsic worked values") {
  // K = [[1,-1],[-1,1]] is already centered, so tr(KHKH) = tr(KK) = 4.
  const auto a = make_set(1, {1.0, -1.0});
  CHECK(hsic(a, a) == doctest::Approx(4.0).epsilon(1e-12));

  // A single point is annihilated by centering.
  const auto single = make_set(3, {1.0, 2.0, 3.0});
  CHECK(hsic(single, single) == doctest::Approx(0.0));

  // Constant rows are annihilated by centering.
  const auto constant = make_set(1, {2.0, 2.0, 2.0});
  Rng rng = Rng::keyed(3, 0);
  const auto other = random_set(rng, 1, 3);
  CHECK(hsic(other, constant) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("measures reject incompatible sets") {
  const auto a = make_set(2, {0.0, 0.0});
  const auto b = make_set(3, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(dist_pairwise(a, b), std::invalid_argument);
  CHECK_THROWS_AS(dist_hausdorff(a, b), std::invalid_argument);
  CHECK_THROWS_AS(hsic(a, b), std::invalid_argument);

  const auto c = make_set(2, {0.0, 0.0, 1.0, 1.0});
  const auto d = make_set(2, {0.0, 0.0});
  CHECK_THROWS_AS(hsic(c, d), std::invalid_argument);  // unequal Q
}

TEST_CASE("all measures match the brute-force oracles on random instances") {
  Rng rng = Rng::keyed(2024, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next_below(4));
    const int count = 1 + static_cast<int>(rng.next_below(5));
    const auto a = random_set(rng, dim, count);
    const auto b = random_set(rng, dim, count);
    CHECK(oracles::rel_error(dist_pairwise(a, b), oracles::pairwise(a, b)) < 1e-9);
    CHECK(oracles::rel_error(dist_hausdorff(a, b), oracles::hausdorff(a, b)) < 1e-9);
    CHECK(oracles::rel_error(hsic(a, b), oracles::hsic(a, b)) < 1e-9);
  }
}

TEST_CASE("task_hardness matches the oracle reduction on random tasks") {
  Rng rng = Rng::keyed(2025, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(3));
    const int dim = 1 + static_cast<int>(rng.next_below(4));
    const int count = 1 + static_cast<int>(rng.next_below(5));
    std::vector<ClassFeatureSet> sets;
    for (int c = 0; c < n; ++c) sets.push_back(random_set(rng, dim, count));
    for (const Measure m :
         {Measure::kPairwiseEuclidean, Measure::kHausdorff, Measure::kHsic}) {
      const auto report = task_hardness(sets, m);
      CHECK(oracles::rel_error(report.th, oracles::task_hardness(sets, m)) < 1e-9);
    }
  }
}

TEST_CASE("task_hardness reduces distances via the minimum") {
  // Pair relations {2,4,5} -> TH = 1/2.
  const auto a = make_set(1, {0.0});
  const auto b = make_set(1, {2.0});
  const auto c = make_set(1, {-3.0});
  const auto report = task_hardness({a, b, c}, Measure::kPairwiseEuclidean);
  CHECK(report.relation(0, 1) == doctest::Approx(2.0));
  CHECK(report.relation(0, 2) == doctest::Approx(3.0));
  CHECK(report.relation(1, 2) == doctest::Approx(5.0));
  CHECK(report.th == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.pair_a == 0);
  CHECK(report.pair_b == 1);
}

TEST_CASE("coincident classes cap hardness at 1/epsilon") {
  // All points of both classes at the same location: every cross pair has
  // distance zero, so the floor kicks in.
  const auto a = make_set(1, {1.5});
  const auto pw = task_hardness({a, a}, Measure::kPairwiseEuclidean);
  CHECK(pw.th == doctest::Approx(1.0 / kHardnessEpsilon));
  // Identical spread-out sets have zero Hausdorff distance as well.
  const auto b = make_set(1, {1.0, 2.0});
  const auto hd = task_hardness({b, b}, Measure::kHausdorff);
  CHECK(hd.th == doctest::Approx(1.0 / kHardnessEpsilon));
}

TEST_CASE("hsic hardness takes the maximum pair value") {
  // Three 1-D sets with different spreads: HSIC grows with spread, so the
  // largest pair must be the two widest sets.
  const auto narrow = make_set(1, {0.1, -0.1});
  const auto medium = make_set(1, {1.0, -1.0});
  const auto wide = make_set(1, {3.0, -3.0});
  const auto report = task_hardness({narrow, medium, wide}, Measure::kHsic);
  CHECK(report.th == doctest::Approx(report.relation(1, 2)));
  CHECK(report.pair_a == 1);
  CHECK(report.pair_b == 2);
}

TEST_CASE("scaling features scales distances by c and hsic by c^4") {
  Rng rng = Rng::keyed(77, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + static_cast<int>(rng.next_below(3));
    const int count = 2 + static_cast<int>(rng.next_below(3));
    const double c = 0.5 + 3.0 * rng.next_double();
    std::vector<ClassFeatureSet> sets, scaled;
    for (int i = 0; i < 3; ++i) {
      auto s = random_set(rng, dim, count);
      auto t = s;
      for (auto& v : t.rows) v *= c;
      sets.push_back(std::move(s));
      scaled.push_back(std::move(t));
    }
    CHECK(oracles::rel_error(dist_pairwise(scaled[0], scaled[1]),
                             c * dist_pairwise(sets[0], sets[1])) < 1e-9);
    CHECK(oracles::rel_error(dist_hausdorff(scaled[0], scaled[1]),
                             c * dist_hausdorff(sets[0], sets[1])) < 1e-9);
    CHECK(oracles::rel_error(hsic(scaled[0], scaled[1]),
                             c * c * c * c * hsic(sets[0], sets[1])) < 1e-9);
    for (const Measure m :
         {Measure::kPairwiseEuclidean, Measure::kHausdorff, Measure::kHsic}) {
      const auto r1 = task_hardness(sets, m);
      const auto r2 = task_hardness(scaled, m);
      CHECK(r1.pair_a == r2.pair_a);
      CHECK(r1.pair_b == r2.pair_b);
    }
  }
}

TEST_CASE("task_hardness rejects degenerate input") {
  const auto a = make_set(1, {0.0});
  CHECK_THROWS_AS(task_hardness({a}, Measure::kHausdorff), std::invalid_argument);
  auto bad = make_set(1, {0.0});
  bad.rows[0] = std::nan("");
  CHECK_THROWS_AS(task_hardness({a, bad}, Measure::kHausdorff),
                  std::invalid_argument);
}

TEST_CASE("phase_transform follows the two branches") {
  CHECK(phase_transform(2.0, Phase::kPrimary) == doctest::Approx(0.5));
  CHECK(phase_transform(2.0, Phase::kAdvanced) == doctest::Approx(2.0));
  CHECK(phase_transform(1.0, Phase::kPrimary) == doctest::Approx(1.0));
  CHECK(phase_transform(1.0, Phase::kAdvanced) == doctest::Approx(1.0));
  CHECK_THROWS_AS(phase_transform(0.0, Phase::kPrimary), std::invalid_argument);
  CHECK_THROWS_AS(phase_transform(-1.0, Phase::kAdvanced), std::invalid_argument);
}

TEST_CASE("batch_weights worked values") {
  const auto advanced = batch_weights({2.0, 1.0, 1.0}, Phase::kAdvanced);
  CHECK(advanced[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(advanced[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(advanced[2] == doctest::Approx(0.25).epsilon(1e-12));

  const auto primary = batch_weights({2.0, 1.0}, Phase::kPrimary);
  CHECK(primary[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(primary[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const auto equal = batch_weights({3.0, 3.0, 3.0, 3.0}, Phase::kPrimary);
  for (const double w : equal) CHECK(w == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("batch_weights: normalization, monotonicity, equivariance") {
  Rng rng = Rng::keyed(555, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const int b = 1 + static_cast<int>(rng.next_below(8));
    std::vector<double> ths(static_cast<std::size_t>(b));
    for (auto& th : ths) th = 0.01 + 10.0 * rng.next_double();

    for (const Phase phase : {Phase::kPrimary, Phase::kAdvanced}) {
      const auto w = batch_weights(ths, phase);
      double sum = 0.0;
      for (const double x : w) {
        CHECK(x > 0.0);
        sum += x;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);

      // Primary prefers easy (low TH); Advanced prefers hard (high TH).
      for (int i = 0; i < b; ++i) {
        for (int j = i + 1; j < b; ++j) {
          const bool th_less = ths[static_cast<std::size_t>(i)] <
                               ths[static_cast<std::size_t>(j)];
          const bool w_greater = w[static_cast<std::size_t>(i)] >
                                 w[static_cast<std::size_t>(j)];
          if (ths[static_cast<std::size_t>(i)] ==
              ths[static_cast<std::size_t>(j)]) {
            continue;
          }
          if (phase == Phase::kPrimary) {
            CHECK(th_less == w_greater);
          } else {
            CHECK(th_less != w_greater);
          }
        }
      }
    }
  }

  // Permutation equivariance: reversing the input reverses the output.
  const std::vector<double> ths{0.5, 1.25, 2.0, 7.5};
  std::vector<double> rev(ths.rbegin(), ths.rend());
  const auto w = batch_weights(ths, Phase::kAdvanced);
  const auto wr = batch_weights(rev, Phase::kAdvanced);
  for (std::size_t i = 0; i < ths.size(); ++i) {
    CHECK(w[i] == doctest::Approx(wr[ths.size() - 1 - i]).epsilon(1e-12));
  }
}

TEST_CASE("batch_weights rejects non-positive scores") {
  CHECK_THROWS_AS(batch_weights({1.0, 0.0}, Phase::kPrimary),
                  std::invalid_argument);
  CHECK_THROWS_AS(batch_weights({}, Phase::kPrimary), std::invalid_argument);
}

TEST_CASE("measure names round-trip") {
  for (const Measure m :
       {Measure::kPairwiseEuclidean, Measure::kHausdorff, Measure::kHsic}) {
    CHECK(measure_from_name(measure_name(m)) == m);
  }
  CHECK_THROWS_AS(measure_from_name("cosine"), ConfigError);
}
