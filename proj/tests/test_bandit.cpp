#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pbppo/bandit/bandit.hpp"
#include "pbppo/error.hpp"
#include "pbppo/rng.hpp"

using namespace pbppo;
using namespace pbppo::bandit;

namespace {

BanditState with_visits(std::vector<std::uint64_t> visits) {
  BanditState s(generate_bounds(0.1, 0.3, static_cast<int>(visits.size())), 0.9);
  s.arm_visits = visits;
  s.total_visits = 0;
  for (auto v : visits) s.total_visits += v;
  return s;
}

}  // namespace

TEST_CASE("generate_bounds examples") {
  const auto a = generate_bounds(0.1, 0.3, 3);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == 0.1);
  CHECK(a[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(a[2] == 0.3);
  CHECK(generate_bounds(0.05, 0.5, 1) == std::vector<double>{0.05});
  const auto c = generate_bounds(0.0, 1.0, 11);
  for (int k = 0; k <= 10; ++k) CHECK(std::fabs(c[k] - k / 10.0) < 1e-12);
  CHECK_THROWS_AS(generate_bounds(0.3, 0.3, 3), ConfigError);
  CHECK_THROWS_AS(generate_bounds(0.4, 0.2, 3), ConfigError);
  CHECK_THROWS_AS(generate_bounds(0.1, 0.2, 0), ConfigError);
}

TEST_CASE("bandit state validates its bounds") {
  CHECK_THROWS_AS(BanditState({0.0, 0.1}, 0.9), ConfigError);
  CHECK_NOTHROW(BanditState({0.0, 0.1}, 0.9, true));
  CHECK_THROWS_AS(BanditState({0.2, 0.1}, 0.9), ConfigError);
  CHECK_THROWS_AS(BanditState({0.1, 1.1}, 0.9), ConfigError);
  CHECK_THROWS_AS(BanditState({0.1}, 1.5), ConfigError);
  const BanditState s(generate_bounds(0.05, 0.5, 10), 0.9);
  for (double e : s.expectations) CHECK(e == 0.0);
}

TEST_CASE("visitation uncertainty examples") {
  CHECK(uncertainty_visitation(with_visits({0, 0}), 0) == 0.0);
  const auto s = with_visits({2, 8});
  CHECK(uncertainty_visitation(s, 0) == doctest::Approx(2.2360680).epsilon(1e-7));
  const auto u = with_visits({0, 10});
  CHECK(uncertainty_visitation(u, 0) == doctest::Approx(31622.7766).epsilon(1e-8));
}

TEST_CASE("hoeffding uncertainty examples") {
  BanditState s({0.1, 0.2}, 0.9);
  record_feedback(s, 0, 3.0);
  record_feedback(s, 0, 3.0);
  CHECK(uncertainty_hoeffding(s, 0, 0.5) == 0.0);

  BanditState t({0.1, 0.2}, 0.9);
  record_feedback(t, 0, 10.0);
  record_feedback(t, 0, 0.0);
  // Reference 10 sqrt(0.5 ln 4) from an independent evaluation.
  CHECK(std::fabs(uncertainty_hoeffding(t, 0, 0.5) - 8.325546111576976) < 1e-9);
  record_feedback(t, 0, 20.0);
  CHECK(uncertainty_hoeffding(t, 0, 0.5) ==
        doctest::Approx(2.0 * 8.325546111576976).epsilon(1e-14));
  // Unvisited arm falls back to the visitation bonus.
  CHECK(uncertainty_hoeffding(t, 1, 0.5) == uncertainty_visitation(t, 1));
  CHECK_THROWS_AS(uncertainty_hoeffding(t, 0, 1.5), ConfigError);

  SelectOptions opt;
  opt.mode = UncertaintyMode::kHoeffding;
  opt.sigma = 0.5;
  const auto rep = select_arm(t, opt);
  CHECK_FALSE(rep.fallback[0]);
  CHECK(rep.fallback[1]);
}

TEST_CASE("select_arm examples") {
  SelectOptions opt;
  const BanditState fresh(generate_bounds(0.05, 0.5, 10), 0.9);
  CHECK(select_arm(fresh, opt).selected == 0);

  auto s = with_visits({5, 1, 5});
  opt.lambda = 1.0;
  const auto rep = select_arm(s, opt);
  CHECK(rep.selected == 1);
  CHECK(rep.uncertainty[1] > rep.uncertainty[0]);

  BanditState two({0.1, 0.2}, 0.9);
  two.expectations = {10.0, 0.0};
  two.arm_visits = {3, 3};
  two.total_visits = 6;
  opt.lambda = 0.0;
  for (auto norm : {Normalization::kWithAdvantage, Normalization::kWithoutAdvantage}) {
    opt.normalization = norm;
    CHECK(select_arm(two, opt).selected == 0);
  }
}

TEST_CASE("select_arm: ties go to the lowest index") {
  BanditState s(generate_bounds(0.1, 0.5, 5), 0.9);
  s.expectations = {1.0, 3.0, 3.0, 2.0, 3.0};
  SelectOptions opt;
  opt.lambda = 0.0;
  CHECK(select_arm(s, opt).selected == 1);
}

TEST_CASE("record_feedback examples") {
  BanditState s({0.1, 0.2}, 0.9);
  CHECK(record_feedback(s, 0, 100.0));
  CHECK(s.expectations[0] == 100.0);
  CHECK(s.total_return == doctest::Approx(90.0).epsilon(1e-15));
  CHECK(s.arm_visits[0] == 1);
  CHECK(s.total_visits == 1);
  record_feedback(s, 0, 50.0);
  CHECK(s.expectations[0] == doctest::Approx(140.0).epsilon(1e-15));

  BanditState z({0.1, 0.2}, 0.0);
  for (double r : {4.0, -2.0, 7.5}) {
    record_feedback(z, 1, r);
    CHECK(z.expectations[1] == r);
  }
}

TEST_CASE("record_feedback rejects non-finite returns") {
  BanditState s({0.1, 0.2}, 0.9);
  record_feedback(s, 0, 1.0);
  const BanditState before = s;
  CHECK_FALSE(record_feedback(s, 1, std::nan("")));
  CHECK_FALSE(record_feedback(s, 1, INFINITY));
  CHECK(s.expectations == before.expectations);
  CHECK(s.arm_visits == before.arm_visits);
  CHECK(s.total_visits == before.total_visits);
  CHECK(s.warnings.size() == 2);
}

TEST_CASE("forward-discount rule weights later visits less") {
  BanditState s({0.1}, 0.9, false, ExpectationRule::kForwardDiscount);
  record_feedback(s, 0, 100.0);
  record_feedback(s, 0, 50.0);
  CHECK(s.expectations[0] == doctest::Approx(100.0 + 0.9 * 50.0).epsilon(1e-15));
}

TEST_CASE("bandit invariants under random interleavings") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    BanditState s(generate_bounds(0.05, 0.5, n), rng.uniform());
    for (int step = 0; step < 100; ++step) {
      record_feedback(s, rng.below(n), 10.0 * rng.normal());
      std::uint64_t sum = 0;
      for (auto v : s.arm_visits) sum += v;
      REQUIRE(sum == s.total_visits);
      for (int i = 0; i < n; ++i) {
        if (s.visited(i)) REQUIRE(s.return_max[i] >= s.return_min[i]);
        else REQUIRE(s.expectations[i] == 0.0);
      }
    }
    SelectOptions opt;
    opt.lambda = 5.0 * rng.uniform();
    for (auto norm : {Normalization::kWithAdvantage, Normalization::kWithoutAdvantage}) {
      opt.normalization = norm;
      const auto base = select_arm(s, opt);
      auto shifted = s;
      // Dyadic shift keeps the comparison exact.
      for (double& e : shifted.expectations) e += 64.0;
      REQUIRE(select_arm(shifted, opt).selected == base.selected);
      if (norm == Normalization::kWithAdvantage) {
        double total = 0.0;
        for (double u : base.exploitation) total += u;
        REQUIRE(std::fabs(total) < 1e-9);
      }
      REQUIRE(base.selected ==
              static_cast<std::size_t>(std::max_element(base.combined.begin(),
                                                        base.combined.end()) -
                                       base.combined.begin()));
    }
    SelectOptions greedy;
    greedy.lambda = 0.0;
    const auto g = select_arm(s, greedy);
    REQUIRE(g.selected == static_cast<std::size_t>(
                              std::max_element(s.expectations.begin(), s.expectations.end()) -
                              s.expectations.begin()));
  }
}

TEST_CASE("synthetic bandit concentrates on the best arm") {
  std::vector<double> fractions;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    BanditState s({0.1, 0.2, 0.3}, 0.9);
    const double means[] = {1.0, 0.5, 0.0};
    SelectOptions opt;
    opt.lambda = 1.0;
    int best = 0;
    for (int round = 0; round < 500; ++round) {
      const auto arm = select_arm(s, opt).selected;
      if (round >= 250 && arm == 0) ++best;
      record_feedback(s, arm, means[arm] + 0.1 * rng.normal());
    }
    fractions.push_back(best / 250.0);
  }
  std::sort(fractions.begin(), fractions.end());
  const double median = 0.5 * (fractions[4] + fractions[5]);
  CHECK(median > 0.6);
}
