#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gossip/equilibrium.hpp"
#include "gossip/fc.hpp"
#include "gossip/line.hpp"

using namespace gossip;

namespace {

const GameParams kLineFig(0.3, 0.2, 0.6, 10.0);
const GameParams kFcFig(0.3, 0.2, 0.6, 1.6);

// Brute-force utility sweep straight from the gain tables, for cross-checking
// the search's argmax and early stop.
EquilibriumCandidate brute_line_best(double p, double L, const CostModel& cost,
                                     EquilibriumMode mode, int max_m) {
  EquilibriumCandidate best;
  bool have = false;
  for (int m = 1; m <= max_m; ++m) {
    const double gain = mode == EquilibriumMode::ServerPreferred
                            ? gain_centered(p, m)
                            : gain_interior(p, m + 1);
    const double denom = gain / (L - 1.0) - 1.0;
    if (!(denom > 0.0)) continue;
    const double beta = 1.0 / denom;
    if (beta > 1.0) continue;
    const double utility = 1.0 / m - cost(beta);
    if (!have || utility > best.utility) {
      have = true;
      best.m = m;
      best.beta = BetaStar::feasible(beta);
      best.utility = utility;
    }
  }
  REQUIRE(have);
  return best;
}

}  // namespace

TEST_CASE("smallest and largest stable periods at the reference point") {
  CHECK(line_m_star(kLineFig) == 7);
  CHECK(line_m_star_star(kLineFig) == 12);
}

TEST_CASE("the two stable-period bounds obey the halving identity") {
  for (double p : {0.1, 0.2, 0.5, 1.0}) {
    for (double beta : {0.3, 0.6, 1.0}) {
      for (double L : {1.6, 3.0, 10.0}) {
        GameParams prm(0.3, p, beta, L);
        CHECK(line_m_star(prm) == line_m_star_star(prm) / 2 + 1);
      }
    }
  }
}

TEST_CASE("every period between the bounds is a stable configuration") {
  for (double p : {0.2, 0.5}) {
    for (double beta : {0.3, 0.6}) {
      for (double L : {1.6, 10.0}) {
        GameParams prm(0.3, p, beta, L);
        const int lo = line_m_star(prm);
        const int hi = line_m_star_star(prm);
        REQUIRE(lo <= hi);
        for (int m = lo; m <= hi; ++m)
          CHECK(ac_stability_report(LinePeriodic{m}, prm).all_stable);
        if (lo > 1)
          CHECK_FALSE(
              ac_stability_report(LinePeriodic{lo - 1}, prm).all_stable);
        CHECK_FALSE(
            ac_stability_report(LinePeriodic{hi + 1}, prm).all_stable);
      }
    }
  }
}

TEST_CASE("stable periods shrink as the server samples more") {
  for (double L : {1.6, 10.0}) {
    int prev_star = 1 << 20, prev_star_star = 1 << 20;
    for (double beta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      GameParams prm(0.3, 0.2, beta, L);
      const int star = line_m_star(prm);
      const int star_star = line_m_star_star(prm);
      CHECK(star <= prev_star);
      CHECK(star_star <= prev_star_star);
      prev_star = star;
      prev_star_star = star_star;
    }
  }
}

TEST_CASE("minimum sustaining rate round-trips through the period search") {
  for (double p : {0.1, 0.2, 0.5, 1.0}) {
    for (double L : {1.6, 3.0, 10.0}) {
      for (int m = 1; m <= 25; ++m) {
        const BetaStar bs = line_beta_star(m, p, L);
        if (bs.kind != BetaStar::Kind::Feasible) continue;
        const double nudged = std::min(1.0, bs.value + 1e-12);
        GameParams prm(0.3, p, nudged, L);
        CHECK(line_m_star(prm) == m);
      }
    }
  }
}

TEST_CASE("rate inversion hits its algebraic boundaries") {
  const double g = gain_centered(0.2, 5);
  // Gain exactly twice the tolerance slack: the rate saturates at 1.
  const BetaStar at_one = line_beta_star(5, 0.2, 1.0 + g / 2.0);
  REQUIRE(at_one.kind == BetaStar::Kind::Feasible);
  CHECK(at_one.value == 1.0);
  // Gain at or below the slack itself: no rate in (0, 1] works.
  CHECK(line_beta_star(5, 0.2, 1.0 + g).kind == BetaStar::Kind::Infeasible);
  CHECK(line_beta_star(5, 0.2, 1.0 + 2.0 * g).kind ==
        BetaStar::Kind::Infeasible);
  CHECK_THROWS_AS(line_beta_star(0, 0.2, 10.0), std::domain_error);
  CHECK_THROWS_AS(line_beta_star(3, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("reference point rates bracket the observed period") {
  const BetaStar b7 = line_beta_star(7, 0.2, 10.0);
  REQUIRE(b7.kind == BetaStar::Kind::Feasible);
  CHECK(b7.value <= 0.6);
  const BetaStar b6 = line_beta_star(6, 0.2, 10.0);
  REQUIRE(b6.kind == BetaStar::Kind::Feasible);
  CHECK(b6.value > 0.6);
}

TEST_CASE("line rate design maximizes utility over sustainable periods") {
  const CostModel cost(80.0, 2.0);
  auto result = line_stackelberg(0.2, 1.6, 0.3, cost);
  CHECK_FALSE(result.no_subscription);
  CHECK(result.chosen_m == 5);
  REQUIRE(result.beta_star.kind == BetaStar::Kind::Feasible);
  CHECK(result.beta_star.value ==
        doctest::Approx(0.03174434708290125).epsilon(1e-9));
  CHECK(result.f_s == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(result.utility ==
        doctest::Approx(0.11938371426242393).epsilon(1e-9));

  auto brute = brute_line_best(0.2, 1.6, cost, result.mode, 100);
  CHECK(result.chosen_m == brute.m);
  CHECK(result.utility == doctest::Approx(brute.utility).epsilon(1e-12));

  // The search stops once 1/m falls under the incumbent utility (at m = 9
  // here), and the chosen utility dominates everything audited.
  CHECK(result.audited.size() == 8);
  for (const auto& cand : result.audited) {
    if (cand.beta.usable()) CHECK(result.utility >= cand.utility - 1e-12);
    if (cand.m == 2) {
      CHECK(cand.beta.value ==
            doctest::Approx(0.09912523228935316).epsilon(1e-9));
      CHECK(cand.utility ==
            doctest::Approx(-0.2860649341134578).epsilon(1e-9));
    }
  }
}

TEST_CASE("free sampling picks the smallest sustainable period") {
  const CostModel free_cost(0.0, 2.0);
  auto result = line_stackelberg(0.2, 1.6, 0.3, free_cost);
  int smallest = 0;
  for (int m = 1; m <= 50 && smallest == 0; ++m)
    if (line_beta_star(m, 0.2, 1.6).kind == BetaStar::Kind::Feasible)
      smallest = m;
  CHECK(result.chosen_m == smallest);
  CHECK(result.utility == doctest::Approx(1.0 / smallest).epsilon(1e-12));
}

TEST_CASE("costlier sampling pushes the design toward sparser periods") {
  int prev_m = 0;
  double prev_utility = 1e100;
  for (double a : {8.0, 80.0, 800.0, 8000.0}) {
    const CostModel cost(a, 2.0);
    auto result = line_stackelberg(0.2, 1.6, 0.3, cost);
    CHECK_FALSE(result.no_subscription);
    CHECK(result.chosen_m >= prev_m);
    CHECK(result.utility <= prev_utility + 1e-12);
    auto brute = brute_line_best(0.2, 1.6, cost, result.mode, 400);
    CHECK(result.chosen_m == brute.m);
    prev_m = result.chosen_m;
    prev_utility = result.utility;
  }
}

TEST_CASE("worst-case user play needs a higher rate and earns less") {
  const CostModel cost(80.0, 2.0);
  auto preferred = line_stackelberg(0.2, 1.6, 0.3, cost,
                                    EquilibriumMode::ServerPreferred);
  auto worst =
      line_stackelberg(0.2, 1.6, 0.3, cost, EquilibriumMode::WorstCase);
  CHECK(worst.mode == EquilibriumMode::WorstCase);
  CHECK(worst.utility <= preferred.utility + 1e-12);

  auto brute = brute_line_best(0.2, 1.6, cost, EquilibriumMode::WorstCase, 400);
  CHECK(worst.chosen_m == brute.m);
  CHECK(worst.utility == doctest::Approx(brute.utility).epsilon(1e-12));

  // Pinning the pessimistic period to m costs at least as much as merely
  // sustaining it.
  for (int m = 1; m <= 12; ++m) {
    const double g_pref = gain_centered(0.2, m);
    const double g_worst = gain_interior(0.2, m + 1);
    CHECK(g_worst <= g_pref + 1e-12);
  }
}

TEST_CASE("a hopeless tolerance yields the no-subscription outcome") {
  auto result =
      line_stackelberg(0.2, 100.0, 0.3, CostModel(80.0, 2.0),
                       EquilibriumMode::ServerPreferred, 30);
  CHECK(result.no_subscription);
  CHECK(result.chosen_m == 0);
  CHECK(result.f_s == 0.0);
  CHECK(result.utility == 0.0);
  CHECK(result.beta_star.rate_or_zero() == 0.0);
  CHECK(result.audited.size() == 30);
  for (const auto& cand : result.audited)
    CHECK(cand.beta.kind == BetaStar::Kind::Infeasible);
}

TEST_CASE("fully connected equilibrium count at the reference point") {
  CHECK(fc_m_star(10, kFcFig) == 4);
  const double thr = ac_threshold(kFcFig);
  CHECK(fc_nonsub_age(10, 4, kFcFig) < thr);
  CHECK(fc_nonsub_age(10, 3, kFcFig) >= thr);
}

TEST_CASE("the equilibrium count is the unique all-stable profile") {
  for (auto [n, prm] : std::vector<std::pair<int, GameParams>>{
           {10, kFcFig},
           {12, GameParams(0.3, 0.4, 1.0, 1.05)},
           {8, GameParams(0.2, 0.3, 0.5, 2.0)}}) {
    const int star = fc_m_star(n, prm);
    for (int m = 0; m <= n; ++m) {
      const bool stable =
          ac_stability_report(FullyConnected{n, m}, prm).all_stable;
      CHECK(stable == (m == star));
    }
  }
}

TEST_CASE("more sampling can only enlarge the subscriber pool") {
  for (double L : {1.2, 1.6}) {
    int prev = 0;
    for (double beta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      GameParams prm(0.3, 0.2, beta, L);
      const int star = fc_m_star(10, prm);
      CHECK(star >= prev);
      prev = star;
    }
  }
}

TEST_CASE("fully connected sustaining rates") {
  CHECK(fc_beta_star(1, 10, 0.2, 1.6).kind == BetaStar::Kind::LimitZero);
  CHECK(fc_beta_star(1, 10, 0.2, 1.6).rate_or_zero() == 0.0);
  const BetaStar two = fc_beta_star(2, 10, 0.2, 1.6);
  REQUIRE(two.kind == BetaStar::Kind::Feasible);
  CHECK(two.value == doctest::Approx(0.31692992230145883).epsilon(1e-9));
  CHECK_THROWS_AS(fc_beta_star(0, 10, 0.2, 1.6), std::domain_error);
  CHECK_THROWS_AS(fc_beta_star(11, 10, 0.2, 1.6), std::domain_error);
}

TEST_CASE("fully connected rate design lands on the vanishing-rate corner") {
  auto result = fc_stackelberg(10, 0.2, 1.6, 0.3, CostModel(80.0, 2.0));
  CHECK(result.chosen_m == 1);
  CHECK(result.beta_star.kind == BetaStar::Kind::LimitZero);
  CHECK(result.f_s == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(result.cost == 0.0);
  CHECK(result.utility == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(result.audited.size() == 10);
  for (const auto& cand : result.audited) {
    if (cand.m >= 2 && cand.beta.usable())
      CHECK(cand.utility < result.utility);
  }
  // The mode flag is provenance only here: the user response is unique.
  auto worst = fc_stackelberg(10, 0.2, 1.6, 0.3, CostModel(80.0, 2.0),
                              EquilibriumMode::WorstCase);
  CHECK(worst.chosen_m == result.chosen_m);
  CHECK(worst.utility == doctest::Approx(result.utility).epsilon(1e-12));
}

TEST_CASE("stability reports judge each user against the threshold") {
  auto stable = ac_stability_report(LinePeriodic{7}, kLineFig);
  CHECK(stable.threshold == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(stable.all_stable);
  REQUIRE(stable.users.size() == 7);
  CHECK(stable.users[0].verdict == UserVerdict::StableSubscriber);
  for (std::size_t i = 1; i < stable.users.size(); ++i) {
    CHECK(stable.users[i].verdict == UserVerdict::StableNonSubscriber);
    CHECK(stable.users[i].conclusive);
  }

  auto crowded = ac_stability_report(LinePeriodic{14}, kLineFig);
  CHECK_FALSE(crowded.all_stable);
  CHECK(crowded.users[7].verdict == UserVerdict::Unstable);

  // One step below the smallest stable period the subscriber itself defects.
  auto sparse = ac_stability_report(LinePeriodic{6}, kLineFig);
  CHECK_FALSE(sparse.all_stable);
  CHECK(sparse.users[0].verdict == UserVerdict::Unstable);

  CHECK_THROWS_AS(
      ac_stability_report(GeneralGraph{2, {{0, 1}}, {0}}, kLineFig),
      std::invalid_argument);
}

TEST_CASE("period search reports an out-of-reach cap") {
  GameParams prm(0.3, 0.2, 0.01, 10.0);
  CHECK_THROWS_AS(line_m_star(prm, 50), std::runtime_error);
  CHECK_THROWS_AS(line_m_star_star(prm, 50), std::runtime_error);
}
