#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "gossip/line.hpp"
#include "gossip/sim.hpp"

using namespace gossip;

namespace {

const GameParams kFig(0.3, 0.2, 0.6, 10.0);

SlotDraws quiet_draws(const SimTopology& topo) {
  SlotDraws draws;
  draws.edge.assign(topo.directed_edge_count(), 0);
  return draws;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("line segment and ring construction") {
  auto path = build_line_segment(3);
  CHECK(path.node_count() == 4);
  CHECK(path.subscriber == std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(path.neighbors[0] == std::vector<int>{1});
  CHECK(path.neighbors[1] == std::vector<int>{0, 2});
  CHECK(path.directed_edge_count() == 6);

  auto ring = build_line_segment(3, 2);
  CHECK(ring.node_count() == 6);
  CHECK(ring.subscriber == std::vector<std::uint8_t>{1, 0, 0, 1, 0, 0});
  CHECK(ring.neighbors[0] == std::vector<int>{1, 5});
  CHECK(ring.neighbors[5] == std::vector<int>{0, 4});
  CHECK(ring.directed_edge_count() == 12);

  auto tiny_ring = build_line_segment(1, 2);
  CHECK(tiny_ring.node_count() == 2);
  CHECK(tiny_ring.neighbors[0] == std::vector<int>{1});

  CHECK_THROWS_AS(build_line_segment(0), std::invalid_argument);
  CHECK_THROWS_AS(build_line_segment(3, 0), std::domain_error);
}

TEST_CASE("fully connected construction") {
  auto topo = build_fully_connected(4, 2);
  CHECK(topo.node_count() == 4);
  CHECK(topo.subscriber == std::vector<std::uint8_t>{0, 0, 1, 1});
  CHECK(topo.neighbors[2] == std::vector<int>{0, 1, 3});
  CHECK(topo.directed_edge_count() == 12);
}

TEST_CASE("one slot: server refresh reaches subscribers a slot later") {
  auto topo = build_line_segment(2);
  WorldState state(3);
  state.server_age = 3;
  state.ages = {5, 5, 5};

  auto draws = quiet_draws(topo);
  draws.event = true;
  draws.server_sample = true;
  advance(state, topo, draws);

  // Subscribers see the pre-refresh server copy; the refresh lands at the
  // server itself.
  CHECK(state.server_age == 1);
  CHECK(state.ages == std::vector<std::int64_t>{4, 6, 4});
}

TEST_CASE("one slot: gossip arrivals take the freshest copy") {
  auto topo = build_line_segment(2);  // edge order: (0<-1) (1<-0) (1<-2) (2<-1)
  WorldState state(3);
  state.server_age = 7;
  state.ages = {2, 9, 9};

  auto draws = quiet_draws(topo);
  draws.edge[1] = 1;  // node 1 hears node 0
  advance(state, topo, draws);

  CHECK(state.ages == std::vector<std::int64_t>{2, 2, 7});
  CHECK(state.server_age == 7);
}

TEST_CASE("slot draws follow the documented order") {
  auto topo = build_line_segment(2);
  SplitMix64 rng(stream_seed(99, 0));
  SlotDraws draws;
  draw_slot(draws, topo, kFig, rng);

  SplitMix64 replay(stream_seed(99, 0));
  CHECK(draws.event == (replay.uniform01() < kFig.pe));
  CHECK(draws.server_sample == (replay.uniform01() < kFig.beta));
  REQUIRE(draws.edge.size() == 4);
  for (std::uint8_t bit : draws.edge)
    CHECK(bit == (replay.uniform01() < kFig.p ? 1 : 0));
}

TEST_CASE("no source updates means ages stay pinned at zero") {
  auto topo = build_line_segment(4);
  WorldState state(5);
  SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    SlotDraws draws;
    draw_slot(draws, topo, kFig, rng);
    draws.event = false;  // suppress every source update
    advance(state, topo, draws);
    CHECK(state.server_age == 0);
    for (auto age : state.ages) CHECK(age == 0);
  }
}

TEST_CASE("per-slot growth and server dominance invariants") {
  auto topo = build_line_segment(3, 2);
  WorldState state(topo.node_count());
  SplitMix64 rng(11);
  std::vector<std::int64_t> before;
  for (int t = 0; t < 2000; ++t) {
    before = state.ages;
    step(state, topo, kFig, rng);
    for (std::size_t i = 0; i < state.ages.size(); ++i) {
      CHECK(state.ages[i] >= 0);
      CHECK(state.ages[i] <= before[i] + 1);
      CHECK(state.ages[i] >= state.server_age);
    }
  }
}

TEST_CASE("subscriber ages concentrate on the analytical value") {
  SimConfig config;
  config.slots = 150'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(kFig);
  config.seed = 2024;
  config.threads = 2;
  auto topo = build_line_segment(4, 2);
  auto result = run(topo, kFig, config);
  const double xs = subscriber_age(kFig);
  for (int node : {0, 4}) {
    const double mean = result.mean_age[static_cast<std::size_t>(node)];
    const double se = result.std_error[static_cast<std::size_t>(node)];
    CHECK(std::abs(mean - xs) <= 3.0 * se);
  }
}

TEST_CASE("deterministic gossip reproduces the distance profile") {
  GameParams prm(0.3, 1.0, 0.6, 10.0);
  SimConfig config;
  config.slots = 150'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(prm);
  config.seed = 5;
  config.threads = 2;
  auto topo = build_line_segment(5);
  auto result = run(topo, prm, config);
  auto expected = line_node_ages(5, prm);
  for (int i = 0; i <= 5; ++i) {
    const double se = result.std_error[static_cast<std::size_t>(i)];
    CHECK(std::abs(result.mean_age[static_cast<std::size_t>(i)] -
                   expected[static_cast<std::size_t>(i)]) <= 3.0 * se);
  }
}

TEST_CASE("a ring of several cells matches the single-cell analytics") {
  SimConfig config;
  config.slots = 200'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(kFig);
  config.seed = 31;
  config.threads = 2;
  auto result = run(build_line_segment(4, 3), kFig, config);
  auto expected = line_node_ages(4, kFig);
  for (int node : {1, 2, 5, 7, 10}) {
    const double se = result.std_error[static_cast<std::size_t>(node)];
    CHECK(std::abs(result.mean_age[static_cast<std::size_t>(node)] -
                   expected[static_cast<std::size_t>(node % 4)]) <= 3.0 * se);
  }
}

TEST_CASE("ensemble mode agrees with the analytics too") {
  SimConfig config;
  config.mode = SimMode::EnsembleAtT;
  config.slots = 2'000;
  config.iterations = 3'000;
  config.seed = 12;
  config.threads = 4;
  auto result = run(build_line_segment(2), kFig, config);
  CHECK(result.samples == 3'000);
  auto expected = line_node_ages(2, kFig);
  for (int i = 0; i <= 2; ++i) {
    const double se = result.std_error[static_cast<std::size_t>(i)];
    CHECK(se > 0.0);
    CHECK(std::abs(result.mean_age[static_cast<std::size_t>(i)] -
                   expected[static_cast<std::size_t>(i)]) <= 3.0 * se);
  }
}

TEST_CASE("identical seeds reproduce results bit for bit at any thread count") {
  SimConfig config;
  config.slots = 40'000;
  config.iterations = 8;
  config.burn_in = 100;
  config.seed = 77;
  config.threads = 1;
  auto topo = build_line_segment(5, 2);
  auto serial = run(topo, kFig, config);
  config.threads = 4;
  auto parallel = run(topo, kFig, config);
  CHECK(serial.mean_age == parallel.mean_age);
  CHECK(serial.std_error == parallel.std_error);

  auto again = run(topo, kFig, config);
  CHECK(again.mean_age == parallel.mean_age);

  config.seed = 78;
  auto other = run(topo, kFig, config);
  CHECK(other.mean_age != parallel.mean_age);
}

TEST_CASE("burn-in defaults to ten times the slowest process") {
  CHECK(default_burn_in(kFig) == 50);
  CHECK(default_burn_in(GameParams(0.001, 0.2, 0.6, 10.0)) == 10'000);
  CHECK(default_burn_in(GameParams(0.3, 0.2, 0.004, 10.0)) == 2'500);
}

TEST_CASE("configuration validation") {
  auto topo = build_line_segment(2);
  SimConfig config;
  config.slots = 0;
  CHECK_THROWS_AS(run(topo, kFig, config), std::invalid_argument);
  config = SimConfig{};
  config.iterations = 0;
  CHECK_THROWS_AS(run(topo, kFig, config), std::invalid_argument);
  config = SimConfig{};
  config.threads = 0;
  CHECK_THROWS_AS(run(topo, kFig, config), std::invalid_argument);
  config = SimConfig{};
  config.burn_in = config.slots;
  CHECK_THROWS_AS(run(topo, kFig, config), std::invalid_argument);
}

TEST_CASE("empirical stability reproduces the analytical verdicts") {
  SimConfig config;
  config.slots = 120'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(kFig);
  config.seed = 91;
  config.threads = 4;

  // Stable arrangement: every interior user tolerates its age and a
  // subscriber that quit (leaving a doubled cell on the two-cell ring) would
  // not.
  auto stable = empirical_stability(build_line_segment(7, 2), kFig, config);
  CHECK(stable.all_stable);
  for (const auto& user : stable.users) {
    CHECK(user.verdict != UserVerdict::Unstable);
    CHECK(user.conclusive);
  }

  // Doubling the period pushes the midpoint users over the threshold.
  auto crowded = empirical_stability(build_line_segment(14, 2), kFig, config);
  CHECK_FALSE(crowded.all_stable);
  CHECK(crowded.users[7].verdict == UserVerdict::Unstable);
  CHECK(crowded.users[21].verdict == UserVerdict::Unstable);
}

TEST_CASE("an all-subscriber clique is judged by one-quit reruns") {
  GameParams prm(0.3, 0.2, 1.0, 1.1);
  SimConfig config;
  config.slots = 60'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(prm);
  config.seed = 17;
  config.threads = 4;
  auto report = empirical_stability(build_fully_connected(4, 4), prm, config);
  CHECK(report.all_stable);
  for (const auto& user : report.users)
    CHECK(user.verdict == UserVerdict::StableSubscriber);
}

TEST_CASE("graph files load, validate, and simulate") {
  const auto path = temp_file("gossip_test_graph.txt");
  {
    std::ofstream out(path);
    out << "# a triangle with a pendant\n";
    out << "nodes 4\n";
    out << "0 1\n1 2\n2 0\n2 3\n";
    out << "subscribers 0\n";
  }
  auto graph = load_graph_file(path.string());
  CHECK(graph.n == 4);
  CHECK(graph.edges.size() == 4);
  CHECK(graph.subscribers == std::vector<int>{0});

  auto topo = build_graph_topology(graph);
  CHECK(topo.neighbors[2] == std::vector<int>{0, 1, 3});

  SimConfig config;
  config.slots = 100'000;
  config.iterations = 2;
  config.burn_in = default_burn_in(kFig);
  config.seed = 3;
  config.threads = 2;
  auto result = run(topo, kFig, config);
  const double se = result.std_error[0];
  CHECK(std::abs(result.mean_age[0] - subscriber_age(kFig)) <= 3.0 * se);
  // The pendant node sits two hops out and must be strictly older.
  CHECK(result.mean_age[3] > result.mean_age[0]);
  std::filesystem::remove(path);
}

TEST_CASE("malformed graph files are rejected") {
  const auto path = temp_file("gossip_test_graph_bad.txt");
  {
    std::ofstream out(path);
    out << "0 oops\n";
  }
  CHECK_THROWS_AS(load_graph_file(path.string()), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "0 1\nsubscribers 9\n";
  }
  CHECK_THROWS_AS(load_graph_file(path.string()), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "0 0\n";
  }
  CHECK_THROWS_AS(load_graph_file(path.string()), std::invalid_argument);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_graph_file((path.parent_path() / "absent.txt").string()),
                  std::runtime_error);
}

TEST_CASE("realize covers all topology variants") {
  CHECK(realize(LinePeriodic{3}).node_count() == 4);
  CHECK(realize(LinePeriodic{3}, 2).node_count() == 6);
  CHECK(realize(FullyConnected{6, 2}).node_count() == 6);
  GeneralGraph g{2, {{0, 1}}, {0}};
  CHECK(realize(g).node_count() == 2);
}
