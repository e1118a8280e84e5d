#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gossip {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Expected version age, in versions behind the source. Infinity marks a user
// population with no path to a server-fed node.
using AgeValue = double;

// Per-slot probabilities of the update/gossip process plus the age tolerance
// multiplier. Validated once at construction; everything downstream assumes a
// valid instance.
struct GameParams {
  double pe;    // source update probability, 0 < pe <= 1
  double p;     // gossip success probability per directed edge, 0 < p <= 1
  double beta;  // server sampling probability, 0 < beta <= 1
  double L;     // age tolerance multiplier, L > 1

  GameParams(double pe_, double p_, double beta_, double L_);
};

// Subscription cost per slot, c(beta) = a * beta^q.
struct CostModel {
  double a = 80.0;
  double q = 2.0;

  CostModel() = default;
  CostModel(double a_, double q_);
  double operator()(double beta) const { return a * std::pow(beta, q); }
};

// Infinite line with a subscriber every m-th user.
struct LinePeriodic {
  int m;
};

// Complete graph on n users; the last m_sub of them subscribe.
struct FullyConnected {
  int n;
  int m_sub;
};

// Arbitrary undirected gossip graph with an explicit subscriber set.
// Simulation-only: the analytical solvers reject it.
struct GeneralGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, no self-loops
  std::vector<int> subscribers;
};

using Topology = std::variant<LinePeriodic, FullyConnected, GeneralGraph>;

void validate(const LinePeriodic& topo);
void validate(const FullyConnected& topo);
void validate(const GeneralGraph& topo);
void validate(const Topology& topo);

AgeValue server_age(const GameParams& params);      // pe / beta
AgeValue subscriber_age(const GameParams& params);  // pe * (1/beta + 1)
AgeValue ac_threshold(const GameParams& params);    // L * subscriber_age

}  // namespace gossip
