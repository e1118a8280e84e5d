#include "gossip/params.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace gossip {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool is_probability(double v) { return v > 0.0 && v <= 1.0; }

}  // namespace

GameParams::GameParams(double pe_, double p_, double beta_, double L_)
    : pe(pe_), p(p_), beta(beta_), L(L_) {
  require(is_probability(pe), "pe must lie in (0, 1]");
  require(is_probability(p), "p must lie in (0, 1]");
  require(is_probability(beta), "beta must lie in (0, 1]");
  require(L > 1.0, "L must exceed 1");
}

CostModel::CostModel(double a_, double q_) : a(a_), q(q_) {
  require(a >= 0.0, "cost coefficient a must be nonnegative");
  require(q > 0.0, "cost exponent q must be positive");
}

void validate(const LinePeriodic& topo) {
  require(topo.m >= 1, "line period m must be at least 1");
}

void validate(const FullyConnected& topo) {
  require(topo.n >= 1, "user count n must be at least 1");
  require(topo.m_sub >= 0 && topo.m_sub <= topo.n,
          "subscriber count must lie in [0, n]");
}

void validate(const GeneralGraph& topo) {
  require(topo.n >= 1, "graph must have at least one node");
  for (const auto& [u, v] : topo.edges) {
    require(u >= 0 && u < topo.n && v >= 0 && v < topo.n,
            "edge endpoint out of range");
    require(u != v, "self-loops are not allowed");
  }
  std::set<int> seen;
  for (int s : topo.subscribers) {
    require(s >= 0 && s < topo.n, "subscriber index out of range");
    require(seen.insert(s).second, "duplicate subscriber index");
  }
}

void validate(const Topology& topo) {
  std::visit([](const auto& t) { validate(t); }, topo);
}

AgeValue server_age(const GameParams& params) { return params.pe / params.beta; }

AgeValue subscriber_age(const GameParams& params) {
  return params.pe * (1.0 / params.beta + 1.0);
}

AgeValue ac_threshold(const GameParams& params) {
  return params.L * subscriber_age(params);
}

}  // namespace gossip
