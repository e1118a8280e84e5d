#pragma once

#include <limits>
#include <vector>

#include "gossip/line.hpp"
#include "gossip/params.hpp"

namespace gossip {

// Minimum sampling rate that sustains a given subscription structure.
// Feasible: a rate in (0, 1]. LimitZero: any positive rate works and the
// infimum is 0 (the structure survives as beta -> 0). Infeasible: no rate in
// (0, 1] works.
struct BetaStar {
  enum class Kind { Feasible, LimitZero, Infeasible };

  Kind kind = Kind::Infeasible;
  double value = std::numeric_limits<double>::quiet_NaN();

  static BetaStar feasible(double v) { return {Kind::Feasible, v}; }
  static BetaStar limit_zero() { return {Kind::LimitZero, 0.0}; }
  static BetaStar infeasible() { return {}; }

  bool usable() const { return kind != Kind::Infeasible; }
  // The rate the cost model is charged for; 0 in the limit case.
  double rate_or_zero() const { return kind == Kind::Feasible ? value : 0.0; }
};

enum class EquilibriumMode { ServerPreferred, WorstCase };

struct EquilibriumCandidate {
  int m = 0;
  BetaStar beta;
  double f_s = 0.0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  double utility = std::numeric_limits<double>::quiet_NaN();
};

struct EquilibriumResult {
  EquilibriumMode mode = EquilibriumMode::ServerPreferred;
  bool no_subscription = false;  // no structure is sustainable at any rate
  int chosen_m = 0;
  BetaStar beta_star;
  double f_s = 0.0;
  double cost = 0.0;
  double utility = 0.0;
  std::vector<EquilibriumCandidate> audited;
};

enum class UserVerdict { StableNonSubscriber, StableSubscriber, Unstable };

struct UserStability {
  int user = 0;
  UserVerdict verdict = UserVerdict::Unstable;
  // Age the verdict compares against the threshold: the user's own age for
  // non-subscribers, the age after a hypothetical unsubscribe for
  // subscribers.
  AgeValue age_used = 0.0;
  bool conclusive = true;  // empirical checks may land within the margin
};

struct StabilityReport {
  AgeValue threshold = 0.0;
  std::vector<UserStability> users;
  bool all_stable = false;
};

// Smallest stable period on the line at the given sampling rate.
int line_m_star(const GameParams& params, int m_cap = kDefaultLineCap);

// Largest period whose interior users all still tolerate their age.
int line_m_star_star(const GameParams& params, int m_cap = kDefaultLineCap);

// Minimum rate sustaining period m against subscriber deviation.
BetaStar line_beta_star(int m, double p, double L);

// Server-optimal (rate, period) pair. Server-preferred mode assumes users
// settle on the smallest stable period; worst-case mode on the largest.
EquilibriumResult line_stackelberg(double p, double L, double pe,
                                   const CostModel& cost,
                                   EquilibriumMode mode =
                                       EquilibriumMode::ServerPreferred,
                                   int m_cap = kDefaultLineCap);

// Unique equilibrium subscriber count in the fully connected network.
int fc_m_star(int n, const GameParams& params);

// Minimum rate sustaining exactly m subscribers out of n.
BetaStar fc_beta_star(int m, int n, double p, double L);

EquilibriumResult fc_stackelberg(int n, double p, double L, double pe,
                                 const CostModel& cost,
                                 EquilibriumMode mode =
                                     EquilibriumMode::ServerPreferred);

// Per-user verdicts for a proposed subscription structure. Analytical;
// general graphs are rejected (use the simulator's empirical check).
StabilityReport ac_stability_report(const Topology& profile,
                                    const GameParams& params);

}  // namespace gossip
