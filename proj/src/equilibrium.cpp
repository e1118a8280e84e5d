#include "gossip/equilibrium.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gossip/fc.hpp"

namespace gossip {

namespace {

// The AC threshold in geometry units: a user set tolerates its age iff its
// geometry factor stays below (L - 1)(1/beta + 1).
double geometry_threshold(const GameParams& params) {
  return (params.L - 1.0) * (1.0 / params.beta + 1.0);
}

void check_rate_inputs(double p, double L) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("p must lie in (0, 1]");
  if (!(L > 1.0)) throw std::invalid_argument("L must exceed 1");
}

// Inverts gain >= (L - 1)(1/beta + 1) for the smallest sustaining rate.
BetaStar invert_gain(double gain, double L) {
  if (std::isinf(gain)) return BetaStar::limit_zero();
  const double denom = gain / (L - 1.0) - 1.0;
  if (!(denom > 0.0)) return BetaStar::infeasible();
  const double beta = 1.0 / denom;
  if (beta > 1.0) return BetaStar::infeasible();
  return BetaStar::feasible(beta);
}

EquilibriumResult no_subscription_result(EquilibriumMode mode,
                                         std::vector<EquilibriumCandidate> audited) {
  EquilibriumResult result;
  result.mode = mode;
  result.no_subscription = true;
  result.chosen_m = 0;
  result.beta_star = BetaStar::limit_zero();
  result.f_s = 0.0;
  result.cost = 0.0;
  result.utility = 0.0;
  result.audited = std::move(audited);
  return result;
}

}  // namespace

int line_m_star(const GameParams& params, int m_cap) {
  const double need = geometry_threshold(params);
  for (int m = 1; m <= m_cap; ++m)
    if (gain_centered(params.p, m) >= need) return m;
  throw std::runtime_error("no feasible period below cap");
}

int line_m_star_star(const GameParams& params, int m_cap) {
  const double need = geometry_threshold(params);
  for (int m = 1; m <= m_cap; ++m)
    if (gain_interior(params.p, m + 1) >= need) return m;
  throw std::runtime_error("no feasible period below cap");
}

BetaStar line_beta_star(int m, double p, double L) {
  if (m < 1) throw std::domain_error("line period m must be at least 1");
  check_rate_inputs(p, L);
  return invert_gain(gain_centered(p, m), L);
}

EquilibriumResult line_stackelberg(double p, double L, double pe,
                                   const CostModel& cost, EquilibriumMode mode,
                                   int m_cap) {
  check_rate_inputs(p, L);
  if (!(pe > 0.0 && pe <= 1.0))
    throw std::invalid_argument("pe must lie in (0, 1]");

  EquilibriumResult result;
  result.mode = mode;
  bool have_best = false;
  for (int m = 1; m <= m_cap; ++m) {
    // No larger period can beat the incumbent: utility <= 1/m even at zero
    // cost.
    if (have_best && 1.0 / m < result.utility) break;

    // Server-preferred play sustains m as the smallest stable period (the
    // quitting subscriber's constraint binds); worst-case play must push the
    // largest stable period down to m (the interior constraint at m + 1
    // binds, which also covers the subscriber constraint at m).
    const double gain = mode == EquilibriumMode::ServerPreferred
                            ? gain_centered(p, m)
                            : gain_interior(p, m + 1);
    EquilibriumCandidate cand;
    cand.m = m;
    cand.beta = invert_gain(gain, L);
    cand.f_s = 1.0 / m;
    if (cand.beta.usable()) {
      cand.cost = cost(cand.beta.rate_or_zero());
      cand.utility = cand.f_s - cand.cost;
      if (!have_best || cand.utility > result.utility) {
        have_best = true;
        result.chosen_m = m;
        result.beta_star = cand.beta;
        result.f_s = cand.f_s;
        result.cost = cand.cost;
        result.utility = cand.utility;
      }
    }
    result.audited.push_back(cand);
  }
  if (!have_best) return no_subscription_result(mode, std::move(result.audited));
  return result;
}

int fc_m_star(int n, const GameParams& params) {
  if (n < 1) throw std::domain_error("user count n must be at least 1");
  const double need = geometry_threshold(params);
  auto table = fc_geometry_cached(n, params.p);
  for (int m = n; m >= 2; --m)
    if (table->g(m - 1, 1) >= need) return m;
  return 1;
}

BetaStar fc_beta_star(int m, int n, double p, double L) {
  check_rate_inputs(p, L);
  if (m < 1 || m > n)
    throw std::domain_error("subscriber count m must lie in [1, n]");
  if (m == 1) return BetaStar::limit_zero();
  return invert_gain(fc_geometry_cached(n, p)->g(m - 1, 1), L);
}

EquilibriumResult fc_stackelberg(int n, double p, double L, double pe,
                                 const CostModel& cost, EquilibriumMode mode) {
  check_rate_inputs(p, L);
  if (!(pe > 0.0 && pe <= 1.0))
    throw std::invalid_argument("pe must lie in (0, 1]");
  if (n < 1) throw std::domain_error("user count n must be at least 1");

  // The user response is unique here, so the mode changes nothing; it is
  // recorded for provenance only.
  EquilibriumResult result;
  result.mode = mode;
  bool have_best = false;
  for (int m = 1; m <= n; ++m) {
    EquilibriumCandidate cand;
    cand.m = m;
    cand.beta = fc_beta_star(m, n, p, L);
    cand.f_s = static_cast<double>(m) / n;
    if (cand.beta.usable()) {
      cand.cost = cost(cand.beta.rate_or_zero());
      cand.utility = cand.f_s - cand.cost;
      if (!have_best || cand.utility > result.utility) {
        have_best = true;
        result.chosen_m = m;
        result.beta_star = cand.beta;
        result.f_s = cand.f_s;
        result.cost = cand.cost;
        result.utility = cand.utility;
      }
    }
    result.audited.push_back(cand);
  }
  if (!have_best) return no_subscription_result(mode, std::move(result.audited));
  return result;
}

namespace {

StabilityReport line_stability(const LinePeriodic& topo,
                               const GameParams& params) {
  validate(topo);
  StabilityReport report;
  report.threshold = ac_threshold(params);
  report.all_stable = true;
  std::vector<AgeValue> ages = line_node_ages(topo.m, params);

  UserStability sub;
  sub.user = 0;
  sub.age_used = alt_unsubscribe_age(topo.m, params);
  sub.verdict = sub.age_used >= report.threshold
                    ? UserVerdict::StableSubscriber
                    : UserVerdict::Unstable;
  report.all_stable &= sub.verdict != UserVerdict::Unstable;
  report.users.push_back(sub);

  for (int i = 1; i < topo.m; ++i) {
    UserStability u;
    u.user = i;
    u.age_used = ages[static_cast<std::size_t>(i)];
    u.verdict = u.age_used < report.threshold
                    ? UserVerdict::StableNonSubscriber
                    : UserVerdict::Unstable;
    report.all_stable &= u.verdict != UserVerdict::Unstable;
    report.users.push_back(u);
  }
  return report;
}

StabilityReport fc_stability(const FullyConnected& topo,
                             const GameParams& params) {
  validate(topo);
  StabilityReport report;
  report.threshold = ac_threshold(params);
  report.all_stable = true;

  const int nonsubs = topo.n - topo.m_sub;
  const AgeValue nonsub_age =
      nonsubs > 0 ? fc_nonsub_age(topo.n, topo.m_sub, params) : 0.0;
  const AgeValue quit_age =
      topo.m_sub > 0 ? fc_nonsub_age(topo.n, topo.m_sub - 1, params) : 0.0;

  for (int i = 0; i < topo.n; ++i) {
    UserStability u;
    u.user = i;
    if (i < nonsubs) {
      u.age_used = nonsub_age;
      u.verdict = u.age_used < report.threshold
                      ? UserVerdict::StableNonSubscriber
                      : UserVerdict::Unstable;
    } else {
      u.age_used = quit_age;
      u.verdict = u.age_used >= report.threshold
                      ? UserVerdict::StableSubscriber
                      : UserVerdict::Unstable;
    }
    report.all_stable &= u.verdict != UserVerdict::Unstable;
    report.users.push_back(u);
  }
  return report;
}

}  // namespace

StabilityReport ac_stability_report(const Topology& profile,
                                    const GameParams& params) {
  if (std::holds_alternative<GeneralGraph>(profile))
    throw std::invalid_argument(
        "analytical verdict unavailable for general graphs; use simulation");
  if (const auto* line = std::get_if<LinePeriodic>(&profile))
    return line_stability(*line, params);
  return fc_stability(std::get<FullyConnected>(profile), params);
}

}  // namespace gossip
