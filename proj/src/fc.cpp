#include "gossip/fc.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace gossip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_users(int n) {
  if (n < 1) throw std::domain_error("user count n must be at least 1");
  if (n > kMaxFcUsers)
    throw std::domain_error("user count " + std::to_string(n) +
                            " exceeds the supported maximum of " +
                            std::to_string(kMaxFcUsers));
}

// Solves the prefix-set chain for fixed subscriber count m >= 1, evaluated
// for k = n-m down to 1. `constant` is the numerator constant (pe for ages,
// 1 for geometry) and `absorb` the value picked up on contact with the
// subscriber set (x_S for ages, 0 for geometry). The transition weights of
// every row must account for all outcomes; a row that fails that bookkeeping
// to 1e-12 aborts the solve.
std::vector<double> solve_prefix_chain(int n, int m, double p, double constant,
                                       double absorb) {
  const double q = 1.0 - p;
  std::vector<double> x(static_cast<std::size_t>(n - m) + 1, 0.0);
  std::vector<double> qk_pow(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = n - m; k >= 1; --k) {
    const double qk = std::pow(q, k);
    qk_pow[0] = 1.0;
    for (int j = 1; j <= n; ++j)
      qk_pow[static_cast<std::size_t>(j)] =
          qk_pow[static_cast<std::size_t>(j) - 1] * qk;

    const double stay_w = qk_pow[static_cast<std::size_t>(n - k)];
    const double denom = 1.0 - stay_w;
    if (!(denom > 0.0))
      throw std::domain_error("gossip probability too small to resolve");
    const double absorb_w = 1.0 - qk_pow[static_cast<std::size_t>(m)];

    double acc = constant + absorb_w * absorb;
    double weight_sum = stay_w + absorb_w;
    double binom = 1.0;
    double grow_w = 1.0;  // (1 - qk)^i, iterative
    const double one_minus_qk = 1.0 - qk;
    for (int i = 1; i <= n - m - k; ++i) {
      binom *= static_cast<double>(n - m - k - i + 1) / static_cast<double>(i);
      grow_w *= one_minus_qk;
      const double w =
          binom * grow_w * qk_pow[static_cast<std::size_t>(n - k - i)];
      acc += w * x[static_cast<std::size_t>(k + i)];
      weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
      throw std::logic_error("transition weights fail to sum to 1");
    x[static_cast<std::size_t>(k)] = acc / denom;
  }
  return x;
}

}  // namespace

FcAgeTable::FcAgeTable(int n, int m_sub, const GameParams& params,
                       std::vector<double> entries)
    : n_(n), m_sub_(m_sub), params_(params), entries_(std::move(entries)) {}

double FcAgeTable::prefix_set_age(int k) const {
  if (k < 1 || k > max_set())
    throw std::out_of_range("set size k must lie in [1, n - m_sub]");
  return entries_[static_cast<std::size_t>(k) - 1];
}

FcGeometryTable::FcGeometryTable(int n, double p,
                                 std::vector<std::vector<double>> rows)
    : n_(n), p_(p), rows_(std::move(rows)) {}

double FcGeometryTable::g(int m, int k) const {
  if (m < 0 || m >= n_)
    throw std::out_of_range("subscriber count m must lie in [0, n-1]");
  if (k < 1 || k > n_ - m)
    throw std::out_of_range("set size k must lie in [1, n - m]");
  return rows_[static_cast<std::size_t>(m)][static_cast<std::size_t>(k) - 1];
}

FcAgeTable solve_fc_set_ages(int n, int m_sub, const GameParams& params) {
  check_users(n);
  validate(FullyConnected{n, m_sub});
  if (m_sub == n) return FcAgeTable(n, m_sub, params, {});
  if (m_sub == 0) {
    // No subscriber ever hears from the server: ages grow without bound.
    return FcAgeTable(n, m_sub, params,
                      std::vector<double>(static_cast<std::size_t>(n), kInf));
  }
  std::vector<double> chain = solve_prefix_chain(
      n, m_sub, params.p, params.pe, subscriber_age(params));
  std::vector<double> entries(chain.begin() + 1, chain.end());
  return FcAgeTable(n, m_sub, params, std::move(entries));
}

AgeValue fc_nonsub_age(int n, int m_sub, const GameParams& params) {
  check_users(n);
  validate(FullyConnected{n, m_sub});
  if (m_sub == n)
    throw std::domain_error("all users subscribe: no non-subscriber age");
  if (m_sub == 0) return kInf;
  return solve_fc_set_ages(n, m_sub, params).prefix_set_age(1);
}

FcGeometryTable solve_fc_geometry(int n, double p) {
  check_users(n);
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("p must lie in (0, 1]");
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  rows[0].assign(static_cast<std::size_t>(n), kInf);
  for (int m = 1; m < n; ++m) {
    std::vector<double> chain = solve_prefix_chain(n, m, p, 1.0, 0.0);
    rows[static_cast<std::size_t>(m)]
        .assign(chain.begin() + 1, chain.end());
  }
  return FcGeometryTable(n, p, std::move(rows));
}

std::shared_ptr<const FcGeometryTable> fc_geometry_cached(int n, double p) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>,
                  std::shared_ptr<const FcGeometryTable>>
      cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{n, p}];
  if (!slot)
    slot = std::make_shared<const FcGeometryTable>(solve_fc_geometry(n, p));
  return slot;
}

}  // namespace gossip
