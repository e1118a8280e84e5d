#pragma once

#include <memory>
#include <vector>

#include "gossip/params.hpp"

namespace gossip {

// Binomial weights are evaluated in double precision; beyond this user count
// they leave the representable range long before the model is useful.
inline constexpr int kMaxFcUsers = 1000;

// Expected ages x_[1,k] of the k-sets of non-subscribers in a fully connected
// network of n users with m_sub subscribers, k = 1..n-m_sub. With no
// subscribers every entry is infinite; with all users subscribed the table is
// empty.
class FcAgeTable {
 public:
  FcAgeTable(int n, int m_sub, const GameParams& params,
             std::vector<double> entries);

  int n() const { return n_; }
  int m_sub() const { return m_sub_; }
  const GameParams& params() const { return params_; }
  int max_set() const { return n_ - m_sub_; }
  double prefix_set_age(int k) const;  // x_[1,k], k in 1..max_set()

 private:
  int n_;
  int m_sub_;
  GameParams params_;
  std::vector<double> entries_;
};

// Geometry factors g(p, m, k) for the same network family: x_[1,k] with
// m subscribers equals x_S + pe * g(p, m, k). Rows cover m = 0..n-1 and
// k = 1..n-m; the m = 0 row is infinite by convention.
class FcGeometryTable {
 public:
  FcGeometryTable(int n, double p, std::vector<std::vector<double>> rows);

  int n() const { return n_; }
  double p() const { return p_; }
  double g(int m, int k) const;

 private:
  int n_;
  double p_;
  std::vector<std::vector<double>> rows_;  // rows_[m][k-1]
};

FcAgeTable solve_fc_set_ages(int n, int m_sub, const GameParams& params);

// x_1 of a single non-subscriber; infinite when m_sub = 0, undefined
// (domain error) when m_sub = n.
AgeValue fc_nonsub_age(int n, int m_sub, const GameParams& params);

FcGeometryTable solve_fc_geometry(int n, double p);

// Shared per-(n, p) table for equilibrium sweeps; safe for concurrent
// readers.
std::shared_ptr<const FcGeometryTable> fc_geometry_cached(int n, double p);

}  // namespace gossip
