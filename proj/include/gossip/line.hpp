#pragma once

#include <vector>

#include "gossip/params.hpp"

namespace gossip {

// Periods beyond this are rejected unless the caller raises the cap; it is a
// runaway guard, not a tuning knob.
inline constexpr int kDefaultLineCap = 10'000;

// Expected ages of the contiguous user sets {j..h} of one inter-subscriber
// cell on the periodic line, 0 <= j <= h <= m, subscribers at 0 and m.
// Stored as a dense triangle indexed by (j, h-j).
class LineAgeTable {
 public:
  LineAgeTable(int m, const GameParams& params, std::vector<double> entries);

  int period() const { return m_; }
  const GameParams& params() const { return params_; }
  double at(int j, int h) const;          // x_[j,h]
  double node(int i) const { return at(i, i); }

 private:
  int m_;
  GameParams params_;
  std::vector<double> entries_;
};

// Geometry factors of the same sets: x_[j,h] = x_S + pe * g. Depends on p and
// the period only.
class LineGeometryTable {
 public:
  LineGeometryTable(int m, double p, std::vector<double> entries);

  int period() const { return m_; }
  double p() const { return p_; }
  double at(int j, int h) const;
  double node(int i) const { return at(i, i); }

 private:
  int m_;
  double p_;
  std::vector<double> entries_;
};

LineAgeTable solve_line_set_ages(int m, const GameParams& params,
                                 int m_cap = kDefaultLineCap);

// x_i for users 0..m of one cell (x_0 = x_m = subscriber age).
std::vector<AgeValue> line_node_ages(int m, const GameParams& params,
                                     int m_cap = kDefaultLineCap);

LineGeometryTable solve_line_geometry(int m, double p,
                                      int m_cap = kDefaultLineCap);

// Age a lone deviating subscriber would see after unsubscribing: the midpoint
// of the doubled cell, x_m in a period-2m network.
AgeValue alt_unsubscribe_age(int m, const GameParams& params,
                             int m_cap = kDefaultLineCap);

// Geometry factor of a user set whose nearest subscribers sit `left` and
// `right` hops away. Same quantity as LineGeometryTable::at(j, h) with
// left = j, right = m - h; the factor depends on those two distances only.
// Backed by a per-p cache that grows on demand; safe for concurrent readers.
double cell_geometry(double p, int left, int right);

// The two geometry factors the equilibrium searches sweep over, backed by a
// linear-memory per-p cache (the full table would be quadratic in the cap):
//   gain_centered(p, m) = cell_geometry(p, m, m), the view of a subscriber
//     that quit and now sits mid-cell between subscribers 2m apart;
//   gain_interior(p, m) = cell_geometry(p, m/2, m - m/2), the worst interior
//     user of an intact cell of period m.
double gain_centered(double p, int m);
double gain_interior(double p, int m);

}  // namespace gossip
