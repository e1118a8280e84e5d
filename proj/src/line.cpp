#include "gossip/line.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gossip {

namespace {

void check_period(int m, int m_cap) {
  if (m < 1) throw std::domain_error("line period m must be at least 1");
  if (m > m_cap)
    throw std::domain_error("line period " + std::to_string(m) +
                            " exceeds the cap of " + std::to_string(m_cap));
}

void check_gossip_prob(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("p must lie in (0, 1]");
}

std::size_t tri_size(int m) {
  auto n = static_cast<std::size_t>(m) + 1;
  return n * (n + 1) / 2;
}

std::size_t tri_index(int m, int j, int d) {
  auto jj = static_cast<std::size_t>(j);
  return jj * static_cast<std::size_t>(m + 1) - jj * (jj - 1) / 2 +
         static_cast<std::size_t>(d);
}

// One cell solve for both table kinds: the set recursion with `constant` in
// the numerator (pe for ages, 1 for geometry) and `base` on sets touching a
// subscriber (x_S for ages, 0 for geometry). Evaluated by decreasing set
// size, so every reference is already solved.
std::vector<double> fill_cell_table(int m, double p, double constant,
                                    double base) {
  std::vector<double> t(tri_size(m));
  const double q = 1.0 - p;
  const double denom = 1.0 - q * q;
  for (int d = m; d >= 0; --d) {
    for (int j = 0; j + d <= m; ++j) {
      const int h = j + d;
      double v;
      if (j == 0 || h == m) {
        v = base;
      } else {
        const double grow_both = t[tri_index(m, j - 1, d + 2)];
        const double grow_left = t[tri_index(m, j - 1, d + 1)];
        const double grow_right = t[tri_index(m, j, d + 1)];
        v = (constant + grow_both * p * p + (grow_left + grow_right) * q * p) /
            denom;
      }
      t[tri_index(m, j, d)] = v;
    }
  }
  return t;
}

int check_set(int m, int j, int h) {
  if (j < 0 || h < j || h > m)
    throw std::out_of_range("set indices must satisfy 0 <= j <= h <= m");
  return h - j;
}

}  // namespace

LineAgeTable::LineAgeTable(int m, const GameParams& params,
                           std::vector<double> entries)
    : m_(m), params_(params), entries_(std::move(entries)) {}

double LineAgeTable::at(int j, int h) const {
  return entries_[tri_index(m_, j, check_set(m_, j, h))];
}

LineGeometryTable::LineGeometryTable(int m, double p,
                                     std::vector<double> entries)
    : m_(m), p_(p), entries_(std::move(entries)) {}

double LineGeometryTable::at(int j, int h) const {
  return entries_[tri_index(m_, j, check_set(m_, j, h))];
}

LineAgeTable solve_line_set_ages(int m, const GameParams& params, int m_cap) {
  check_period(m, m_cap);
  const double xs = subscriber_age(params);
  return LineAgeTable(m, params,
                      fill_cell_table(m, params.p, params.pe, xs));
}

std::vector<AgeValue> line_node_ages(int m, const GameParams& params,
                                     int m_cap) {
  LineAgeTable table = solve_line_set_ages(m, params, m_cap);
  std::vector<AgeValue> ages(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) ages[static_cast<std::size_t>(i)] = table.node(i);
  return ages;
}

LineGeometryTable solve_line_geometry(int m, double p, int m_cap) {
  check_period(m, m_cap);
  check_gossip_prob(p);
  return LineGeometryTable(m, p, fill_cell_table(m, p, 1.0, 0.0));
}

AgeValue alt_unsubscribe_age(int m, const GameParams& params, int m_cap) {
  check_period(m, m_cap);
  LineAgeTable doubled = solve_line_set_ages(2 * m, params, 2 * m_cap);
  return doubled.node(m);
}

namespace {

// Geometry factors in subscriber-distance coordinates: f(a, b) for a set
// whose nearest subscribers are a and b hops away. f(a, 0) = f(0, b) = 0;
// otherwise the cell recursion with the period eliminated. One table per p,
// grown by rebuild and republished, so readers always see a complete table.
struct DistanceTable {
  int extent = 0;
  std::vector<double> f;  // (extent + 1)^2, row-major

  double at(int a, int b) const {
    return f[static_cast<std::size_t>(a) *
                 static_cast<std::size_t>(extent + 1) +
             static_cast<std::size_t>(b)];
  }
};

std::shared_ptr<const DistanceTable> build_distance_table(double p,
                                                          int extent) {
  auto table = std::make_shared<DistanceTable>();
  table->extent = extent;
  const auto stride = static_cast<std::size_t>(extent) + 1;
  table->f.assign(stride * stride, 0.0);
  const double q = 1.0 - p;
  const double denom = 1.0 - q * q;
  for (int a = 1; a <= extent; ++a) {
    for (int b = 1; b <= extent; ++b) {
      const double diag = table->f[(static_cast<std::size_t>(a) - 1) * stride +
                                   static_cast<std::size_t>(b) - 1];
      const double up = table->f[(static_cast<std::size_t>(a) - 1) * stride +
                                 static_cast<std::size_t>(b)];
      const double left = table->f[static_cast<std::size_t>(a) * stride +
                                   static_cast<std::size_t>(b) - 1];
      table->f[static_cast<std::size_t>(a) * stride +
               static_cast<std::size_t>(b)] =
          (1.0 + diag * p * p + (up + left) * q * p) / denom;
    }
  }
  return table;
}

std::shared_ptr<const DistanceTable> distance_table(double p, int need) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const DistanceTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[p];
  if (!slot || slot->extent < need) {
    int extent = slot ? slot->extent : 64;
    while (extent < need) extent *= 2;
    slot = build_distance_table(p, std::max(extent, need));
  }
  return slot;
}

}  // namespace

double cell_geometry(double p, int left, int right) {
  check_gossip_prob(p);
  if (left < 0 || right < 0)
    throw std::out_of_range("subscriber distances must be nonnegative");
  if (left == 0 || right == 0) return 0.0;
  return distance_table(p, std::max(left, right))->at(left, right);
}

namespace {

// Diagonal slices of the distance table, built by a two-row sweep so the
// equilibrium searches stay linear in memory: centered[a] = f(a, a) and
// off_diag[a] = f(a, a + 1).
struct DiagonalTable {
  int extent = 0;
  std::vector<double> centered;  // index 0..extent
  std::vector<double> off_diag;  // index 0..extent-1
};

std::shared_ptr<const DiagonalTable> build_diagonal_table(double p,
                                                          int extent) {
  auto table = std::make_shared<DiagonalTable>();
  table->extent = extent;
  table->centered.assign(static_cast<std::size_t>(extent) + 1, 0.0);
  table->off_diag.assign(static_cast<std::size_t>(extent), 0.0);
  const double q = 1.0 - p;
  const double denom = 1.0 - q * q;
  std::vector<double> prev(static_cast<std::size_t>(extent) + 1, 0.0);
  std::vector<double> row(static_cast<std::size_t>(extent) + 1, 0.0);
  for (int a = 1; a <= extent; ++a) {
    row[0] = 0.0;
    for (int b = 1; b <= extent; ++b) {
      row[static_cast<std::size_t>(b)] =
          (1.0 + prev[static_cast<std::size_t>(b) - 1] * p * p +
           (prev[static_cast<std::size_t>(b)] +
            row[static_cast<std::size_t>(b) - 1]) *
               q * p) /
          denom;
    }
    table->centered[static_cast<std::size_t>(a)] =
        row[static_cast<std::size_t>(a)];
    if (a < extent)
      table->off_diag[static_cast<std::size_t>(a)] =
          row[static_cast<std::size_t>(a) + 1];
    std::swap(prev, row);
  }
  return table;
}

std::shared_ptr<const DiagonalTable> diagonal_table(double p, int need) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const DiagonalTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[p];
  if (!slot || slot->extent < need) {
    int extent = slot ? slot->extent : 64;
    while (extent < need) extent *= 2;
    slot = build_diagonal_table(p, std::max(extent, need));
  }
  return slot;
}

}  // namespace

double gain_centered(double p, int m) {
  check_gossip_prob(p);
  if (m < 0) throw std::out_of_range("period must be nonnegative");
  if (m == 0) return 0.0;
  return diagonal_table(p, m)->centered[static_cast<std::size_t>(m)];
}

double gain_interior(double p, int m) {
  check_gossip_prob(p);
  if (m < 0) throw std::out_of_range("period must be nonnegative");
  const int lo = m / 2;
  if (lo == 0) return 0.0;
  if (m % 2 == 0)
    return diagonal_table(p, lo)->centered[static_cast<std::size_t>(lo)];
  return diagonal_table(p, lo + 1)->off_diag[static_cast<std::size_t>(lo)];
}

}  // namespace gossip
