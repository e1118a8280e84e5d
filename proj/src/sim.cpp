#include "gossip/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gossip {

std::size_t SimTopology::directed_edge_count() const {
  std::size_t count = 0;
  for (const auto& list : neighbors) count += list.size();
  return count;
}

SimTopology build_line_segment(int m, int cells) {
  validate(LinePeriodic{m});
  if (cells < 1) throw std::domain_error("cell count must be at least 1");

  SimTopology topo;
  if (cells == 1) {
    const int n = m + 1;
    topo.neighbors.resize(static_cast<std::size_t>(n));
    topo.subscriber.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      if (i > 0) topo.neighbors[static_cast<std::size_t>(i)].push_back(i - 1);
      if (i < n - 1)
        topo.neighbors[static_cast<std::size_t>(i)].push_back(i + 1);
    }
    topo.subscriber[0] = 1;
    topo.subscriber[static_cast<std::size_t>(m)] = 1;
    return topo;
  }

  const int n = cells * m;
  topo.neighbors.resize(static_cast<std::size_t>(n));
  topo.subscriber.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    std::set<int> adj{(i + 1) % n, (i + n - 1) % n};
    adj.erase(i);
    topo.neighbors[static_cast<std::size_t>(i)].assign(adj.begin(), adj.end());
    if (i % m == 0) topo.subscriber[static_cast<std::size_t>(i)] = 1;
  }
  return topo;
}

SimTopology build_fully_connected(int n, int m_sub) {
  validate(FullyConnected{n, m_sub});
  SimTopology topo;
  topo.neighbors.resize(static_cast<std::size_t>(n));
  topo.subscriber.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (j != i) topo.neighbors[static_cast<std::size_t>(i)].push_back(j);
    if (i >= n - m_sub) topo.subscriber[static_cast<std::size_t>(i)] = 1;
  }
  return topo;
}

SimTopology build_graph_topology(const GeneralGraph& graph) {
  validate(graph);
  std::vector<std::set<int>> adj(static_cast<std::size_t>(graph.n));
  for (const auto& [u, v] : graph.edges) {
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
  }
  SimTopology topo;
  topo.neighbors.resize(static_cast<std::size_t>(graph.n));
  topo.subscriber.assign(static_cast<std::size_t>(graph.n), 0);
  for (int i = 0; i < graph.n; ++i)
    topo.neighbors[static_cast<std::size_t>(i)]
        .assign(adj[static_cast<std::size_t>(i)].begin(),
                adj[static_cast<std::size_t>(i)].end());
  for (int s : graph.subscribers)
    topo.subscriber[static_cast<std::size_t>(s)] = 1;
  return topo;
}

SimTopology realize(const Topology& topology, int cells) {
  if (const auto* line = std::get_if<LinePeriodic>(&topology))
    return build_line_segment(line->m, cells);
  if (const auto* fc = std::get_if<FullyConnected>(&topology))
    return build_fully_connected(fc->n, fc->m_sub);
  return build_graph_topology(std::get<GeneralGraph>(topology));
}

GeneralGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);

  GeneralGraph graph;
  int max_id = -1;
  int declared_nodes = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::istringstream tokens(line);
    std::string head;
    if (!(tokens >> head)) continue;

    const std::string where = path + ":" + std::to_string(line_no);
    if (head == "nodes") {
      if (!(tokens >> declared_nodes))
        throw std::invalid_argument(where + ": malformed nodes line");
    } else if (head == "subscribers") {
      int s;
      while (tokens >> s) graph.subscribers.push_back(s);
    } else {
      int u, v;
      try {
        u = std::stoi(head);
      } catch (const std::exception&) {
        throw std::invalid_argument(where + ": expected an edge line");
      }
      if (!(tokens >> v))
        throw std::invalid_argument(where + ": edge line needs two endpoints");
      graph.edges.emplace_back(u, v);
      max_id = std::max(max_id, std::max(u, v));
    }
  }
  graph.n = std::max(declared_nodes, max_id + 1);
  validate(graph);
  return graph;
}

std::uint64_t default_burn_in(const GameParams& params) {
  const double slowest =
      std::min(params.pe, std::min(params.p, params.beta));
  return 10ull * static_cast<std::uint64_t>(std::ceil(1.0 / slowest));
}

void draw_slot(SlotDraws& draws, const SimTopology& topo,
               const GameParams& params, SplitMix64& rng) {
  draws.event = rng.bernoulli(params.pe);
  draws.server_sample = rng.bernoulli(params.beta);
  draws.edge.resize(topo.directed_edge_count());
  std::size_t idx = 0;
  for (const auto& senders : topo.neighbors)
    for (std::size_t t = 0; t < senders.size(); ++t)
      draws.edge[idx++] = rng.bernoulli(params.p) ? 1 : 0;
}

void advance(WorldState& state, const SimTopology& topo,
             const SlotDraws& draws) {
  const int n = topo.node_count();
  assert(static_cast<int>(state.ages.size()) == n);
  assert(draws.edge.size() == topo.directed_edge_count());

  auto& next = state.scratch;
  next.resize(static_cast<std::size_t>(n));
  const std::int64_t inc = draws.event ? 1 : 0;
  std::size_t idx = 0;
  for (int j = 0; j < n; ++j) {
    std::int64_t best = state.ages[static_cast<std::size_t>(j)];
    for (int sender : topo.neighbors[static_cast<std::size_t>(j)]) {
      if (draws.edge[idx++])
        best = std::min(best, state.ages[static_cast<std::size_t>(sender)]);
    }
    if (topo.subscriber[static_cast<std::size_t>(j)])
      best = std::min(best, state.server_age);
    next[static_cast<std::size_t>(j)] = best + inc;
  }
  state.server_age = (draws.server_sample ? 0 : state.server_age) + inc;
  std::swap(state.ages, state.scratch);
}

void step(WorldState& state, const SimTopology& topo, const GameParams& params,
          SplitMix64& rng) {
  SlotDraws draws;
  draw_slot(draws, topo, params, rng);
  advance(state, topo, draws);
}

namespace {

struct BatchLayout {
  std::uint64_t count = 1;   // batches per iteration
  std::uint64_t length = 1;  // slots per batch
};

BatchLayout batch_layout(const SimConfig& config) {
  const std::uint64_t window = config.slots - config.burn_in;
  BatchLayout layout;
  layout.count = std::min<std::uint64_t>(32, window);
  layout.length = window / layout.count;
  return layout;
}

void check_config(const SimConfig& config) {
  if (config.slots < 1) throw std::invalid_argument("slots must be positive");
  if (config.iterations < 1)
    throw std::invalid_argument("iterations must be positive");
  if (config.threads < 1)
    throw std::invalid_argument("threads must be positive");
  if (config.mode == SimMode::TimeAverage && config.burn_in >= config.slots)
    throw std::invalid_argument("burn-in must leave at least one slot");
}

}  // namespace

SimResult run(const SimTopology& topo, const GameParams& params,
              const SimConfig& config) {
  check_config(config);
  const auto start = std::chrono::steady_clock::now();
  const int n = topo.node_count();
  const BatchLayout layout = batch_layout(config);
  const std::uint64_t rows_per_iter =
      config.mode == SimMode::EnsembleAtT ? 1 : layout.count;
  const std::uint64_t rows = config.iterations * rows_per_iter;

  // One row of per-node samples per independent unit (iteration or batch),
  // filled by whichever worker claims the iteration and reduced in fixed row
  // order afterwards, so results cannot depend on scheduling.
  std::vector<double> samples(rows * static_cast<std::uint64_t>(n));

  std::atomic<std::uint64_t> next_iteration{0};
  auto worker = [&]() {
    WorldState state(n);
    SlotDraws draws;
    std::vector<std::int64_t> sums(static_cast<std::size_t>(n));
    for (;;) {
      const std::uint64_t k = next_iteration.fetch_add(1);
      if (k >= config.iterations) break;
      SplitMix64 rng(stream_seed(config.seed, k));
      state.server_age = 0;
      std::fill(state.ages.begin(), state.ages.end(), 0);

      if (config.mode == SimMode::EnsembleAtT) {
        for (std::uint64_t t = 0; t < config.slots; ++t) {
          draw_slot(draws, topo, params, rng);
          advance(state, topo, draws);
        }
        double* row = samples.data() + k * static_cast<std::uint64_t>(n);
        for (int i = 0; i < n; ++i)
          row[i] = static_cast<double>(state.ages[static_cast<std::size_t>(i)]);
      } else {
        for (std::uint64_t t = 0; t < config.burn_in; ++t) {
          draw_slot(draws, topo, params, rng);
          advance(state, topo, draws);
        }
        for (std::uint64_t b = 0; b < layout.count; ++b) {
          std::fill(sums.begin(), sums.end(), 0);
          for (std::uint64_t t = 0; t < layout.length; ++t) {
            draw_slot(draws, topo, params, rng);
            advance(state, topo, draws);
            for (int i = 0; i < n; ++i)
              sums[static_cast<std::size_t>(i)] +=
                  state.ages[static_cast<std::size_t>(i)];
          }
          double* row = samples.data() +
                        (k * layout.count + b) * static_cast<std::uint64_t>(n);
          for (int i = 0; i < n; ++i)
            row[i] = static_cast<double>(sums[static_cast<std::size_t>(i)]) /
                     static_cast<double>(layout.length);
        }
      }
    }
  };

  const int worker_count = static_cast<int>(std::min<std::uint64_t>(
      static_cast<std::uint64_t>(config.threads), config.iterations));
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SimResult result;
  result.config = config;
  result.samples = rows;
  result.mean_age.assign(static_cast<std::size_t>(n), 0.0);
  result.std_error.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::uint64_t r = 0; r < rows; ++r)
      sum += samples[r * static_cast<std::uint64_t>(n) +
                     static_cast<std::uint64_t>(i)];
    const double mean = sum / static_cast<double>(rows);
    double sq = 0.0;
    for (std::uint64_t r = 0; r < rows; ++r) {
      const double d = samples[r * static_cast<std::uint64_t>(n) +
                               static_cast<std::uint64_t>(i)] -
                       mean;
      sq += d * d;
    }
    result.mean_age[static_cast<std::size_t>(i)] = mean;
    result.std_error[static_cast<std::size_t>(i)] =
        rows > 1 ? std::sqrt(sq / static_cast<double>(rows - 1) /
                             static_cast<double>(rows))
                 : 0.0;
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

StabilityReport empirical_stability(const SimTopology& topo,
                                    const GameParams& params,
                                    const SimConfig& config) {
  StabilityReport report;
  report.threshold = ac_threshold(params);
  report.all_stable = true;

  const SimResult base = run(topo, params, config);
  for (int j = 0; j < topo.node_count(); ++j) {
    UserStability u;
    u.user = j;
    double mean, se;
    if (topo.subscriber[static_cast<std::size_t>(j)]) {
      SimTopology alt = topo;
      alt.subscriber[static_cast<std::size_t>(j)] = 0;
      SimConfig alt_config = config;
      alt_config.seed = stream_seed(
          config.seed, 0x100000000ull + static_cast<std::uint64_t>(j));
      const SimResult r = run(alt, params, alt_config);
      mean = r.mean_age[static_cast<std::size_t>(j)];
      se = r.std_error[static_cast<std::size_t>(j)];
      u.verdict = mean >= report.threshold ? UserVerdict::StableSubscriber
                                           : UserVerdict::Unstable;
    } else {
      mean = base.mean_age[static_cast<std::size_t>(j)];
      se = base.std_error[static_cast<std::size_t>(j)];
      u.verdict = mean < report.threshold ? UserVerdict::StableNonSubscriber
                                          : UserVerdict::Unstable;
    }
    u.age_used = mean;
    u.conclusive = std::abs(mean - report.threshold) >= 3.0 * se;
    report.all_stable &= u.verdict != UserVerdict::Unstable;
    report.users.push_back(u);
  }
  return report;
}

}  // namespace gossip
