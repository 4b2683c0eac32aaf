#include "dcell/broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"

namespace dcell {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kFlood:
      return "flood";
    case Scheme::kHamCycle:
      return "ham";
    case Scheme::kHierarchical:
      return "hier";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "flood") return Scheme::kFlood;
  if (name == "ham") return Scheme::kHamCycle;
  if (name == "hier") return Scheme::kHierarchical;
  fail(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  Params{n, k}.validate();
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  if (trials == 0) fail(ErrorCode::kInvalidArgument, "trials must be at least 1");
  if (jobs < 1) fail(ErrorCode::kInvalidArgument, "jobs must be at least 1");
  const std::uint64_t size = t(n, k);
  if (size > max_vertices) {
    fail(ErrorCode::kResourceLimit, "t_k = " + std::to_string(size) +
                                        " exceeds the vertex cap " +
                                        std::to_string(max_vertices));
  }
  if (source >= size) fail(ErrorCode::kOutOfRange, "source is not a vertex");
}

namespace {

std::pair<Vertex, Vertex> link(Vertex a, Vertex b) {
  return {std::min(a, b), std::max(a, b)};
}

// Hamiltonian path of the D_j block at `base`, starting at `entry`. For
// j >= 1 it ends next to `entry`, so it closes into a cycle.
Path block_walk(const DCell& d, int j, Vertex base, Vertex entry) {
  const int n = d.n();
  if (j == 0) {
    Path p{entry};
    for (Vertex x = base; x < base + static_cast<Vertex>(n); ++x) {
      if (x != entry) p.push_back(x);
    }
    return p;
  }
  if (n == 2 && j == 1) {
    // A 6-cycle: keep stepping to the unvisited neighbor.
    Path p{entry};
    Vertex prev = entry;
    Vertex cur = d.level0_neighbors(entry).front();
    while (cur != entry) {
      p.push_back(cur);
      const Vertex a = d.level0_neighbors(cur).front();
      const Vertex b = d.level_neighbor(cur, 1);
      const Vertex next = a == prev ? b : a;
      prev = cur;
      cur = next;
    }
    return p;
  }
  const Vertex v = d.level0_neighbors(entry).front();
  Path p = dcell_hp(n, j, entry - base, v - base);
  for (Vertex& x : p) x += base;
  return p;
}

struct Trial {
  const Topology& g;
  LinkSet faulty;

  bool ok(Vertex a, Vertex b) const { return !faulty.contains(link(a, b)); }
};

LinkSet sample_faults(const std::vector<Edge>& edges, double p, std::uint64_t seed,
                      std::uint64_t trial) {
  LinkSet out;
  if (p <= 0.0) return out;
  std::seed_seq seq{seed, trial};
  std::mt19937_64 rng(seq);
  std::bernoulli_distribution coin(p);
  for (const Edge& e : edges) {
    if (coin(rng)) out.insert({e.a, e.b});
  }
  return out;
}

TrialRecord flood(const Trial& t, Vertex s) {
  const std::size_t size = t.g.vertex_count();
  std::vector<std::int64_t> sender(size, -1);
  std::vector<char> seen(size, 0);
  seen[s] = 1;
  std::vector<Vertex> frontier{s};
  TrialRecord r;
  std::uint64_t covered = 1;
  std::uint64_t round = 0;
  while (!frontier.empty()) {
    ++round;
    std::vector<Vertex> next;
    for (Vertex x : frontier) {
      for (const auto& nb : t.g.neighbors(x)) {
        if (static_cast<std::int64_t>(nb.v) == sender[x] || !t.ok(x, nb.v)) continue;
        ++r.messages;
        if (!seen[nb.v]) {
          seen[nb.v] = 1;
          sender[nb.v] = static_cast<std::int64_t>(x);
          next.push_back(nb.v);
          ++covered;
        }
      }
    }
    if (covered == size && !r.rounds) r.rounds = round;
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  r.coverage = static_cast<double>(covered) / static_cast<double>(size);
  return r;
}

// Token walk along p from p[0], which holds the message at round `start`.
// Returns the number of vertices reached, p[0] included.
std::size_t walk(const Trial& t, const Path& p, std::uint64_t start, TrialRecord& r,
                 std::uint64_t& last_round, std::vector<std::uint64_t>* reached = nullptr) {
  if (reached) reached->push_back(start);
  last_round = std::max(last_round, start);
  std::size_t i = 0;
  for (; i + 1 < p.size(); ++i) {
    if (!t.ok(p[i], p[i + 1])) break;
    ++r.messages;
    last_round = std::max(last_round, start + i + 1);
    if (reached) reached->push_back(start + i + 1);
  }
  return i + 1;
}

TrialRecord ham_cycle(const Trial& t, const Path& cycle) {
  TrialRecord r;
  std::uint64_t last = 0;
  const std::size_t covered = walk(t, cycle, 0, r, last);
  if (covered == cycle.size()) r.rounds = last;
  r.coverage = static_cast<double>(covered) / static_cast<double>(cycle.size());
  return r;
}

TrialRecord hierarchical(const Trial& t, const DCell& d, Vertex s) {
  const int k = d.k();
  const std::uint64_t tp = d.t(k - 1);
  TrialRecord r;
  std::uint64_t last = 0;
  const Path root = block_walk(d, k - 1, s - s % tp, s);
  std::vector<std::uint64_t> when;
  std::size_t covered = walk(t, root, 0, r, last, &when);
  for (std::size_t i = 0; i < when.size(); ++i) {
    const Vertex x = root[i];
    const Vertex y = d.level_neighbor(x, k);
    if (!t.ok(x, y)) continue;
    ++r.messages;
    covered += walk(t, block_walk(d, k - 1, y - y % tp, y), when[i] + 1, r, last);
  }
  if (covered == d.size()) r.rounds = last;
  r.coverage = static_cast<double>(covered) / static_cast<double>(d.size());
  return r;
}

SimResult run(const SimConfig& config) {
  config.validate();
  if (config.scheme == Scheme::kHierarchical && config.k < 1) {
    fail(ErrorCode::kUnsupportedParameters, "hierarchical broadcast needs k >= 1");
  }
  const Topology g = build_graph({config.n, config.k}, default_rule(), config.max_vertices);
  const std::vector<Edge> edges = g.edges();
  const DCell d(config.n, config.k);
  Path cycle;
  if (config.scheme == Scheme::kHamCycle) cycle = broadcast_cycle(config.n, config.k, config.source);

  SimResult out;
  out.config = config;
  out.trials.resize(config.trials);
  detail::parallel_for(config.trials, config.jobs, [&](std::size_t i) {
    const Trial trial{g, sample_faults(edges, config.p, config.seed, i)};
    switch (config.scheme) {
      case Scheme::kFlood:
        out.trials[i] = flood(trial, config.source);
        break;
      case Scheme::kHamCycle:
        out.trials[i] = ham_cycle(trial, cycle);
        break;
      case Scheme::kHierarchical:
        out.trials[i] = hierarchical(trial, d, config.source);
        break;
    }
  });

  double messages = 0.0;
  double rounds = 0.0;
  std::uint64_t full = 0;
  for (const TrialRecord& r : out.trials) {
    messages += static_cast<double>(r.messages);
    if (r.rounds) {
      rounds += static_cast<double>(*r.rounds);
      ++full;
    }
  }
  const auto count = static_cast<double>(config.trials);
  out.mean_messages = messages / count;
  if (full > 0) out.mean_rounds = rounds / static_cast<double>(full);
  out.success_rate = static_cast<double>(full) / count;
  out.ci95 = 1.96 * std::sqrt(out.success_rate * (1.0 - out.success_rate) / count);
  return out;
}

}  // namespace

Path broadcast_cycle(int n, int k, Vertex start) {
  Params{n, k}.validate();
  if (n == 2 && k == 0) {
    fail(ErrorCode::kUnsupportedParameters, "DCell_0 with n = 2 has no cycle");
  }
  const DCell d(n, k);
  if (!d.contains(start)) fail(ErrorCode::kOutOfRange, "start is not a vertex");
  return block_walk(d, k, 0, start);
}

SimResult simulate_flood(const SimConfig& config) {
  SimConfig c = config;
  c.scheme = Scheme::kFlood;
  return run(c);
}

SimResult simulate_ham_cycle(const SimConfig& config) {
  SimConfig c = config;
  c.scheme = Scheme::kHamCycle;
  return run(c);
}

SimResult simulate_hierarchical(const SimConfig& config) {
  SimConfig c = config;
  c.scheme = Scheme::kHierarchical;
  return run(c);
}

SimResult simulate(const SimConfig& config) { return run(config); }

Strategy fixed_cycle_strategy() {
  return [](const StrategyContext& ctx) -> std::optional<Vertex> {
    if (!ctx.planned) return std::nullopt;
    const auto& bad = ctx.faulty_neighbors;
    if (std::find(bad.begin(), bad.end(), *ctx.planned) != bad.end()) return std::nullopt;
    return ctx.planned;
  };
}

FaultExperiment fault_success_experiment(const SimConfig& config,
                                         const Strategy& strategy) {
  config.validate();
  const Topology g = build_graph({config.n, config.k}, default_rule(), config.max_vertices);
  const std::vector<Edge> edges = g.edges();
  const Path cycle = broadcast_cycle(config.n, config.k, config.source);
  const std::size_t size = cycle.size();
  std::vector<Vertex> planned(size);
  for (std::size_t i = 0; i < size; ++i) planned[cycle[i]] = cycle[(i + 1) % size];

  std::vector<char> success(config.trials, 0);
  // The hook is user code; trials run one at a time unless jobs > 1.
  detail::parallel_for(config.trials, config.jobs, [&](std::size_t i) {
    const Trial t{g, sample_faults(edges, config.p, config.seed, i)};
    std::vector<char> visited(size, 0);
    Vertex cur = config.source;
    visited[cur] = 1;
    for (std::size_t step = 1; step < size; ++step) {
      StrategyContext ctx;
      ctx.current = cur;
      ctx.planned = planned[cur];
      ctx.visited = &visited;
      for (const auto& nb : g.neighbors(cur)) {
        if (!t.ok(cur, nb.v)) ctx.faulty_neighbors.push_back(nb.v);
      }
      const std::optional<Vertex> hop = strategy(ctx);
      if (!hop || !g.contains(*hop) || !g.adjacent(cur, *hop) || !t.ok(cur, *hop) ||
          visited[*hop]) {
        return;
      }
      cur = *hop;
      visited[cur] = 1;
    }
    success[i] = g.adjacent(cur, config.source) && t.ok(cur, config.source);
  });

  FaultExperiment out;
  out.trials = config.trials;
  out.successes = static_cast<std::uint64_t>(std::count(success.begin(), success.end(), 1));
  const auto count = static_cast<double>(out.trials);
  out.rate = static_cast<double>(out.successes) / count;
  out.stddev = std::sqrt(out.rate * (1.0 - out.rate) / count);
  out.ci95_low = std::max(0.0, out.rate - 1.96 * out.stddev);
  out.ci95_high = std::min(1.0, out.rate + 1.96 * out.stddev);
  return out;
}

}  // namespace dcell
