#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dcell/hamiltonian.hpp"

namespace dcell {

enum class Scheme { kFlood, kHamCycle, kHierarchical };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);  // flood | ham | hier

struct SimConfig {
  int n = 2;
  int k = 1;
  Vertex source = 0;
  Scheme scheme = Scheme::kFlood;
  double p = 0.0;  // iid link fault probability, drawn once per trial
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::uint64_t max_vertices = kDefaultVertexCap;

  void validate() const;
};

struct TrialRecord {
  std::uint64_t messages = 0;
  std::optional<std::uint64_t> rounds;  // round at which the last vertex was reached
  double coverage = 0.0;
};

struct SimResult {
  SimConfig config;
  std::vector<TrialRecord> trials;
  double mean_messages = 0.0;
  std::optional<double> mean_rounds;  // over fully covered trials
  double success_rate = 0.0;          // fraction of fully covered trials
  double ci95 = 0.0;                  // half width, normal approximation

  const TrialRecord& first() const { return trials.front(); }
};

SimResult simulate_flood(const SimConfig& config);
SimResult simulate_ham_cycle(const SimConfig& config);
SimResult simulate_hierarchical(const SimConfig& config);
SimResult simulate(const SimConfig& config);

// Hamiltonian cycle of DCell_k through `start`, listed from `start`.
Path broadcast_cycle(int n, int k, Vertex start);

// Undirected links, normalized with a < b.
struct LinkHash {
  std::size_t operator()(const std::pair<Vertex, Vertex>& e) const {
    return std::hash<Vertex>()(e.first * 0x9e3779b97f4a7c15ULL ^ e.second);
  }
};
using LinkSet = std::unordered_set<std::pair<Vertex, Vertex>, LinkHash>;

struct StrategyContext {
  Vertex current = 0;
  std::optional<Vertex> planned;  // next vertex of the precomputed cycle
  std::vector<Vertex> faulty_neighbors;
  const std::vector<char>* visited = nullptr;  // indexed by uid
};

// Returns the next hop, or nullopt to abort the walk.
using Strategy = std::function<std::optional<Vertex>(const StrategyContext&)>;

// Follows the precomputed cycle and aborts at the first faulty link.
Strategy fixed_cycle_strategy();

struct FaultExperiment {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double stddev = 0.0;  // binomial standard error of the rate
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

// Probability that the strategy closes a Hamiltonian cycle from the source
// through surviving links only.
FaultExperiment fault_success_experiment(const SimConfig& config,
                                         const Strategy& strategy);

}  // namespace dcell
