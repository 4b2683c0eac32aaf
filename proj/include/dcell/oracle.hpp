#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcell/topology.hpp"

namespace dcell {

inline constexpr int kOracleCap = 64;

// Undirected simple graph on at most 64 vertices stored as adjacency bitsets.
// Removed vertices stay addressable but drop out of `present()`.
class SmallGraph {
 public:
  explicit SmallGraph(int size = 0);

  // Vertex i of the result is topology.vertices()[i].
  static SmallGraph from_topology(const Topology& g);
  static SmallGraph complete(int size);
  static SmallGraph cycle(int size);
  static SmallGraph path(int size);

  int size() const { return size_; }
  std::uint64_t present() const { return present_; }
  bool is_present(int v) const { return (present_ >> v) & 1U; }
  int present_count() const;

  void add_edge(int a, int b);
  void remove_edge(int a, int b);
  void remove_vertex(int v);

  bool adjacent(int a, int b) const {
    return is_present(a) && is_present(b) && ((adj_[a] >> b) & 1U);
  }
  // Neighbors of v among present vertices.
  std::uint64_t neighbors(int v) const { return adj_[v] & present_; }
  int degree(int v) const;
  std::vector<std::pair<int, int>> edges() const;

 private:
  int size_ = 0;
  std::uint64_t present_ = 0;
  std::vector<std::uint64_t> adj_;
};

enum class CertKind { kHP, kHC, kNone };

struct Certificate {
  CertKind kind = CertKind::kNone;
  std::vector<int> sequence;

  bool found() const { return kind != CertKind::kNone; }
};

// Exhaustive backtracking, neighbors in ascending order.
Certificate find_hp(const SmallGraph& g, int u, int v);
Certificate find_hc(const SmallGraph& g);

// Independent checker: the sequence covers every present vertex once and
// follows edges (plus the closing edge for kHC).
bool valid_certificate(const SmallGraph& g, const Certificate& cert);

struct ConnectivityReport {
  bool connected = true;
  std::optional<std::pair<int, int>> witness;  // first pair without an HP
  std::uint64_t pairs_checked = 0;
};

// Checks every unordered pair. `jobs` worker threads share the pair list.
ConnectivityReport is_hamiltonian_connected(const SmallGraph& g, int jobs = 1);

// A faulty element of a SmallGraph: a vertex (b < 0) or an edge (a, b).
struct SmallFault {
  int a = 0;
  int b = -1;

  bool is_vertex() const { return b < 0; }
  friend bool operator==(const SmallFault&, const SmallFault&) = default;
};

enum class FaultMode { kHamiltonian, kHamiltonianConnected };

struct Sampling {
  bool exhaustive = true;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static Sampling all() { return {}; }
  static Sampling random(std::uint64_t count, std::uint64_t seed) {
    return {false, count, seed};
  }
};

struct FaultCheckReport {
  bool ok = true;
  std::vector<SmallFault> counterexample;
  std::uint64_t sets_checked = 0;
};

SmallGraph apply_faults(SmallGraph g, const std::vector<SmallFault>& faults);

FaultCheckReport fault_check(const SmallGraph& g, int f, FaultMode mode,
                             Sampling sampling = Sampling::all(),
                             int jobs = 1);

// All-pairs Hamiltonian paths of the fault-free DCell_k for (n, k) in
// {(2, 2), (3, 1)}, indexed by uid. Computed once per process and, when
// DCELL_CACHE_DIR is set, persisted there as JSON.
class BaseTable {
 public:
  int n() const { return n_; }
  int k() const { return k_; }
  int size() const { return size_; }
  std::uint64_t pair_count() const { return pairs_; }

  // Path from u to v (u != v), reversing the stored u > v entry if needed.
  std::vector<Vertex> path(Vertex u, Vertex v) const;

 private:
  friend const BaseTable& base_table(int n, int k, int jobs);

  const std::vector<std::uint8_t>& stored(Vertex lo, Vertex hi) const;

  int n_ = 0;
  int k_ = 0;
  int size_ = 0;
  std::uint64_t pairs_ = 0;
  std::vector<std::vector<std::uint8_t>> paths_;  // lo * size + hi, lo < hi
};

bool has_base_table(int n, int k);
const BaseTable& base_table(int n, int k, int jobs = 1);

struct ClaimResult {
  std::string claim;
  std::string statement;
  bool passed = false;
  std::string witness;
  double elapsed_ms = 0.0;
};

struct CertificationReport {
  std::vector<ClaimResult> claims;
  std::uint64_t cached_pairs_n2_k2 = 0;
  std::uint64_t cached_pairs_n3_k1 = 0;
  bool from_cache = false;

  bool all_passed() const;
};

// Runs the four base-case claims once per process; later calls return the
// memoized report with from_cache set. When DCELL_CACHE_DIR is set the report
// is also persisted there. Throws kCertificationFailed when a claim fails and
// `throw_on_failure` is set.
CertificationReport certify_base_cases(int jobs = 1,
                                       bool throw_on_failure = true);

}  // namespace dcell
