#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dcell/hamiltonian.hpp"
#include "dcell/topology.hpp"

namespace dcell {

struct FaultSet {
  std::set<Vertex> vertices;
  std::set<std::pair<Vertex, Vertex>> edges;  // stored with first < second

  void add_vertex(Vertex x) { vertices.insert(x); }
  void add_edge(Vertex a, Vertex b);

  std::size_t size() const { return vertices.size() + edges.size(); }
  bool empty() const { return size() == 0; }
  bool has_vertex(Vertex x) const { return vertices.contains(x); }
  bool has_edge(Vertex a, Vertex b) const;

  friend bool operator==(const FaultSet&, const FaultSet&) = default;
};

// D_k minus F. Throws kInvalidArgument when a fault is not an element of D_k.
class FaultyView {
 public:
  FaultyView(int n, int k, FaultSet faults);

  const DCell& dcell() const { return d_; }
  const FaultSet& faults() const { return faults_; }

  bool alive(Vertex x) const {
    return d_.contains(x) && !faults_.has_vertex(x);
  }
  bool adjacent(Vertex a, Vertex b) const;
  std::uint64_t alive_count() const {
    return d_.size() - faults_.vertices.size();
  }

 private:
  DCell d_;
  FaultSet faults_;
};

// Faults of a D_j block split by D_{j-1} copy. Faulty level-j edges belong
// to no copy and are listed separately.
struct CopyFaults {
  std::map<std::uint64_t, FaultSet> per_copy;
  std::vector<Edge> cross;
  std::uint64_t lambda = 0;  // copy with the most faults, smallest on ties
  std::size_t max_faults = 0;

  std::size_t count(std::uint64_t copy) const;
};

CopyFaults per_copy_faults(const DCell& d, const FaultSet& faults, int level,
                           Vertex base = 0);

// One recursion step of the fault-tolerant construction.
struct TraceStep {
  int level = 0;
  Vertex base = 0;
  std::string label;  // "HP 1.1" ... "HP 2.4", "HC 1" ... "HC 3", "BASE"
  // HP 1.x: x, y, N(x), N(y) for the split copy; HP 2.x: exit of u's copy,
  // entry of v's copy and their level neighbors; HC 2/3: the two stitching
  // vertices of the copy with the most faults and their level neighbors.
  std::vector<Vertex> chosen;
};

using Trace = std::vector<TraceStep>;

// Largest fault counts the constructions accept: n + k - 4 for paths and
// n + k - 3 for cycles.
int ft_hp_bound(int n, int k);
int ft_hc_bound(int n, int k);

Path ft_hp(int n, int k, const FaultSet& faults, Vertex u, Vertex v,
           Trace* trace = nullptr);

// The cycle is returned as a vertex sequence; the closing edge is implied.
Path ft_hc(int n, int k, const FaultSet& faults, Trace* trace = nullptr);

PathCheck verify_fault_certificate(
    const FaultyView& view, const Path& cert,
    std::optional<std::pair<Vertex, Vertex>> endpoints, bool cycle);

}  // namespace dcell
