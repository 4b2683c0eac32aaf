#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcell/topology.hpp"

namespace dcell {

// Vertices as uid_k of the enclosing DCell_k.
using Path = std::vector<Vertex>;

struct OpCounter {
  std::uint64_t calls = 0;
  std::vector<std::uint64_t> per_level;  // calls made at each level

  void record(int level);
};

// Copy indices taken in ascending order from universe minus exclusions, then
// repaired so that the first element is not first_forbidden and the last is
// not last_forbidden: swap the first two, then the last two, and if that
// still fails take the smallest admissible first and last elements.
// Throws kInfeasible when no arrangement exists.
std::vector<std::uint64_t> make_sigma(
    const std::vector<std::uint64_t>& universe,
    const std::vector<std::uint64_t>& exclusions,
    std::optional<std::uint64_t> first_forbidden = std::nullopt,
    std::optional<std::uint64_t> last_forbidden = std::nullopt);

// A (u, v)-Hamiltonian path of DCell_k. Refuses (n, k) = (2, 1), which is a
// 6-cycle and therefore not Hamiltonian-connected.
Path dcell_hp(int n, int k, Vertex u, Vertex v, OpCounter* counter = nullptr);

std::pair<Path, OpCounter> counted_dcell_hp(int n, int k, Vertex u, Vertex v);

// Visits the level-k copies listed in `copies` in order, each by a
// Hamiltonian path, joined by the level-k edges between consecutive copies.
// u must lie in copies.front() and v in copies.back().
Path hp_seq(int n, int k, const std::vector<std::uint64_t>& copies, Vertex u,
            Vertex v);

struct PathCheck {
  bool ok = true;
  std::string reason;  // first violation

  explicit operator bool() const { return ok; }
};

PathCheck verify_path(const DCell& d, const Path& p, Vertex u, Vertex v,
                      bool hamiltonian);
PathCheck verify_path(const Topology& g, const Path& p, Vertex u, Vertex v,
                      bool hamiltonian);

std::vector<VertexLabel> to_labels(const DCell& d, const Path& p);

}  // namespace dcell
