#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace dcell {

// Dense undirected simple graph on vertices 0..size-1.
class SimpleGraph {
 public:
  explicit SimpleGraph(int size = 0);

  static SimpleGraph complete(int size);

  int size() const { return size_; }
  void add_edge(int a, int b);
  void remove_edge(int a, int b);
  bool adjacent(int a, int b) const { return adj_[index(a, b)] != 0; }
  int degree(int a) const { return degree_[a]; }
  std::size_t edge_count() const;
  bool is_complete() const;
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==(const SimpleGraph&, const SimpleGraph&) = default;

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(size_) +
           static_cast<std::size_t>(b);
  }

  int size_ = 0;
  std::vector<char> adj_;
  std::vector<int> degree_;
};

struct ClosureSteps {
  SimpleGraph closure;
  std::vector<std::pair<int, int>> added;  // in insertion order
};

// Repeatedly joins non-adjacent i, j with deg(i) + deg(j) >= |V|.
ClosureSteps closure_steps(const SimpleGraph& g);
SimpleGraph bc_closure(const SimpleGraph& g);

// A Hamiltonian cycle of g, found on the closure and carried back to g one
// added edge at a time by a crossing-chord rotation. Falls back to the
// exact search when the closure is not complete and |V| <= 64.
std::optional<std::vector<int>> hc_via_closure(const SimpleGraph& g);

bool is_hamiltonian_cycle(const SimpleGraph& g, const std::vector<int>& cycle);

}  // namespace dcell
