#include "dcell/closure.hpp"

#include <algorithm>

#include "dcell/error.hpp"
#include "dcell/oracle.hpp"

namespace dcell {

SimpleGraph::SimpleGraph(int size)
    : size_(size),
      adj_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0),
      degree_(static_cast<std::size_t>(size), 0) {
  if (size < 0) fail(ErrorCode::kInvalidArgument, "negative graph size");
}

SimpleGraph SimpleGraph::complete(int size) {
  SimpleGraph g(size);
  for (int a = 0; a < size; ++a) {
    for (int b = a + 1; b < size; ++b) g.add_edge(a, b);
  }
  return g;
}

void SimpleGraph::add_edge(int a, int b) {
  if (a < 0 || b < 0 || a >= size_ || b >= size_ || a == b) {
    fail(ErrorCode::kInvalidArgument, "bad edge");
  }
  if (adjacent(a, b)) return;
  adj_[index(a, b)] = adj_[index(b, a)] = 1;
  ++degree_[a];
  ++degree_[b];
}

void SimpleGraph::remove_edge(int a, int b) {
  if (!adjacent(a, b)) return;
  adj_[index(a, b)] = adj_[index(b, a)] = 0;
  --degree_[a];
  --degree_[b];
}

std::size_t SimpleGraph::edge_count() const {
  std::size_t sum = 0;
  for (int d : degree_) sum += static_cast<std::size_t>(d);
  return sum / 2;
}

bool SimpleGraph::is_complete() const {
  return std::all_of(degree_.begin(), degree_.end(),
                     [&](int d) { return d == size_ - 1; });
}

std::vector<std::pair<int, int>> SimpleGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size_; ++a) {
    for (int b = a + 1; b < size_; ++b) {
      if (adjacent(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

ClosureSteps closure_steps(const SimpleGraph& g) {
  ClosureSteps out{g, {}};
  SimpleGraph& c = out.closure;
  const int n = c.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (!c.adjacent(a, b) && c.degree(a) + c.degree(b) >= n) {
          c.add_edge(a, b);
          out.added.emplace_back(a, b);
          changed = true;
        }
      }
    }
  }
  return out;
}

SimpleGraph bc_closure(const SimpleGraph& g) { return closure_steps(g).closure; }

bool is_hamiltonian_cycle(const SimpleGraph& g, const std::vector<int>& cycle) {
  const int n = g.size();
  if (n < 3 || static_cast<int>(cycle.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int x : cycle) {
    if (x < 0 || x >= n || seen[x]) return false;
    seen[x] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (!g.adjacent(cycle[i], cycle[(i + 1) % n])) return false;
  }
  return true;
}

namespace {

std::optional<std::vector<int>> oracle_cycle(const SimpleGraph& g) {
  if (g.size() > kOracleCap) return std::nullopt;
  SmallGraph s(g.size());
  for (auto [a, b] : g.edges()) s.add_edge(a, b);
  const Certificate c = find_hc(s);
  if (!c.found()) return std::nullopt;
  return c.sequence;
}

// Removes edge (a, b) from `cycle` if it is used, using two crossing chords
// of h. Returns false when no such chords exist.
bool rotate_out(const SimpleGraph& h, std::vector<int>& cycle, int a, int b) {
  const int n = static_cast<int>(cycle.size());
  const int ia = static_cast<int>(std::find(cycle.begin(), cycle.end(), a) -
                                  cycle.begin());
  std::vector<int> c(static_cast<std::size_t>(n));
  if (cycle[(ia + n - 1) % n] == b) {
    // c_0 = a, walking away from b, ends at c_{n-1} = b.
    for (int s = 0; s < n; ++s) c[s] = cycle[(ia + s) % n];
  } else if (cycle[(ia + 1) % n] == b) {
    for (int s = 0; s < n; ++s) c[s] = cycle[(ia - s + n) % n];
  } else {
    return true;  // edge not on the cycle
  }
  for (int p = 1; p + 1 < n - 1; ++p) {
    if (h.adjacent(c[0], c[p + 1]) && h.adjacent(c[n - 1], c[p])) {
      std::vector<int> out{c[0]};
      for (int s = p + 1; s < n; ++s) out.push_back(c[s]);
      for (int s = p; s >= 1; --s) out.push_back(c[s]);
      cycle = std::move(out);
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<std::vector<int>> hc_via_closure(const SimpleGraph& g) {
  const int n = g.size();
  if (n < 3) return std::nullopt;
  ClosureSteps steps = closure_steps(g);
  std::vector<int> cycle;
  if (steps.closure.is_complete()) {
    for (int i = 0; i < n; ++i) cycle.push_back(i);
  } else if (auto c = oracle_cycle(steps.closure)) {
    cycle = *c;
  } else {
    return std::nullopt;
  }
  SimpleGraph h = steps.closure;
  for (auto it = steps.added.rbegin(); it != steps.added.rend(); ++it) {
    h.remove_edge(it->first, it->second);
    if (!rotate_out(h, cycle, it->first, it->second)) {
      // Cannot happen for a genuine closure sequence; stay safe anyway.
      return oracle_cycle(g);
    }
  }
  if (!is_hamiltonian_cycle(g, cycle)) {
    fail(ErrorCode::kInvariantViolation, "closure unwinding left a bad cycle");
  }
  return cycle;
}

}  // namespace dcell
