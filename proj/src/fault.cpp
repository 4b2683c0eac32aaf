#include "dcell/fault.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <unordered_map>

#include "dcell/oracle.hpp"

namespace dcell {

void FaultSet::add_edge(Vertex a, Vertex b) {
  if (a == b) fail(ErrorCode::kInvalidArgument, "an edge needs two vertices");
  edges.emplace(std::min(a, b), std::max(a, b));
}

bool FaultSet::has_edge(Vertex a, Vertex b) const {
  return edges.contains({std::min(a, b), std::max(a, b)});
}

FaultyView::FaultyView(int n, int k, FaultSet faults)
    : d_(n, k), faults_(std::move(faults)) {
  for (Vertex x : faults_.vertices) {
    if (!d_.contains(x)) {
      fail(ErrorCode::kInvalidArgument,
           "faulty vertex " + std::to_string(x) + " is not in DCell_" +
               std::to_string(k));
    }
  }
  for (auto [a, b] : faults_.edges) {
    if (!d_.adjacent(a, b)) {
      fail(ErrorCode::kInvalidArgument, "faulty edge " + std::to_string(a) +
                                            "-" + std::to_string(b) +
                                            " is not an edge of DCell_" +
                                            std::to_string(k));
    }
  }
}

bool FaultyView::adjacent(Vertex a, Vertex b) const {
  return alive(a) && alive(b) && d_.adjacent(a, b) && !faults_.has_edge(a, b);
}

std::size_t CopyFaults::count(std::uint64_t copy) const {
  auto it = per_copy.find(copy);
  return it == per_copy.end() ? 0 : it->second.size();
}

CopyFaults per_copy_faults(const DCell& d, const FaultSet& faults, int level,
                           Vertex base) {
  if (level < 1 || level > d.k()) {
    fail(ErrorCode::kInvalidLevel, "level out of range");
  }
  const std::uint64_t prev = d.t(level - 1);
  auto copy_of = [&](Vertex x) { return (x - base) / prev; };
  CopyFaults out;
  for (Vertex x : faults.vertices) out.per_copy[copy_of(x)].add_vertex(x);
  for (auto [a, b] : faults.edges) {
    if (copy_of(a) == copy_of(b)) {
      out.per_copy[copy_of(a)].add_edge(a, b);
    } else {
      out.cross.push_back(Edge::make(a, b, level));
    }
  }
  for (const auto& [copy, f] : out.per_copy) {
    if (f.size() > out.max_faults) {
      out.max_faults = f.size();
      out.lambda = copy;
    }
  }
  return out;
}

int ft_hp_bound(int n, int k) { return n + k - 4; }
int ft_hc_bound(int n, int k) { return n + k - 3; }

namespace {

// Blocks small enough to be settled by the oracle directly: complete graphs
// and the computer-verified base cases.
bool oracle_level(int n, int j) {
  return j == 0 || (n == 2 && j <= 2) || (n == 3 && j == 1);
}

const SmallGraph& block_graph(int n, int j) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SmallGraph> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n, j});
  if (it == cache.end()) {
    const DCell d(n, j);
    if (d.size() > static_cast<std::uint64_t>(kOracleCap)) {
      fail(ErrorCode::kResourceLimit, "block too large for the oracle");
    }
    SmallGraph g(static_cast<int>(d.size()));
    for (Vertex x = 0; x < d.size(); ++x) {
      for (Vertex y : d.level0_neighbors(x)) {
        if (x < y) g.add_edge(static_cast<int>(x), static_cast<int>(y));
      }
      for (int l = 1; l <= j; ++l) {
        const Vertex y = d.level_neighbor(x, l);
        if (x < y) g.add_edge(static_cast<int>(x), static_cast<int>(y));
      }
    }
    it = cache.emplace(std::pair{n, j}, std::move(g)).first;
  }
  return it->second;
}

SmallGraph faulty_block(int n, int j, Vertex base, const FaultSet& f) {
  SmallGraph g = block_graph(n, j);
  for (Vertex x : f.vertices) g.remove_vertex(static_cast<int>(x - base));
  for (auto [a, b] : f.edges) {
    g.remove_edge(static_cast<int>(a - base), static_cast<int>(b - base));
  }
  return g;
}

Path to_global(const std::vector<int>& seq, Vertex base) {
  Path out;
  out.reserve(seq.size());
  for (int x : seq) out.push_back(base + static_cast<Vertex>(x));
  return out;
}

Path offset(Path p, Vertex base) {
  for (Vertex& x : p) x += base;
  return p;
}

enum class Kind { kFlexible, kCycle, kFixedPath, kSmall };

struct CopyInfo {
  Kind kind = Kind::kFlexible;
  FaultSet faults;
  Path ring;  // the cycle (kCycle) or the fixed path (kFixedPath)
  // kSmall: oracle paths between alive vertices, keyed by (entry, exit).
  std::map<std::pair<Vertex, Vertex>, std::optional<Path>> memo;
};

// A way to split the copy holding both u and v into u..x and y..v.
struct SplitOption {
  Path first;   // u .. x
  Path second;  // y .. v
};

// Hamiltonian cycle search in the graph whose nodes are the copies (plus an
// optional terminal node), where some nodes only accept given neighbor pairs.
class CopyOrderSearch {
 public:
  using Alive = std::function<bool(int, int)>;

  CopyOrderSearch(int nodes, Alive alive)
      : nodes_(nodes), alive_(std::move(alive)), options_(nodes),
        special_(nodes, 0), dead_(nodes) {}

  void restrict(int node, std::vector<std::pair<int, int>> pairs) {
    special_[node] = 1;
    options_[node] = std::move(pairs);
  }
  void mark_dead(int a, int b) {
    dead_[a].push_back(b);
    dead_[b].push_back(a);
  }

  // Cycle through all nodes starting at s0, or nullopt.
  std::optional<std::vector<int>> solve(int s0, std::uint64_t budget) {
    s0_ = s0;
    budget_ = budget;
    visited_.assign(nodes_, 0);
    order_.clear();
    visited_[s0] = 1;
    order_.push_back(s0);
    if (special_[s0]) {
      for (auto [a, b] : options_[s0]) {
        for (auto [first, last] : {std::pair{a, b}, std::pair{b, a}}) {
          target_ = last;
          if (step_into(first, s0)) {
            if (dfs(first)) return order_;
            undo();
          }
          if (budget_ == 0) return std::nullopt;
        }
      }
      return std::nullopt;
    }
    target_ = -1;
    for (int first = 0; first < nodes_; ++first) {
      if (first == s0 || !alive_(s0, first)) continue;
      if (step_into(first, s0)) {
        if (dfs(first)) return order_;
        undo();
      }
      if (budget_ == 0) return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  bool has_option(int node, int a, int b) const {
    for (auto [p, q] : options_[node]) {
      if ((p == a && q == b) || (p == b && q == a)) return true;
    }
    return false;
  }

  bool s0_open_for(int node) const { return target_ < 0 || node == target_; }

  // Can `node` (unvisited) still get two neighbors from `pool`?
  bool available(int x, int node, int cur) const {
    if (x == node) return false;
    if (x == s0_) return s0_open_for(node) && alive_(node, s0_);
    return (!visited_[x] || x == cur) && alive_(node, x);
  }

  // Pushes nxt after cur if the local constraints allow it.
  bool step_into(int nxt, int cur) {
    if (visited_[nxt] || !alive_(cur, nxt)) return false;
    const int placed = static_cast<int>(order_.size());
    const bool last = placed + 1 == nodes_;
    if (nxt == target_ && !last) return false;
    if (special_[cur] && cur != s0_) {
      const int prev = order_[order_.size() - 2];
      if (!has_option(cur, prev, nxt)) return false;
    }
    if (special_[nxt]) {
      bool ok = false;
      for (auto [p, q] : options_[nxt]) {
        for (auto [in, out] : {std::pair{p, q}, std::pair{q, p}}) {
          if (in != cur) continue;
          if (out == s0_ ? (last && s0_open_for(nxt))
                         : (!visited_[out] && out != nxt && !last)) {
            ok = true;
          }
        }
      }
      if (!ok) return false;
    }
    visited_[nxt] = 1;
    order_.push_back(nxt);
    return true;
  }

  void undo() {
    visited_[order_.back()] = 0;
    order_.pop_back();
  }

  bool feasible(int cur) const {
    const int unvisited = nodes_ - static_cast<int>(order_.size());
    for (int w = 0; w < nodes_; ++w) {
      if (visited_[w]) continue;
      if (special_[w]) {
        bool ok = false;
        for (auto [a, b] : options_[w]) {
          if (a != b && !(a == cur && b == cur) && available(a, w, cur) &&
              available(b, w, cur)) {
            ok = true;
            break;
          }
        }
        if (!ok) return false;
        continue;
      }
      // Free node: unvisited others, cur, and maybe s0, minus dead links.
      int count = unvisited - 1 + 1 + (s0_open_for(w) ? 1 : 0);
      for (int x : dead_[w]) {
        if (x == cur || x == s0_ ? (x == cur || s0_open_for(w))
                                 : !visited_[x]) {
          --count;
        }
      }
      if (count < 2) return false;
    }
    return true;
  }

  bool dfs(int cur) {
    if (budget_ == 0) return false;
    --budget_;
    if (static_cast<int>(order_.size()) == nodes_) {
      if (!alive_(cur, s0_)) return false;
      if (special_[cur] && !has_option(cur, order_[order_.size() - 2], s0_)) {
        return false;
      }
      if (special_[s0_] && !has_option(s0_, order_[1], cur)) return false;
      return true;
    }
    if (!feasible(cur)) return false;
    for (int nxt = 0; nxt < nodes_; ++nxt) {
      if (!step_into(nxt, cur)) continue;
      if (dfs(nxt)) return true;
      undo();
      if (budget_ == 0) return false;
    }
    return false;
  }

  int nodes_;
  Alive alive_;
  std::vector<std::vector<std::pair<int, int>>> options_;
  std::vector<char> special_;
  std::vector<std::vector<int>> dead_;
  std::vector<char> visited_;
  std::vector<int> order_;
  int s0_ = 0;
  int target_ = -1;
  std::uint64_t budget_ = 0;
};

constexpr std::uint64_t kSearchBudget = 2'000'000;

class Engine {
 public:
  Engine(const DCell& d, Trace* trace) : d_(d), n_(d.n()), trace_(trace) {}

  Path hp(Vertex base, int j, const FaultSet& f, Vertex u, Vertex v) {
    if (f.empty() && !(n_ == 2 && j == 1)) {
      return offset(dcell_hp(n_, j, u - base, v - base), base);
    }
    if (oracle_level(n_, j)) {
      record(j, base, "BASE", {});
      const SmallGraph g = faulty_block(n_, j, base, f);
      const Certificate c = find_hp(g, static_cast<int>(u - base),
                                    static_cast<int>(v - base));
      if (!c.found()) {
        fail(ErrorCode::kInvariantViolation,
             "no Hamiltonian path in a faulty base block");
      }
      return to_global(c.sequence, base);
    }
    Level L(*this, base, j, f);
    return tiered(L, [&] {
      return L.copy_of(u) == L.copy_of(v) ? split_hp(L, u, v)
                                          : cross_hp(L, u, v);
    });
  }

  Path hc(Vertex base, int j, const FaultSet& f) {
    if (oracle_level(n_, j)) {
      record(j, base, "BASE", {});
      const SmallGraph g = faulty_block(n_, j, base, f);
      const Certificate c = find_hc(g);
      if (!c.found()) {
        fail(ErrorCode::kInvariantViolation,
             "no Hamiltonian cycle in a faulty base block");
      }
      return to_global(c.sequence, base);
    }
    if (f.empty()) {
      return offset(dcell_hp(n_, j, 0, d_.level_neighbor(0, j)), base);
    }
    Level L(*this, base, j, f);
    return tiered(L, [&] { return hc_level(L); });
  }

 private:
  struct Level;

  // Runs `body` with each rigid copy described by one fixed cycle. If no copy
  // order exists that way and the copies are small enough, runs it again
  // with every faulty copy handed to the oracle.
  template <typename Body>
  Path tiered(Level& L, Body body) {
    const bool can_enrich = L.j > 1 && oracle_level(n_, L.j - 1);
    const size_t mark = trace_ ? trace_->size() : 0;
    try {
      return body();
    } catch (const Error& e) {
      if (!can_enrich || e.code() != ErrorCode::kInvariantViolation) throw;
    }
    if (trace_) trace_->resize(mark);
    L.rich = true;
    return body();
  }

  Path hc_level(Level& L) {
    const int j = L.j;
    const size_t slot = open_step(L);
    const std::size_t top = L.faults.max_faults;
    const int rigid = n_ + j - 4;
    if (static_cast<int>(top) <= rigid || L.rich) {
      L.assign_kinds();
      const std::string label = static_cast<int>(top) < rigid    ? "HC 1"
                                : static_cast<int>(top) == rigid ? "HC 2"
                                                                 : "HC 3";
      if (auto p = cycle_order(L, label, slot)) return *p;
      fail(ErrorCode::kInvariantViolation,
           "no copy order for " + label + " at level " + std::to_string(j));
    }
    // One copy carries n + j - 3 faults: drop one of them, take a cycle of
    // the rest, and cut it at the dropped element.
    const std::uint64_t lam = L.faults.lambda;
    const FaultSet& fl = L.faults.per_copy.at(lam);
    std::vector<std::pair<Vertex, Vertex>> elements;
    for (Vertex x : fl.vertices) elements.emplace_back(x, x);
    for (auto e : fl.edges) elements.push_back(e);
    for (auto [a, b] : elements) {
      const size_t mark = trace_ ? trace_->size() : 0;
      FaultSet rest = fl;
      if (a == b) {
        rest.vertices.erase(a);
      } else {
        rest.edges.erase({a, b});
      }
      const Path ring = hc(L.copy_base(lam), j - 1, rest);
      L.assign_kinds(lam);
      CopyInfo& info = L.info[lam];
      info.faults = fl;
      info.ring = cut(ring, a, b, info.kind);
      if (auto p = cycle_order(L, "HC 3", slot)) return *p;
      if (trace_) trace_->resize(mark);
    }
    fail(ErrorCode::kInvariantViolation,
         "no copy order for HC 3 at level " + std::to_string(j));
  }

  struct Level {
    Level(Engine& e, Vertex base_, int j_, const FaultSet& f)
        : engine(e), base(base_), j(j_), prev(e.d_.t(j_ - 1)),
          m(prev + 1), faults(per_copy_faults(e.d_, f, j_, base_)),
          info(m) {
      for (const auto& [c, fc] : faults.per_copy) info[c].faults = fc;
      for (Vertex x : f.vertices) dead.insert(key(copy_of(x), target(x)));
      for (const Edge& e2 : faults.cross) {
        dead.insert(key(copy_of(e2.a), copy_of(e2.b)));
      }
    }

    static std::pair<std::uint64_t, std::uint64_t> key(std::uint64_t a,
                                                       std::uint64_t b) {
      return {std::min(a, b), std::max(a, b)};
    }
    Vertex copy_base(std::uint64_t c) const { return base + c * prev; }
    std::uint64_t copy_of(Vertex x) const { return (x - base) / prev; }
    std::uint64_t target(Vertex x) const {
      return copy_of(engine.d_.level_neighbor(x, j));
    }
    // Vertex of copy a on the level-j edge towards copy b.
    Vertex port(std::uint64_t a, std::uint64_t b) const {
      const Edge e = engine.d_.level_edge(base, j, a, b);
      return copy_of(e.a) == a ? e.a : e.b;
    }
    bool link_alive(std::uint64_t a, std::uint64_t b) const {
      return a != b && !dead.contains(key(a, b));
    }
    // Live level-j edge leaving copy(x) at x.
    bool exit_alive(Vertex x) const {
      return !info[copy_of(x)].faults.has_vertex(x) &&
             link_alive(copy_of(x), target(x));
    }

    // Default kinds from the fault counts; `skip` is left for the caller.
    void assign_kinds(std::optional<std::uint64_t> skip = std::nullopt) {
      const int n = engine.n_;
      for (std::uint64_t c = 0; c < m; ++c) {
        CopyInfo& ci = info[c];
        if (skip && *skip == c) continue;
        const int count = static_cast<int>(ci.faults.size());
        if (count == 0) {
          ci.kind = Kind::kFlexible;
        } else if (oracle_level(n, j - 1) && (j == 1 || rich)) {
          ci.kind = Kind::kSmall;
        } else if (count <= n + j - 5) {
          ci.kind = Kind::kFlexible;
        } else if (count == n + j - 4) {
          ci.kind = Kind::kCycle;
          ci.ring = engine.hc(copy_base(c), j - 1, ci.faults);
        } else {
          fail(ErrorCode::kInvariantViolation,
               "copy with more faults than the construction allows");
        }
      }
    }

    Engine& engine;
    Vertex base;
    int j;
    std::uint64_t prev;
    std::uint64_t m;
    CopyFaults faults;
    std::vector<CopyInfo> info;
    std::set<std::pair<std::uint64_t, std::uint64_t>> dead;
    bool rich = false;  // faulty copies are decided by the oracle
  };

  void record(int j, Vertex base, std::string label,
              std::vector<Vertex> chosen) {
    if (trace_) trace_->push_back({j, base, std::move(label), std::move(chosen)});
  }

  // Reserves the trace entry of a level before its copies are processed.
  size_t open_step(const Level& L) {
    if (!trace_) return 0;
    trace_->push_back({L.j, L.base, "", {}});
    return trace_->size() - 1;
  }
  void close_step(size_t slot, std::string label, std::vector<Vertex> chosen) {
    if (!trace_) return;
    (*trace_)[slot].label = std::move(label);
    (*trace_)[slot].chosen = std::move(chosen);
  }

  // Cuts the cycle `ring` at the dropped fault (a, b): a vertex (a == b) or
  // an edge. Sets `kind` to kFixedPath when the cycle is cut, kCycle when
  // the dropped edge is not on it.
  static Path cut(const Path& ring, Vertex a, Vertex b, Kind& kind) {
    const size_t len = ring.size();
    if (a == b) {
      const size_t i =
          std::find(ring.begin(), ring.end(), a) - ring.begin();
      kind = Kind::kFixedPath;
      Path out;
      for (size_t s = 1; s < len; ++s) out.push_back(ring[(i + s) % len]);
      return out;
    }
    for (size_t i = 0; i < len; ++i) {
      const Vertex p = ring[i];
      const Vertex q = ring[(i + 1) % len];
      if ((p == a && q == b) || (p == b && q == a)) {
        kind = Kind::kFixedPath;
        Path out;
        for (size_t s = 1; s <= len; ++s) out.push_back(ring[(i + s) % len]);
        return out;
      }
    }
    kind = Kind::kCycle;
    return ring;
  }

  std::optional<Path> small_path(Level& L, std::uint64_t c, Vertex a,
                                 Vertex b, CopyInfo* over = nullptr) {
    CopyInfo& ci = over ? *over : L.info[c];
    auto it = ci.memo.find({a, b});
    if (it != ci.memo.end()) return it->second;
    const Vertex cb = L.copy_base(c);
    const SmallGraph g = faulty_block(n_, L.j - 1, cb, ci.faults);
    const Certificate cert =
        find_hp(g, static_cast<int>(a - cb), static_cast<int>(b - cb));
    std::optional<Path> out;
    if (cert.found()) out = to_global(cert.sequence, cb);
    ci.memo[{a, b}] = out;
    return out;
  }

  // Unordered copy pairs {p, q} through which copy c can be traversed when
  // it is neither an endpoint copy nor split.
  std::vector<std::pair<int, int>> middle_options(Level& L, std::uint64_t c,
                                                  CopyInfo* over = nullptr) {
    std::vector<std::pair<int, int>> out;
    CopyInfo& ci = over ? *over : L.info[c];
    auto add = [&](Vertex e, Vertex x) {
      if (!L.exit_alive(e) || !L.exit_alive(x)) return;
      out.emplace_back(static_cast<int>(L.target(e)),
                       static_cast<int>(L.target(x)));
    };
    switch (ci.kind) {
      case Kind::kCycle:
        for (size_t i = 0; i < ci.ring.size(); ++i) {
          add(ci.ring[i], ci.ring[(i + 1) % ci.ring.size()]);
        }
        break;
      case Kind::kFixedPath:
        add(ci.ring.front(), ci.ring.back());
        break;
      case Kind::kSmall: {
        const Vertex cb = L.copy_base(c);
        for (Vertex a = cb; a < cb + L.prev; ++a) {
          for (Vertex b = a + 1; b < cb + L.prev; ++b) {
            if (ci.faults.has_vertex(a) || ci.faults.has_vertex(b)) continue;
            if (!L.exit_alive(a) || !L.exit_alive(b)) continue;
            if (small_path(L, c, a, b, &ci)) add(a, b);
          }
        }
        break;
      }
      case Kind::kFlexible:
        break;
    }
    return out;
  }

  // Exits x != start of an endpoint copy c such that c has a Hamiltonian
  // path from start to x.
  std::vector<Vertex> endpoint_exits(Level& L, std::uint64_t c, Vertex start,
                                     CopyInfo* over = nullptr) {
    std::vector<Vertex> out;
    CopyInfo& ci = over ? *over : L.info[c];
    const Vertex cb = L.copy_base(c);
    if (ci.kind == Kind::kCycle) {
      const size_t len = ci.ring.size();
      const size_t i =
          std::find(ci.ring.begin(), ci.ring.end(), start) - ci.ring.begin();
      for (Vertex x : {ci.ring[(i + 1) % len], ci.ring[(i + len - 1) % len]}) {
        if (L.exit_alive(x)) out.push_back(x);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    if (ci.kind == Kind::kFixedPath) {
      if (ci.ring.size() >= 2 && (ci.ring.front() == start || ci.ring.back() == start)) {
        const Vertex x = ci.ring.front() == start ? ci.ring.back() : ci.ring.front();
        if (L.exit_alive(x)) out.push_back(x);
      }
      return out;
    }
    for (Vertex x = cb; x < cb + L.prev; ++x) {
      if (x == start || ci.faults.has_vertex(x) || !L.exit_alive(x)) continue;
      if (ci.kind == Kind::kSmall && !small_path(L, c, start, x, &ci)) continue;
      out.push_back(x);
    }
    return out;
  }

  // Hamiltonian path of copy c from entry to exit, checked against the
  // copy's faults.
  Path traverse(Level& L, std::uint64_t c, Vertex entry, Vertex exit,
                CopyInfo* over = nullptr) {
    CopyInfo& ci = over ? *over : L.info[c];
    Path p;
    switch (ci.kind) {
      case Kind::kFlexible:
        p = hp(L.copy_base(c), L.j - 1, ci.faults, entry, exit);
        break;
      case Kind::kSmall: {
        auto found = small_path(L, c, entry, exit, &ci);
        if (!found) {
          fail(ErrorCode::kInvariantViolation, "copy path vanished");
        }
        p = *found;
        break;
      }
      case Kind::kCycle: {
        const size_t len = ci.ring.size();
        const size_t i =
            std::find(ci.ring.begin(), ci.ring.end(), entry) - ci.ring.begin();
        const bool forward_next = ci.ring[(i + 1) % len] == exit;
        for (size_t s = 0; s < len; ++s) {
          p.push_back(forward_next ? ci.ring[(i + len - s) % len]
                                   : ci.ring[(i + s) % len]);
        }
        break;
      }
      case Kind::kFixedPath:
        p = ci.ring;
        if (p.front() != entry) std::reverse(p.begin(), p.end());
        break;
    }
    check_segment(L, c, ci.faults, p, entry, exit);
    return p;
  }

  void check_segment(const Level& L, std::uint64_t c, const FaultSet& f,
                     const Path& p, Vertex entry, Vertex exit) const {
    const Vertex cb = L.copy_base(c);
    const bool ok =
        !p.empty() && p.front() == entry && p.back() == exit &&
        p.size() == L.prev - f.vertices.size() &&
        std::all_of(p.begin(), p.end(),
                    [&](Vertex x) {
                      return x >= cb && x < cb + L.prev && !f.has_vertex(x);
                    }) &&
        [&] {
          for (size_t i = 0; i + 1 < p.size(); ++i) {
            if (!d_.adjacent(p[i], p[i + 1]) || f.has_edge(p[i], p[i + 1])) {
              return false;
            }
          }
          Path sorted = p;
          std::sort(sorted.begin(), sorted.end());
          return std::adjacent_find(sorted.begin(), sorted.end()) ==
                 sorted.end();
        }();
    if (!ok) {
      fail(ErrorCode::kInvariantViolation,
           "sub-path of copy " + std::to_string(c) + " at level " +
               std::to_string(L.j) + " is not a Hamiltonian path of the copy");
    }
  }

  CopyOrderSearch make_search(Level& L, CopyOrderSearch::Alive alive) {
    CopyOrderSearch s(static_cast<int>(L.m), std::move(alive));
    for (auto [a, b] : L.dead) s.mark_dead(static_cast<int>(a), static_cast<int>(b));
    return s;
  }

  std::string hp_label(const Level& L, bool same, std::uint64_t cu,
                       std::uint64_t cv) const {
    const int top = static_cast<int>(L.faults.max_faults);
    const int rigid = n_ + L.j - 4;
    const char* prefix = same ? "HP 1." : "HP 2.";
    if (top <= rigid - 1) return std::string(prefix) + "1";
    if (L.j == 1) return std::string(prefix) + "2";
    const bool endpoint_rigid =
        static_cast<int>(L.faults.count(cu)) == rigid ||
        static_cast<int>(L.faults.count(cv)) == rigid;
    return std::string(prefix) + (endpoint_rigid ? "3" : "4");
  }

  Path split_hp(Level& L, Vertex u, Vertex v) {
    const std::uint64_t alpha = L.copy_of(u);
    const size_t slot = open_step(L);
    L.assign_kinds();
    const CopyInfo& ai = L.info[alpha];

    std::vector<SplitOption> splits;
    if (ai.kind == Kind::kFlexible) {
      const Path q = hp(L.copy_base(alpha), L.j - 1, ai.faults, u, v);
      for (size_t i = 0; i + 1 < q.size(); ++i) {
        splits.push_back({Path(q.begin(), q.begin() + i + 1),
                          Path(q.begin() + i + 1, q.end())});
      }
    } else if (ai.kind == Kind::kCycle) {
      Path c = ai.ring;
      std::rotate(c.begin(), std::find(c.begin(), c.end(), u), c.end());
      const size_t len = c.size();
      const size_t mv = std::find(c.begin(), c.end(), v) - c.begin();
      SplitOption a;
      a.first.push_back(u);
      for (size_t i = len - 1; i > mv; --i) a.first.push_back(c[i]);
      a.second.assign(c.begin() + 1, c.begin() + mv + 1);
      SplitOption b;
      b.first.assign(c.begin(), c.begin() + mv);
      for (size_t i = len - 1; i >= mv; --i) b.second.push_back(c[i]);
      splits.push_back(std::move(a));
      splits.push_back(std::move(b));
    } else {
      // Small copy: put an extra vertex z next to x and y and ask the oracle
      // for a (u, v)-path through z.
      const Vertex cb = L.copy_base(alpha);
      const SmallGraph g = faulty_block(n_, L.j - 1, cb, ai.faults);
      const int z = g.size();
      for (int a = 0; a < g.size(); ++a) {
        for (int b = a + 1; b < g.size(); ++b) {
          if (!g.is_present(a) || !g.is_present(b)) continue;
          SmallGraph aux(g.size() + 1);
          for (auto [p, q] : g.edges()) aux.add_edge(p, q);
          for (int x = 0; x < g.size(); ++x) {
            if (!g.is_present(x)) aux.remove_vertex(x);
          }
          aux.add_edge(a, z);
          aux.add_edge(b, z);
          const Certificate c = find_hp(aux, static_cast<int>(u - cb),
                                        static_cast<int>(v - cb));
          if (!c.found()) continue;
          const size_t at =
              std::find(c.sequence.begin(), c.sequence.end(), z) -
              c.sequence.begin();
          SplitOption s;
          for (size_t i = 0; i < at; ++i) {
            s.first.push_back(cb + static_cast<Vertex>(c.sequence[i]));
          }
          for (size_t i = at + 1; i < c.sequence.size(); ++i) {
            s.second.push_back(cb + static_cast<Vertex>(c.sequence[i]));
          }
          splits.push_back(std::move(s));
        }
      }
    }

    std::map<std::pair<int, int>, size_t> by_ports;
    std::vector<std::pair<int, int>> alpha_options;
    for (size_t i = 0; i < splits.size(); ++i) {
      const Vertex x = splits[i].first.back();
      const Vertex y = splits[i].second.front();
      if (!L.exit_alive(x) || !L.exit_alive(y)) continue;
      const std::pair<int, int> ports{static_cast<int>(L.target(x)),
                                      static_cast<int>(L.target(y))};
      if (by_ports.emplace(ports, i).second) alpha_options.push_back(ports);
    }

    CopyOrderSearch s = make_search(L, [&](int a, int b) {
      return L.link_alive(a, b);
    });
    s.restrict(static_cast<int>(alpha), alpha_options);
    for (std::uint64_t c = 0; c < L.m; ++c) {
      if (c != alpha && L.info[c].kind != Kind::kFlexible) {
        s.restrict(static_cast<int>(c), middle_options(L, c));
      }
    }
    auto order = s.solve(static_cast<int>(alpha), kSearchBudget);
    const std::string label = hp_label(L, true, alpha, alpha);
    if (!order) {
      if (auto p = split_fallback(L, u, v, label, slot)) return *p;
      fail(ErrorCode::kInvariantViolation,
           "no copy order for " + label + " at level " + std::to_string(L.j));
    }
    std::vector<int>& o = *order;
    auto hit = by_ports.find({o[1], o.back()});
    if (hit == by_ports.end()) {
      std::reverse(o.begin() + 1, o.end());
      hit = by_ports.find({o[1], o.back()});
    }
    const SplitOption& chosen = splits[hit->second];
    const Vertex x = chosen.first.back();
    const Vertex y = chosen.second.front();
    close_step(slot, label,
               {x, y, d_.level_neighbor(x, L.j), d_.level_neighbor(y, L.j)});

    // Check the two segments together form a Hamiltonian path of the copy.
    Path joined = chosen.first;
    joined.insert(joined.end(), chosen.second.begin(), chosen.second.end());
    check_segment_split(L, alpha, joined, chosen.first.size());

    Path out = chosen.first;
    for (size_t i = 1; i < o.size(); ++i) {
      const std::uint64_t c = static_cast<std::uint64_t>(o[i]);
      const std::uint64_t before = static_cast<std::uint64_t>(o[i - 1]);
      const std::uint64_t after =
          static_cast<std::uint64_t>(i + 1 < o.size() ? o[i + 1] : o[0]);
      const Path seg = traverse(L, c, L.port(c, before), L.port(c, after));
      out.insert(out.end(), seg.begin(), seg.end());
    }
    out.insert(out.end(), chosen.second.begin(), chosen.second.end());
    return out;
  }

  // Like check_segment, except the edge between the two halves is not used.
  void check_segment_split(const Level& L, std::uint64_t c, const Path& p,
                           size_t cut_at) const {
    const FaultSet& f = L.info[c].faults;
    const Vertex cb = L.copy_base(c);
    bool ok = p.size() == L.prev - f.vertices.size();
    Path sorted = p;
    std::sort(sorted.begin(), sorted.end());
    ok = ok && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    for (size_t i = 0; ok && i < p.size(); ++i) {
      ok = p[i] >= cb && p[i] < cb + L.prev && !f.has_vertex(p[i]);
      if (ok && i + 1 < p.size() && i + 1 != cut_at) {
        ok = d_.adjacent(p[i], p[i + 1]) && !f.has_edge(p[i], p[i + 1]);
      }
    }
    if (!ok) {
      fail(ErrorCode::kInvariantViolation,
           "split segments do not cover copy " + std::to_string(c));
    }
  }

  // Copy c with the vertices in `removed` taken out; they are covered
  // separately, each by stepping straight through its level-j edge.
  std::optional<CopyInfo> remainder(Level& L, std::uint64_t c,
                                    const std::vector<Vertex>& removed) {
    const CopyInfo& ci = L.info[c];
    CopyInfo rest;
    rest.faults = ci.faults;
    for (Vertex w : removed) rest.faults.add_vertex(w);
    if (rest.faults.vertices.size() + 2 > L.prev) return std::nullopt;
    const int count = static_cast<int>(rest.faults.size());
    if (oracle_level(n_, L.j - 1) && (L.j == 1 || L.rich)) {
      rest.kind = Kind::kSmall;
    } else if (ci.kind == Kind::kCycle) {
      // What is left of the cycle must be a single arc.
      const Path& r = ci.ring;
      auto gone = [&](Vertex x) {
        return std::find(removed.begin(), removed.end(), x) != removed.end();
      };
      const size_t len = r.size();
      for (size_t i = 0; i < len; ++i) {
        if (gone(r[i]) && !gone(r[(i + 1) % len])) {
          for (size_t s = 1; s < len && !gone(r[(i + s) % len]); ++s) {
            rest.ring.push_back(r[(i + s) % len]);
          }
          break;
        }
      }
      if (rest.ring.size() + removed.size() != len) return std::nullopt;
      rest.kind = Kind::kFixedPath;
    } else if (count <= n_ + L.j - 5) {
      rest.kind = Kind::kFlexible;
    } else if (count == n_ + L.j - 4) {
      rest.kind = Kind::kCycle;
      rest.ring = hc(L.copy_base(c), L.j - 1, rest.faults);
    } else {
      return std::nullopt;
    }
    return rest;
  }

  Path cross_hp(Level& L, Vertex u, Vertex v) {
    const size_t slot = open_step(L);
    L.assign_kinds();
    const std::uint64_t alpha = L.copy_of(u);
    const std::uint64_t beta = L.copy_of(v);
    const std::string label = hp_label(L, false, alpha, beta);
    for (int mode = 0; mode < 4; ++mode) {
      const bool u_alone = mode & 1;
      const bool v_alone = mode & 2;
      const size_t mark = trace_ ? trace_->size() : 0;
      std::optional<CopyInfo> ru;
      std::optional<CopyInfo> rv;
      std::vector<NodeSpec> specs;
      if (u_alone) {
        if (!(ru = remainder(L, alpha, {u}))) continue;
        specs.push_back({alpha, Role::kAloneStart, u, nullptr});
        specs.push_back({alpha, Role::kMiddle, 0, &*ru});
      } else {
        specs.push_back({alpha, Role::kStart, u, nullptr});
      }
      if (v_alone) {
        if (!(rv = remainder(L, beta, {v}))) continue;
        specs.push_back({beta, Role::kAloneEnd, v, nullptr});
        specs.push_back({beta, Role::kMiddle, 0, &*rv});
      } else {
        specs.push_back({beta, Role::kEnd, v, nullptr});
      }
      if (auto p = order_attempt(L, specs, u, v, label, slot)) return *p;
      if (trace_) trace_->resize(mark);
    }
    fail(ErrorCode::kInvariantViolation,
         "no copy order for " + label + " at level " + std::to_string(L.j));
  }

  // Split-copy fallbacks: u and/or v leave their shared copy at once.
  std::optional<Path> split_fallback(Level& L, Vertex u, Vertex v,
                                     const std::string& label, size_t slot) {
    const std::uint64_t alpha = L.copy_of(u);
    for (int mode = 1; mode < 4; ++mode) {
      const bool u_alone = mode & 1;
      const bool v_alone = mode & 2;
      const size_t mark = trace_ ? trace_->size() : 0;
      std::vector<Vertex> removed;
      if (u_alone) removed.push_back(u);
      if (v_alone) removed.push_back(v);
      std::optional<CopyInfo> rest = remainder(L, alpha, removed);
      if (!rest) continue;
      std::vector<NodeSpec> specs;
      if (u_alone) {
        specs.push_back({alpha, Role::kAloneStart, u, nullptr});
      } else {
        specs.push_back({alpha, Role::kStart, u, &*rest});
      }
      if (v_alone) {
        specs.push_back({alpha, Role::kAloneEnd, v, nullptr});
      } else {
        specs.push_back({alpha, Role::kEnd, v, &*rest});
      }
      if (u_alone && v_alone) specs.push_back({alpha, Role::kMiddle, 0, &*rest});
      if (auto p = order_attempt(L, specs, u, v, label, slot)) return p;
      if (trace_) trace_->resize(mark);
    }
    return std::nullopt;
  }

  enum class Role { kMiddle, kStart, kEnd, kAloneStart, kAloneEnd };

  // A node of the copy graph: a whole copy, or part of one when an endpoint
  // is split off. `info` overrides the copy's own description.
  struct NodeSpec {
    std::uint64_t copy;
    Role role;
    Vertex w;  // endpoint for every role except kMiddle
    CopyInfo* info;
  };

  // Finds a Hamiltonian (u, v)-path through the copy graph, where a virtual
  // node T joins the start and end nodes. Copies not named in `specs` are
  // middle nodes with their default description.
  std::optional<Path> order_attempt(Level& L, const std::vector<NodeSpec>& specs,
                                    Vertex u, Vertex v, const std::string& label,
                                    size_t slot) {
    std::vector<NodeSpec> nodes;
    std::set<std::uint64_t> named;
    for (const NodeSpec& sp : specs) named.insert(sp.copy);
    for (std::uint64_t c = 0; c < L.m; ++c) {
      if (!named.contains(c)) nodes.push_back({c, Role::kMiddle, 0, nullptr});
    }
    const int T = static_cast<int>(nodes.size());
    nodes.push_back({L.m, Role::kMiddle, 0, nullptr});
    nodes.insert(nodes.end(), specs.begin(), specs.end());
    const int count = static_cast<int>(nodes.size());

    std::map<std::uint64_t, std::vector<int>> by_copy;
    int first = -1;
    int last = -1;
    for (int i = 0; i < count; ++i) {
      if (i == T) continue;
      by_copy[nodes[i].copy].push_back(i);
      const Role r = nodes[i].role;
      if (r == Role::kStart || r == Role::kAloneStart) first = i;
      if (r == Role::kEnd || r == Role::kAloneEnd) last = i;
    }
    auto is_alone = [&](int i) {
      return nodes[i].role == Role::kAloneStart || nodes[i].role == Role::kAloneEnd;
    };
    // Node of copy c holding vertex p.
    auto owner = [&](std::uint64_t c, Vertex p) {
      const std::vector<int>& ids = by_copy[c];
      if (ids.size() == 1) return ids[0];
      int rest = -1;
      for (int i : ids) {
        if (is_alone(i)) {
          if (nodes[i].w == p) return i;
        } else {
          rest = i;
        }
      }
      return rest;
    };
    // Node reached from `node` through the level-j edge to copy `to`.
    auto resolve = [&](int node, int to) {
      if (to == static_cast<int>(L.m)) return T;
      const std::uint64_t c = static_cast<std::uint64_t>(to);
      return owner(c, L.port(c, nodes[node].copy));
    };
    auto alive = [&](int p, int q) {
      if (p == T || q == T) {
        const int other = p == T ? q : p;
        return other == first || other == last;
      }
      const std::uint64_t cp = nodes[p].copy;
      const std::uint64_t cq = nodes[q].copy;
      if (!L.link_alive(cp, cq)) return false;
      return owner(cp, L.port(cp, cq)) == p && owner(cq, L.port(cq, cp)) == q;
    };

    CopyOrderSearch s(count, alive);
    for (int p = 0; p < count; ++p) {
      for (int q = p + 1; q < count; ++q) {
        if (!alive(p, q)) s.mark_dead(p, q);
      }
    }
    s.restrict(T, {{first, last}});
    for (int i = 0; i < count; ++i) {
      if (i == T) continue;
      const NodeSpec& sp = nodes[i];
      std::vector<std::pair<int, int>> opts;
      switch (sp.role) {
        case Role::kAloneStart:
        case Role::kAloneEnd:
          if (L.exit_alive(sp.w)) {
            opts.emplace_back(static_cast<int>(L.m),
                              static_cast<int>(L.target(sp.w)));
          }
          break;
        case Role::kStart:
        case Role::kEnd:
          for (Vertex x : endpoint_exits(L, sp.copy, sp.w, sp.info)) {
            opts.emplace_back(static_cast<int>(L.m),
                              static_cast<int>(L.target(x)));
          }
          break;
        case Role::kMiddle: {
          const CopyInfo& ci = sp.info ? *sp.info : L.info[sp.copy];
          if (ci.kind == Kind::kFlexible) continue;
          opts = middle_options(L, sp.copy, sp.info);
          break;
        }
      }
      for (auto& [a, b] : opts) {
        a = resolve(i, a);
        b = resolve(i, b);
      }
      s.restrict(i, std::move(opts));
    }
    auto order = s.solve(T, kSearchBudget);
    if (!order) return std::nullopt;
    std::vector<int> o(order->begin() + 1, order->end());
    if (o.front() != first) std::reverse(o.begin(), o.end());

    auto port = [&](int node, int other) {
      return L.port(nodes[node].copy, nodes[other].copy);
    };
    const Vertex x = port(o[0], o[1]);
    const Vertex y = port(o.back(), o[o.size() - 2]);
    close_step(slot, label,
               {x, y, d_.level_neighbor(x, L.j), d_.level_neighbor(y, L.j)});

    Path out;
    for (size_t i = 0; i < o.size(); ++i) {
      const int node = o[i];
      if (is_alone(node)) {
        out.push_back(nodes[node].w);
        continue;
      }
      const Vertex entry = i == 0 ? u : port(node, o[i - 1]);
      const Vertex exit = i + 1 == o.size() ? v : port(node, o[i + 1]);
      const Path seg =
          traverse(L, nodes[node].copy, entry, exit, nodes[node].info);
      out.insert(out.end(), seg.begin(), seg.end());
    }
    return out;
  }

  std::optional<Path> cycle_order(Level& L, const std::string& label,
                                  size_t slot) {
    CopyOrderSearch s = make_search(L, [&](int a, int b) {
      return L.link_alive(a, b);
    });
    int start = -1;
    for (std::uint64_t c = 0; c < L.m; ++c) {
      if (L.info[c].kind != Kind::kFlexible) {
        s.restrict(static_cast<int>(c), middle_options(L, c));
        if (start < 0 || c == L.faults.lambda) start = static_cast<int>(c);
      }
    }
    auto order = s.solve(std::max(start, 0), kSearchBudget);
    if (!order) return std::nullopt;
    const std::vector<int>& o = *order;
    const std::uint64_t lam = static_cast<std::uint64_t>(o[0]);
    if (label != "HC 1") {
      const Vertex p = L.port(lam, static_cast<std::uint64_t>(o.back()));
      const Vertex q = L.port(lam, static_cast<std::uint64_t>(o[1]));
      close_step(slot, label,
                 {p, q, d_.level_neighbor(p, L.j), d_.level_neighbor(q, L.j)});
    } else {
      close_step(slot, label, {});
    }
    Path out;
    for (size_t i = 0; i < o.size(); ++i) {
      const std::uint64_t c = static_cast<std::uint64_t>(o[i]);
      const std::uint64_t before =
          static_cast<std::uint64_t>(o[(i + o.size() - 1) % o.size()]);
      const std::uint64_t after = static_cast<std::uint64_t>(o[(i + 1) % o.size()]);
      const Path seg = traverse(L, c, L.port(c, before), L.port(c, after));
      out.insert(out.end(), seg.begin(), seg.end());
    }
    return out;
  }

  const DCell& d_;
  int n_;
  Trace* trace_;
};

}  // namespace

Path ft_hp(int n, int k, const FaultSet& faults, Vertex u, Vertex v,
           Trace* trace) {
  const FaultyView view(n, k, faults);
  const int bound = ft_hp_bound(n, k);
  if (static_cast<int>(faults.size()) > bound) {
    fail(ErrorCode::kBoundExceeded,
         "|F| = " + std::to_string(faults.size()) +
             " exceeds n + k - 4 = " + std::to_string(bound));
  }
  if (!view.dcell().contains(u) || !view.dcell().contains(v)) {
    fail(ErrorCode::kOutOfRange, "endpoint out of range");
  }
  if (u == v) fail(ErrorCode::kInvalidArgument, "endpoints must differ");
  if (!view.alive(u) || !view.alive(v)) {
    fail(ErrorCode::kInvalidArgument, "an endpoint is faulty");
  }
  Engine engine(view.dcell(), trace);
  Path p = engine.hp(0, k, faults, u, v);
  const PathCheck check = verify_fault_certificate(view, p, {{u, v}}, false);
  if (!check) fail(ErrorCode::kInvariantViolation, check.reason);
  return p;
}

Path ft_hc(int n, int k, const FaultSet& faults, Trace* trace) {
  const FaultyView view(n, k, faults);
  const int bound = ft_hc_bound(n, k);
  if (static_cast<int>(faults.size()) > bound) {
    fail(ErrorCode::kBoundExceeded,
         "|F| = " + std::to_string(faults.size()) +
             " exceeds n + k - 3 = " + std::to_string(bound));
  }
  Engine engine(view.dcell(), trace);
  Path p = engine.hc(0, k, faults);
  const PathCheck check = verify_fault_certificate(view, p, std::nullopt, true);
  if (!check) fail(ErrorCode::kInvariantViolation, check.reason);
  return p;
}

PathCheck verify_fault_certificate(
    const FaultyView& view, const Path& cert,
    std::optional<std::pair<Vertex, Vertex>> endpoints, bool cycle) {
  auto bad = [](std::string why) { return PathCheck{false, std::move(why)}; };
  if (cert.empty()) return bad("empty certificate");
  if (endpoints) {
    if (cert.front() != endpoints->first) return bad("wrong first vertex");
    if (cert.back() != endpoints->second) return bad("wrong last vertex");
  }
  std::unordered_map<Vertex, char> seen;
  seen.reserve(cert.size());
  for (size_t i = 0; i < cert.size(); ++i) {
    if (!view.alive(cert[i])) {
      return bad("vertex " + std::to_string(cert[i]) + " is faulty or absent");
    }
    if (!seen.emplace(cert[i], 1).second) {
      return bad("vertex " + std::to_string(cert[i]) + " repeated");
    }
    if (i > 0 && !view.adjacent(cert[i - 1], cert[i])) {
      return bad("no surviving edge " + std::to_string(cert[i - 1]) + "-" +
                 std::to_string(cert[i]));
    }
  }
  if (cert.size() != view.alive_count()) {
    return bad("covers " + std::to_string(cert.size()) + " of " +
               std::to_string(view.alive_count()) + " surviving vertices");
  }
  if (cycle) {
    if (cert.size() < 3) return bad("cycle shorter than 3");
    if (!view.adjacent(cert.back(), cert.front())) {
      return bad("closing edge missing");
    }
  }
  return {};
}

}  // namespace dcell
