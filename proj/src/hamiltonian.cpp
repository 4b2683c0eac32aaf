#include "dcell/hamiltonian.hpp"

#include <algorithm>
#include <unordered_set>

#include "dcell/oracle.hpp"

namespace dcell {

void OpCounter::record(int level) {
  ++calls;
  if (per_level.size() <= static_cast<size_t>(level)) {
    per_level.resize(static_cast<size_t>(level) + 1, 0);
  }
  ++per_level[static_cast<size_t>(level)];
}

std::vector<std::uint64_t> make_sigma(
    const std::vector<std::uint64_t>& universe,
    const std::vector<std::uint64_t>& exclusions,
    std::optional<std::uint64_t> first_forbidden,
    std::optional<std::uint64_t> last_forbidden) {
  std::vector<std::uint64_t> sigma;
  sigma.reserve(universe.size());
  for (std::uint64_t x : universe) {
    if (std::find(exclusions.begin(), exclusions.end(), x) == exclusions.end()) {
      sigma.push_back(x);
    }
  }
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
  if (sigma.empty()) return sigma;

  auto first_ok = [&] { return sigma.front() != first_forbidden; };
  auto last_ok = [&] { return sigma.back() != last_forbidden; };
  if (!first_ok() && sigma.size() >= 2) std::swap(sigma[0], sigma[1]);
  if (!last_ok() && sigma.size() >= 2) {
    std::swap(sigma[sigma.size() - 1], sigma[sigma.size() - 2]);
  }
  if (first_ok() && last_ok()) return sigma;

  std::sort(sigma.begin(), sigma.end());
  if (sigma.size() == 1) {
    fail(ErrorCode::kInfeasible, "no admissible copy order");
  }
  for (size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] == first_forbidden) continue;
    for (size_t j = 0; j < sigma.size(); ++j) {
      if (j == i || sigma[j] == last_forbidden) continue;
      std::vector<std::uint64_t> out{sigma[i]};
      for (size_t m = 0; m < sigma.size(); ++m) {
        if (m != i && m != j) out.push_back(sigma[m]);
      }
      out.push_back(sigma[j]);
      return out;
    }
  }
  fail(ErrorCode::kInfeasible, "no admissible copy order");
}

namespace {

class Builder {
 public:
  Builder(const DCell& d, OpCounter* counter) : d_(d), counter_(counter) {}

  // Appends a (u, v)-Hamiltonian path of the D_j block starting at base.
  void hp(Vertex base, int j, Vertex u, Vertex v, Path& out) {
    if (counter_) counter_->record(j);
    if (j == 0) {
      out.push_back(u);
      for (Vertex x = base; x < base + d_.t(0); ++x) {
        if (x != u && x != v) out.push_back(x);
      }
      out.push_back(v);
      return;
    }
    if (d_.n() == 2 && j == 1) {
      // Only reachable from hp_seq: a 6-cycle has a Hamiltonian path exactly
      // between cycle neighbors.
      static const SmallGraph c6 = SmallGraph::from_topology(build_graph({2, 1}));
      const Certificate c = find_hp(c6, static_cast<int>(u - base),
                                    static_cast<int>(v - base));
      if (!c.found()) {
        fail(ErrorCode::kInfeasible,
             "no Hamiltonian path between non-adjacent vertices of a 6-cycle");
      }
      for (int x : c.sequence) out.push_back(base + static_cast<Vertex>(x));
      return;
    }
    if (has_base_table(d_.n(), j)) {
      for (Vertex x : base_table(d_.n(), j).path(u - base, v - base)) {
        out.push_back(base + x);
      }
      return;
    }
    const std::uint64_t prev = d_.t(j - 1);
    const std::uint64_t cu = (u - base) / prev;
    const std::uint64_t cv = (v - base) / prev;
    std::vector<std::uint64_t> universe(prev + 1);
    for (std::uint64_t c = 0; c <= prev; ++c) universe[c] = c;

    if (cu == cv) {
      hp(base + cu * prev, j - 1, u, v, out);
      const Vertex x = out[out.size() - 2];
      out.pop_back();
      const Vertex xp = d_.level_neighbor(x, j);
      const Vertex vp = d_.level_neighbor(v, j);
      const std::uint64_t cx = (xp - base) / prev;
      const std::uint64_t cvp = (vp - base) / prev;
      if (cx == cvp) {
        fail(ErrorCode::kInvariantViolation,
             "exits of the shared copy lead to the same copy");
      }
      std::vector<std::uint64_t> order{cx};
      for (std::uint64_t c : make_sigma(universe, {cu, cx, cvp})) {
        order.push_back(c);
      }
      order.push_back(cvp);
      seq(base, j, order, xp, vp, out);
      out.push_back(v);
      return;
    }

    const std::uint64_t cup = (d_.level_neighbor(u, j) - base) / prev;
    const std::uint64_t cvp = (d_.level_neighbor(v, j) - base) / prev;
    std::vector<std::uint64_t> order{cu};
    for (std::uint64_t c : make_sigma(universe, {cu, cv}, cup, cvp)) {
      order.push_back(c);
    }
    order.push_back(cv);
    seq(base, j, order, u, v, out);
  }

  void seq(Vertex base, int j, const std::vector<std::uint64_t>& order,
           Vertex u, Vertex v, Path& out) {
    const std::uint64_t prev = d_.t(j - 1);
    Vertex entry = u;
    for (size_t i = 0; i < order.size(); ++i) {
      const Vertex copy_base = base + order[i] * prev;
      Vertex exit = v;
      Vertex next_entry = 0;
      if (i + 1 < order.size()) {
        const Edge e = d_.level_edge(base, j, order[i], order[i + 1]);
        const bool a_here = e.a >= copy_base && e.a < copy_base + prev;
        exit = a_here ? e.a : e.b;
        next_entry = a_here ? e.b : e.a;
      }
      hp(copy_base, j - 1, entry, exit, out);
      entry = next_entry;
    }
  }

 private:
  const DCell& d_;
  OpCounter* counter_;
};

void check_endpoints(const DCell& d, Vertex u, Vertex v) {
  if (!d.contains(u) || !d.contains(v)) {
    fail(ErrorCode::kOutOfRange, "endpoint outside DCell_" +
                                     std::to_string(d.k()) + " (t_k = " +
                                     std::to_string(d.size()) + ")");
  }
  if (u == v) fail(ErrorCode::kInvalidArgument, "endpoints must differ");
}

void check_supported(int n, int k) {
  Params{n, k}.validate();
  if (n == 2 && k == 1) {
    fail(ErrorCode::kUnsupportedParameters,
         "DCell_1 with n=2 is a 6-cycle and is not Hamiltonian-connected");
  }
}

}  // namespace

Path dcell_hp(int n, int k, Vertex u, Vertex v, OpCounter* counter) {
  check_supported(n, k);
  const DCell d(n, k);
  check_endpoints(d, u, v);
  Path out;
  out.reserve(d.size());
  Builder(d, counter).hp(0, k, u, v, out);
  return out;
}

std::pair<Path, OpCounter> counted_dcell_hp(int n, int k, Vertex u, Vertex v) {
  OpCounter counter;
  Path p = dcell_hp(n, k, u, v, &counter);
  return {std::move(p), std::move(counter)};
}

Path hp_seq(int n, int k, const std::vector<std::uint64_t>& copies, Vertex u,
            Vertex v) {
  check_supported(n, k);
  if (k < 1) fail(ErrorCode::kInvalidLevel, "copy sequences need k >= 1");
  const DCell d(n, k);
  if (!d.contains(u) || !d.contains(v)) {
    fail(ErrorCode::kOutOfRange, "endpoint out of range");
  }
  if (copies.empty()) fail(ErrorCode::kInvalidArgument, "empty copy sequence");
  const std::uint64_t prev = d.t(k - 1);
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t c : copies) {
    if (c > prev) fail(ErrorCode::kOutOfRange, "copy index out of range");
    if (!seen.insert(c).second) {
      fail(ErrorCode::kInvalidArgument, "copy sequence repeats a copy");
    }
  }
  if (u / prev != copies.front() || v / prev != copies.back()) {
    fail(ErrorCode::kInvalidArgument,
         "u must lie in the first copy and v in the last");
  }
  if (copies.size() == 1 && u == v) {
    fail(ErrorCode::kInvalidArgument, "endpoints must differ");
  }
  Path out;
  Builder b(d, nullptr);
  // Each intermediate copy must be entered and left at different vertices,
  // which the distinct level-k edges guarantee; the end copies need
  // u != exit and entry != v.
  if (copies.size() >= 2) {
    const Edge first = d.level_edge(0, k, copies[0], copies[1]);
    const Edge last =
        d.level_edge(0, k, copies[copies.size() - 2], copies.back());
    if (first.a == u || first.b == u || last.a == v || last.b == v) {
      fail(ErrorCode::kInvalidArgument,
           "an endpoint coincides with a stitching vertex");
    }
  }
  b.seq(0, k, copies, u, v, out);
  return out;
}

namespace {

template <typename Adjacent, typename Contains>
PathCheck check_path(const Path& p, Vertex u, Vertex v, bool hamiltonian,
                     std::uint64_t total, Adjacent adjacent,
                     Contains contains) {
  auto bad = [](std::string why) { return PathCheck{false, std::move(why)}; };
  if (p.empty()) return bad("empty path");
  if (p.front() != u) return bad("path does not start at u");
  if (p.back() != v) return bad("path does not end at v");
  std::unordered_set<Vertex> seen;
  seen.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (!contains(p[i])) {
      return bad("vertex " + std::to_string(p[i]) + " not in the graph");
    }
    if (!seen.insert(p[i]).second) {
      return bad("vertex " + std::to_string(p[i]) + " repeated");
    }
    if (i > 0 && !adjacent(p[i - 1], p[i])) {
      return bad("no edge between " + std::to_string(p[i - 1]) + " and " +
                 std::to_string(p[i]));
    }
  }
  if (hamiltonian && p.size() != total) {
    return bad("path covers " + std::to_string(p.size()) + " of " +
               std::to_string(total) + " vertices");
  }
  return {};
}

}  // namespace

PathCheck verify_path(const DCell& d, const Path& p, Vertex u, Vertex v,
                      bool hamiltonian) {
  return check_path(
      p, u, v, hamiltonian, d.size(),
      [&](Vertex a, Vertex b) { return d.adjacent(a, b); },
      [&](Vertex x) { return d.contains(x); });
}

PathCheck verify_path(const Topology& g, const Path& p, Vertex u, Vertex v,
                      bool hamiltonian) {
  return check_path(
      p, u, v, hamiltonian, g.vertex_count(),
      [&](Vertex a, Vertex b) { return g.adjacent(a, b); },
      [&](Vertex x) { return g.contains(x); });
}

std::vector<VertexLabel> to_labels(const DCell& d, const Path& p) {
  std::vector<VertexLabel> out;
  out.reserve(p.size());
  for (Vertex x : p) out.push_back(d.label(x));
  return out;
}

}  // namespace dcell
