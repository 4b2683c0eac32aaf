#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dcell/fault.hpp"
#include "dcell/oracle.hpp"

namespace dcell {
namespace {

// Independent check against the explicit graph with faults removed.
bool survives(const Topology& g, const FaultSet& f, const Path& p, bool cycle) {
  std::set<Vertex> seen(p.begin(), p.end());
  if (seen.size() != p.size()) return false;
  if (p.size() != g.vertex_count() - f.vertices.size()) return false;
  for (Vertex x : p) {
    if (!g.contains(x) || f.vertices.contains(x)) return false;
  }
  auto ok = [&](Vertex a, Vertex b) {
    return g.adjacent(a, b) && !f.edges.contains({std::min(a, b), std::max(a, b)});
  };
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    if (!ok(p[i], p[i + 1])) return false;
  }
  return !cycle || ok(p.back(), p.front());
}

std::vector<FaultSet> single_faults(const Topology& g) {
  std::vector<FaultSet> out;
  for (Vertex x : g.vertices()) {
    FaultSet f;
    f.add_vertex(x);
    out.push_back(f);
  }
  for (const Edge& e : g.edges()) {
    FaultSet f;
    f.add_edge(e.a, e.b);
    out.push_back(f);
  }
  return out;
}

TEST(FaultSet, NormalizesEdges) {
  FaultSet f;
  f.add_edge(5, 2);
  EXPECT_TRUE(f.has_edge(2, 5));
  EXPECT_TRUE(f.has_edge(5, 2));
  EXPECT_EQ(f.size(), 1u);
  EXPECT_THROW(f.add_edge(3, 3), Error);
}

TEST(FaultyView, RejectsForeignFaults) {
  FaultSet f;
  f.add_vertex(12);
  EXPECT_THROW(FaultyView(3, 1, f), Error);
  FaultSet g;
  g.add_edge(0, 4);  // not adjacent in DCell_1 (n=3)
  EXPECT_THROW(FaultyView(3, 1, g), Error);
}

TEST(PerCopyFaults, SplitsByCopy) {
  const DCell d(3, 2);
  FaultSet f;
  f.add_vertex(0);
  f.add_vertex(13);
  f.add_edge(16, 17);
  f.add_edge(1, 2);
  const Edge e = d.level_edge(0, 2, 0, 2);
  f.add_edge(e.a, e.b);
  const CopyFaults c = per_copy_faults(d, f, 2);
  EXPECT_EQ(c.count(0), 2u);
  EXPECT_EQ(c.count(1), 2u);
  EXPECT_EQ(c.count(2), 0u);
  ASSERT_EQ(c.cross.size(), 1u);
  EXPECT_EQ(c.cross[0].level, 2);
  EXPECT_EQ(c.lambda, 0u);
  EXPECT_EQ(c.max_faults, 2u);
  // Level 1 inside copy 1 of level 2.
  const CopyFaults inner = per_copy_faults(d, c.per_copy.at(1), 1, 12);
  EXPECT_EQ(inner.count(0), 1u);  // vertex 13
  EXPECT_EQ(inner.count(1), 1u);  // edge 16-17
}

TEST(Bounds, Values) {
  EXPECT_EQ(ft_hp_bound(4, 1), 1);
  EXPECT_EQ(ft_hc_bound(4, 1), 2);
  EXPECT_EQ(ft_hc_bound(2, 2), 1);
  FaultSet f;
  f.add_vertex(0);
  f.add_vertex(1);
  try {
    ft_hp(4, 1, f, 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundExceeded);
  }
  f.add_vertex(2);
  EXPECT_THROW(ft_hc(4, 1, f), Error);
}

TEST(FtHp, RejectsFaultyEndpoints) {
  FaultSet f;
  f.add_vertex(3);
  EXPECT_THROW(ft_hp(4, 1, f, 3, 7), Error);
  EXPECT_THROW(ft_hp(4, 1, {}, 7, 7), Error);
}

void all_single_fault_cycles(int n, int k) {
  const Topology g = build_graph({n, k});
  for (const FaultSet& f : single_faults(g)) {
    const Path c = ft_hc(n, k, f);
    ASSERT_TRUE(survives(g, f, c, true)) << "n=" << n << " k=" << k;
  }
}

TEST(FtHc, EverySingleFaultN2K2) { all_single_fault_cycles(2, 2); }
TEST(FtHc, EverySingleFaultN3K1) { all_single_fault_cycles(3, 1); }
TEST(FtHc, EverySingleFaultN4K1) { all_single_fault_cycles(4, 1); }
TEST(FtHc, EverySingleFaultN3K2) { all_single_fault_cycles(3, 2); }

TEST(FtHc, AllDoubleFaultsN4K1) {
  const Topology g = build_graph({4, 1});
  const auto singles = single_faults(g);
  int checked = 0;
  for (size_t i = 0; i < singles.size(); ++i) {
    for (size_t j = i + 1; j < singles.size(); ++j) {
      FaultSet f = singles[i];
      f.vertices.insert(singles[j].vertices.begin(), singles[j].vertices.end());
      f.edges.insert(singles[j].edges.begin(), singles[j].edges.end());
      const Path c = ft_hc(4, 1, f);
      ASSERT_TRUE(survives(g, f, c, true)) << i << "," << j;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 60 * 59 / 2);  // 20 vertices and 40 edges
}

TEST(FtHc, RandomFaultsAtTheBound) {
  std::mt19937_64 rng(5);
  for (auto [n, k] : {std::pair{2, 3}, {3, 2}, {4, 2}, {5, 1}, {3, 3}}) {
    const Topology g = build_graph({n, k});
    const auto edges = g.edges();
    const auto& verts = g.vertices();
    for (int trial = 0; trial < 25; ++trial) {
      FaultSet f;
      while (static_cast<int>(f.size()) < ft_hc_bound(n, k)) {
        if (rng() % 2) {
          f.add_vertex(verts[rng() % verts.size()]);
        } else {
          const Edge& e = edges[rng() % edges.size()];
          f.add_edge(e.a, e.b);
        }
      }
      const Path c = ft_hc(n, k, f);
      ASSERT_TRUE(survives(g, f, c, true)) << n << "," << k << " #" << trial;
    }
  }
}

TEST(FtHp, EverySingleFaultN4K1AllPairs) {
  const Topology g = build_graph({4, 1});
  for (const FaultSet& f : single_faults(g)) {
    for (Vertex u = 0; u < 20; ++u) {
      for (Vertex v = u + 1; v < 20; ++v) {
        if (f.has_vertex(u) || f.has_vertex(v)) continue;
        const Path p = ft_hp(4, 1, f, u, v);
        ASSERT_TRUE(survives(g, f, p, false));
        ASSERT_EQ(p.front(), u);
        ASSERT_EQ(p.back(), v);
      }
    }
  }
}

TEST(FtHp, RandomFaultsAtTheBound) {
  std::mt19937_64 rng(9);
  for (auto [n, k] : {std::pair{3, 2}, {2, 3}, {4, 2}, {5, 1}, {6, 1}, {3, 3}}) {
    const Topology g = build_graph({n, k});
    const auto edges = g.edges();
    const auto& verts = g.vertices();
    for (int trial = 0; trial < 100; ++trial) {
      FaultSet f;
      while (static_cast<int>(f.size()) < ft_hp_bound(n, k)) {
        if (rng() % 2) {
          f.add_vertex(verts[rng() % verts.size()]);
        } else {
          const Edge& e = edges[rng() % edges.size()];
          f.add_edge(e.a, e.b);
        }
      }
      Vertex u;
      Vertex v;
      do {
        u = verts[rng() % verts.size()];
        v = verts[rng() % verts.size()];
      } while (u == v || f.has_vertex(u) || f.has_vertex(v));
      const Path p = ft_hp(n, k, f, u, v);
      ASSERT_TRUE(survives(g, f, p, false)) << n << "," << k << " #" << trial;
      ASSERT_EQ(p.front(), u);
      ASSERT_EQ(p.back(), v);
    }
  }
}

TEST(FtHp, ExistenceMatchesOracleOnN4K1) {
  // With one fault the oracle and the construction agree that every pair of
  // surviving vertices is joined by a Hamiltonian path.
  const Topology g = build_graph({4, 1});
  const SmallGraph base = SmallGraph::from_topology(g);
  FaultSet f;
  f.add_edge(0, 1);
  const SmallGraph h = apply_faults(base, {SmallFault{0, 1}});
  for (int v = 1; v < 20; ++v) {
    EXPECT_TRUE(find_hp(h, 0, v).found());
    EXPECT_NO_THROW(ft_hp(4, 1, f, 0, static_cast<Vertex>(v)));
  }
}

TEST(VerifyFaultCertificate, Negatives) {
  FaultSet f;
  f.add_vertex(5);
  const FaultyView view(3, 1, f);
  const Path c = ft_hc(3, 1, f);
  EXPECT_TRUE(verify_fault_certificate(view, c, std::nullopt, true));
  Path with_fault = c;
  with_fault.push_back(5);
  EXPECT_FALSE(verify_fault_certificate(view, with_fault, std::nullopt, false));
  Path short_one(c.begin(), c.end() - 1);
  EXPECT_FALSE(verify_fault_certificate(view, short_one, std::nullopt, false));
  Path rotated = c;
  std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
  EXPECT_TRUE(verify_fault_certificate(view, rotated, std::nullopt, true));
  EXPECT_FALSE(verify_fault_certificate(view, c, std::pair{c[1], c.back()}, false));
  FaultSet fe;
  fe.add_edge(c[0], c[1]);
  const FaultyView edge_view(3, 1, fe);
  EXPECT_FALSE(verify_fault_certificate(edge_view, c, std::nullopt, true));
}

TEST(Trace, LabelsAndChoices) {
  Trace trace;
  FaultSet f;
  f.add_vertex(40);
  ft_hp(3, 2, f, 0, 100, &trace);
  ASSERT_FALSE(trace.empty());
  EXPECT_EQ(trace.front().level, 2);
  EXPECT_EQ(trace.front().label.rfind("HP 2.", 0), 0u);
  const DCell d(3, 2);
  ASSERT_EQ(trace.front().chosen.size(), 4u);
  EXPECT_EQ(trace.front().chosen[2], d.level_neighbor(trace.front().chosen[0], 2));

  trace.clear();
  ft_hp(3, 2, f, 0, 5, &trace);
  EXPECT_EQ(trace.front().label.rfind("HP 1.", 0), 0u);

  trace.clear();
  FaultSet two;
  two.add_vertex(1);
  two.add_vertex(2);
  ft_hc(3, 2, two, &trace);
  EXPECT_EQ(trace.front().label, "HC 3");

  trace.clear();
  FaultSet rigid;
  rigid.add_vertex(1);
  ft_hc(3, 2, rigid, &trace);
  EXPECT_EQ(trace.front().label, "HC 2");
}

}  // namespace
}  // namespace dcell
