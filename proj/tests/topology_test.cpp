#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <set>

#include "dcell/topology.hpp"

namespace dcell {
namespace {

// Edge set built straight from the recursive definition on digit tuples,
// without going through uids of the library.
std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>>
reference_edges(int n, int k) {
  std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>>
      out;
  // labels[j] = all suffix labels of length j + 1 ordered by their index.
  std::vector<std::vector<std::vector<std::uint64_t>>> labels(k + 1);
  for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(n); ++a) {
    labels[0].push_back({a});
  }
  for (int j = 1; j <= k; ++j) {
    const std::uint64_t copies = labels[j - 1].size() + 1;
    for (std::uint64_t c = 0; c < copies; ++c) {
      for (const auto& s : labels[j - 1]) {
        std::vector<std::uint64_t> l{c};
        l.insert(l.end(), s.begin(), s.end());
        labels[j].push_back(l);
      }
    }
  }
  auto add = [&](std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    if (b < a) std::swap(a, b);
    out.emplace(a, b);
  };
  for (const auto& x : labels[k]) {
    for (std::uint64_t d = 0; d < static_cast<std::uint64_t>(n); ++d) {
      if (d == x.back()) continue;
      auto y = x;
      y.back() = d;
      add(x, y);
    }
  }
  // For each level j and each prefix above it, join copy a's (b-1)-th suffix
  // with copy b's a-th suffix.
  for (int j = 1; j <= k; ++j) {
    const auto& inner = labels[j - 1];
    const std::uint64_t copies = inner.size() + 1;
    std::set<std::vector<std::uint64_t>> prefixes;
    for (const auto& x : labels[k]) {
      prefixes.emplace(x.begin(), x.begin() + (k - j));
    }
    for (const auto& p : prefixes) {
      for (std::uint64_t a = 0; a < copies; ++a) {
        for (std::uint64_t b = a + 1; b < copies; ++b) {
          auto x = p;
          x.push_back(a);
          x.insert(x.end(), inner[b - 1].begin(), inner[b - 1].end());
          auto y = p;
          y.push_back(b);
          y.insert(y.end(), inner[a].begin(), inner[a].end());
          add(x, y);
        }
      }
    }
  }
  return out;
}

TEST(Count, SmallValues) {
  EXPECT_EQ(t(2, 0), 2u);
  EXPECT_EQ(t(2, 1), 6u);
  EXPECT_EQ(t(4, 1), 20u);
  EXPECT_EQ(t(2, 2), 42u);
  EXPECT_EQ(t(3, 1), 12u);
  EXPECT_EQ(t(2, 3), 1806u);
}

TEST(Count, MatchesMaterializedGraph) {
  EXPECT_EQ(build_graph({2, 2}).vertex_count(), t(2, 2));
}

TEST(Count, OverflowIsReported) {
  try {
    t(2, 8);
    FAIL() << "expected overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArithmeticOverflow);
  }
}

TEST(Count, RejectsBadParameters) {
  EXPECT_THROW(t(1, 0), Error);
  EXPECT_THROW(t(2, -1), Error);
}

TEST(Uid, Examples) {
  const std::uint64_t zero[] = {0};
  EXPECT_EQ(uid(zero, 0, 2), 0u);
  const std::uint64_t ten[] = {1, 0};
  EXPECT_EQ(uid(ten, 1, 2), 2u);
  EXPECT_EQ(label_from_uid({}, 0, 0, 3).digits, std::vector<std::uint64_t>{0});
  EXPECT_EQ(label_from_uid({}, 2, 1, 2).digits,
            (std::vector<std::uint64_t>{1, 0}));
}

TEST(Uid, RoundTripOverDCell2) {
  const DCell d(2, 2);
  for (Vertex x = 0; x < d.size(); ++x) {
    const VertexLabel l = label_from_uid({}, x, 2, 2);
    EXPECT_EQ(uid(l, 2, 2), x);
    EXPECT_EQ(d.label(x), l);
    EXPECT_EQ(label_from_uid({}, uid(l, 2, 2), 2, 2), l);
  }
}

TEST(Uid, OutOfRange) {
  EXPECT_THROW(label_from_uid({}, 42, 2, 2), Error);
  const std::uint64_t bad[] = {0, 2};
  EXPECT_THROW(uid(bad, 1, 2), Error);
}

TEST(Neighbor, Examples) {
  const VertexLabel a{{0, 0}};
  const VertexLabel b{{0, 1}};
  EXPECT_EQ(level_neighbor(a, 1, 2).digits, (std::vector<std::uint64_t>{1, 0}));
  EXPECT_EQ(level_neighbor(b, 1, 2).digits, (std::vector<std::uint64_t>{2, 0}));
}

TEST(Neighbor, LevelZeroIsRejected) {
  try {
    level_neighbor(VertexLabel{{0, 0}}, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidLevel);
  }
}

TEST(Neighbor, InvolutionOverDCell2N3) {
  const DCell d(3, 2);
  ASSERT_EQ(d.size(), 156u);
  for (Vertex x = 0; x < d.size(); ++x) {
    for (int j = 1; j <= 2; ++j) {
      const Vertex y = d.level_neighbor(x, j);
      EXPECT_NE(x, y);
      EXPECT_EQ(d.level_neighbor(y, j), x);
      // Same D_j block, different D_{j-1} copy.
      EXPECT_EQ(d.block_base(x, j), d.block_base(y, j));
      EXPECT_NE(d.digit(x, j), d.digit(y, j));
      const VertexLabel ly = level_neighbor(d.label(x), j, 3);
      EXPECT_EQ(d.vertex(ly), y);
    }
  }
}

TEST(Neighbor, LevelZero) {
  EXPECT_EQ(level0_neighbors(VertexLabel{{0, 0}}, 2),
            (std::vector<VertexLabel>{VertexLabel{{0, 1}}}));
  EXPECT_EQ(level0_neighbors(VertexLabel{{2}}, 4),
            (std::vector<VertexLabel>{VertexLabel{{0}}, VertexLabel{{1}},
                                      VertexLabel{{3}}}));
}

TEST(Neighbor, LevelZeroUnionCoversEachEdgeTwice) {
  const DCell d(3, 1);
  std::map<std::pair<Vertex, Vertex>, int> seen;
  for (Vertex x = 0; x < d.size(); ++x) {
    for (Vertex y : d.level0_neighbors(x)) {
      ++seen[{std::min(x, y), std::max(x, y)}];
    }
  }
  EXPECT_EQ(seen.size(), 12u);  // 4 copies of K_3
  for (const auto& [e, count] : seen) EXPECT_EQ(count, 2);
}

TEST(LevelEdge, Examples) {
  auto [a, b] = level_edge(2, 1, 0, 1);
  EXPECT_EQ(a.digits, (std::vector<std::uint64_t>{0, 0}));
  EXPECT_EQ(b.digits, (std::vector<std::uint64_t>{1, 0}));
  auto [c, e] = level_edge(2, 1, 1, 2);
  EXPECT_EQ(c.digits, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_EQ(e.digits, (std::vector<std::uint64_t>{2, 1}));
  EXPECT_THROW(level_edge(2, 1, 1, 1), Error);
}

TEST(LevelEdge, TwentyOneDistinctLevelTwoEdges) {
  const DCell d(2, 2);
  std::set<Edge> edges;
  for (std::uint64_t a = 0; a <= 6; ++a) {
    for (std::uint64_t b = a + 1; b <= 6; ++b) {
      const Edge e = d.level_edge(0, 2, a, b);
      EXPECT_EQ(d.edge_level(e.a, e.b), 2);
      edges.insert(e);
      auto [la, lb] = level_edge(2, 2, a, b);
      EXPECT_EQ(Edge::make(d.vertex(la), d.vertex(lb), 2), e);
    }
  }
  EXPECT_EQ(edges.size(), 21u);
}

TEST(BuildGraph, C6) {
  const Topology g = build_graph({2, 1});
  ASSERT_EQ(g.vertex_count(), 6u);
  EXPECT_EQ(g.edge_count(), 6u);
  for (Vertex x : g.vertices()) EXPECT_EQ(g.neighbors(x).size(), 2u);
  // Connected and 2-regular on 6 vertices means a 6-cycle.
  std::set<Vertex> seen{0};
  std::queue<Vertex> q;
  q.push(0);
  while (!q.empty()) {
    const Vertex x = q.front();
    q.pop();
    for (const auto& nb : g.neighbors(x)) {
      if (seen.insert(nb.v).second) q.push(nb.v);
    }
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(BuildGraph, K3) {
  const Topology g = build_graph({3, 0});
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST(BuildGraph, N3K1) {
  const Topology g = build_graph({3, 1});
  EXPECT_EQ(g.vertex_count(), 12u);
  EXPECT_EQ(g.edge_count(), 18u);
  for (Vertex x : g.vertices()) EXPECT_EQ(g.neighbors(x).size(), 3u);
}

TEST(BuildGraph, MatchesDefinitionOnLabels) {
  for (auto [n, k] : {std::pair{2, 1}, {2, 2}, {3, 1}, {3, 2}, {4, 1}, {2, 3}}) {
    const DCell d(n, k);
    const Topology g = build_graph({n, k});
    std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>>
        got;
    for (const Edge& e : g.edges()) {
      got.emplace(d.label(e.a).digits, d.label(e.b).digits);
    }
    EXPECT_EQ(got, reference_edges(n, k)) << "n=" << n << " k=" << k;
  }
}

TEST(BuildGraph, RegularAndOneEdgePerLevel) {
  for (auto [n, k] : {std::pair{2, 3}, {3, 2}, {4, 2}}) {
    const Topology g = build_graph({n, k});
    EXPECT_EQ(g.vertex_count(), t(n, k));
    EXPECT_EQ(g.edge_count(), t(n, k) * (n - 1 + k) / 2);
    for (Vertex x : g.vertices()) {
      std::vector<int> per_level(k + 1, 0);
      for (const auto& nb : g.neighbors(x)) ++per_level[nb.level];
      EXPECT_EQ(per_level[0], n - 1);
      for (int j = 1; j <= k; ++j) EXPECT_EQ(per_level[j], 1);
    }
  }
}

TEST(BuildGraph, VertexCap) {
  try {
    build_graph({2, 3}, default_rule(), 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResourceLimit);
  }
}

TEST(Rule, TabulatedDefaultMatches) {
  const TabulatedRule rule(3, 2, [](int, std::uint64_t a, std::uint64_t b,
                                    std::uint64_t) {
    return std::pair{b - 1, a};
  });
  EXPECT_EQ(build_graph({3, 2}, rule), build_graph({3, 2}));
}

TEST(Rule, TabulatedRejectsDoubleEdges) {
  EXPECT_THROW(TabulatedRule(2, 1,
                             [](int, std::uint64_t, std::uint64_t,
                                std::uint64_t) {
                               return std::pair<std::uint64_t, std::uint64_t>{
                                   0, 0};
                             }),
               Error);
}

TEST(Rule, AlternativeRuleIsStillRegular) {
  // Reversed roles: uid t-b of copy a meets uid t-1-a of copy b.
  const TabulatedRule rule(3, 1, [](int, std::uint64_t a, std::uint64_t b,
                                    std::uint64_t tp) {
    return std::pair{tp - b, tp - 1 - a};
  });
  const Topology g = build_graph({3, 1}, rule);
  EXPECT_EQ(g.edge_count(), 18u);
  EXPECT_FALSE(g == build_graph({3, 1}));
  for (Vertex x : g.vertices()) EXPECT_EQ(g.neighbors(x).size(), 3u);
}

TEST(DCellArithmetic, EdgeLevel) {
  const DCell d(2, 2);
  EXPECT_EQ(d.edge_level(0, 1), 0);
  EXPECT_EQ(d.edge_level(0, 2), 1);
  EXPECT_EQ(d.edge_level(0, 3), -1);
  EXPECT_EQ(d.edge_level(0, 0), -1);
  const Topology g = build_graph({2, 2});
  for (Vertex x = 0; x < 42; ++x) {
    for (Vertex y = 0; y < 42; ++y) {
      EXPECT_EQ(d.edge_level(x, y), g.edge_level(x, y));
    }
  }
}

}  // namespace
}  // namespace dcell
