#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dcell/oracle.hpp"

namespace dcell {
namespace {

// Plain permutation search used as a second opinion on tiny graphs.
bool brute_force_hp(const SmallGraph& g, int u, int v) {
  std::vector<int> rest;
  for (int x = 0; x < g.size(); ++x) {
    if (g.is_present(x) && x != u && x != v) rest.push_back(x);
  }
  do {
    std::vector<int> seq{u};
    seq.insert(seq.end(), rest.begin(), rest.end());
    seq.push_back(v);
    bool ok = true;
    for (size_t i = 0; ok && i + 1 < seq.size(); ++i) {
      ok = g.adjacent(seq[i], seq[i + 1]);
    }
    if (ok) return true;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return false;
}

SmallGraph c6() { return SmallGraph::from_topology(build_graph({2, 1})); }

TEST(FindHp, CycleAdjacentPair) {
  const SmallGraph g = SmallGraph::cycle(6);
  const Certificate c = find_hp(g, 0, 1);
  ASSERT_TRUE(c.found());
  EXPECT_TRUE(valid_certificate(g, c));
  EXPECT_EQ(c.sequence, (std::vector<int>{0, 5, 4, 3, 2, 1}));
}

TEST(FindHp, CycleAntipodalPair) {
  EXPECT_FALSE(find_hp(SmallGraph::cycle(6), 0, 3).found());
}

TEST(FindHp, CompleteGraph) {
  const SmallGraph k4 = SmallGraph::complete(4);
  for (int u = 0; u < 4; ++u) {
    for (int v = 0; v < 4; ++v) {
      if (u == v) continue;
      const Certificate c = find_hp(k4, u, v);
      EXPECT_TRUE(valid_certificate(k4, c));
      EXPECT_EQ(c.sequence.front(), u);
      EXPECT_EQ(c.sequence.back(), v);
    }
  }
}

TEST(FindHp, RejectsEqualEndpoints) {
  EXPECT_THROW(find_hp(SmallGraph::complete(3), 1, 1), Error);
}

TEST(FindHp, CapIsEnforced) {
  try {
    SmallGraph g(65);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResourceLimit);
  }
}

TEST(FindHp, AgreesWithBruteForceOnDCell1N3) {
  const SmallGraph g = SmallGraph::from_topology(build_graph({3, 1}));
  // Remove a vertex so that some pairs fail.
  const SmallGraph h = apply_faults(g, {{5, -1}});
  for (int u = 0; u < 12; ++u) {
    for (int v = u + 1; v < 12; ++v) {
      if (!h.is_present(u) || !h.is_present(v)) continue;
      if ((u + v) % 5 != 0) continue;  // a spread-out sample keeps this fast
      const bool expected = brute_force_hp(h, u, v);
      const Certificate c = find_hp(h, u, v);
      EXPECT_EQ(c.found(), expected) << u << "," << v;
      if (c.found()) EXPECT_TRUE(valid_certificate(h, c));
      EXPECT_EQ(find_hp(h, v, u).found(), expected);
    }
  }
}

TEST(FindHc, Examples) {
  const SmallGraph g = c6();
  const Certificate c = find_hc(g);
  ASSERT_TRUE(c.found());
  EXPECT_EQ(c.kind, CertKind::kHC);
  EXPECT_TRUE(valid_certificate(g, c));
  EXPECT_FALSE(find_hc(SmallGraph::path(4)).found());
  const SmallGraph d13 = SmallGraph::from_topology(build_graph({3, 1}));
  EXPECT_TRUE(valid_certificate(d13, find_hc(d13)));
}

TEST(Certificate, CheckerRejectsBrokenSequences) {
  const SmallGraph g = SmallGraph::cycle(5);
  Certificate c{CertKind::kHC, {0, 1, 2, 3, 4}};
  EXPECT_TRUE(valid_certificate(g, c));
  c.sequence = {0, 2, 1, 3, 4};
  EXPECT_FALSE(valid_certificate(g, c));
  c.sequence = {0, 1, 2, 3};
  EXPECT_FALSE(valid_certificate(g, c));
  c.sequence = {0, 1, 2, 3, 3};
  EXPECT_FALSE(valid_certificate(g, c));
}

TEST(Connected, C6IsNotHamiltonianConnected) {
  const ConnectivityReport r = is_hamiltonian_connected(c6());
  EXPECT_FALSE(r.connected);
  ASSERT_TRUE(r.witness.has_value());
  auto [a, b] = *r.witness;
  EXPECT_FALSE(find_hp(c6(), a, b).found());
  EXPECT_FALSE(c6().adjacent(a, b));
}

TEST(Connected, DCell1N3) {
  const SmallGraph g = SmallGraph::from_topology(build_graph({3, 1}));
  const ConnectivityReport r = is_hamiltonian_connected(g);
  EXPECT_TRUE(r.connected);
  EXPECT_EQ(r.pairs_checked, 66u);
}

TEST(Connected, DCell2N2) {
  const SmallGraph g = SmallGraph::from_topology(build_graph({2, 2}));
  const ConnectivityReport r = is_hamiltonian_connected(g, 2);
  EXPECT_TRUE(r.connected);
  EXPECT_EQ(r.pairs_checked, 861u);
}

TEST(Symmetry, InvariantUnderRelabeling) {
  const SmallGraph g = apply_faults(
      SmallGraph::from_topology(build_graph({3, 1})), {{0, 1}});
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  SmallGraph h(12);
  for (auto [a, b] : g.edges()) h.add_edge(perm[a], perm[b]);
  for (int u = 0; u < 12; ++u) {
    for (int v = u + 1; v < 12; ++v) {
      EXPECT_EQ(find_hp(g, u, v).found(), find_hp(h, perm[u], perm[v]).found());
    }
  }
}

TEST(FaultCheck, Examples) {
  const SmallGraph k5 = SmallGraph::complete(5);
  const FaultCheckReport r = fault_check(k5, 2, FaultMode::kHamiltonian);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.sets_checked, 1u + 15u + 105u);
  const SmallGraph d22 = SmallGraph::from_topology(build_graph({2, 2}));
  EXPECT_TRUE(fault_check(d22, 1, FaultMode::kHamiltonian).ok);
  const SmallGraph d31 = SmallGraph::from_topology(build_graph({3, 1}));
  EXPECT_TRUE(fault_check(d31, 1, FaultMode::kHamiltonian).ok);
}

TEST(FaultCheck, CounterexampleOnC6) {
  const FaultCheckReport r = fault_check(c6(), 1, FaultMode::kHamiltonian);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.counterexample.size(), 1u);
  EXPECT_FALSE(find_hc(apply_faults(c6(), r.counterexample)).found());
}

TEST(FaultCheck, SamplingIsDeterministic) {
  const SmallGraph k6 = SmallGraph::complete(6);
  const auto a = fault_check(k6, 2, FaultMode::kHamiltonianConnected,
                             Sampling::random(20, 7));
  const auto b = fault_check(k6, 2, FaultMode::kHamiltonianConnected,
                             Sampling::random(20, 7));
  EXPECT_TRUE(a.ok);
  EXPECT_EQ(a.sets_checked, 20u);
  EXPECT_EQ(a.ok, b.ok);
  EXPECT_THROW(fault_check(k6, 1, FaultMode::kHamiltonian,
                           Sampling::random(0, 1)),
               Error);
}

TEST(BaseTable, PathsAreValid) {
  const BaseTable& t = base_table(3, 1);
  EXPECT_EQ(t.pair_count(), 66u);
  const SmallGraph g = SmallGraph::from_topology(build_graph({3, 1}));
  for (Vertex u = 0; u < 12; ++u) {
    for (Vertex v = 0; v < 12; ++v) {
      if (u == v) continue;
      const auto p = t.path(u, v);
      Certificate c{CertKind::kHP, std::vector<int>(p.begin(), p.end())};
      EXPECT_TRUE(valid_certificate(g, c));
      EXPECT_EQ(p.front(), u);
      EXPECT_EQ(p.back(), v);
    }
  }
  EXPECT_THROW(base_table(4, 1), Error);
}

TEST(Certify, FourClaimsPass) {
  const CertificationReport r = certify_base_cases();
  ASSERT_EQ(r.claims.size(), 4u);
  for (const auto& c : r.claims) EXPECT_TRUE(c.passed) << c.claim;
  EXPECT_EQ(r.cached_pairs_n2_k2, 861u);
  EXPECT_EQ(r.cached_pairs_n3_k1, 66u);
  const CertificationReport again = certify_base_cases();
  EXPECT_TRUE(again.from_cache);
  ASSERT_EQ(again.claims.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(again.claims[i].claim, r.claims[i].claim);
    EXPECT_EQ(again.claims[i].passed, r.claims[i].passed);
    EXPECT_EQ(again.claims[i].elapsed_ms, r.claims[i].elapsed_ms);
  }
}

}  // namespace
}  // namespace dcell
