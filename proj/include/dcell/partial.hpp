#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dcell/hamiltonian.hpp"
#include "dcell/topology.hpp"

namespace dcell {

// (alpha_k, ..., alpha_2): the position of a DCell_1 unit. A prefix is a
// leading part of such a tuple; the empty prefix is the whole DCell.
using Tuple = std::vector<std::uint64_t>;
using Prefix = std::vector<std::uint64_t>;

// Deployment state over A = [a_k] x ... x [a_2].
class Listing {
 public:
  // shape = (a_k, ..., a_2); needs a_2 <= a_i for every i.
  explicit Listing(std::vector<std::uint64_t> shape);
  // Shape of DCell_k units: a_i = t_{i-1} + 1. Needs k >= 2.
  static Listing for_dcell(int n, int k);
  // The listing after d calls to next().
  static Listing after(std::vector<std::uint64_t> shape, std::uint64_t d);

  const std::vector<std::uint64_t>& shape() const { return shape_; }
  std::size_t digits() const { return shape_.size(); }
  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t count() const { return order_.size(); }
  bool full() const { return count() == capacity_; }

  bool listed(const Tuple& a) const;
  // Lists the next tuple of the canonical order and returns it.
  Tuple next();
  // Direct write to the membership table, bypassing next(); for building
  // listings that the canonical order would never produce.
  void set(const Tuple& a);
  // Tuples in the order they were listed.
  const std::vector<Tuple>& order() const { return order_; }

  std::uint64_t encode(const Tuple& a) const;
  Tuple decode(std::uint64_t code) const;
  void check_prefix(const Prefix& p) const;

 private:
  std::vector<std::uint64_t> shape_;
  std::uint64_t capacity_ = 1;
  std::unordered_set<std::uint64_t> phi_;
  std::vector<Tuple> order_;
};

// One lookup each: p is non-empty iff p0...0 is listed, full iff
// p(a_l - 1)...(a_2 - 1) is listed.
bool is_empty_prefix(const Listing& listing, const Prefix& p);
bool is_full_prefix(const Listing& listing, const Prefix& p);

struct KcReport {
  bool connected = true;
  std::optional<Prefix> witness;  // prefix whose child 1 is listed but not child c-1

  explicit operator bool() const { return connected; }
};

KcReport is_kc_connected(const Listing& listing, std::uint64_t c);
// Calls next() until the listing is K_c-connected; returns the call count.
std::uint64_t make_kc_connected(Listing& listing, std::uint64_t c);

struct PartialTopology {
  Listing listing;
  int n = 0;
  int k = 0;
  Topology graph;  // vertices are uid_k of the full DCell_k
};

PartialTopology materialize_partial(const Listing& listing, int n, int k,
                                    std::uint64_t max_vertices = kDefaultVertexCap);

struct CopyConnectivityReport {
  int level = 0;          // level of the child blocks
  std::int64_t m = -1;    // largest non-empty child, -1 when the prefix is empty
  std::vector<std::pair<std::uint64_t, std::uint64_t>> unlinked;  // i < j < m
  std::uint64_t last_links = 0;     // children linked to child m
  std::uint64_t last_required = 0;  // min(m, t_1)
  bool ok = true;
};

// Linkage among the children of prefix p (blocks of level k - 1 - |p|).
CopyConnectivityReport check_copy_connectivity(const PartialTopology& partial,
                                               const Prefix& p);

// Antecedents: 4 <= n <= c - 1 < t_1 + 1 and either
// c < t_1 + 1, k + 1 <= n (omega 0) or c = t_1 + 1, k + 1 <= t_1 (omega 1).
// Returns omega, or throws kUnsupportedParameters.
int partial_omega(int n, int k, std::uint64_t c);

// One stitching decision: at `level`, u and v shared a child (same_child),
// and the inner path was left between x and y.
struct PartialStep {
  int level = 0;
  bool same_child = false;
  Vertex x = 0;
  Vertex y = 0;
  bool in_unit = false;  // x, y both in the child's first DCell_omega
};

// A (u, v)-Hamiltonian path of the partial DCell. Needs a K_c-connected
// listing and the antecedents above.
Path partial_hp(const PartialTopology& partial, std::uint64_t c, Vertex u,
                Vertex v, std::vector<PartialStep>* steps = nullptr);

// Smallest s such that the vertices of the first DCell_omega unit, after
// their first s occurrences on p, sit at consecutive positions of p.
std::size_t nonconsecutive_prefix(const Path& p, int n, int omega);

}  // namespace dcell
