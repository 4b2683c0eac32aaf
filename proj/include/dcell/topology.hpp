#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dcell/error.hpp"

namespace dcell {

// A server is identified by its uid_k inside the enclosing DCell_k. Every
// DCell_j sub-block occupies a contiguous uid range of length t_j.
using Vertex = std::uint64_t;

inline constexpr std::uint64_t kDefaultVertexCap = 100'000;

struct Params {
  int n = 2;  // switch port count
  int k = 0;  // level

  void validate() const;
  friend bool operator==(const Params&, const Params&) = default;
};

// Number of servers t_k, with t_0 = n and t_k = t_{k-1} (t_{k-1} + 1).
// Throws kArithmeticOverflow when the count does not fit in 64 bits.
std::uint64_t t(int n, int k);

// (alpha_k, ..., alpha_1, alpha_0), most significant digit first.
struct VertexLabel {
  std::vector<std::uint64_t> digits;

  int level() const { return static_cast<int>(digits.size()) - 1; }
  std::string to_string(char sep = '.') const;
  friend bool operator==(const VertexLabel&, const VertexLabel&) = default;
  friend auto operator<=>(const VertexLabel&, const VertexLabel&) = default;
};

struct Edge {
  Vertex a = 0;  // a < b
  Vertex b = 0;
  int level = 0;

  static Edge make(Vertex x, Vertex y, int level);
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Position of a vertex relative to one level-j split: which D_{j-1} copy it
// is in, and its uid_{j-1} inside that copy.
struct CopyVertex {
  std::uint64_t copy = 0;
  std::uint64_t uid = 0;
  friend bool operator==(const CopyVertex&, const CopyVertex&) = default;
};

// Assigns the single level-j edge between copies a < b of D_{j-1}.
class ConnectionRule {
 public:
  virtual ~ConnectionRule() = default;

  // Endpoints (uid in copy a, uid in copy b) of the level-j edge, a < b.
  virtual std::pair<std::uint64_t, std::uint64_t> link(
      int level, std::uint64_t a, std::uint64_t b,
      std::uint64_t t_prev) const = 0;

  // The other endpoint of the level-j edge at (copy, uid).
  virtual CopyVertex partner(int level, CopyVertex at,
                             std::uint64_t t_prev) const = 0;
};

// uid b-1 of copy a is joined to uid a of copy b.
class DefaultRule final : public ConnectionRule {
 public:
  std::pair<std::uint64_t, std::uint64_t> link(
      int level, std::uint64_t a, std::uint64_t b,
      std::uint64_t t_prev) const override;
  CopyVertex partner(int level, CopyVertex at,
                     std::uint64_t t_prev) const override;
};

const ConnectionRule& default_rule();

// A user supplied rule, tabulated for one (n, k) and checked so that every
// vertex carries exactly one level-j edge for each 1 <= j <= k.
class TabulatedRule final : public ConnectionRule {
 public:
  using LinkFn = std::function<std::pair<std::uint64_t, std::uint64_t>(
      int level, std::uint64_t a, std::uint64_t b, std::uint64_t t_prev)>;

  TabulatedRule(int n, int k, LinkFn fn);

  std::pair<std::uint64_t, std::uint64_t> link(
      int level, std::uint64_t a, std::uint64_t b,
      std::uint64_t t_prev) const override;
  CopyVertex partner(int level, CopyVertex at,
                     std::uint64_t t_prev) const override;

 private:
  LinkFn fn_;
  // partners_[level][copy * t_prev + uid]
  std::vector<std::vector<CopyVertex>> partners_;
};

// Arithmetic over the labels and uids of one DCell_k.
class DCell {
 public:
  DCell(int n, int k, const ConnectionRule& rule = default_rule());
  explicit DCell(Params p, const ConnectionRule& rule = default_rule())
      : DCell(p.n, p.k, rule) {}

  int n() const { return n_; }
  int k() const { return k_; }
  Params params() const { return {n_, k_}; }
  const ConnectionRule& rule() const { return *rule_; }

  // t_j for 0 <= j <= k.
  std::uint64_t t(int j) const { return sizes_.at(static_cast<size_t>(j)); }
  std::uint64_t size() const { return sizes_.back(); }
  bool contains(Vertex x) const { return x < size(); }

  VertexLabel label(Vertex x) const;
  Vertex vertex(const VertexLabel& label) const;

  // alpha_j of x.
  std::uint64_t digit(Vertex x, int j) const;
  // First uid of the D_j block containing x.
  Vertex block_base(Vertex x, int j) const { return x - x % t(j); }

  // N(x, j): the unique level-j neighbor, 1 <= j <= k.
  Vertex level_neighbor(Vertex x, int j) const;
  std::vector<Vertex> level0_neighbors(Vertex x) const;

  // The level-j edge between copies a != b of the D_j block starting at base.
  Edge level_edge(Vertex base, int j, std::uint64_t a, std::uint64_t b) const;

  // Level of the edge (x, y), or -1 when they are not adjacent.
  int edge_level(Vertex x, Vertex y) const;
  bool adjacent(Vertex x, Vertex y) const { return edge_level(x, y) >= 0; }

  int degree() const { return n_ - 1 + k_; }

 private:
  int n_;
  int k_;
  const ConnectionRule* rule_;
  std::vector<std::uint64_t> sizes_;
};

// uid_j of the last j + 1 digits of `digits`.
std::uint64_t uid(std::span<const std::uint64_t> digits, int j, int n);
std::uint64_t uid(const VertexLabel& label, int j, int n);

// The label prefix + suffix whose suffix has uid_j equal to u.
VertexLabel label_from_uid(std::span<const std::uint64_t> prefix,
                           std::uint64_t u, int j, int n);

VertexLabel level_neighbor(const VertexLabel& x, int j, int n,
                           const ConnectionRule& rule = default_rule());
std::vector<VertexLabel> level0_neighbors(const VertexLabel& x, int n);

// Level-k edge between copies a < b of a top-level DCell_k, as labels.
std::pair<VertexLabel, VertexLabel> level_edge(
    int n, int k, std::uint64_t a, std::uint64_t b,
    const ConnectionRule& rule = default_rule());

// Explicit graph. Vertices are kept sorted by uid; a partial DCell uses the
// same type with a subset of the uids.
class Topology {
 public:
  struct Neighbor {
    Vertex v;
    int level;
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
  };

  Topology() = default;
  Topology(Params params, std::vector<Vertex> vertices);

  Params params() const { return params_; }
  size_t vertex_count() const { return vertices_.size(); }
  size_t edge_count() const { return edge_count_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }

  bool contains(Vertex x) const { return index_.contains(x); }
  size_t index_of(Vertex x) const;
  const std::vector<Neighbor>& neighbors(Vertex x) const;
  bool adjacent(Vertex x, Vertex y) const;
  int edge_level(Vertex x, Vertex y) const;

  // Each edge once, sorted.
  std::vector<Edge> edges() const;

  void add_edge(Vertex x, Vertex y, int level);

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  Params params_;
  std::vector<Vertex> vertices_;
  std::unordered_map<Vertex, size_t> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  size_t edge_count_ = 0;
};

Topology build_graph(Params params, const ConnectionRule& rule = default_rule(),
                     std::uint64_t max_vertices = kDefaultVertexCap);

}  // namespace dcell
