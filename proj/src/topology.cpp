#include "dcell/topology.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dcell {

void Params::validate() const {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "n must be >= 2");
  if (k < 0) fail(ErrorCode::kInvalidArgument, "k must be >= 0");
}

std::uint64_t t(int n, int k) {
  Params{n, k}.validate();
  std::uint64_t value = static_cast<std::uint64_t>(n);
  for (int j = 1; j <= k; ++j) {
    if (value > std::numeric_limits<std::uint64_t>::max() / (value + 1)) {
      fail(ErrorCode::kArithmeticOverflow,
           "t_k overflows 64 bits for n=" + std::to_string(n) +
               " k=" + std::to_string(k));
    }
    value *= value + 1;
  }
  return value;
}

std::string VertexLabel::to_string(char sep) const {
  std::ostringstream os;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i) os << sep;
    os << digits[i];
  }
  return os.str();
}

Edge Edge::make(Vertex x, Vertex y, int level) {
  return x < y ? Edge{x, y, level} : Edge{y, x, level};
}

std::pair<std::uint64_t, std::uint64_t> DefaultRule::link(
    int /*level*/, std::uint64_t a, std::uint64_t b,
    std::uint64_t /*t_prev*/) const {
  return {b - 1, a};
}

CopyVertex DefaultRule::partner(int /*level*/, CopyVertex at,
                                std::uint64_t /*t_prev*/) const {
  if (at.uid >= at.copy) return {at.uid + 1, at.copy};
  return {at.uid, at.copy - 1};
}

const ConnectionRule& default_rule() {
  static const DefaultRule rule;
  return rule;
}

TabulatedRule::TabulatedRule(int n, int k, LinkFn fn) : fn_(std::move(fn)) {
  partners_.resize(static_cast<size_t>(k) + 1);
  for (int j = 1; j <= k; ++j) {
    const std::uint64_t prev = t(n, j - 1);
    if (prev > kDefaultVertexCap) {
      fail(ErrorCode::kResourceLimit, "rule table too large");
    }
    const std::uint64_t copies = prev + 1;
    constexpr std::uint64_t kUnset = std::numeric_limits<std::uint64_t>::max();
    std::vector<CopyVertex> table(copies * prev, CopyVertex{kUnset, kUnset});
    for (std::uint64_t a = 0; a < copies; ++a) {
      for (std::uint64_t b = a + 1; b < copies; ++b) {
        auto [ua, ub] = fn_(j, a, b, prev);
        if (ua >= prev || ub >= prev) {
          fail(ErrorCode::kInvalidArgument,
               "connection rule returned a uid out of range at level " +
                   std::to_string(j));
        }
        auto& sa = table[a * prev + ua];
        auto& sb = table[b * prev + ub];
        if (sa.copy != kUnset || sb.copy != kUnset) {
          fail(ErrorCode::kInvalidArgument,
               "connection rule gives a vertex two level-" +
                   std::to_string(j) + " edges");
        }
        sa = {b, ub};
        sb = {a, ua};
      }
    }
    // Pigeonhole: copies*prev slots and prev*(prev+1)/2 edges fill all of
    // them exactly when no slot was assigned twice.
    partners_[static_cast<size_t>(j)] = std::move(table);
  }
}

std::pair<std::uint64_t, std::uint64_t> TabulatedRule::link(
    int level, std::uint64_t a, std::uint64_t b, std::uint64_t t_prev) const {
  return fn_(level, a, b, t_prev);
}

CopyVertex TabulatedRule::partner(int level, CopyVertex at,
                                  std::uint64_t t_prev) const {
  return partners_.at(static_cast<size_t>(level)).at(at.copy * t_prev + at.uid);
}

DCell::DCell(int n, int k, const ConnectionRule& rule)
    : n_(n), k_(k), rule_(&rule) {
  Params{n, k}.validate();
  sizes_.reserve(static_cast<size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) sizes_.push_back(dcell::t(n, j));
}

std::uint64_t DCell::digit(Vertex x, int j) const {
  if (j == 0) return x % static_cast<std::uint64_t>(n_);
  return (x % t(j)) / t(j - 1);
}

VertexLabel DCell::label(Vertex x) const {
  if (!contains(x)) fail(ErrorCode::kOutOfRange, "vertex out of range");
  VertexLabel out;
  out.digits.resize(static_cast<size_t>(k_) + 1);
  for (int j = 0; j <= k_; ++j) {
    out.digits[static_cast<size_t>(k_ - j)] = digit(x, j);
  }
  return out;
}

Vertex DCell::vertex(const VertexLabel& label) const {
  if (label.level() != k_) {
    fail(ErrorCode::kInvalidArgument, "label length does not match k");
  }
  return uid(label, k_, n_);
}

Vertex DCell::level_neighbor(Vertex x, int j) const {
  if (j == 0) {
    fail(ErrorCode::kInvalidLevel,
         "level-0 neighbors are plural; use level0_neighbors");
  }
  if (j < 0 || j > k_) fail(ErrorCode::kInvalidLevel, "level out of range");
  const std::uint64_t prev = t(j - 1);
  const Vertex base = block_base(x, j);
  const Vertex local = x - base;
  const CopyVertex other = rule_->partner(j, {local / prev, local % prev}, prev);
  return base + other.copy * prev + other.uid;
}

std::vector<Vertex> DCell::level0_neighbors(Vertex x) const {
  std::vector<Vertex> out;
  const Vertex base = block_base(x, 0);
  for (Vertex y = base; y < base + static_cast<Vertex>(n_); ++y) {
    if (y != x) out.push_back(y);
  }
  return out;
}

Edge DCell::level_edge(Vertex base, int j, std::uint64_t a,
                       std::uint64_t b) const {
  if (j < 1 || j > k_) fail(ErrorCode::kInvalidLevel, "level out of range");
  if (a == b) fail(ErrorCode::kInvalidArgument, "copies must differ");
  if (a > b) std::swap(a, b);
  const std::uint64_t prev = t(j - 1);
  if (b > prev) fail(ErrorCode::kOutOfRange, "copy index out of range");
  auto [ua, ub] = rule_->link(j, a, b, prev);
  return Edge::make(base + a * prev + ua, base + b * prev + ub, j);
}

int DCell::edge_level(Vertex x, Vertex y) const {
  if (x == y || !contains(x) || !contains(y)) return -1;
  int j = 0;
  while (x / t(j) != y / t(j)) ++j;
  if (j == 0) return 0;
  return level_neighbor(x, j) == y ? j : -1;
}

std::uint64_t uid(std::span<const std::uint64_t> digits, int j, int n) {
  if (j < 0 || static_cast<size_t>(j) + 1 > digits.size()) {
    fail(ErrorCode::kInvalidArgument, "label shorter than j + 1 digits");
  }
  const auto suffix = digits.last(static_cast<size_t>(j) + 1);
  if (suffix.back() >= static_cast<std::uint64_t>(n)) {
    fail(ErrorCode::kOutOfRange, "alpha_0 out of range");
  }
  std::uint64_t value = suffix.back();
  for (int l = 1; l <= j; ++l) {
    const std::uint64_t prev = t(n, l - 1);
    const std::uint64_t d = suffix[static_cast<size_t>(j - l)];
    if (d > prev) fail(ErrorCode::kOutOfRange, "digit out of range");
    value += d * prev;
  }
  return value;
}

std::uint64_t uid(const VertexLabel& label, int j, int n) {
  return uid(std::span<const std::uint64_t>(label.digits), j, n);
}

VertexLabel label_from_uid(std::span<const std::uint64_t> prefix,
                           std::uint64_t u, int j, int n) {
  if (j < 0) fail(ErrorCode::kInvalidLevel, "negative level");
  if (u >= t(n, j)) fail(ErrorCode::kOutOfRange, "uid out of range");
  VertexLabel out;
  out.digits.assign(prefix.begin(), prefix.end());
  std::vector<std::uint64_t> suffix(static_cast<size_t>(j) + 1);
  for (int l = j; l >= 1; --l) {
    const std::uint64_t prev = t(n, l - 1);
    suffix[static_cast<size_t>(j - l)] = u / prev;
    u %= prev;
  }
  suffix.back() = u;
  out.digits.insert(out.digits.end(), suffix.begin(), suffix.end());
  return out;
}

VertexLabel level_neighbor(const VertexLabel& x, int j, int n,
                           const ConnectionRule& rule) {
  const int k = x.level();
  if (j == 0) {
    fail(ErrorCode::kInvalidLevel,
         "level-0 neighbors are plural; use level0_neighbors");
  }
  if (j < 0 || j > k) fail(ErrorCode::kInvalidLevel, "level out of range");
  const std::uint64_t prev = t(n, j - 1);
  const std::uint64_t copy = x.digits[static_cast<size_t>(k - j)];
  const std::uint64_t inner = uid(x, j - 1, n);
  const CopyVertex other = rule.partner(j, {copy, inner}, prev);
  std::vector<std::uint64_t> prefix(x.digits.begin(),
                                    x.digits.begin() + (k - j));
  prefix.push_back(other.copy);
  return label_from_uid(prefix, other.uid, j - 1, n);
}

std::vector<VertexLabel> level0_neighbors(const VertexLabel& x, int n) {
  std::vector<VertexLabel> out;
  for (std::uint64_t d = 0; d < static_cast<std::uint64_t>(n); ++d) {
    if (d == x.digits.back()) continue;
    VertexLabel y = x;
    y.digits.back() = d;
    out.push_back(std::move(y));
  }
  return out;
}

std::pair<VertexLabel, VertexLabel> level_edge(int n, int k, std::uint64_t a,
                                               std::uint64_t b,
                                               const ConnectionRule& rule) {
  if (a == b) fail(ErrorCode::kInvalidArgument, "copies must differ");
  if (k < 1) fail(ErrorCode::kInvalidLevel, "level must be >= 1");
  if (a > b) std::swap(a, b);
  const std::uint64_t prev = t(n, k - 1);
  if (b > prev) fail(ErrorCode::kOutOfRange, "copy index out of range");
  auto [ua, ub] = rule.link(k, a, b, prev);
  const std::uint64_t pa[] = {a};
  const std::uint64_t pb[] = {b};
  return {label_from_uid(pa, ua, k - 1, n), label_from_uid(pb, ub, k - 1, n)};
}

Topology::Topology(Params params, std::vector<Vertex> vertices)
    : params_(params), vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()),
                  vertices_.end());
  index_.reserve(vertices_.size());
  for (size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], i);
  adjacency_.resize(vertices_.size());
}

size_t Topology::index_of(Vertex x) const {
  auto it = index_.find(x);
  if (it == index_.end()) {
    fail(ErrorCode::kOutOfRange,
         "vertex " + std::to_string(x) + " not in topology");
  }
  return it->second;
}

const std::vector<Topology::Neighbor>& Topology::neighbors(Vertex x) const {
  return adjacency_[index_of(x)];
}

int Topology::edge_level(Vertex x, Vertex y) const {
  auto it = index_.find(x);
  if (it == index_.end() || !contains(y)) return -1;
  const auto& adj = adjacency_[it->second];
  auto pos = std::lower_bound(
      adj.begin(), adj.end(), y,
      [](const Neighbor& nb, Vertex key) { return nb.v < key; });
  if (pos == adj.end() || pos->v != y) return -1;
  return pos->level;
}

bool Topology::adjacent(Vertex x, Vertex y) const {
  return edge_level(x, y) >= 0;
}

void Topology::add_edge(Vertex x, Vertex y, int level) {
  if (x == y) fail(ErrorCode::kInvalidArgument, "self loop");
  auto insert = [](std::vector<Neighbor>& adj, Vertex v, int level) {
    auto pos = std::lower_bound(
        adj.begin(), adj.end(), v,
        [](const Neighbor& nb, Vertex key) { return nb.v < key; });
    if (pos != adj.end() && pos->v == v) return false;
    adj.insert(pos, Neighbor{v, level});
    return true;
  };
  const size_t ix = index_of(x);
  const size_t iy = index_of(y);
  if (insert(adjacency_[ix], y, level)) {
    insert(adjacency_[iy], x, level);
    ++edge_count_;
  }
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (size_t i = 0; i < vertices_.size(); ++i) {
    for (const auto& nb : adjacency_[i]) {
      if (vertices_[i] < nb.v) out.push_back({vertices_[i], nb.v, nb.level});
    }
  }
  return out;
}

bool operator==(const Topology& a, const Topology& b) {
  return a.params_ == b.params_ && a.vertices_ == b.vertices_ &&
         a.adjacency_ == b.adjacency_;
}

Topology build_graph(Params params, const ConnectionRule& rule,
                     std::uint64_t max_vertices) {
  params.validate();
  const std::uint64_t size = t(params.n, params.k);
  if (size > max_vertices) {
    fail(ErrorCode::kResourceLimit,
         "t_k = " + std::to_string(size) + " exceeds the vertex cap " +
             std::to_string(max_vertices));
  }
  const DCell d(params, rule);
  std::vector<Vertex> all(size);
  for (Vertex x = 0; x < size; ++x) all[x] = x;
  Topology g(params, std::move(all));
  for (Vertex x = 0; x < size; ++x) {
    for (Vertex y : d.level0_neighbors(x)) {
      if (x < y) g.add_edge(x, y, 0);
    }
    for (int j = 1; j <= params.k; ++j) {
      const Vertex y = d.level_neighbor(x, j);
      if (x < y) g.add_edge(x, y, j);
    }
  }
  return g;
}

}  // namespace dcell
