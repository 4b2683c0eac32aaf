#include "dcell/partial.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "dcell/closure.hpp"
#include "dcell/error.hpp"

namespace dcell {

Listing::Listing(std::vector<std::uint64_t> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) fail(ErrorCode::kInvalidArgument, "empty shape");
  for (std::uint64_t a : shape_) {
    if (a == 0) fail(ErrorCode::kInvalidArgument, "shape bounds must be positive");
    if (a < shape_.back()) {
      fail(ErrorCode::kInvalidArgument, "shape needs a_2 <= a_i for every i");
    }
    if (__builtin_mul_overflow(capacity_, a, &capacity_)) {
      fail(ErrorCode::kArithmeticOverflow, "shape too large");
    }
  }
}

Listing Listing::for_dcell(int n, int k) {
  Params{n, k}.validate();
  if (k < 2) fail(ErrorCode::kInvalidLevel, "partial DCells need k >= 2");
  std::vector<std::uint64_t> shape;
  for (int i = k; i >= 2; --i) shape.push_back(t(n, i - 1) + 1);
  return Listing(std::move(shape));
}

Listing Listing::after(std::vector<std::uint64_t> shape, std::uint64_t d) {
  Listing out(std::move(shape));
  if (d > out.capacity()) {
    fail(ErrorCode::kExhausted, "d = " + std::to_string(d) + " exceeds |A| = " +
                                    std::to_string(out.capacity()));
  }
  for (std::uint64_t i = 0; i < d; ++i) out.next();
  return out;
}

std::uint64_t Listing::encode(const Tuple& a) const {
  if (a.size() != shape_.size()) {
    fail(ErrorCode::kInvalidArgument, "tuple has the wrong length");
  }
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] >= shape_[i]) fail(ErrorCode::kOutOfRange, "tuple digit out of range");
    code = code * shape_[i] + a[i];
  }
  return code;
}

Tuple Listing::decode(std::uint64_t code) const {
  Tuple a(shape_.size());
  for (std::size_t i = shape_.size(); i-- > 0;) {
    a[i] = code % shape_[i];
    code /= shape_[i];
  }
  return a;
}

void Listing::check_prefix(const Prefix& p) const {
  if (p.size() > shape_.size()) fail(ErrorCode::kOutOfRange, "prefix too long");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= shape_[i]) fail(ErrorCode::kOutOfRange, "prefix digit out of range");
  }
}

bool Listing::listed(const Tuple& a) const { return phi_.contains(encode(a)); }

void Listing::set(const Tuple& a) {
  if (phi_.insert(encode(a)).second) order_.push_back(a);
}

Tuple Listing::next() {
  if (full()) fail(ErrorCode::kExhausted, "listing is full");
  const std::uint64_t a2 = shape_.back();
  Prefix p;
  for (std::size_t depth = 0;; ++depth) {
    const std::uint64_t bound = shape_[depth];
    auto child = [&](std::uint64_t i) {
      Prefix c = p;
      c.push_back(i);
      return c;
    };
    std::uint64_t m = 0;
    while (m < bound && !is_empty_prefix(*this, child(m))) ++m;
    if (depth + 1 == shape_.size()) {
      if (m == bound) fail(ErrorCode::kInvariantViolation, "listing is not canonical");
      p.push_back(m);
      set(p);
      return p;
    }
    if (m >= a2) {
      m = 0;
      while (m < bound && is_full_prefix(*this, child(m))) ++m;
      if (m == bound) fail(ErrorCode::kInvariantViolation, "listing is not canonical");
    }
    p.push_back(m);
  }
}

bool is_empty_prefix(const Listing& listing, const Prefix& p) {
  listing.check_prefix(p);
  Tuple a = p;
  a.resize(listing.digits(), 0);
  return !listing.listed(a);
}

bool is_full_prefix(const Listing& listing, const Prefix& p) {
  listing.check_prefix(p);
  Tuple a = p;
  for (std::size_t i = p.size(); i < listing.digits(); ++i) {
    a.push_back(listing.shape()[i] - 1);
  }
  return listing.listed(a);
}

KcReport is_kc_connected(const Listing& listing, std::uint64_t c) {
  if (c == 0 || c > listing.shape().back()) {
    fail(ErrorCode::kInvalidArgument, "c must satisfy 0 < c <= a_2");
  }
  // Non-empty prefixes, read off the listed tuples rather than through the
  // one-lookup rule, so hand-built listings are judged correctly too.
  std::set<Prefix> nonempty;
  for (const Tuple& a : listing.order()) {
    for (std::size_t len = 0; len <= a.size(); ++len) {
      nonempty.emplace(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(len));
    }
  }
  KcReport report;
  for (const Prefix& p : nonempty) {
    if (p.size() == listing.digits()) continue;
    const std::uint64_t bound = listing.shape()[p.size()];
    if (bound <= 1 || c - 1 >= bound) continue;
    Prefix one = p;
    one.push_back(1);
    Prefix last = p;
    last.push_back(c - 1);
    if (nonempty.contains(one) && !nonempty.contains(last)) {
      report.connected = false;
      report.witness = p;
      return report;
    }
  }
  return report;
}

std::uint64_t make_kc_connected(Listing& listing, std::uint64_t c) {
  std::uint64_t calls = 0;
  while (!is_kc_connected(listing, c)) {
    if (listing.full()) {
      fail(ErrorCode::kExhausted, "listing filled up before becoming K_c-connected");
    }
    listing.next();
    ++calls;
  }
  return calls;
}

namespace {

// First uid of the unit or block with the given prefix.
Vertex prefix_base(const DCell& d, const Prefix& p) {
  Vertex base = 0;
  const int k = d.k();
  for (std::size_t i = 0; i < p.size(); ++i) {
    base += p[i] * d.t(k - 1 - static_cast<int>(i));
  }
  return base;
}

}  // namespace

PartialTopology materialize_partial(const Listing& listing, int n, int k,
                                    std::uint64_t max_vertices) {
  const Listing shape = Listing::for_dcell(n, k);
  if (listing.shape() != shape.shape()) {
    fail(ErrorCode::kInvalidArgument, "listing shape does not match DCell(n, k)");
  }
  const DCell d(n, k);
  const std::uint64_t t1 = d.t(1);
  if (listing.count() > max_vertices / t1) {
    fail(ErrorCode::kResourceLimit,
         std::to_string(listing.count() * t1) + " vertices exceed the cap " +
             std::to_string(max_vertices));
  }
  std::vector<Vertex> vertices;
  vertices.reserve(listing.count() * t1);
  for (const Tuple& a : listing.order()) {
    const Vertex base = prefix_base(d, a);
    for (Vertex x = base; x < base + t1; ++x) vertices.push_back(x);
  }
  PartialTopology out{listing, n, k, Topology({n, k}, std::move(vertices))};
  Topology& g = out.graph;
  for (Vertex x : std::vector<Vertex>(g.vertices())) {
    for (Vertex y : d.level0_neighbors(x)) {
      if (x < y) g.add_edge(x, y, 0);
    }
    for (int j = 1; j <= k; ++j) {
      const Vertex y = d.level_neighbor(x, j);
      if (x < y && g.contains(y)) g.add_edge(x, y, j);
    }
  }
  return out;
}

CopyConnectivityReport check_copy_connectivity(const PartialTopology& partial,
                                               const Prefix& p) {
  const Listing& listing = partial.listing;
  listing.check_prefix(p);
  if (p.size() + 1 > listing.digits()) {
    fail(ErrorCode::kInvalidArgument, "prefix must leave at least one digit free");
  }
  const DCell d(partial.n, partial.k);
  CopyConnectivityReport report;
  report.level = partial.k - 1 - static_cast<int>(p.size());
  const int j = report.level + 1;
  const Vertex base = prefix_base(d, p);
  const std::uint64_t tp = d.t(report.level);
  const Topology& g = partial.graph;
  for (std::uint64_t i = 0; i <= tp; ++i) {
    if (g.contains(base + i * tp)) report.m = static_cast<std::int64_t>(i);
  }
  if (report.m <= 0) return report;
  const auto m = static_cast<std::uint64_t>(report.m);
  auto linked = [&](std::uint64_t a, std::uint64_t b) {
    const Edge e = d.level_edge(base, j, a, b);
    return g.contains(e.a) && g.contains(e.b);
  };
  for (std::uint64_t a = 0; a < m; ++a) {
    for (std::uint64_t b = a + 1; b < m; ++b) {
      if (!linked(a, b)) report.unlinked.emplace_back(a, b);
    }
    if (linked(a, m)) ++report.last_links;
  }
  report.last_required = std::min(m, d.t(1));
  report.ok = report.unlinked.empty() && report.last_links >= report.last_required;
  return report;
}

int partial_omega(int n, int k, std::uint64_t c) {
  Params{n, k}.validate();
  const std::uint64_t t1 = t(n, 1);
  auto refuse = [&](const std::string& why) {
    fail(ErrorCode::kUnsupportedParameters,
         "partial_hp needs " + why + " (n=" + std::to_string(n) +
             ", k=" + std::to_string(k) + ", c=" + std::to_string(c) + ")");
  };
  if (k < 2) refuse("k >= 2");
  if (n < 4) refuse("n >= 4");
  if (c < static_cast<std::uint64_t>(n) + 1 || c > t1 + 1) {
    refuse("n <= c - 1 < t_1 + 1");
  }
  if (c < t1 + 1) {
    if (k + 1 > n) refuse("k + 1 <= n when c < t_1 + 1");
    return 0;
  }
  if (static_cast<std::uint64_t>(k) + 1 > t1) refuse("k + 1 <= t_1");
  return 1;
}

namespace {

// Positions on p of the vertices in [lo, hi), in path order.
std::vector<std::size_t> positions_in(const Path& p, Vertex lo, Vertex hi) {
  std::vector<std::size_t> q;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= lo && p[i] < hi) q.push_back(i);
  }
  return q;
}

// Index into q where its final run of consecutive positions starts.
std::size_t final_run_start(const std::vector<std::size_t>& q) {
  std::size_t s = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] != q[i - 1] + 1) s = i;
  }
  return s;
}

class PartialBuilder {
 public:
  PartialBuilder(const PartialTopology& partial, int omega,
                 std::vector<PartialStep>* steps)
      : g_(partial.graph), d_(partial.n, partial.k), omega_(omega), steps_(steps) {}

  Path build(int j, Vertex base, Vertex u, Vertex v) {
    if (j == 1) return unit_path(base, u, v);
    const std::uint64_t tp = d_.t(j - 1);
    std::vector<std::uint64_t> kids;
    std::vector<int> node(tp + 1, -1);
    for (std::uint64_t i = 0; i <= tp; ++i) {
      if (g_.contains(base + i * tp)) {
        node[i] = static_cast<int>(kids.size());
        kids.push_back(i);
      }
    }
    const std::uint64_t ca = (u - base) / tp;
    const std::uint64_t cb = (v - base) / tp;
    if (ca == cb) return same_child(j, base, u, v, kids, node);
    return split(j, base, u, v, kids, node);
  }

 private:
  // Path through the clique [bb, bb + n) from e to f, leaving out `skip`.
  void clique_path(Path& out, Vertex bb, Vertex e, Vertex f,
                   std::optional<Vertex> skip = std::nullopt) const {
    out.push_back(e);
    for (Vertex x = bb; x < bb + static_cast<Vertex>(d_.n()); ++x) {
      if (x != e && x != f && x != skip) out.push_back(x);
    }
    out.push_back(f);
  }

  // Hamiltonian path of one DCell_1 that keeps every K_n block contiguous,
  // except the block of u and v when they share one: then u leaves first
  // and the rest of its block closes the path.
  Path unit_path(Vertex base, Vertex u, Vertex v) const {
    const std::uint64_t blocks = static_cast<std::uint64_t>(d_.n()) + 1;
    const std::uint64_t bu = copy_of(u, base, 1);
    const std::uint64_t bv = copy_of(v, base, 1);
    const std::uint64_t gu = copy_of(d_.level_neighbor(u, 1), base, 1);
    const std::uint64_t gv = copy_of(d_.level_neighbor(v, 1), base, 1);
    std::vector<std::uint64_t> mid;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      if (b != bu && b != bv && (bu != bv || b != gu)) mid.push_back(b);
    }
    // Rotate so the first middle block avoids `head` and the last avoids `tail`.
    auto arrange = [&](std::optional<std::uint64_t> head, std::uint64_t tail) {
      for (std::size_t r = 0; r < mid.size(); ++r) {
        if (mid.front() != head && mid.back() != tail) return;
        std::rotate(mid.begin(), mid.begin() + 1, mid.end());
      }
      fail(ErrorCode::kInvariantViolation, "no block order for the DCell_1 path");
    };
    auto port1 = [&](std::uint64_t in, std::uint64_t other) {
      return port(base, 1, in, other);
    };
    auto walk = [&](Path& out, const std::vector<std::uint64_t>& seq, Vertex entry,
                    Vertex exit) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const Vertex e = i == 0 ? entry : port1(seq[i], seq[i - 1]);
        const Vertex f = i + 1 == seq.size() ? exit : port1(seq[i], seq[i + 1]);
        clique_path(out, base + seq[i] * d_.n(), e, f);
      }
    };
    Path out;
    if (bu != bv) {
      if (!mid.empty()) arrange(gu, gv);
      std::vector<std::uint64_t> seq{bu};
      seq.insert(seq.end(), mid.begin(), mid.end());
      seq.push_back(bv);
      walk(out, seq, u, v);
      return out;
    }
    arrange(std::nullopt, gv);
    std::vector<std::uint64_t> seq{gu};
    seq.insert(seq.end(), mid.begin(), mid.end());
    out.push_back(u);
    const Vertex w = port1(bu, seq.back());
    walk(out, seq, d_.level_neighbor(u, 1), port1(seq.back(), bu));
    clique_path(out, base + bu * d_.n(), w, v, u);
    return out;
  }

  std::uint64_t copy_of(Vertex x, Vertex base, int j) const {
    return (x - base) / d_.t(j - 1);
  }

  // Endpoint inside copy `in` of the level-j link between copies in, other.
  Vertex port(Vertex base, int j, std::uint64_t in, std::uint64_t other) const {
    const Edge e = d_.level_edge(base, j, in, other);
    return copy_of(e.a, base, j) == in ? e.a : e.b;
  }

  bool linked(Vertex base, int j, std::uint64_t a, std::uint64_t b) const {
    const Edge e = d_.level_edge(base, j, a, b);
    return g_.contains(e.a) && g_.contains(e.b);
  }

  // Level-j links among the present children, minus those touching `skip`.
  SimpleGraph copy_graph(Vertex base, int j, const std::vector<std::uint64_t>& kids,
                         int extra, std::optional<std::uint64_t> skip) const {
    SimpleGraph h(static_cast<int>(kids.size()) + extra);
    for (std::size_t a = 0; a < kids.size(); ++a) {
      if (skip && kids[a] == *skip) continue;
      for (std::size_t b = a + 1; b < kids.size(); ++b) {
        if (skip && kids[b] == *skip) continue;
        if (linked(base, j, kids[a], kids[b])) {
          h.add_edge(static_cast<int>(a), static_cast<int>(b));
        }
      }
    }
    return h;
  }

  // Rotates the cycle to start at `first` and continue with `second`.
  static std::vector<int> orient(std::vector<int> cycle, int first, int second) {
    auto it = std::find(cycle.begin(), cycle.end(), first);
    std::rotate(cycle.begin(), it, cycle.end());
    if (cycle[1] != second) std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
  }

  // Visits children seq in order, entering the first at `entry` and leaving
  // the last at `exit`.
  void traverse(Path& out, int j, Vertex base, const std::vector<std::uint64_t>& seq,
                Vertex entry, Vertex exit) {
    const std::uint64_t tp = d_.t(j - 1);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const Vertex e = i == 0 ? entry : port(base, j, seq[i], seq[i - 1]);
      const Vertex f = i + 1 == seq.size() ? exit : port(base, j, seq[i], seq[i + 1]);
      const Path p = build(j - 1, base + seq[i] * tp, e, f);
      out.insert(out.end(), p.begin(), p.end());
    }
  }

  Path same_child(int j, Vertex base, Vertex u, Vertex v,
                  const std::vector<std::uint64_t>& kids, const std::vector<int>& node) {
    const std::uint64_t tp = d_.t(j - 1);
    const std::uint64_t ca = copy_of(u, base, j);
    const Vertex child = base + ca * tp;
    Path inner = build(j - 1, child, u, v);
    if (kids.size() == 1) return inner;

    // Candidate cut positions, relative to the child's first DCell_omega unit:
    // a unit pair before its final consecutive run, then the first pair of
    // that run while the run start stays below j, then pairs that are not
    // both in the unit, then everything else.
    const Vertex unit_hi = child + d_.t(omega_);
    const std::vector<std::size_t> q = positions_in(inner, child, unit_hi);
    const std::size_t s = final_run_start(q);
    auto in_unit = [&](std::size_t i) {
      return inner[i] >= child && inner[i] < unit_hi && inner[i + 1] >= child &&
             inner[i + 1] < unit_hi;
    };
    std::vector<std::size_t> cuts;
    for (std::size_t r = 0; r < s; ++r) {
      if (q[r + 1] == q[r] + 1) cuts.push_back(q[r]);
    }
    if (s + 1 < q.size() && s + 1 <= static_cast<std::size_t>(j - 1)) {
      cuts.push_back(q[s]);
    }
    for (std::size_t i = 0; i + 1 < inner.size(); ++i) {
      if (!in_unit(i)) cuts.push_back(i);
    }
    for (std::size_t i = 0; i + 1 < inner.size(); ++i) cuts.push_back(i);

    std::vector<char> tried(inner.size(), 0);
    for (std::size_t i : cuts) {
      if (tried[i]) continue;
      tried[i] = 1;
      const Vertex x = inner[i];
      const Vertex y = inner[i + 1];
      const Vertex nx = d_.level_neighbor(x, j);
      const Vertex ny = d_.level_neighbor(y, j);
      if (!g_.contains(nx) || !g_.contains(ny)) continue;
      const int a = node[ca];
      const int cx = node[copy_of(nx, base, j)];
      const int cy = node[copy_of(ny, base, j)];
      SimpleGraph h = copy_graph(base, j, kids, 0, ca);
      h.add_edge(a, cx);
      h.add_edge(a, cy);
      const auto cycle = hc_via_closure(h);
      if (!cycle) continue;
      const std::vector<int> c = orient(*cycle, a, cx);
      std::vector<std::uint64_t> seq;
      for (std::size_t r = 1; r < c.size(); ++r) seq.push_back(kids[c[r]]);
      Path out(inner.begin(), inner.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      traverse(out, j, base, seq, nx, ny);
      out.insert(out.end(), inner.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 inner.end());
      if (steps_) {
        steps_->push_back({j, true, x, y, in_unit(i)});
      }
      return out;
    }
    fail(ErrorCode::kInvariantViolation,
         "no level-" + std::to_string(j) + " cycle through the copy of u and v");
  }

  Path split(int j, Vertex base, Vertex u, Vertex v,
             const std::vector<std::uint64_t>& kids, const std::vector<int>& node) {
    const std::uint64_t ca = copy_of(u, base, j);
    const std::uint64_t cb = copy_of(v, base, j);
    const int size = static_cast<int>(kids.size());
    SimpleGraph h = copy_graph(base, j, kids, 1, std::nullopt);
    const Vertex nu = d_.level_neighbor(u, j);
    const Vertex nv = d_.level_neighbor(v, j);
    if (g_.contains(nu)) h.remove_edge(node[ca], node[copy_of(nu, base, j)]);
    if (g_.contains(nv)) h.remove_edge(node[cb], node[copy_of(nv, base, j)]);
    h.add_edge(size, node[ca]);
    h.add_edge(size, node[cb]);
    const auto cycle = hc_via_closure(h);
    if (!cycle) {
      fail(ErrorCode::kInvariantViolation,
           "no level-" + std::to_string(j) + " path between the copies of u and v");
    }
    const std::vector<int> c = orient(*cycle, size, node[ca]);
    std::vector<std::uint64_t> seq;
    for (std::size_t r = 1; r < c.size(); ++r) seq.push_back(kids[c[r]]);
    if (steps_) steps_->push_back({j, false, u, v, false});
    Path out;
    traverse(out, j, base, seq, u, v);
    return out;
  }

  const Topology& g_;
  DCell d_;
  int omega_;
  std::vector<PartialStep>* steps_;
};

}  // namespace

Path partial_hp(const PartialTopology& partial, std::uint64_t c, Vertex u,
                Vertex v, std::vector<PartialStep>* steps) {
  const int omega = partial_omega(partial.n, partial.k, c);
  if (const KcReport kc = is_kc_connected(partial.listing, c); !kc) {
    fail(ErrorCode::kUnsupportedParameters,
         "listing is not K_" + std::to_string(c) + "-connected");
  }
  if (u == v) fail(ErrorCode::kInvalidArgument, "u and v must differ");
  if (!partial.graph.contains(u) || !partial.graph.contains(v)) {
    fail(ErrorCode::kOutOfRange, "u or v is not in the partial DCell");
  }
  PartialBuilder builder(partial, omega, steps);
  Path p = builder.build(partial.k, 0, u, v);
  if (const PathCheck check = verify_path(partial.graph, p, u, v, true); !check) {
    fail(ErrorCode::kInvariantViolation, "partial_hp produced a bad path: " + check.reason);
  }
  return p;
}

std::size_t nonconsecutive_prefix(const Path& p, int n, int omega) {
  return final_run_start(positions_in(p, 0, t(n, omega)));
}

}  // namespace dcell
