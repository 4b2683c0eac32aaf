#include "dcell/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcell/io.hpp"
#include "parallel.hpp"

namespace dcell {

namespace {

constexpr std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

int lowest(std::uint64_t set) { return std::countr_zero(set); }

// Vertices strictly above v.
constexpr std::uint64_t above(int v) {
  return v >= 63 ? 0 : ~((bit(v + 1)) - 1);
}

void check_vertex(const SmallGraph& g, int v) {
  if (v < 0 || v >= g.size()) {
    fail(ErrorCode::kOutOfRange, "vertex " + std::to_string(v) +
                                     " outside graph of size " +
                                     std::to_string(g.size()));
  }
}

bool connected(const SmallGraph& g, std::uint64_t set) {
  if (set == 0) return true;
  std::uint64_t seen = bit(lowest(set));
  std::uint64_t frontier = seen;
  while (frontier) {
    std::uint64_t grow = 0;
    for (std::uint64_t f = frontier; f; f &= f - 1) {
      grow |= g.neighbors(lowest(f));
    }
    grow &= set & ~seen;
    seen |= grow;
    frontier = grow;
  }
  return seen == set;
}

class PathSearch {
 public:
  PathSearch(const SmallGraph& g, int target) : g_(g), target_(target) {}

  bool run(int cur, std::uint64_t remaining) {
    if (remaining == bit(target_)) {
      if (!g_.adjacent(cur, target_)) return false;
      path.push_back(target_);
      return true;
    }
    const std::uint64_t avail = remaining | bit(cur);
    const std::uint64_t target_nb = g_.neighbors(target_) & avail;
    if (target_nb == 0 || target_nb == bit(cur)) return false;

    // A vertex with exactly two usable neighbors, one being cur, has to be
    // entered from cur right now.
    int forced = -1;
    for (std::uint64_t r = remaining & ~bit(target_); r; r &= r - 1) {
      const int w = lowest(r);
      const std::uint64_t nb = g_.neighbors(w) & avail;
      const int count = std::popcount(nb);
      if (count < 2) return false;
      if (count == 2 && (nb & bit(cur))) {
        if (forced >= 0) return false;
        forced = w;
      }
    }
    if (!connected(g_, avail)) return false;

    std::uint64_t candidates = g_.neighbors(cur) & remaining & ~bit(target_);
    if (forced >= 0) candidates &= bit(forced);
    for (; candidates; candidates &= candidates - 1) {
      const int w = lowest(candidates);
      path.push_back(w);
      if (run(w, remaining & ~bit(w))) return true;
      path.pop_back();
    }
    return false;
  }

  std::vector<int> path;

 private:
  const SmallGraph& g_;
  int target_;
};

// Every unordered pair of present vertices, in lexicographic order.
std::vector<std::pair<int, int>> present_pairs(const SmallGraph& g) {
  std::vector<std::pair<int, int>> pairs;
  for (std::uint64_t a = g.present(); a; a &= a - 1) {
    const int u = lowest(a);
    for (std::uint64_t b = g.present() & above(u); b; b &= b - 1) {
      pairs.emplace_back(u, lowest(b));
    }
  }
  return pairs;
}

std::vector<Certificate> all_pairs(const SmallGraph& g,
                                   const std::vector<std::pair<int, int>>& pairs,
                                   int jobs) {
  std::vector<Certificate> out(pairs.size());
  detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    out[i] = find_hp(g, pairs[i].first, pairs[i].second);
  });
  return out;
}

}  // namespace

SmallGraph::SmallGraph(int size) : size_(size) {
  if (size < 0) fail(ErrorCode::kInvalidArgument, "negative graph size");
  if (size > kOracleCap) {
    fail(ErrorCode::kResourceLimit,
         "graph with " + std::to_string(size) + " vertices exceeds the oracle cap of " +
             std::to_string(kOracleCap));
  }
  present_ = size == 64 ? ~std::uint64_t{0} : bit(size) - 1;
  adj_.assign(static_cast<size_t>(size), 0);
}

SmallGraph SmallGraph::from_topology(const Topology& g) {
  if (g.vertex_count() > static_cast<size_t>(kOracleCap)) {
    fail(ErrorCode::kResourceLimit,
         "graph with " + std::to_string(g.vertex_count()) +
             " vertices exceeds the oracle cap of " + std::to_string(kOracleCap));
  }
  SmallGraph out(static_cast<int>(g.vertex_count()));
  for (const Edge& e : g.edges()) {
    out.add_edge(static_cast<int>(g.index_of(e.a)),
                 static_cast<int>(g.index_of(e.b)));
  }
  return out;
}

SmallGraph SmallGraph::complete(int size) {
  SmallGraph g(size);
  for (int a = 0; a < size; ++a) {
    for (int b = a + 1; b < size; ++b) g.add_edge(a, b);
  }
  return g;
}

SmallGraph SmallGraph::cycle(int size) {
  SmallGraph g = path(size);
  if (size >= 3) g.add_edge(size - 1, 0);
  return g;
}

SmallGraph SmallGraph::path(int size) {
  SmallGraph g(size);
  for (int a = 0; a + 1 < size; ++a) g.add_edge(a, a + 1);
  return g;
}

int SmallGraph::present_count() const { return std::popcount(present_); }

void SmallGraph::add_edge(int a, int b) {
  check_vertex(*this, a);
  check_vertex(*this, b);
  if (a == b) fail(ErrorCode::kInvalidArgument, "self loop");
  adj_[a] |= bit(b);
  adj_[b] |= bit(a);
}

void SmallGraph::remove_edge(int a, int b) {
  check_vertex(*this, a);
  check_vertex(*this, b);
  adj_[a] &= ~bit(b);
  adj_[b] &= ~bit(a);
}

void SmallGraph::remove_vertex(int v) {
  check_vertex(*this, v);
  present_ &= ~bit(v);
}

int SmallGraph::degree(int v) const { return std::popcount(neighbors(v)); }

std::vector<std::pair<int, int>> SmallGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::uint64_t a = present_; a; a &= a - 1) {
    const int u = lowest(a);
    for (std::uint64_t b = neighbors(u) & above(u); b; b &= b - 1) {
      out.emplace_back(u, lowest(b));
    }
  }
  return out;
}

Certificate find_hp(const SmallGraph& g, int u, int v) {
  check_vertex(g, u);
  check_vertex(g, v);
  if (u == v) fail(ErrorCode::kInvalidArgument, "endpoints must differ");
  Certificate cert;
  if (!g.is_present(u) || !g.is_present(v)) return cert;
  PathSearch search(g, v);
  search.path.push_back(u);
  if (search.run(u, g.present() & ~bit(u))) {
    cert.kind = CertKind::kHP;
    cert.sequence = std::move(search.path);
  }
  return cert;
}

Certificate find_hc(const SmallGraph& g) {
  Certificate cert;
  if (g.present_count() < 3) return cert;
  const int s = lowest(g.present());
  for (std::uint64_t nb = g.neighbors(s); nb; nb &= nb - 1) {
    Certificate path = find_hp(g, s, lowest(nb));
    if (path.found()) {
      cert.kind = CertKind::kHC;
      cert.sequence = std::move(path.sequence);
      return cert;
    }
  }
  return cert;
}

bool valid_certificate(const SmallGraph& g, const Certificate& cert) {
  if (!cert.found()) return false;
  std::uint64_t seen = 0;
  for (int v : cert.sequence) {
    if (v < 0 || v >= g.size() || !g.is_present(v) || (seen & bit(v))) {
      return false;
    }
    seen |= bit(v);
  }
  if (seen != g.present()) return false;
  for (size_t i = 0; i + 1 < cert.sequence.size(); ++i) {
    if (!g.adjacent(cert.sequence[i], cert.sequence[i + 1])) return false;
  }
  if (cert.kind == CertKind::kHC) {
    if (cert.sequence.size() < 3) return false;
    if (!g.adjacent(cert.sequence.back(), cert.sequence.front())) return false;
  }
  return true;
}

ConnectivityReport is_hamiltonian_connected(const SmallGraph& g, int jobs) {
  const auto pairs = present_pairs(g);
  const auto certs = all_pairs(g, pairs, jobs);
  ConnectivityReport report;
  report.pairs_checked = pairs.size();
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (!certs[i].found()) {
      report.connected = false;
      report.witness = pairs[i];
      break;
    }
  }
  return report;
}

SmallGraph apply_faults(SmallGraph g, const std::vector<SmallFault>& faults) {
  for (const SmallFault& f : faults) {
    if (f.is_vertex()) {
      g.remove_vertex(f.a);
    } else {
      g.remove_edge(f.a, f.b);
    }
  }
  return g;
}

FaultCheckReport fault_check(const SmallGraph& g, int f, FaultMode mode,
                             Sampling sampling, int jobs) {
  if (f < 0) fail(ErrorCode::kInvalidArgument, "fault budget must be >= 0");
  if (!sampling.exhaustive && sampling.count == 0) {
    fail(ErrorCode::kInvalidArgument, "sample count must be positive");
  }
  std::vector<SmallFault> elements;
  for (std::uint64_t a = g.present(); a; a &= a - 1) {
    elements.push_back({lowest(a), -1});
  }
  for (auto [a, b] : g.edges()) elements.push_back({a, b});
  const int budget = std::min<int>(f, static_cast<int>(elements.size()));

  std::vector<std::vector<SmallFault>> sets;
  if (sampling.exhaustive) {
    std::vector<int> idx;
    for (int size = 0; size <= budget; ++size) {
      idx.resize(static_cast<size_t>(size));
      for (int i = 0; i < size; ++i) idx[i] = i;
      while (true) {
        std::vector<SmallFault> set;
        for (int i : idx) set.push_back(elements[i]);
        sets.push_back(std::move(set));
        int pos = size - 1;
        while (pos >= 0 &&
               idx[pos] == static_cast<int>(elements.size()) - size + pos) {
          --pos;
        }
        if (pos < 0) break;
        ++idx[pos];
        for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
  } else {
    std::mt19937_64 rng(sampling.seed);
    for (std::uint64_t s = 0; s < sampling.count; ++s) {
      const int size =
          budget == 0
              ? 0
              : std::uniform_int_distribution<int>(1, budget)(rng);
      std::vector<SmallFault> set;
      std::sample(elements.begin(), elements.end(), std::back_inserter(set),
                  size, rng);
      sets.push_back(std::move(set));
    }
  }

  std::vector<char> ok(sets.size(), 1);
  detail::parallel_for(sets.size(), jobs, [&](std::size_t i) {
    const SmallGraph h = apply_faults(g, sets[i]);
    if (mode == FaultMode::kHamiltonian) {
      ok[i] = find_hc(h).found();
    } else {
      ok[i] = is_hamiltonian_connected(h).connected;
    }
  });

  FaultCheckReport report;
  report.sets_checked = sets.size();
  for (size_t i = 0; i < sets.size(); ++i) {
    if (!ok[i]) {
      report.ok = false;
      report.counterexample = sets[i];
      break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Base-case tables

namespace {

constexpr int kCacheVersion = 1;

std::optional<std::filesystem::path> cache_dir() {
  const char* dir = std::getenv("DCELL_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

std::filesystem::path table_file(const std::filesystem::path& dir, int n,
                                 int k) {
  return dir / ("base_hp_n" + std::to_string(n) + "_k" + std::to_string(k) +
                ".json");
}

}  // namespace

const std::vector<std::uint8_t>& BaseTable::stored(Vertex lo, Vertex hi) const {
  return paths_[lo * static_cast<Vertex>(size_) + hi];
}

std::vector<Vertex> BaseTable::path(Vertex u, Vertex v) const {
  const auto limit = static_cast<Vertex>(size_);
  if (u >= limit || v >= limit) fail(ErrorCode::kOutOfRange, "uid out of range");
  if (u == v) fail(ErrorCode::kInvalidArgument, "endpoints must differ");
  const auto& p = stored(std::min(u, v), std::max(u, v));
  std::vector<Vertex> out(p.begin(), p.end());
  if (u > v) std::reverse(out.begin(), out.end());
  return out;
}

bool has_base_table(int n, int k) {
  return (n == 2 && k == 2) || (n == 3 && k == 1);
}

const BaseTable& base_table(int n, int k, int jobs) {
  if (!has_base_table(n, k)) {
    fail(ErrorCode::kUnsupportedParameters,
         "no base-case table for n=" + std::to_string(n) +
             " k=" + std::to_string(k));
  }
  static std::mutex mutex;
  static BaseTable tables[2];
  static bool ready[2] = {false, false};
  const int slot = n == 2 ? 0 : 1;
  std::lock_guard lock(mutex);
  if (ready[slot]) return tables[slot];

  const Topology topo = build_graph({n, k});
  const SmallGraph g = SmallGraph::from_topology(topo);
  BaseTable table;
  table.n_ = n;
  table.k_ = k;
  table.size_ = g.size();
  table.paths_.assign(static_cast<size_t>(g.size()) * g.size(), {});
  const auto pairs = present_pairs(g);
  auto store = [&](size_t i, const std::vector<int>& seq) {
    auto [a, b] = pairs[i];
    table.paths_[static_cast<size_t>(a) * g.size() + b].assign(seq.begin(),
                                                                seq.end());
  };

  bool loaded = false;
  const auto dir = cache_dir();
  if (dir) {
    std::ifstream in(table_file(*dir, n, k));
    if (in) {
      try {
        const auto doc = nlohmann::json::parse(in);
        const auto& paths = doc.at("paths");
        if (doc.at("version") == kCacheVersion && doc.at("n") == n &&
            doc.at("k") == k && paths.size() == pairs.size()) {
          loaded = true;
          for (size_t i = 0; i < pairs.size() && loaded; ++i) {
            Certificate cert{CertKind::kHP, paths[i].get<std::vector<int>>()};
            loaded = valid_certificate(g, cert) &&
                     cert.sequence.front() == pairs[i].first &&
                     cert.sequence.back() == pairs[i].second;
            if (loaded) store(i, cert.sequence);
          }
        }
      } catch (const nlohmann::json::exception&) {
        loaded = false;
      }
    }
  }

  if (!loaded) {
    const auto certs = all_pairs(g, pairs, jobs);
    for (size_t i = 0; i < pairs.size(); ++i) {
      if (!certs[i].found()) {
        fail(ErrorCode::kCertificationFailed,
             "no Hamiltonian path between " + std::to_string(pairs[i].first) +
                 " and " + std::to_string(pairs[i].second) + " in DCell_" +
                 std::to_string(k) + " with n=" + std::to_string(n));
      }
      store(i, certs[i].sequence);
    }
    if (dir) {
      nlohmann::json doc;
      doc["version"] = kCacheVersion;
      doc["n"] = n;
      doc["k"] = k;
      doc["paths"] = nlohmann::json::array();
      for (size_t i = 0; i < pairs.size(); ++i) {
        doc["paths"].push_back(certs[i].sequence);
      }
      std::error_code ec;
      std::filesystem::create_directories(*dir, ec);
      std::ofstream out(table_file(*dir, n, k));
      if (out) out << doc.dump() << '\n';
    }
  }
  table.pairs_ = pairs.size();
  tables[slot] = std::move(table);
  ready[slot] = true;
  return tables[slot];
}

// ---------------------------------------------------------------------------
// Certification

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

}  // namespace

nlohmann::json to_json(const CertificationReport& r) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& c : r.claims) {
    nlohmann::json item{{"claim", c.claim},
                        {"statement", c.statement},
                        {"status", c.passed ? "PASS" : "FAIL"},
                        {"elapsed_ms", c.elapsed_ms}};
    if (!c.witness.empty()) item["witness"] = c.witness;
    doc.push_back(item);
  }
  return doc;
}

namespace {

std::optional<CertificationReport> load_report(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    CertificationReport r;
    for (const auto& item : doc.at("claims")) {
      ClaimResult c;
      c.claim = item.at("claim").get<std::string>();
      c.statement = item.at("statement").get<std::string>();
      c.passed = item.at("status") == "PASS";
      c.witness = item.value("witness", "");
      c.elapsed_ms = item.at("elapsed_ms").get<double>();
      r.claims.push_back(std::move(c));
    }
    r.cached_pairs_n2_k2 = doc.at("cached_pairs_n2_k2").get<std::uint64_t>();
    r.cached_pairs_n3_k1 = doc.at("cached_pairs_n3_k1").get<std::uint64_t>();
    if (r.claims.size() != 4 || doc.at("version") != kCacheVersion) {
      return std::nullopt;
    }
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

CertificationReport run_certification(int jobs) {
  CertificationReport report;

  {
    const auto start = Clock::now();
    const SmallGraph c6 = SmallGraph::from_topology(build_graph({2, 1}));
    const Certificate hc = find_hc(c6);
    const ConnectivityReport conn = is_hamiltonian_connected(c6, jobs);
    ClaimResult c{"dcell1_n2_hamiltonian_not_hamiltonian_connected",
                  "DCell_1 with n=2 is a 6-cycle: Hamiltonian but not "
                  "Hamiltonian-connected",
                  valid_certificate(c6, hc) && !conn.connected,
                  "",
                  0.0};
    if (conn.witness) {
      c.witness = "no Hamiltonian path between uid " +
                  std::to_string(conn.witness->first) + " and uid " +
                  std::to_string(conn.witness->second);
    }
    c.elapsed_ms = since(start);
    report.claims.push_back(std::move(c));
  }

  auto connected_claim = [&](int n, int k, std::string name,
                             std::string ref) {
    const auto start = Clock::now();
    ClaimResult c{std::move(name), std::move(ref), false, "", 0.0};
    try {
      const BaseTable& t = base_table(n, k, jobs);
      c.passed = true;
      c.witness = std::to_string(t.pair_count()) + " pairs";
      (n == 2 ? report.cached_pairs_n2_k2 : report.cached_pairs_n3_k1) =
          t.pair_count();
    } catch (const Error& e) {
      c.witness = e.what();
    }
    c.elapsed_ms = since(start);
    report.claims.push_back(std::move(c));
  };
  connected_claim(2, 2, "dcell2_n2_hamiltonian_connected",
                  "DCell_2 with n=2 has a Hamiltonian path between every "
                  "pair of vertices");
  connected_claim(3, 1, "dcell1_n3_hamiltonian_connected",
                  "DCell_1 with n=3 has a Hamiltonian path between every "
                  "pair of vertices");

  {
    const auto start = Clock::now();
    ClaimResult c{"one_fault_hamiltonian",
                  "DCell_2 with n=2 and DCell_1 with n=3 stay Hamiltonian "
                  "after any single vertex or edge fault",
                  true,
                  "",
                  0.0};
    for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 1}}) {
      const SmallGraph g = SmallGraph::from_topology(build_graph({n, k}));
      const FaultCheckReport r =
          fault_check(g, 1, FaultMode::kHamiltonian, Sampling::all(), jobs);
      if (!r.ok) {
        c.passed = false;
        const SmallFault& f = r.counterexample.front();
        c.witness = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                    (f.is_vertex() ? " vertex " + std::to_string(f.a)
                                   : " edge " + std::to_string(f.a) + "-" +
                                         std::to_string(f.b));
        break;
      }
    }
    c.elapsed_ms = since(start);
    report.claims.push_back(std::move(c));
  }
  return report;
}

}  // namespace

bool CertificationReport::all_passed() const {
  return !claims.empty() &&
         std::all_of(claims.begin(), claims.end(),
                     [](const ClaimResult& c) { return c.passed; });
}

CertificationReport certify_base_cases(int jobs, bool throw_on_failure) {
  static std::mutex mutex;
  static std::optional<CertificationReport> memo;
  std::unique_lock lock(mutex);
  CertificationReport out;
  if (memo) {
    out = *memo;
    out.from_cache = true;
  } else {
    const auto dir = cache_dir();
    const auto file = dir ? std::optional(*dir / "certify.json") : std::nullopt;
    std::optional<CertificationReport> disk;
    if (file) disk = load_report(*file);
    if (disk && disk->all_passed()) {
      memo = *disk;
      out = *disk;
      out.from_cache = true;
    } else {
      memo = run_certification(jobs);
      out = *memo;
      if (file && memo->all_passed()) {
        nlohmann::json doc{{"version", kCacheVersion},
                           {"claims", to_json(*memo)},
                           {"cached_pairs_n2_k2", memo->cached_pairs_n2_k2},
                           {"cached_pairs_n3_k1", memo->cached_pairs_n3_k1}};
        std::error_code ec;
        std::filesystem::create_directories(*dir, ec);
        std::ofstream os(*file);
        if (os) os << doc.dump(2) << '\n';
      }
    }
  }
  lock.unlock();
  if (throw_on_failure && !out.all_passed()) {
    std::string failed;
    for (const auto& c : out.claims) {
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.claim;
    }
    fail(ErrorCode::kCertificationFailed, "claims failed: " + failed);
  }
  return out;
}

}  // namespace dcell
