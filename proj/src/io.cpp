#include "dcell/io.hpp"

#include <fstream>
#include <sstream>

namespace dcell {

std::string to_edge_list(const Topology& g) {
  std::ostringstream out;
  out << "# dcell n=" << g.params().n << " k=" << g.params().k
      << " t=" << g.vertex_count() << '\n';
  for (const Edge& e : g.edges()) out << e.a << ' ' << e.b << ' ' << e.level << '\n';
  return out.str();
}

Topology parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  Params params;
  std::uint64_t count = 0;
  bool header = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) continue;
      std::istringstream h(line.substr(1));
      std::string word;
      h >> word;
      if (word != "dcell") continue;
      std::string kv;
      while (h >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        std::uint64_t value = 0;
        try {
          value = std::stoull(kv.substr(eq + 1));
        } catch (const std::exception&) {
          fail(ErrorCode::kInvalidArgument, "bad header value '" + kv + "'");
        }
        if (key == "n") params.n = static_cast<int>(value);
        if (key == "k") params.k = static_cast<int>(value);
        if (key == "t") count = value;
      }
      header = true;
      continue;
    }
    std::istringstream row(line);
    Edge e;
    if (!(row >> e.a >> e.b >> e.level)) {
      fail(ErrorCode::kInvalidArgument, "bad edge on line " + std::to_string(lineno));
    }
    if (e.a > e.b) std::swap(e.a, e.b);
    edges.push_back(e);
  }
  if (!header) fail(ErrorCode::kInvalidArgument, "missing '# dcell' header");
  params.validate();
  std::vector<Vertex> vertices;
  if (count == t(params.n, params.k)) {
    vertices.resize(count);
    for (Vertex x = 0; x < count; ++x) vertices[x] = x;
  } else {
    for (const Edge& e : edges) {
      vertices.push_back(e.a);
      vertices.push_back(e.b);
    }
  }
  Topology g(params, std::move(vertices));
  for (const Edge& e : edges) g.add_edge(e.a, e.b, e.level);
  return g;
}

std::string to_dot(const Topology& g) {
  const DCell d(g.params());
  auto name = [&](Vertex x) { return '"' + d.label(x).to_string('.') + '"'; };
  std::ostringstream out;
  out << "graph dcell_" << g.params().n << '_' << g.params().k << " {\n";
  for (Vertex x : g.vertices()) out << "  " << name(x) << ";\n";
  for (const Edge& e : g.edges()) {
    out << "  " << name(e.a) << " -- " << name(e.b) << " [level=" << e.level << "];\n";
  }
  out << "}\n";
  return out.str();
}

Json to_json(const Topology& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.a, e.b, e.level});
  return {{"n", g.params().n},
          {"k", g.params().k},
          {"t", g.vertex_count()},
          {"vertices", g.vertices()},
          {"edges", edges}};
}

Json path_json(int n, int k, Vertex u, Vertex v, const Path& p, bool valid) {
  return {{"n", n}, {"k", k}, {"u", u}, {"v", v}, {"vertices", p}, {"valid", valid}};
}

Json to_json(const FaultSet& f) {
  Json edges = Json::array();
  for (auto [a, b] : f.edges) edges.push_back({a, b});
  return {{"vertices", f.vertices}, {"edges", edges}};
}

FaultSet faults_from_json(const Json& doc) {
  FaultSet f;
  try {
    for (const auto& x : doc.value("vertices", Json::array())) f.add_vertex(x.get<Vertex>());
    for (const auto& e : doc.value("edges", Json::array())) {
      if (!e.is_array() || e.size() != 2) {
        fail(ErrorCode::kInvalidArgument, "fault edges must be [uid, uid] pairs");
      }
      f.add_edge(e[0].get<Vertex>(), e[1].get<Vertex>());
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad faults document: ") + e.what());
  }
  return f;
}

Json to_json(const Listing& l) {
  return {{"shape", l.shape()}, {"listed", l.order()}};
}

Listing listing_from_json(const Json& doc) {
  try {
    Listing l(doc.at("shape").get<std::vector<std::uint64_t>>());
    for (const auto& t : doc.value("listed", Json::array())) l.set(t.get<Tuple>());
    return l;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad listing document: ") + e.what());
  }
}

Json to_json(const SimResult& r) {
  const SimConfig& c = r.config;
  Json per_trial = Json::array();
  for (const TrialRecord& t : r.trials) {
    per_trial.push_back({{"messages", t.messages},
                         {"rounds", t.rounds ? Json(*t.rounds) : Json(nullptr)},
                         {"coverage", t.coverage}});
  }
  return {{"config",
           {{"n", c.n},
            {"k", c.k},
            {"source", c.source},
            {"scheme", std::string(to_string(c.scheme))},
            {"p", c.p},
            {"trials", c.trials},
            {"seed", c.seed}}},
          {"per_trial", per_trial},
          {"aggregate",
           {{"mean_messages", r.mean_messages},
            {"mean_rounds", r.mean_rounds ? Json(*r.mean_rounds) : Json(nullptr)},
            {"success_rate", r.success_rate},
            {"ci95", r.ci95}}}};
}

Json to_json(const FaultExperiment& e) {
  return {{"trials", e.trials},       {"successes", e.successes},
          {"rate", e.rate},           {"stddev", e.stddev},
          {"ci95", {e.ci95_low, e.ci95_high}}};
}

Json to_json(const Trace& trace) {
  Json out = Json::array();
  for (const TraceStep& s : trace) {
    out.push_back({{"level", s.level}, {"base", s.base}, {"label", s.label},
                   {"chosen", s.chosen}});
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace dcell
