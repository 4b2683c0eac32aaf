#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dcell/broadcast.hpp"
#include "dcell/fault.hpp"
#include "dcell/oracle.hpp"
#include "dcell/partial.hpp"
#include "dcell/topology.hpp"

namespace dcell {

using Json = nlohmann::json;

// Header `# dcell n=<n> k=<k> t=<vertex count>`, then `a b level` per edge.
std::string to_edge_list(const Topology& g);
// Vertex set: 0..t-1 when t = t_k, otherwise the edge endpoints.
Topology parse_edge_list(std::string_view text);

// Vertices are named by their digit tuple joined with '.'.
std::string to_dot(const Topology& g);

Json to_json(const Topology& g);
Json path_json(int n, int k, Vertex u, Vertex v, const Path& p, bool valid);

// {vertices: [uids], edges: [[uid, uid]]}
Json to_json(const FaultSet& f);
FaultSet faults_from_json(const Json& doc);

// {shape: [a_k..a_2], listed: [tuples in order]}
Json to_json(const Listing& l);
Listing listing_from_json(const Json& doc);

Json to_json(const SimResult& r);
Json to_json(const FaultExperiment& e);
Json to_json(const CertificationReport& r);
Json to_json(const Trace& trace);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dcell
