#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "dcell/broadcast.hpp"
#include "dcell/fault.hpp"
#include "dcell/hamiltonian.hpp"
#include "dcell/io.hpp"
#include "dcell/oracle.hpp"
#include "dcell/partial.hpp"
#include "dcell/topology.hpp"

namespace dcell::cli {
namespace {

struct Global {
  std::uint64_t max_vertices = kDefaultVertexCap;
  int jobs = 1;
};

struct Output {
  std::ostream& out;
  std::string path;

  void emit(const std::string& text) const {
    if (path.empty()) {
      out << text;
      if (!text.empty() && text.back() != '\n') out << '\n';
    } else {
      write_file(path, text);
    }
  }
  void emit(const Json& doc) const { emit(doc.dump(2)); }
};

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument, "bad list item '" + item + "'");
    }
  }
  return out;
}

std::string tuple_text(const Tuple& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(a[i]);
  }
  return s;
}

FaultSet load_faults(const std::string& path) {
  if (path.empty()) return {};
  try {
    return faults_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, "faults file is not JSON: " + std::string(e.what()));
  }
}

void check_size(int n, int k, const Global& g) {
  const std::uint64_t size = t(n, k);
  if (size > g.max_vertices) {
    fail(ErrorCode::kResourceLimit, "t_k = " + std::to_string(size) +
                                        " exceeds --max-vertices " +
                                        std::to_string(g.max_vertices));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DCell Hamiltonicity toolkit", "dcell"};
  app.require_subcommand(1);
  app.fallthrough();
  Global global;
  app.add_option("--max-vertices", global.max_vertices, "Cap on constructed vertices");
  app.add_option("--jobs", global.jobs, "Worker threads");

  // Every handler stores its work here; it runs after a successful parse.
  std::function<int()> action;
  std::string out_path;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the result to this file");
  };
  Output o{out, ""};

  int n = 2;
  int k = 1;
  Vertex u = 0;
  Vertex v = 0;

  // gen
  std::string format = "edgelist";
  auto* gen = app.add_subcommand("gen", "Materialize DCell_k");
  gen->add_option("--n", n)->required();
  gen->add_option("--k", k)->required();
  gen->add_option("--format", format)->check(CLI::IsMember({"edgelist", "dot", "json"}));
  add_out(gen);
  gen->callback([&] {
    action = [&] {
      const Topology g = build_graph({n, k}, default_rule(), global.max_vertices);
      if (format == "edgelist") o.emit(to_edge_list(g));
      if (format == "dot") o.emit(to_dot(g));
      if (format == "json") o.emit(to_json(g));
      return kExitOk;
    };
  });

  // hp
  bool verify = false;
  bool count_ops = false;
  auto* hp = app.add_subcommand("hp", "Hamiltonian path between two vertices");
  hp->add_option("--n", n)->required();
  hp->add_option("--k", k)->required();
  hp->add_option("--u", u)->required();
  hp->add_option("--v", v)->required();
  hp->add_flag("--verify", verify, "Check the path against the graph");
  hp->add_flag("--count-ops", count_ops, "Report recursive call counts");
  add_out(hp);
  hp->callback([&] {
    action = [&] {
      check_size(n, k, global);
      auto [path, ops] = counted_dcell_hp(n, k, u, v);
      bool valid = true;
      if (verify) valid = static_cast<bool>(verify_path(DCell(n, k), path, u, v, true));
      Json doc = path_json(n, k, u, v, path, valid);
      if (count_ops) {
        doc["ops"] = {{"calls", ops.calls}, {"per_level", ops.per_level}};
      }
      o.emit(doc);
      return valid ? kExitOk : kExitFailure;
    };
  });

  // ft-hp / ft-hc
  std::string faults_path;
  bool want_trace = false;
  auto* fthp = app.add_subcommand("ft-hp", "Hamiltonian path avoiding faults");
  auto* fthc = app.add_subcommand("ft-hc", "Hamiltonian cycle avoiding faults");
  for (auto* sub : {fthp, fthc}) {
    sub->add_option("--n", n)->required();
    sub->add_option("--k", k)->required();
    sub->add_option("--faults", faults_path, "faults.json");
    sub->add_flag("--trace", want_trace, "Include the construction trace");
    add_out(sub);
  }
  fthp->add_option("--u", u)->required();
  fthp->add_option("--v", v)->required();
  auto fault_action = [&](bool cycle) {
    return [&, cycle] {
      check_size(n, k, global);
      const FaultSet f = load_faults(faults_path);
      Trace trace;
      Trace* tp = want_trace ? &trace : nullptr;
      const Path p = cycle ? ft_hc(n, k, f, tp) : ft_hp(n, k, f, u, v, tp);
      const FaultyView view(n, k, f);
      const bool valid = static_cast<bool>(verify_fault_certificate(
          view, p, cycle ? std::nullopt : std::optional(std::pair{u, v}), cycle));
      Json doc{{"n", n}, {"k", k}, {"faults", to_json(f)}, {"vertices", p},
               {"valid", valid}, {"cycle", cycle}};
      if (!cycle) {
        doc["u"] = u;
        doc["v"] = v;
      }
      if (want_trace) doc["trace"] = to_json(trace);
      o.emit(doc);
      return valid ? kExitOk : kExitFailure;
    };
  };
  fthp->callback([&] { action = fault_action(false); });
  fthc->callback([&] { action = fault_action(true); });

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive checks on small graphs");
  oracle->require_subcommand(1);
  auto* certify = oracle->add_subcommand("certify", "Re-check the base-case claims");
  certify->callback([&] {
    action = [&] {
      const CertificationReport r = certify_base_cases(global.jobs, false);
      for (const ClaimResult& c : r.claims) {
        out << (c.passed ? "PASS " : "FAIL ") << c.claim << " (" << std::fixed
            << std::setprecision(1) << c.elapsed_ms << " ms)";
        if (!c.witness.empty()) out << " witness: " << c.witness;
        out << '\n';
      }
      return r.all_passed() ? kExitOk : kExitFailure;
    };
  });
  auto* ohp = oracle->add_subcommand("hp", "Exact Hamiltonian path search");
  ohp->add_option("--n", n)->required();
  ohp->add_option("--k", k)->required();
  ohp->add_option("--u", u)->required();
  ohp->add_option("--v", v)->required();
  add_out(ohp);
  ohp->callback([&] {
    action = [&] {
      check_size(n, k, global);
      const Topology g = build_graph({n, k}, default_rule(), global.max_vertices);
      if (g.vertex_count() > static_cast<std::size_t>(kOracleCap)) {
        fail(ErrorCode::kResourceLimit, "the oracle handles at most 64 vertices");
      }
      if (!g.contains(u) || !g.contains(v) || u == v) {
        fail(ErrorCode::kInvalidArgument, "u and v must be distinct vertices");
      }
      const Certificate c = find_hp(SmallGraph::from_topology(g), static_cast<int>(u),
                                    static_cast<int>(v));
      Json doc{{"n", n}, {"k", k}, {"u", u}, {"v", v}, {"found", c.found()}};
      if (c.found()) doc["vertices"] = c.sequence;
      o.emit(doc);
      return kExitOk;
    };
  });
  int f = 1;
  std::string mode = "hc";
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  auto* fcheck = oracle->add_subcommand("fault-check", "Fault tolerance by enumeration");
  fcheck->add_option("--n", n)->required();
  fcheck->add_option("--k", k)->required();
  fcheck->add_option("--f", f)->required();
  fcheck->add_option("--mode", mode)->check(CLI::IsMember({"hc", "hcc"}));
  fcheck->add_option("--samples", samples, "Random fault sets instead of all");
  fcheck->add_option("--seed", seed);
  add_out(fcheck);
  fcheck->callback([&] {
    action = [&] {
      check_size(n, k, global);
      const Topology g = build_graph({n, k}, default_rule(), global.max_vertices);
      if (g.vertex_count() > static_cast<std::size_t>(kOracleCap)) {
        fail(ErrorCode::kResourceLimit, "the oracle handles at most 64 vertices");
      }
      const FaultCheckReport r = fault_check(
          SmallGraph::from_topology(g), f,
          mode == "hc" ? FaultMode::kHamiltonian : FaultMode::kHamiltonianConnected,
          samples ? Sampling::random(samples, seed) : Sampling::all(), global.jobs);
      Json bad = Json::array();
      for (const SmallFault& x : r.counterexample) {
        bad.push_back(x.is_vertex() ? Json{{"vertex", g.vertices()[x.a]}}
                                    : Json{{"edge", {g.vertices()[x.a], g.vertices()[x.b]}}});
      }
      o.emit(Json{{"n", n}, {"k", k}, {"f", f}, {"mode", mode}, {"ok", r.ok},
                  {"sets_checked", r.sets_checked}, {"counterexample", bad}});
      return r.ok ? kExitOk : kExitFailure;
    };
  });

  // partial
  auto* partial = app.add_subcommand("partial", "Incremental deployment");
  partial->require_subcommand(1);
  std::string shape_text;
  std::uint64_t steps = 1;
  std::string from_path;
  auto* pnext = partial->add_subcommand("next", "Run the deployment order");
  pnext->add_option("--shape", shape_text, "a_k,...,a_2")->required();
  pnext->add_option("--steps", steps);
  pnext->add_option("--from", from_path, "Continue from a listing file");
  pnext->add_option("--out", out_path, "Write the listing JSON here");
  pnext->callback([&] {
    action = [&] {
      const std::vector<std::uint64_t> shape = parse_list(shape_text);
      Listing l = from_path.empty() ? Listing(shape)
                                    : listing_from_json(Json::parse(read_file(from_path)));
      if (l.shape() != shape) fail(ErrorCode::kInvalidArgument, "--from has another shape");
      for (std::uint64_t i = 0; i < steps; ++i) out << tuple_text(l.next()) << '\n';
      if (!out_path.empty()) write_file(out_path, to_json(l).dump(2));
      return kExitOk;
    };
  });
  std::uint64_t d = 1;
  std::uint64_t c = 2;
  auto* pcheck = partial->add_subcommand("check", "K_c and copy connectivity");
  auto* php = partial->add_subcommand("hp", "Hamiltonian path in a partial DCell");
  for (auto* sub : {pcheck, php}) {
    sub->add_option("--n", n)->required();
    sub->add_option("--k", k)->required();
    sub->add_option("--d", d, "Units deployed")->required();
    sub->add_option("--c", c)->required();
    add_out(sub);
  }
  php->add_option("--u", u)->required();
  php->add_option("--v", v)->required();
  pcheck->callback([&] {
    action = [&] {
      const Listing l = Listing::after(Listing::for_dcell(n, k).shape(), d);
      const KcReport kc = is_kc_connected(l, c);
      Listing more = l;
      const std::uint64_t calls = make_kc_connected(more, c);
      Json doc{{"n", n}, {"k", k}, {"d", d}, {"c", c}, {"kc_connected", kc.connected},
               {"calls_to_connect", calls}};
      if (kc.witness) doc["witness"] = *kc.witness;
      const PartialTopology p = materialize_partial(l, n, k, global.max_vertices);
      const CopyConnectivityReport r = check_copy_connectivity(p, {});
      doc["vertices"] = p.graph.vertex_count();
      doc["edges"] = p.graph.edge_count();
      doc["top_level"] = {{"m", r.m}, {"ok", r.ok}, {"last_links", r.last_links},
                          {"last_required", r.last_required},
                          {"unlinked", r.unlinked.size()}};
      o.emit(doc);
      return kExitOk;
    };
  });
  php->callback([&] {
    action = [&] {
      const Listing l = Listing::after(Listing::for_dcell(n, k).shape(), d);
      const PartialTopology p = materialize_partial(l, n, k, global.max_vertices);
      const Path path = partial_hp(p, c, u, v);
      const bool valid = static_cast<bool>(verify_path(p.graph, path, u, v, true));
      Json doc = path_json(n, k, u, v, path, valid);
      doc["d"] = d;
      doc["c"] = c;
      doc["nonconsecutive_prefix"] =
          nonconsecutive_prefix(path, n, partial_omega(n, k, c));
      o.emit(doc);
      return valid ? kExitOk : kExitFailure;
    };
  });

  // bcast
  SimConfig sim;
  std::string scheme = "flood";
  bool experiment = false;
  auto* bcast = app.add_subcommand("bcast", "Broadcast simulation");
  bcast->add_option("--n", sim.n)->required();
  bcast->add_option("--k", sim.k)->required();
  bcast->add_option("--scheme", scheme)->check(CLI::IsMember({"flood", "ham", "hier"}));
  bcast->add_option("--p", sim.p, "Link fault probability");
  bcast->add_option("--trials", sim.trials);
  bcast->add_option("--seed", sim.seed);
  bcast->add_option("--source", sim.source);
  bcast->add_flag("--fixed-cycle-experiment", experiment,
                  "Estimate how often the fixed cycle survives the faults");
  add_out(bcast);
  bcast->callback([&] {
    action = [&] {
      sim.scheme = parse_scheme(scheme);
      sim.jobs = global.jobs;
      sim.max_vertices = global.max_vertices;
      if (experiment) {
        Json doc = to_json(fault_success_experiment(sim, fixed_cycle_strategy()));
        doc["expected"] = std::pow(1.0 - sim.p, static_cast<double>(t(sim.n, sim.k)));
        o.emit(doc);
      } else {
        o.emit(to_json(simulate(sim)));
      }
      return kExitOk;
    };
  });

  // bench
  std::string pairs_text = "2:2,2:3,3:1,3:2";
  bool bench_json = false;
  auto* bench = app.add_subcommand("bench", "Time dcell_hp and count its calls");
  bench->add_option("--pairs", pairs_text, "Comma separated n:k list");
  bench->add_flag("--json", bench_json);
  add_out(bench);
  bench->callback([&] {
    action = [&] {
      Json rows = Json::array();
      std::stringstream in(pairs_text);
      std::string item;
      while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
          fail(ErrorCode::kInvalidArgument, "bench pairs look like n:k, got '" + item + "'");
        }
        const int bn = std::stoi(item.substr(0, colon));
        const int bk = std::stoi(item.substr(colon + 1));
        check_size(bn, bk, global);
        const std::uint64_t tk = t(bn, bk);
        const auto start = std::chrono::steady_clock::now();
        const auto [path, ops] = counted_dcell_hp(bn, bk, 0, tk - 1);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        rows.push_back({{"n", bn}, {"k", bk}, {"t_k", tk}, {"calls", ops.calls},
                        {"ms", ms},
                        {"calls_per_vertex",
                         static_cast<double>(ops.calls) / static_cast<double>(tk)}});
      }
      if (bench_json) {
        o.emit(rows);
        return kExitOk;
      }
      std::ostringstream table;
      table << std::left << std::setw(4) << "n" << std::setw(4) << "k" << std::setw(12)
            << "t_k" << std::setw(10) << "calls" << std::setw(12) << "ms"
            << "calls/t_k\n";
      for (const Json& r : rows) {
        table << std::setw(4) << r["n"].get<int>() << std::setw(4) << r["k"].get<int>()
              << std::setw(12) << r["t_k"].get<std::uint64_t>() << std::setw(10)
              << r["calls"].get<std::uint64_t>() << std::setw(12) << std::fixed
              << std::setprecision(3) << r["ms"].get<double>() << std::setprecision(5)
              << r["calls_per_vertex"].get<double>() << '\n';
      }
      o.emit(table.str());
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  o.path = out_path;
  try {
    return action();
  } catch (const Error& e) {
    err << Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump()
        << '\n';
    return kExitParameter;
  } catch (const Json::exception& e) {
    err << Json{{"error", std::string(to_string(ErrorCode::kInvalidArgument))},
                {"message", e.what()}}
               .dump()
        << '\n';
    return kExitParameter;
  }
}

}  // namespace dcell::cli
