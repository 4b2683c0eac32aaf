#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcell/io.hpp"

namespace py = pybind11;

namespace {

using namespace dcell;

FaultSet make_faults(const std::vector<Vertex>& vertices,
                     const std::vector<std::pair<Vertex, Vertex>>& edges) {
  FaultSet f;
  for (Vertex x : vertices) f.add_vertex(x);
  for (auto [a, b] : edges) f.add_edge(a, b);
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DCell Hamiltonian constructions";

  static py::exception<Error> error(m, "DCellError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("t", &dcell::t, py::arg("n"), py::arg("k"));

  m.def(
      "edges",
      [](int n, int k, std::uint64_t max_vertices) {
        std::vector<std::tuple<Vertex, Vertex, int>> out;
        for (const Edge& e : build_graph({n, k}, default_rule(), max_vertices).edges()) {
          out.emplace_back(e.a, e.b, e.level);
        }
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("max_vertices") = kDefaultVertexCap);

  m.def("edge_list",
        [](int n, int k) { return to_edge_list(build_graph({n, k})); },
        py::arg("n"), py::arg("k"));

  m.def("hp", [](int n, int k, Vertex u, Vertex v) { return dcell_hp(n, k, u, v); },
        py::arg("n"), py::arg("k"), py::arg("u"), py::arg("v"));

  m.def("ft_hp",
        [](int n, int k, Vertex u, Vertex v, const std::vector<Vertex>& fv,
           const std::vector<std::pair<Vertex, Vertex>>& fe) {
          return ft_hp(n, k, make_faults(fv, fe), u, v);
        },
        py::arg("n"), py::arg("k"), py::arg("u"), py::arg("v"),
        py::arg("fault_vertices") = std::vector<Vertex>{},
        py::arg("fault_edges") = std::vector<std::pair<Vertex, Vertex>>{});

  m.def("ft_hc",
        [](int n, int k, const std::vector<Vertex>& fv,
           const std::vector<std::pair<Vertex, Vertex>>& fe) {
          return ft_hc(n, k, make_faults(fv, fe));
        },
        py::arg("n"), py::arg("k"),
        py::arg("fault_vertices") = std::vector<Vertex>{},
        py::arg("fault_edges") = std::vector<std::pair<Vertex, Vertex>>{});

  py::class_<Listing>(m, "Listing")
      .def(py::init<std::vector<std::uint64_t>>(), py::arg("shape"))
      .def_static("for_dcell", &Listing::for_dcell, py::arg("n"), py::arg("k"))
      .def("next", &Listing::next)
      .def("listed", &Listing::listed)
      .def_property_readonly("shape", &Listing::shape)
      .def_property_readonly("order", &Listing::order)
      .def_property_readonly("count", &Listing::count)
      .def_property_readonly("capacity", &Listing::capacity);

  m.def("is_kc_connected",
        [](const Listing& l, std::uint64_t c) { return is_kc_connected(l, c).connected; },
        py::arg("listing"), py::arg("c"));

  m.def(
      "partial_hp",
      [](int n, int k, std::uint64_t d, std::uint64_t c, Vertex u, Vertex v) {
        const Listing l = Listing::after(Listing::for_dcell(n, k).shape(), d);
        return partial_hp(materialize_partial(l, n, k), c, u, v);
      },
      py::arg("n"), py::arg("k"), py::arg("d"), py::arg("c"), py::arg("u"), py::arg("v"));

  // Results come back as JSON text; the package decodes them.
  m.def(
      "simulate_json",
      [](int n, int k, const std::string& scheme, double p, std::uint64_t trials,
         std::uint64_t seed, Vertex source) {
        SimConfig c;
        c.n = n;
        c.k = k;
        c.scheme = parse_scheme(scheme);
        c.p = p;
        c.trials = trials;
        c.seed = seed;
        c.source = source;
        return to_json(simulate(c)).dump();
      },
      py::arg("n"), py::arg("k"), py::arg("scheme") = "flood", py::arg("p") = 0.0,
      py::arg("trials") = 1, py::arg("seed") = 1, py::arg("source") = 0);
}
