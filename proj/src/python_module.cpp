// Python bindings: problems in and out as text, hypotheses as clause strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topmil/datasets.hpp"
#include "topmil/learners.hpp"
#include "topmil/problem_io.hpp"

namespace py = pybind11;
using namespace topmil;

namespace {

std::vector<std::string> atom_strings(const std::vector<Literal>& atoms) {
  std::vector<std::string> out;
  for (const Literal& a : atoms) out.push_back(to_string(a) + ".");
  return out;
}

std::vector<std::string> clause_strings(const Program& p) {
  std::vector<std::string> out;
  for (const Clause& c : p) out.push_back(to_string(display_rename(c)));
  return out;
}

LearnerConfig config_with(std::optional<double> deadline) {
  LearnerConfig c;
  c.deadline_seconds = deadline;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Top program construction and an iterative-deepening baseline for meta-interpretive learning";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::object err = py::reinterpret_borrow<py::object>(parse_error.ptr())(e.what());
      err.attr("line") = e.line();
      err.attr("column") = e.column();
      PyErr_SetObject(parse_error.ptr(), err.ptr());
    }
  });

  py::class_<MILProblem>(m, "Problem")
      .def_property_readonly("positive", [](const MILProblem& p) { return atom_strings(p.positive); })
      .def_property_readonly("negative", [](const MILProblem& p) { return atom_strings(p.negative); })
      .def_property_readonly("background", [](const MILProblem& p) { return clause_strings(p.background); })
      .def_property_readonly("metarules",
                             [](const MILProblem& p) {
                               std::vector<std::string> out;
                               for (const Metarule& mr : p.metarules) out.push_back(mr.name.str());
                               return out;
                             })
      .def("serialize", &serialize_problem)
      .def("__repr__", [](const MILProblem& p) {
        return "<Problem " + std::to_string(p.positive.size()) + " positive, " + std::to_string(p.negative.size()) +
               " negative>";
      });

  py::class_<Hypothesis>(m, "Hypothesis")
      .def_property_readonly("clauses", [](const Hypothesis& h) { return clause_strings(h.program()); })
      .def_property_readonly("size", &Hypothesis::size)
      .def_readonly("deadline_expired", &Hypothesis::deadline_expired)
      .def_readonly("truncated", &Hypothesis::truncated)
      .def("serialize", &serialize_hypothesis)
      .def("__len__", &Hypothesis::size);

  m.def("parse_problem", [](const std::string& text) { return parse_problem(text); }, py::arg("text"));
  m.def("load_problem", &load_problem, py::arg("path"));

  m.def(
      "louise_learn",
      [](const MILProblem& p, bool reduce, std::optional<double> deadline) {
        LearnerConfig c = config_with(deadline);
        c.reduce = reduce;
        py::gil_scoped_release release;
        return louise_learn(p, c);
      },
      py::arg("problem"), py::arg("reduce") = true, py::arg("deadline") = py::none());
  m.def(
      "metagol_learn",
      [](const MILProblem& p, std::size_t max_size, std::optional<double> deadline) {
        LearnerConfig c = config_with(deadline);
        c.max_hypothesis_size = max_size;
        py::gil_scoped_release release;
        return metagol_learn(p, c);
      },
      py::arg("problem"), py::arg("max_size") = 8, py::arg("deadline") = py::none(),
      "None when no hypothesis is found or the deadline expires.");
  m.def(
      "accuracy",
      [](const Hypothesis& h, const MILProblem& p) { return evaluate(h, p, p.positive, p.negative).accuracy; },
      py::arg("hypothesis"), py::arg("problem"), "Accuracy on the problem's own examples.");

  m.def(
      "bounds",
      [](std::uint64_t mm, std::uint64_t p, std::uint64_t k, std::uint64_t c, std::uint64_t n) {
        BoundsReport r = bounds(mm, p, k, c, n);
        // Hex text, since decimal int() parsing is capped at 4300 digits.
        py::module_ builtins = py::module_::import("builtins");
        auto big = [&](const BigInt& v) { return builtins.attr("int")(v.str(0, std::ios_base::hex), 16); };
        py::dict out;
        out["max_language_lemma"] = big(r.max_language_lemma);
        out["max_language_table"] = big(r.max_language_table);
        out["max_hypothesis_space"] = big(r.max_hypothesis_space);
        out["construction_cost"] = big(r.construction_cost);
        out["search_cost"] = big(r.search_cost);
        return out;
      },
      py::arg("m"), py::arg("p"), py::arg("k"), py::arg("c"), py::arg("n"));

  m.def("grid_world", [](int w, int h) { return gen_grid_world({w, h}); }, py::arg("width") = 4,
        py::arg("height") = 4);
  m.def(
      "coloured_graph",
      [](int nodes, double density, std::uint64_t seed, const std::string& noise, double rate, bool redundant) {
        GraphSpec g;
        g.node_count = nodes;
        g.edge_density = density;
        g.seed = seed;
        g.redundant_background = redundant;
        return gen_coloured_graph(g, {parse_noise(noise), rate});
      },
      py::arg("nodes") = 14, py::arg("density") = 0.3, py::arg("seed") = 1, py::arg("noise") = "none",
      py::arg("rate") = 0.0, py::arg("redundant_background") = true);
  m.def("grammar", [] { return gen_grammar_problem(bundled_grammar()); });
}
