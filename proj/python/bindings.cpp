#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "iebench/cli.hpp"
#include "iebench/error.hpp"
#include "iebench/metrics.hpp"
#include "iebench/pipeline.hpp"
#include "iebench/report.hpp"
#include "iebench/text.hpp"

namespace py = pybind11;
using namespace iebench;

namespace {

MatchConfig make_config(double threshold, int substitution_cost, bool case_sensitive, bool normalize_nfc) {
  MatchConfig config;
  config.threshold = threshold;
  config.substitution_cost = substitution_cost;
  config.case_sensitive = case_sensitive;
  config.normalize_nfc = normalize_nfc;
  config.validate();
  return config;
}

py::dict unit_to_dict(const UnitResult& r) {
  py::dict d;
  d["tool"] = r.tool;
  d["doc"] = r.key.document_id;
  d["page"] = r.key.page_index;
  d["label"] = r.label.name();
  d["status"] = to_string(r.status);
  d["p"] = r.scores.precision;
  d["r"] = r.scores.recall;
  d["f1"] = r.scores.f1;
  d["acc"] = r.scores.accuracy;
  d["m"] = r.scores.m;
  d["n"] = r.scores.n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Token-level extraction scoring and evaluation harness";
  m.attr("__version__") = kHarnessVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<MatchConfig>(m, "MatchConfig")
      .def(py::init(&make_config), py::arg("threshold") = 0.7, py::arg("substitution_cost") = 2,
           py::arg("case_sensitive") = true, py::arg("normalize_nfc") = false)
      .def_readonly("threshold", &MatchConfig::threshold)
      .def_readonly("substitution_cost", &MatchConfig::substitution_cost)
      .def_readonly("case_sensitive", &MatchConfig::case_sensitive)
      .def_readonly("normalize_nfc", &MatchConfig::normalize_nfc);

  py::class_<DocumentScores>(m, "DocumentScores")
      .def_readonly("precision", &DocumentScores::precision)
      .def_readonly("recall", &DocumentScores::recall)
      .def_readonly("f1", &DocumentScores::f1)
      .def_readonly("accuracy", &DocumentScores::accuracy)
      .def_readonly("m", &DocumentScores::m)
      .def_readonly("n", &DocumentScores::n)
      .def_readonly("empty_extraction", &DocumentScores::empty_extraction)
      .def("__repr__", [](const DocumentScores& s) {
        return "DocumentScores(p=" + format_fixed(s.precision, 6) + ", r=" + format_fixed(s.recall, 6) +
               ", f1=" + format_fixed(s.f1, 6) + ", acc=" + format_fixed(s.accuracy, 6) + ")";
      });

  m.def(
      "edit_distance",
      [](std::string_view a, std::string_view b, int cost) { return edit_distance(a, b, cost); }, py::arg("a"),
      py::arg("b"), py::arg("substitution_cost") = 2);
  m.def(
      "lev_ratio", [](std::string_view a, std::string_view b, const MatchConfig& c) { return lev_ratio(a, b, c); },
      py::arg("a"), py::arg("b"), py::arg("config") = MatchConfig{});
  m.def(
      "similarity_matrix",
      [](std::vector<std::string> extracted, std::vector<std::string> gt, const MatchConfig& config) {
        const auto matrix = similarity_matrix(TokenSequence(std::move(extracted)), TokenSequence(std::move(gt)), config);
        std::vector<std::vector<double>> out(matrix.rows(), std::vector<double>(matrix.cols()));
        for (std::size_t i = 0; i < matrix.rows(); ++i) {
          for (std::size_t j = 0; j < matrix.cols(); ++j) out[i][j] = matrix.at(i, j);
        }
        return out;
      },
      py::arg("extracted"), py::arg("gt"), py::arg("config") = MatchConfig{});
  m.def(
      "score_tokens",
      [](std::vector<std::string> extracted, std::vector<std::string> gt, const MatchConfig& config) {
        return score_tokens(TokenSequence(std::move(extracted)), TokenSequence(std::move(gt)), config);
      },
      py::arg("extracted"), py::arg("gt"), py::arg("config") = MatchConfig{});
  m.def("f1", &f1, py::arg("precision"), py::arg("recall"));
  m.def("round_half_even", &round_half_even, py::arg("value"), py::arg("decimals"));

  m.def(
      "read_journal",
      [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& r : read_journal(path).results) out.append(unit_to_dict(r));
        return out;
      },
      py::arg("path"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI invocation; returns (exit_code, stdout, stderr).");
}
