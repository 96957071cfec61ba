#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "xlparse/common.h"
#include "xlparse/evaluation.h"
#include "xlparse/parser.h"
#include "xlparse/pipeline.h"
#include "xlparse/synthetic.h"
#include "xlparse/treebank.h"

namespace py = pybind11;
using namespace xlparse;

namespace {

py::dict prf_dict(const std::map<std::string, Prf>& table) {
  py::dict d;
  for (const auto& [key, p] : table) {
    py::dict row;
    row["gold"] = p.gold;
    row["predicted"] = p.predicted;
    row["correct"] = p.correct;
    row["precision"] = p.precision();
    row["recall"] = p.recall();
    row["f1"] = p.f1();
    d[py::str(key)] = row;
  }
  return d;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["tokens"] = r.tokens;
  d["uas"] = r.uas();
  d["las"] = r.las();
  d["exclude_punct"] = r.exclude_punct;
  d["per_label"] = prf_dict(r.per_label);
  d["per_modifier_pos"] = prf_dict(r.per_modifier_pos);
  d["per_head_pos"] = prf_dict(r.per_head_pos);
  return d;
}

}  // namespace

PYBIND11_MODULE(_xlparse, m) {
  m.doc() = "Cross-lingual dependency parser transfer";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<UsageError>(m, "UsageError", error);
  auto data_error = py::register_exception<DataError>(m, "DataError", error);
  py::register_exception<ParseError>(m, "ParseError", data_error);

  py::class_<Token>(m, "Token")
      .def_readonly("index", &Token::index)
      .def_readonly("form", &Token::form)
      .def_readonly("upos", &Token::upos)
      .def_readonly("head", &Token::head)
      .def_readonly("deprel", &Token::deprel)
      .def_readonly("lexform", &Token::lexform);

  py::class_<Sentence>(m, "Sentence")
      .def_readonly("tokens", &Sentence::tokens)
      .def_readonly("language", &Sentence::language)
      .def("heads", &Sentence::heads)
      .def("__len__", &Sentence::size)
      .def("__eq__", [](const Sentence& a, const Sentence& b) { return a == b; });

  py::class_<Treebank>(m, "Treebank")
      .def_readonly("sentences", &Treebank::sentences)
      .def_readonly("language", &Treebank::language)
      .def("token_count", &Treebank::token_count)
      .def("__len__", &Treebank::size)
      .def("__eq__", [](const Treebank& a, const Treebank& b) { return a == b; })
      .def("to_conllu", [](const Treebank& tb) {
        std::ostringstream out;
        write_conllu(out, tb);
        return out.str();
      });

  m.def("read_conllu", [](const std::string& path, const std::string& language) { return read_conllu_file(path, language); },
        py::arg("path"), py::arg("language") = "xx");
  m.def("parse_conllu",
        [](const std::string& text, const std::string& language) {
          std::istringstream in(text);
          return read_conllu(in, language);
        },
        py::arg("text"), py::arg("language") = "xx");
  m.def("write_conllu", &write_conllu_file, py::arg("path"), py::arg("treebank"));
  m.def("strip_trees", [](Treebank tb) {
    for (auto& s : tb.sentences) s = strip_tree(std::move(s));
    return tb;
  });
  m.def("deterministic_treebank", &deterministic_treebank, py::arg("sentences"), py::arg("seed"),
        py::arg("language") = "xx");

  py::class_<Model>(m, "Model")
      .def(py::init([](const Treebank& tb, const std::string& templates, int beam) {
             return Model(collect_labels(tb), TemplateSet::parse(templates), beam);
           }),
           py::arg("treebank"), py::arg("templates") = "P", py::arg("beam") = 8)
      .def_property_readonly("templates", [](const Model& m) { return m.templates.to_string(); })
      .def_readonly("beam_width", &Model::beam_width)
      .def_readonly("metadata", &Model::metadata)
      .def("num_features", [](const Model& m) { return m.weights.num_features(); })
      .def("save", [](const Model& m, const std::string& path) { save_model_file(path, m); })
      .def_static("load", &load_model_file)
      .def("to_bytes", [](const Model& m) {
        std::ostringstream out;
        save_model(out, m);
        return py::bytes(out.str());
      });

  m.def(
      "train",
      [](const Model& init, const Treebank& tb, int epochs, std::uint64_t seed, bool early_update) {
        TrainOptions o;
        o.epochs = epochs;
        o.seed = seed;
        o.early_update = early_update;
        py::gil_scoped_release release;
        return train(init, tb, o);
      },
      py::arg("model"), py::arg("treebank"), py::arg("epochs") = 3, py::arg("seed") = 1,
      py::arg("early_update") = false);
  m.def(
      "parse",
      [](const Model& model, const Treebank& tb, int threads) {
        py::gil_scoped_release release;
        return parse_treebank(model, tb, threads);
      },
      py::arg("model"), py::arg("treebank"), py::arg("threads") = 1);

  m.def(
      "evaluate",
      [](const Treebank& gold, const Treebank& pred, bool exclude_punct) {
        return report_dict(evaluate(gold, pred, exclude_punct));
      },
      py::arg("gold"), py::arg("pred"), py::arg("exclude_punct") = false);
  m.def(
      "report_text",
      [](const Treebank& gold, const Treebank& pred, bool exclude_punct) {
        std::ostringstream out;
        write_report_text(out, evaluate(gold, pred, exclude_punct));
        return out.str();
      },
      py::arg("gold"), py::arg("pred"), py::arg("exclude_punct") = false);
  m.def("mcnemar_exact", &mcnemar_exact, py::arg("b"), py::arg("c"));
  m.def("mcnemar_chi2", &mcnemar_chi2, py::arg("b"), py::arg("c"));

  m.def(
      "write_world",
      [](const std::string& dir, std::uint64_t seed, int source_train, int parallel, int target_test, int target_raw,
         int monolingual) {
        WorldOptions o;
        o.seed = seed;
        o.source_train = source_train;
        o.parallel = parallel;
        o.target_test = target_test;
        o.target_raw = target_raw;
        o.monolingual = monolingual;
        write_world(make_world(o), dir);
      },
      py::arg("dir"), py::arg("seed") = 7, py::arg("source_train") = 500, py::arg("parallel") = 500,
      py::arg("target_test") = 200, py::arg("target_raw") = 500, py::arg("monolingual") = 2000);

  m.def(
      "run_pipeline",
      [](const std::string& config_path, const std::string& run_dir, const std::map<std::string, std::string>& overrides,
         int threads) {
        auto config = ExperimentConfig::load(config_path);
        for (const auto& [k, v] : overrides) config.set(k, v);
        const std::string dir = resolve_run_dir(config, run_dir);
        PipelineResult r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(config, dir, threads);
        }
        py::dict d = report_dict(r.report);
        d["run_dir"] = r.run_dir;
        d["sources"] = r.sources;
        return d;
      },
      py::arg("config"), py::arg("run_dir") = "", py::arg("overrides") = std::map<std::string, std::string>{},
      py::arg("threads") = 1);
}
