#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "evograph/alias.hpp"
#include "evograph/bench.hpp"
#include "evograph/cli.hpp"
#include "evograph/config.hpp"
#include "evograph/evaluator.hpp"
#include "evograph/generator.hpp"
#include "evograph/graph.hpp"
#include "evograph/lineage.hpp"
#include "evograph/retrieval.hpp"
#include "evograph/types.hpp"

namespace py = pybind11;
using namespace evograph;

namespace {

// JSON bridging goes through the Python json module: every structured value
// crossing the boundary is plain dict/list/str/number on the Python side.
nlohmann::json to_nl(const py::object& obj) {
  py::module_ json = py::module_::import("json");
  auto text = py::cast<std::string>(json.attr("dumps")(obj));
  return nlohmann::json::parse(text);
}

py::object to_py(const nlohmann::json& j) {
  py::module_ json = py::module_::import("json");
  return json.attr("loads")(j.dump());
}

Config config_from(const py::object& obj) {
  if (obj.is_none()) return Config{};
  return Config::from_json(to_nl(obj), "config");
}

py::dict chain_row(const EvolutionChain& chain) {
  py::dict row;
  row["nodes"] = chain.nodes;
  py::list types, confs;
  for (const auto& e : chain.edges) {
    types.append(std::string(to_string(e.type)));
    confs.append(e.evidence ? e.evidence->confidence : 0.0);
  }
  row["edge_types"] = types;
  row["confidences"] = confs;
  row["rank_score"] = chain.rank_score;
  row["provenance"] = chain.provenance;
  return row;
}

class PyProposer : public ProposerPort {
 public:
  explicit PyProposer(py::function fn) : fn_(std::move(fn)) {}
  std::string propose(const std::string& payload) override {
    return py::cast<std::string>(fn_(payload));
  }

 private:
  py::function fn_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "typed method-evolution graphs: lineage search, idea evaluation, "
      "proposal generation, benchmarking";

  py::register_exception<Error>(m, "GraphError");

  py::class_<Graph>(m, "Graph")
      .def_property_readonly(
          "num_papers", [](const Graph& g) { return g.papers().size(); })
      .def_property_readonly(
          "num_methods", [](const Graph& g) { return g.methods().size(); })
      .def_property_readonly(
          "num_stubs", [](const Graph& g) { return g.stubs().size(); })
      .def_property_readonly(
          "num_edges", [](const Graph& g) { return g.edges().size(); })
      .def_property_readonly(
          "warnings", [](const Graph& g) { return g.warnings(); })
      .def("dump",
           [](const Graph& g, const std::string& dir) { dump_graph(g, dir); },
           py::arg("dir"))
      .def("validate_edges",
           [](const Graph& g, int year_tolerance) {
             py::list out;
             for (const auto& e : g.edges()) {
               if (!is_causal(e.type)) continue;
               py::dict row;
               row["source"] = e.source;
               row["target"] = e.target;
               row["type"] = std::string(to_string(e.type));
               try {
                 ValidationVerdict v = validate_edge(g, e, year_tolerance);
                 row["accepted"] = v.accepted;
                 row["reason"] = std::string(to_string(v.reason));
                 row["detail"] = v.detail;
               } catch (const ContractError&) {
                 row["accepted"] = true;
                 row["reason"] = std::string("skipped");
                 row["detail"] = std::string("no citing text available");
               }
               out.append(row);
             }
             return out;
           },
           py::arg("year_tolerance") = 1);

  py::class_<AliasRegistry>(m, "AliasRegistry")
      .def(py::init<>())
      .def("add",
           [](AliasRegistry& r, const std::string& method,
              const std::vector<std::string>& surfaces) {
             r.add(method, surfaces);
           },
           py::arg("method"), py::arg("surfaces"))
      .def("add_negative", &AliasRegistry::add_negative, py::arg("surface"),
           py::arg("note") = "")
      .def("exact_match",
           [](const AliasRegistry& r, const std::string& raw) -> py::object {
             auto hit = r.exact_match(raw);
             return hit ? py::cast(*hit) : py::none();
           },
           py::arg("raw"))
      .def("to_json", [](const AliasRegistry& r) { return to_py(r.to_json()); });

  m.def("load_graph", &load_graph, py::arg("nodes_path"),
        py::arg("edges_path"), py::arg("seeds_path") = "");
  m.def("load_aliases", &AliasRegistry::load, py::arg("path"));

  m.def("temporal_coherence",
        [](const py::object& delta_tau) {
          std::optional<int> d;
          if (!delta_tau.is_none()) d = py::cast<int>(delta_tau);
          return temporal_coherence(d);
        },
        py::arg("delta_tau"));

  m.def("resolve_mentions",
        [](const std::string& text, const AliasRegistry& registry) {
          py::list out;
          for (const auto& mention : resolve_mentions(text, registry)) {
            py::dict row;
            row["method"] = mention.method;
            row["surface"] = mention.surface;
            row["begin"] = mention.begin;
            row["end"] = mention.end;
            out.append(row);
          }
          return out;
        },
        py::arg("text"), py::arg("registry"));

  m.def("reconstruct_lineage",
        [](const std::string& query, const Graph& g,
           const AliasRegistry& registry, const py::object& config) {
          Config cfg = config_from(config);
          LineageResult res = reconstruct_lineage(query, g, registry, cfg.lineage);
          py::list chains;
          for (const auto& chain : res.chains) chains.append(chain_row(chain));
          py::dict out;
          out["chains"] = chains;
          out["diagnostic"] = res.diagnostic;
          return out;
        },
        py::arg("query"), py::arg("graph"), py::arg("registry"),
        py::arg("config") = py::none());

  m.def("evaluate_idea",
        [](const py::object& profile, const Graph& g,
           const AliasRegistry& registry, const py::object& config,
           const py::object& adjudication) {
          Config cfg = config_from(config);
          IdeaProfile idea = IdeaProfile::from_json(to_nl(profile));
          auto embedder = make_embedder(cfg.retrieval.embedder);
          auto reranker = make_reranker(cfg.retrieval.reranker);
          EvaluationReport report = evaluate_idea(
              idea, g, registry, *embedder, *reranker, cfg.evaluator,
              cfg.retrieval);
          if (!adjudication.is_none()) {
            nlohmann::json v = to_nl(adjudication);
            AdjudicatorVerdict verdict;
            if (v.contains("duplicate_relation"))
              verdict.duplicate_relation = duplicate_relation_from_string(
                  v["duplicate_relation"].get<std::string>());
            if (v.contains("coherence"))
              verdict.coherence = v["coherence"].get<double>();
            if (v.contains("novelty_validity"))
              verdict.novelty_validity = v["novelty_validity"].get<double>();
            if (v.contains("plausibility"))
              verdict.plausibility = v["plausibility"].get<double>();
            report = apply_adjudication(report, verdict, cfg.evaluator);
          }
          return to_py(report.to_json());
        },
        py::arg("profile"), py::arg("graph"), py::arg("registry"),
        py::arg("config") = py::none(), py::arg("adjudication") = py::none());

  m.def("generate_proposal",
        [](const std::string& query, const Graph& g,
           const AliasRegistry& registry, const py::object& config,
           const py::object& proposer) {
          Config cfg = config_from(config);
          CorpusIndex index = CorpusIndex::build(g, registry);
          Context ctx = retrieve_context(query, g, registry, index, cfg.retrieval);
          LineageResult lineage = reconstruct_lineage(query, g, registry, cfg.lineage);
          GapSummary summary =
              build_gap_summary(ctx, lineage.chains, g, index,
                                cfg.evaluator.now_year, cfg.generator);
          StrategyChoice choice = select_strategy(summary);
          std::unique_ptr<PyProposer> port;
          if (!proposer.is_none())
            port = std::make_unique<PyProposer>(py::cast<py::function>(proposer));
          Proposal out = generate_proposal(summary, choice, port.get(), g);
          return to_py(out.to_json());
        },
        py::arg("query"), py::arg("graph"), py::arg("registry"),
        py::arg("config") = py::none(), py::arg("proposer") = py::none());

  m.def("run_benchmark",
        [](const Graph& g, const AliasRegistry& registry,
           const py::object& reference, const std::vector<std::string>& algos,
           const py::object& config) {
          Config cfg = config_from(config);
          ReferenceGraph ref = ReferenceGraph::from_json(to_nl(reference));
          BenchReport report =
              run_lineage_benchmark(g, registry, ref, algos, cfg.lineage, cfg.bench);
          return to_py(report.to_json());
        },
        py::arg("graph"), py::arg("registry"), py::arg("reference"),
        py::arg("algorithms") =
            std::vector<std::string>{"sgt-mcts", "beam", "random-walk"},
        py::arg("config") = py::none());

  m.def("synthesize_graph",
        [](const py::object& params) {
          SynthGraphParams p = params.is_none()
                                   ? SynthGraphParams{}
                                   : SynthGraphParams::from_json(to_nl(params));
          auto [g, reference] = synthesize_graph(p);
          return py::make_tuple(std::move(g), to_py(reference.to_json()));
        },
        py::arg("params") = py::none());
  m.def("synth_registry", &synth_registry, py::arg("graph"));

  m.def("default_config", [] { return to_py(Config().to_json()); });
  m.def("run_command", &run_command, py::arg("args"),
        "run one CLI invocation; returns the exit status");
}
