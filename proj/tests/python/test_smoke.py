"""End-to-end smoke tests for the python bindings."""

import os
import pathlib

import pytest

import evograph

FIXTURES = pathlib.Path(
    os.environ.get(
        "EVOGRAPH_FIXTURES",
        pathlib.Path(__file__).resolve().parents[2] / "fixtures",
    )
)
TINY = FIXTURES / "tiny"


@pytest.fixture(scope="module")
def tiny_graph():
    return evograph.load_graph(
        str(TINY / "nodes.jsonl"),
        str(TINY / "edges.jsonl"),
        str(TINY / "method_seeds.jsonl"),
    )


@pytest.fixture(scope="module")
def tiny_registry():
    return evograph.load_aliases(str(TINY / "aliases.json"))


def test_load_counts(tiny_graph):
    assert tiny_graph.num_papers == 5
    assert tiny_graph.num_methods == 5
    assert tiny_graph.num_stubs == 1
    assert tiny_graph.num_edges == 7


def test_load_missing_file_raises():
    with pytest.raises(evograph.GraphError):
        evograph.load_graph("/nonexistent/nodes.jsonl", "/nonexistent/edges.jsonl")


def test_validate_edges_all_accepted(tiny_graph):
    rows = tiny_graph.validate_edges()
    assert len(rows) == 6  # background edges are not checked
    assert all(r["accepted"] for r in rows)


def test_temporal_coherence_branches():
    assert evograph.temporal_coherence(None) == pytest.approx(0.70)
    assert evograph.temporal_coherence(0) == pytest.approx(0.85)
    assert evograph.temporal_coherence(2) == pytest.approx(1.00)
    assert evograph.temporal_coherence(5) == pytest.approx(0.80)
    assert evograph.temporal_coherence(40) == pytest.approx(0.30)


def test_resolve_mentions(tiny_registry):
    hits = evograph.resolve_mentions(
        "We extend deepsparse v2 and compare against widequant.", tiny_registry
    )
    assert [h["method"] for h in hits] == ["mC", "mD"]
    assert tiny_registry.exact_match("the baseline") is None


def test_reconstruct_lineage(tiny_graph, tiny_registry):
    out = evograph.reconstruct_lineage("deepsparse v2", tiny_graph, tiny_registry)
    assert out["diagnostic"] == ""
    assert out["chains"], "expected at least one chain"
    top = out["chains"][0]
    assert "pC" in top["nodes"]
    assert len(top["edge_types"]) == len(top["nodes"]) - 1
    assert top["provenance"] in ("primary", "branch")


def test_evaluate_idea_and_adjudication(tiny_graph, tiny_registry):
    profile = {
        "problem": "deepsparse spends most inference time in dense blocks.",
        "innovation": "We gate widequant kernels inside deepsparse.",
        "implementation": "Reuse the released kernels.",
        "target": "latency",
    }
    report = evograph.evaluate_idea(profile, tiny_graph, tiny_registry)
    assert report["fallback_used"] is False
    assert report["methods"] == ["mC", "mD"]
    assert 1.0 <= report["overall"] <= 10.0

    adjudicated = evograph.evaluate_idea(
        profile,
        tiny_graph,
        tiny_registry,
        adjudication={"duplicate_relation": "related", "coherence": 2.0},
    )
    assert adjudicated["adjudicated"] is True
    assert adjudicated["overall"] <= 6.0  # low sub-score cap

    fallback = evograph.evaluate_idea(
        {"problem": "no recognizable systems here"}, tiny_graph, tiny_registry
    )
    assert fallback["fallback_used"] is True
    assert fallback["overall"] == pytest.approx(6.5)


def test_generate_proposal_without_proposer(tiny_graph, tiny_registry):
    out = evograph.generate_proposal("widequant", tiny_graph, tiny_registry)
    assert out["title"]
    assert out["body"]
    assert out["fallback"] is True


def test_generate_proposal_with_callable(tiny_graph, tiny_registry):
    def garbage_proposer(payload):
        assert payload  # the port receives the serialized gap summary
        return "not even json"

    out = evograph.generate_proposal(
        "widequant", tiny_graph, tiny_registry, proposer=garbage_proposer
    )
    # unusable replies must degrade to the certified fallback, never crash
    assert out["fallback"] is True or out["degenerate"] is True


def test_synthesize_benchmark_roundtrip(tmp_path):
    params = {
        "n_methods": 16,
        "depth": 4,
        "branching": 2,
        "noise_rate": 0.25,
        "year_span": 8,
        "seed": 42,
    }
    graph, reference = evograph.synthesize_graph(params)
    assert graph.num_methods == 7  # shared root + branching * (depth - 1)
    assert graph.num_papers == 7
    assert len(reference["chains"]) == 2

    registry = evograph.synth_registry(graph)
    assert registry.exact_match("synth method 0") == "m0"

    report = evograph.run_benchmark(graph, registry, reference)
    assert [a["algorithm"] for a in report["algorithms"]] == [
        "sgt-mcts",
        "beam",
        "random-walk",
    ]
    for algo in report["algorithms"]:
        for key in ("nr", "er", "cas"):
            assert 0.0 <= algo[key] <= 1.0
        assert len(algo["rows"]) == len(reference["chains"])

    out_dir = tmp_path / "dumped"
    out_dir.mkdir()
    graph.dump(str(out_dir))
    reloaded = evograph.load_graph(
        str(out_dir / "nodes.jsonl"),
        str(out_dir / "edges.jsonl"),
        str(out_dir / "method_seeds.jsonl"),
    )
    assert reloaded.num_methods == graph.num_methods
    assert reloaded.num_edges == graph.num_edges


def test_default_config_shape():
    cfg = evograph.default_config()
    assert {"lineage", "evaluator", "retrieval", "generator", "bench"} <= set(cfg)


def test_run_command():
    def validate(edges):
        return evograph.run_command(
            [
                "validate",
                "--graph-nodes",
                str(TINY / "nodes.jsonl"),
                "--graph-edges",
                str(edges),
                "--graph-seeds",
                str(TINY / "method_seeds.jsonl"),
            ]
        )

    assert validate(TINY / "edges.jsonl") == 0
    assert validate(FIXTURES / "broken" / "edges_quote.jsonl") == 1
    assert evograph.run_command(["no-such-command"]) == 2
