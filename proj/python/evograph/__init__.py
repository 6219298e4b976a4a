"""Typed method-evolution graphs: lineage search, idea evaluation,
proposal generation and benchmarking over citation-extracted edges."""

from ._core import (
    AliasRegistry,
    Graph,
    GraphError,
    default_config,
    evaluate_idea,
    generate_proposal,
    load_aliases,
    load_graph,
    reconstruct_lineage,
    resolve_mentions,
    run_benchmark,
    run_command,
    synth_registry,
    synthesize_graph,
    temporal_coherence,
)

__all__ = [
    "AliasRegistry",
    "Graph",
    "GraphError",
    "default_config",
    "evaluate_idea",
    "generate_proposal",
    "load_aliases",
    "load_graph",
    "reconstruct_lineage",
    "resolve_mentions",
    "run_benchmark",
    "run_command",
    "synth_registry",
    "synthesize_graph",
    "temporal_coherence",
]
