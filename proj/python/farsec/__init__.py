"""Flow admission and routing under minimal per-link security constraints."""

import json

from ._core import (
    UNBOUNDED,
    Error,
    NotFoundError,
    Orchestrator,
    ParseError,
    SecureNetwork,
    ValidationError,
    WidestPaths,
    all_pairs_widest,
    bench,
    generate,
    min_security,
    oracle_widest,
    parse_header,
    solve,
    solve_csv,
)


def snapshot(orchestrator):
    """Current controller state as a dict."""
    return json.loads(orchestrator.snapshot_json())


def handle(orchestrator, event):
    """Applies one event (a dict) and returns the rule changes as dicts."""
    return [json.loads(c) for c in orchestrator.handle_json(json.dumps(event))]


__all__ = [
    "UNBOUNDED",
    "Error",
    "NotFoundError",
    "Orchestrator",
    "ParseError",
    "SecureNetwork",
    "ValidationError",
    "WidestPaths",
    "all_pairs_widest",
    "bench",
    "generate",
    "handle",
    "min_security",
    "oracle_widest",
    "parse_header",
    "snapshot",
    "solve",
    "solve_csv",
]
