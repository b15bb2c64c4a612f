"""Top program construction for meta-interpretive learning, with an
iterative-deepening baseline."""

from ._core import (
    Hypothesis,
    ParseError,
    Problem,
    accuracy,
    bounds,
    coloured_graph,
    grammar,
    grid_world,
    load_problem,
    louise_learn,
    metagol_learn,
    parse_problem,
)

__all__ = [
    "Hypothesis",
    "ParseError",
    "Problem",
    "accuracy",
    "bounds",
    "coloured_graph",
    "grammar",
    "grid_world",
    "load_problem",
    "louise_learn",
    "metagol_learn",
    "parse_problem",
]
