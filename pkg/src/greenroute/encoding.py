"""Flat string codec for solutions.

A solution is a single hyphen-separated token stream; each token is
"node,level".  Routes are delimited by the depot ids themselves: every
route opens with a token for node 0 and closes with one for node n+1, so
"0,1-3,1-5,1-11,1-0,2-4,2-11,2" is two routes on an n=10 instance.  A
token's level is the speed level of the edge arriving at its node; the
level on a leading depot token carries no information (it mirrors the
first edge on encode and is ignored on decode).
"""

from __future__ import annotations

from .model import DEPOT, Instance, Solution, Visit


class SolutionParseError(ValueError):
    """Invalid solution string; position is the 1-based token number."""

    def __init__(self, position: int, message: str):
        super().__init__(f"token {position}: {message}")
        self.position = position


def encode(sol: Solution, inst: Instance) -> str:
    """Render a solution as its canonical token string."""
    parts = []
    for route in sol.routes:
        parts.append(f"{DEPOT},{route[1].speed_level}")
        parts.extend(f"{v.node},{v.speed_level}" for v in route[1:])
    return "-".join(parts)


def decode(text: str, inst: Instance) -> Solution:
    """Parse a token string back into a Solution.

    Whitespace around tokens is ignored.  Customer coverage is not
    validated here; duplicated or missing customers are the feasibility
    checker's business.
    """
    end = inst.end_depot
    routes: list[list[Visit]] = []
    current: list[Visit] | None = None
    tokens = text.split("-")
    for pos, raw in enumerate(tokens, start=1):
        token = raw.strip()
        fields = token.split(",")
        if len(fields) != 2:
            raise SolutionParseError(pos, f"expected 'node,level', got {token!r}")
        try:
            node, level = int(fields[0]), int(fields[1])
        except ValueError:
            raise SolutionParseError(pos, f"non-integer field in {token!r}") from None
        if not (0 <= node <= end):
            raise SolutionParseError(pos, f"unknown node id {node}")
        if current is None:
            if node != DEPOT:
                raise SolutionParseError(pos, f"route must begin at depot {DEPOT}")
            current = [Visit(DEPOT, level)]
            continue
        if level not in inst._levels:
            raise SolutionParseError(pos, f"speed level {level} out of range")
        if node == DEPOT:
            raise SolutionParseError(pos, "previous route was not closed at the end depot")
        current.append(Visit(node, level))
        if node == end:
            current[0] = Visit(DEPOT, current[1].speed_level)
            routes.append(current)
            current = None
    if current is not None:
        raise SolutionParseError(len(tokens), "route is not terminated at the end depot")
    return Solution(routes)
