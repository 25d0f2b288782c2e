"""Plain-text instance and solution files.

Instance files are diffable and hand-editable:

    [meta]            # n, fleet_size, vehicle_weight, capacity, fuel_cost,
    key = value       # emission_cost, beta, alpha (scalar), delta1, delta2
    [levels]          # id lower avg upper bracket_start bracket_end
    [nodes]           # id x y demand service tw_open tw_close
    [distances]       # optional full matrix, row per line; Euclidean from
                      # coordinates when absent
    [alpha]           # optional full matrix, overrides the scalar

Solution files carry one route string followed by "key=value" lines
(objective=..., optionally status=...).  '#' starts a comment anywhere.
"""

from __future__ import annotations

from .model import (Instance, Node, SpeedLevel, broadcast_alpha,
                    euclidean_distances)


class FileFormatError(ValueError):
    """Unreadable instance or solution file."""


def _fmt(x: float) -> str:
    return repr(float(x))


def write_instance(inst: Instance, path) -> None:
    """Write an instance; identical instances give identical bytes."""
    size = len(inst.nodes)
    uniform = inst.alpha[0][1]
    is_uniform = all(inst.alpha[i][j] == uniform
                     for i in range(size) for j in range(size) if i != j)
    lines = ["[meta]",
             f"n = {inst.n}",
             f"fleet_size = {inst.fleet_size}",
             f"vehicle_weight = {_fmt(inst.vehicle_weight)}",
             f"capacity = {_fmt(inst.capacity)}",
             f"fuel_cost = {_fmt(inst.fuel_cost)}",
             f"emission_cost = {_fmt(inst.emission_cost)}",
             f"beta = {_fmt(inst.beta)}"]
    if is_uniform:
        lines.append(f"alpha = {_fmt(uniform)}")
    lines.append(f"delta1 = {_fmt(inst.emission_params[0])}")
    lines.append(f"delta2 = {_fmt(inst.emission_params[1])}")
    lines.append("[levels]")
    for lv in inst.speed_levels:
        lines.append(f"{lv.id} {_fmt(lv.lower)} {_fmt(lv.avg)} {_fmt(lv.upper)} "
                     f"{_fmt(lv.bracket_start)} {_fmt(lv.bracket_end)}")
    lines.append("[nodes]")
    for node in inst.nodes:
        lines.append(f"{node.id} {_fmt(node.x)} {_fmt(node.y)} "
                     f"{_fmt(node.demand)} {_fmt(node.service)} "
                     f"{_fmt(node.tw_open)} {_fmt(node.tw_close)}")
    lines.append("[distances]")
    for row in inst.distances:
        lines.append(" ".join(_fmt(v) for v in row))
    if not is_uniform:
        lines.append("[alpha]")
        for row in inst.alpha:
            lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _split_sections(path) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: list[tuple[int, str]] | None = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1].strip().lower()
                if name in sections:
                    raise FileFormatError(f"line {lineno}: duplicate section [{name}]")
                current = sections[name] = []
                continue
            if current is None:
                raise FileFormatError(f"line {lineno}: content before any section")
            current.append((lineno, line))
    return sections


def _floats(lineno: int, line: str, count: int | None = None) -> list[float]:
    try:
        values = [float(tok) for tok in line.split()]
    except ValueError:
        raise FileFormatError(f"line {lineno}: non-numeric value") from None
    if count is not None and len(values) != count:
        raise FileFormatError(f"line {lineno}: expected {count} values, "
                              f"got {len(values)}")
    return values


def load_instance(path) -> Instance:
    """Parse an instance file; model invariants are validated on build."""
    sections = _split_sections(path)
    for required in ("meta", "levels", "nodes"):
        if required not in sections:
            raise FileFormatError(f"missing [{required}] section")
    meta: dict[str, str] = {}
    for lineno, line in sections["meta"]:
        if "=" not in line:
            raise FileFormatError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        meta[key.strip().lower()] = value.strip()

    def meta_value(key, parse, default=None):
        if key not in meta:
            if default is not None:
                return default
            raise FileFormatError(f"[meta] is missing '{key}'")
        try:
            return parse(meta[key])
        except ValueError:
            raise FileFormatError(f"[meta] '{key}': bad value {meta[key]!r}") from None

    n = meta_value("n", int)
    size = n + 2

    levels = []
    for lineno, line in sections["levels"]:
        vals = _floats(lineno, line, 6)
        levels.append(SpeedLevel(int(vals[0]), vals[1], vals[2], vals[3],
                                 vals[4], vals[5]))
    nodes_by_id = {}
    for lineno, line in sections["nodes"]:
        vals = _floats(lineno, line, 7)
        node = Node(int(vals[0]), vals[1], vals[2], vals[3], vals[4],
                    vals[5], vals[6])
        if node.id in nodes_by_id:
            raise FileFormatError(f"line {lineno}: duplicate node id {node.id}")
        nodes_by_id[node.id] = node
    if sorted(nodes_by_id) != list(range(size)):
        raise FileFormatError(f"[nodes] must list ids 0..{size - 1} exactly")
    nodes = [nodes_by_id[i] for i in range(size)]

    if "distances" in sections:
        rows = sections["distances"]
        if len(rows) != size:
            raise FileFormatError(f"[distances] needs {size} rows, has {len(rows)}")
        distances = [_floats(lineno, line, size) for lineno, line in rows]
    else:
        distances = euclidean_distances(nodes)

    if "alpha" in sections:
        rows = sections["alpha"]
        if len(rows) != size:
            raise FileFormatError(f"[alpha] needs {size} rows, has {len(rows)}")
        alpha = [_floats(lineno, line, size) for lineno, line in rows]
    else:
        alpha = broadcast_alpha(meta_value("alpha", float), size)

    return Instance(
        nodes=nodes,
        distances=distances,
        fleet_size=meta_value("fleet_size", int),
        vehicle_weight=meta_value("vehicle_weight", float),
        capacity=meta_value("capacity", float),
        fuel_cost=meta_value("fuel_cost", float),
        emission_cost=meta_value("emission_cost", float),
        alpha=alpha,
        beta=meta_value("beta", float),
        speed_levels=levels,
        emission_params=(meta_value("delta1", float, 1.0),
                         meta_value("delta2", float, 0.0)),
    )


def write_solution(path, text: str, objective: float | None = None,
                   status: str | None = None) -> None:
    lines = [text]
    if objective is not None:
        lines.append(f"objective={_fmt(objective)}")
    if status is not None:
        lines.append(f"status={status}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_solution(path) -> tuple[str, dict[str, str]]:
    """Return the route string and any key=value metadata lines."""
    text = None
    meta: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
                meta[key.strip()] = value.strip()
            elif text is None:
                text = line
            else:
                raise FileFormatError(f"line {lineno}: second route string in file")
    if text is None:
        raise FileFormatError("no route string in solution file")
    return text, meta
