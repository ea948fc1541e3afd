"""Graph, pattern and kernel files.

Text graphs::

    # comment
    n 4
    a b
    b c
    parts a,c | b,d

Labels may be arbitrary tokens.  If every label is an integer in 0..n-1 the
ids are kept; otherwise labels get ids in order of first appearance and the
mapping is returned so reports can echo it.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .generators import GenSpec, generate, parse_pattern
from .graph import Graph, GraphError, PatternGraph, build_graph
from .homcount import Kernel


class InputError(GraphError):
    """Malformed input; the message starts with the location."""


@dataclass(frozen=True)
class Loaded:
    graph: Graph
    source: str
    # labels[i] is the original label of vertex i, or None when ids were kept
    labels: tuple[str, ...] | None = None


def _parse_count(tok: str, where: str) -> int:
    try:
        n = int(tok)
    except ValueError:
        raise InputError(f"{where}: vertex count {tok!r} is not an integer") from None
    if n < 1:
        raise InputError(f"{where}: vertex count must be positive, got {n}")
    return n


def parse_graph_text(text: str, source: str = "<text>") -> Loaded:
    n = None
    raw_edges: list[tuple[str, str, int]] = []
    parts: tuple[list[str], list[str]] | None = None
    order: list[str] = []
    seen: set[str] = set()

    def note(label: str):
        if label not in seen:
            seen.add(label)
            order.append(label)

    for lineno, line in enumerate(text.splitlines(), 1):
        where = f"{source}:{lineno}"
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        if toks[0] == "n":
            if n is not None:
                raise InputError(f"{where}: repeated 'n' line")
            if len(toks) != 2:
                raise InputError(f"{where}: expected 'n <count>'")
            n = _parse_count(toks[1], where)
            continue
        if n is None:
            raise InputError(f"{where}: the first line must be 'n <count>'")
        if toks[0] == "parts":
            if parts is not None:
                raise InputError(f"{where}: repeated 'parts' line")
            rest = body[len("parts"):]
            if rest.count("|") != 1:
                raise InputError(f"{where}: expected 'parts a,b | c,d'")
            left, right = ([x.strip() for x in side.split(",") if x.strip()]
                           for side in rest.split("|"))
            parts = (left, right)
            for x in left + right:
                note(x)
            continue
        if len(toks) != 2:
            raise InputError(f"{where}: expected an edge 'u v', got {body!r}")
        u, v = toks
        if u == v:
            raise InputError(f"{where}: self-loop at {u!r}")
        note(u)
        note(v)
        raw_edges.append((u, v, lineno))
    if n is None:
        raise InputError(f"{source}: missing 'n <count>' line")

    if order and all(re.fullmatch(r"\d+", x) for x in order):
        for u, v, lineno in raw_edges:
            for x in (u, v):
                if int(x) >= n:
                    raise InputError(f"{source}:{lineno}: vertex {x} out of range for n = {n}")
        index = {x: int(x) for x in order}
        labels = None
    else:
        if len(order) > n:
            raise InputError(f"{source}: {len(order)} distinct labels but n = {n}")
        index = {x: i for i, x in enumerate(order)}
        labels = tuple(order) + tuple(f"_{i}" for i in range(len(order), n))
    edges = [(index[u], index[v]) for u, v, _ in raw_edges]
    partition = None
    if parts is not None:
        partition = ([index[x] for x in parts[0]], [index[x] for x in parts[1]])
    try:
        g = build_graph(n, edges, partition=partition)
    except GraphError as exc:
        raise InputError(f"{source}: {exc}") from None
    return Loaded(g, source, labels)


def parse_graph_json(text: str, source: str = "<json>") -> Loaded:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise InputError(f"{source}: expected an object with 'n' and 'edges'")
    lines = [f"n {obj['n']}"]
    try:
        for e in obj["edges"]:
            u, v = e
            lines.append(f"{u} {v}")
        if obj.get("parts") is not None:
            a, b = obj["parts"]
            lines.append("parts " + ",".join(map(str, a)) + " | " + ",".join(map(str, b)))
    except (TypeError, ValueError):
        raise InputError(f"{source}: edges must be pairs and parts two lists") from None
    return parse_graph_text("\n".join(lines), source)


def graph_to_text(g: Graph, header: list[str] | None = None) -> str:
    out = [f"# {h}" for h in header or []]
    out.append(f"n {g.n}")
    out += [f"{u} {v}" for u, v in g.edges]
    if isinstance(g, PatternGraph):
        out.append("parts " + ",".join(map(str, g.part1)) + " | " + ",".join(map(str, g.part2)))
    return "\n".join(out) + "\n"


def graph_to_json(g: Graph) -> dict:
    obj = {"n": g.n, "edges": [list(e) for e in g.edges]}
    if isinstance(g, PatternGraph):
        obj["parts"] = [list(g.part1), list(g.part2)]
    return obj


_GENSPEC = re.compile(r"^(?P<family>[a-z_]+):(?P<params>[^;]*)(?:;seed=(?P<seed>-?\d+))?$")


def parse_genspec(text: str) -> GenSpec:
    """``family:key=value,...;seed=s``, the format of GenSpec.describe()."""
    m = _GENSPEC.match(text.strip())
    if not m:
        raise InputError(f"<genspec>: cannot parse {text!r}")
    params = {}
    for item in filter(None, m["params"].split(",")):
        if "=" not in item:
            raise InputError(f"<genspec>: parameter {item!r} lacks '='")
        k, v = item.split("=", 1)
        params[k] = v if k in ("p", "base") else _int_param(k, v)
    return GenSpec(m["family"], params, int(m["seed"] or 0))


def _int_param(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"<genspec>: parameter {key}={value!r} is not an integer") from None


def load_graph(ref: str) -> Loaded:
    """A file path, a pattern shorthand such as C4 or K_{2,3}, or a genspec."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
        if path.suffix == ".json":
            return parse_graph_json(text, str(path))
        return parse_graph_text(text, str(path))
    if ":" in ref:
        return Loaded(generate(parse_genspec(ref)), ref)
    try:
        return Loaded(parse_pattern(ref), ref)
    except GraphError:
        raise InputError(f"{ref}: not a file, pattern shorthand, or genspec") from None


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InputError(f"{where}: rationals must be strings 'a/b' or integers, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: bad rational {x!r}") from None


def parse_kernel_json(text: str, source: str = "<kernel>") -> Kernel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "weights" not in obj or "measure" not in obj:
        raise InputError(f"{source}: expected an object with 'weights' and 'measure'")
    try:
        weights = [[_rational(x, f"{source}: weights[{i}][{j}]") for j, x in enumerate(row)]
                   for i, row in enumerate(obj["weights"])]
        measure = [_rational(x, f"{source}: measure[{i}]") for i, x in enumerate(obj["measure"])]
    except TypeError:
        raise InputError(f"{source}: weights must be a list of rows") from None
    try:
        return Kernel(tuple(map(tuple, weights)), tuple(measure))
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def load_kernel(path: str) -> Kernel:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: kernel file not found")
    return parse_kernel_json(p.read_text(), str(p))
