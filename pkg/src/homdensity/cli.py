"""Command-line entry point.

Exit status: 0 computed, 1 a theorem-backed check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .drc import DEFAULT_ENUM_BUDGET, DrcError, DrcParams, constructive_bound, drc_classify, \
    drc_verify, reference_constant
from .forcing import DEFAULT_TOL, degree_concentration, forcing_experiment, quasirandom_battery
from .generators import FAMILIES, RNG_ALGORITHM, GenSpec, generate
from .graph import DEFAULT_VERTEX_BUDGET, GraphError, as_pattern, build_graph
from .homcount import (EngineError, Kernel, applicable_engines, density, hom_count,
                       injective_density, kernel_density)
from .inequality import (ConstantKernelSpace, GraphSpace, KernelGridSpace, LocalSearchSpace,
                         correlation_check, correlation_search, sidorenko_report,
                         star_plus_clique_space, tensor_power_check)
from .io import InputError, Loaded, graph_to_json, graph_to_text, load_graph, load_kernel
from .ramsey import Coloring, mono_hom_density, multiplicity_scan
from .report import SCHEMA, dumps, to_csv, to_jsonable

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    seed: int
    budget_vertices: int
    budget_enum: int
    budget_search: int
    tol_edge: Fraction
    tol_c4: Fraction
    format: str
    exhaustive: bool
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


def engine_info() -> dict:
    return {"package": f"homdensity {__version__}", "rng": RNG_ALGORITHM,
            "numpy": np.__version__}


class UsageError(Exception):
    pass


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _common(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-vertices", type=int, default=DEFAULT_VERTEX_BUDGET)
    p.add_argument("--budget-enum", type=int, default=DEFAULT_ENUM_BUDGET)
    p.add_argument("--budget-search", type=int, default=100_000)
    p.add_argument("--tol-edge", type=_fraction_arg, default=DEFAULT_TOL)
    p.add_argument("--tol-c4", type=_fraction_arg, default=DEFAULT_TOL)
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--exhaustive", action="store_true")


def _host(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph", help="file, pattern shorthand, or genspec family:k=v,...;seed=s")
    g.add_argument("--kernel", help="kernel JSON file")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="homdensity",
                                  description="Exact homomorphism densities and checks.")
    top.add_argument("--version", action="version", version=f"homdensity {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph")
    _common(p, formats=("text", "json", "csv"))
    p.add_argument("--family", required=True, choices=FAMILIES)
    for name in ("n", "q", "a", "b", "k", "d", "t", "n1", "n2"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--p")
    p.add_argument("--base")

    p = sub.add_parser("count", help="homomorphism counts by every applicable engine")
    _common(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--graph", required=True)

    p = sub.add_parser("density", help="homomorphism density t_H")
    _common(p)
    p.add_argument("--pattern", required=True)
    _host(p)
    p.add_argument("--injective", action="store_true", help="also report the copy density")

    rep = sub.add_parser("report", help="inequality and quasirandomness reports")
    rsub = rep.add_subparsers(dest="which", required=True)
    p = rsub.add_parser("sidorenko")
    _common(p)
    p.add_argument("--pattern", required=True)
    _host(p)
    p = rsub.add_parser("forcing")
    _common(p)
    p.add_argument("--graph", help="run the battery on one graph")
    p.add_argument("--pattern", help="pattern for a forcing experiment")
    p.add_argument("--family", nargs="+", help="genspecs forming the experiment family")
    p.add_argument("--p", default="auto")
    p.add_argument("--epsilon", type=_fraction_arg, help="add degree concentration")

    p = sub.add_parser("drc", help="rare/bad/good classification")
    _common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=_fraction_arg)
    p.add_argument("--samples", type=int)
    p.add_argument("--pattern", help="also run the constructive lower bound for this pattern")

    chk = sub.add_parser("check", help="single-instance checks")
    csub = chk.add_subparsers(dest="which", required=True)
    p = csub.add_parser("correlation")
    _common(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--parts", required=True, help="edge groups, e.g. '0-1,1-2;2-3'")
    _host(p)

    srch = sub.add_parser("search", help="searches")
    ssub = srch.add_subparsers(dest="which", required=True)
    p = ssub.add_parser("correlation")
    _common(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--parts", required=True)
    p.add_argument("--space", required=True,
                   help="graphs:MAXN | kernel-grid:Q,LEVELS,MASS | constant:LEVELS | "
                        "local:Q,DEN[,RESTARTS,STEPS] | star-clique:K,C")

    p = sub.add_parser("ramsey", help="monochromatic copy densities")
    _common(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)

    p = sub.add_parser("tensor", help="tensor power identity")
    _common(p)
    p.add_argument("--pattern", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=int, required=True)

    p = sub.add_parser("schema", help="print the report JSON schema")
    return top


def _config(args, name: str, inputs: dict, options: dict) -> RunConfig:
    return RunConfig(name, args.seed, args.budget_vertices, args.budget_enum, args.budget_search,
                     args.tol_edge, args.tol_c4, args.format, args.exhaustive, inputs, options)


def _host_of(args) -> tuple[object, Loaded | None]:
    if getattr(args, "kernel", None):
        return load_kernel(args.kernel), None
    loaded = load_graph(args.graph)
    return loaded.graph, loaded


def _parts(text: str) -> list[list[tuple[int, int]]]:
    out = []
    for group in text.split(";"):
        edges = []
        for item in filter(None, group.split(",")):
            try:
                u, v = (int(x) for x in item.split("-"))
            except ValueError:
                raise InputError(f"--parts: bad edge {item!r}, expected 'u-v'") from None
            edges.append((u, v))
        out.append(edges)
    return out


def _space(text: str, seed: int):
    kind, _, rest = text.partition(":")
    try:
        nums = [int(x) for x in rest.split(",")] if rest else []
        if kind == "graphs":
            (max_n,) = nums
            return GraphSpace(max_n)
        if kind == "kernel-grid":
            return KernelGridSpace(*nums)
        if kind == "constant":
            return ConstantKernelSpace(*nums)
        if kind == "local":
            return LocalSearchSpace(*nums)
        if kind == "star-clique":
            return star_plus_clique_space(*nums)
    except (ValueError, TypeError):
        raise InputError(f"--space: bad parameters in {text!r}") from None
    raise InputError(f"--space: unknown space kind {kind!r}")


def _labels(**loaded) -> dict:
    return {k: list(v.labels) for k, v in loaded.items() if v is not None and v.labels}


def run(args) -> tuple[RunConfig, dict, list[str], dict, str | None]:
    """Returns (config, result, failures, labels, raw text output or None)."""
    cmd = args.command
    failures: list[str] = []
    labels: dict = {}

    if cmd == "gen":
        params = {k: getattr(args, k) for k in ("n", "q", "a", "b", "k", "d", "t", "n1", "n2",
                                               "p", "base") if getattr(args, k) is not None}
        spec = GenSpec(args.family, params, args.seed)
        g = generate(spec)
        cfg = _config(args, "gen", {}, {"family": args.family, **params})
        text = graph_to_text(g, [f"genspec: {spec.describe()}", f"rng: {RNG_ALGORITHM}"])
        result = {"genspec": spec.describe(), "graph": graph_to_json(g)}
        return cfg, result, failures, labels, text

    if cmd == "count":
        h, g = load_graph(args.pattern), load_graph(args.graph)
        cfg = _config(args, "count", {"pattern": args.pattern, "graph": args.graph}, {})
        engines = applicable_engines(h.graph, g.graph)
        if len(set(engines.values())) > 1:
            failures.append("engine-disagreement")
        result = {"engines": engines, "count": hom_count(h.graph, g.graph),
                  "N": g.graph.n, "pattern_vertices": h.graph.n}
        return cfg, result, failures, _labels(pattern=h, graph=g), None

    if cmd == "density":
        h = load_graph(args.pattern)
        host, g = _host_of(args)
        cfg = _config(args, "density", {"pattern": args.pattern,
                                        "host": args.graph or args.kernel},
                      {"injective": args.injective})
        if isinstance(host, Kernel):
            result = {"density": kernel_density(h.graph, host)}
        else:
            d = density(h.graph, host)
            result = {"density": d.value, "count": d.count, "N": d.base, "exponent": d.exponent}
            if args.injective:
                result["injective_density"] = injective_density(h.graph, host)
        return cfg, result, failures, _labels(pattern=h, graph=g), None

    if cmd == "report" and args.which == "sidorenko":
        h = load_graph(args.pattern)
        host, g = _host_of(args)
        cfg = _config(args, "report sidorenko", {"pattern": args.pattern,
                                                 "host": args.graph or args.kernel}, {})
        rep = sidorenko_report(as_pattern(h.graph), host)
        failures += rep.theorem_failures
        result = to_jsonable(rep)
        result["theorem_failures"] = rep.theorem_failures
        return cfg, result, failures, _labels(pattern=h, graph=g), None

    if cmd == "report" and args.which == "forcing":
        p = args.p if args.p == "auto" else Fraction(args.p)
        cfg = _config(args, "report forcing",
                      {"graph": args.graph, "pattern": args.pattern,
                       "family": list(args.family or [])},
                      {"p": str(args.p), "epsilon": None if args.epsilon is None
                       else str(args.epsilon)})
        result: dict = {}
        if args.graph:
            g = load_graph(args.graph)
            result["battery"] = to_jsonable(quasirandom_battery(
                g.graph, p, tol_edge=args.tol_edge, tol_c4=args.tol_c4))
            labels = _labels(graph=g)
            if args.epsilon is not None:
                pp = Fraction(result["battery"]["p_ref"]["exact"])
                dd = degree_concentration(g.graph, pp, args.epsilon)
                if not dd.identity_holds:
                    failures.append("degree-expansion-identity")
                result["degree_concentration"] = to_jsonable(dd)
        if args.family:
            if not args.pattern:
                raise UsageError("--family needs --pattern")
            family = [load_graph(x).graph for x in args.family]
            exp = forcing_experiment(load_graph(args.pattern).graph, family, p,
                                     tol_edge=args.tol_edge, tol_c4=args.tol_c4)
            members = []
            for ref, m in zip(args.family, exp.members):
                row = to_jsonable(m)
                row["spec"] = ref
                members.append(row)
            result["experiment"] = {"members": members, "premise_all": exp.premise_all,
                                    "conclusion_all": exp.conclusion_all,
                                    "refutes_at_tolerance": exp.refutes_at_tolerance,
                                    "verdict": exp.verdict}
        if not result:
            raise UsageError("report forcing needs --graph or --pattern with --family")
        return cfg, result, failures, labels, None

    if cmd == "drc":
        g = load_graph(args.graph)
        params = DrcParams(args.r, args.d, args.n, args.c)
        samples = None if args.exhaustive else args.samples
        cfg = _config(args, "drc", {"graph": args.graph, "pattern": args.pattern},
                      {"r": args.r, "d": args.d, "n": args.n, "c": str(params.c),
                       "samples": samples})
        rep = drc_classify(g.graph, params, samples=samples, seed=args.seed,
                           budget=args.budget_enum)
        verdict = drc_verify(g.graph, params, samples=samples, seed=args.seed,
                             budget=args.budget_enum)
        theorem_backed = rep.exhaustive and params.c <= reference_constant(params.n)
        if theorem_backed and not verdict.holds:
            failures.append("good-sum-below-half")
        result = {"classification": to_jsonable(rep), "verdict": to_jsonable(verdict),
                  "theorem_backed": theorem_backed,
                  "reference_constant": reference_constant(params.n)}
        result = to_jsonable(result)
        if args.pattern:
            cb = constructive_bound(as_pattern(load_graph(args.pattern).graph), g.graph,
                                    c=params.c, budget=args.budget_enum)
            if not cb.certificate:
                failures.append("constructive-bound-certificate")
            result["constructive_bound"] = to_jsonable(cb)
        return cfg, result, failures, _labels(graph=g), None

    if cmd == "check":
        h = load_graph(args.pattern)
        host, g = _host_of(args)
        cfg = _config(args, "check correlation", {"pattern": args.pattern,
                                                  "host": args.graph or args.kernel},
                      {"parts": args.parts})
        rec = correlation_check(h.graph, _parts(args.parts), host)
        return cfg, to_jsonable(rec), failures, _labels(pattern=h, graph=g), None

    if cmd == "search":
        h = load_graph(args.pattern)
        cfg = _config(args, "search correlation", {"pattern": args.pattern},
                      {"parts": args.parts, "space": args.space})
        rec = correlation_search(h.graph, _parts(args.parts), _space(args.space, args.seed),
                                 budget=args.budget_search, seed=args.seed)
        return cfg, to_jsonable(rec), failures, _labels(pattern=h), None

    if cmd == "ramsey":
        h = load_graph(args.pattern)
        cfg = _config(args, "ramsey", {"pattern": args.pattern},
                      {"N": args.N, "mode": args.mode,
                       "samples": args.samples if args.mode == "random" else None})
        rec = multiplicity_scan(h.graph, args.N, mode=args.mode, samples=args.samples,
                                seed=args.seed)
        result = to_jsonable(rec)
        col = Coloring(build_graph(args.N, rec.argmin_red_edges))
        result["argmin_hom_variant"] = to_jsonable(mono_hom_density(col, h.graph, "hom"))
        return cfg, result, failures, _labels(pattern=h), None

    if cmd == "tensor":
        h, g = load_graph(args.pattern), load_graph(args.graph)
        cfg = _config(args, "tensor", {"pattern": args.pattern, "graph": args.graph},
                      {"s": args.s})
        rec = tensor_power_check(h.graph, g.graph, args.s, budget=args.budget_vertices)
        if rec.equal is False:
            failures.append("tensor-power-identity")
        return cfg, to_jsonable(rec), failures, _labels(pattern=h, graph=g), None

    raise UsageError(f"unknown command {cmd!r}")


def render(cfg: RunConfig, result: dict, failures: list[str], labels: dict) -> dict:
    report = {
        "subcommand": cfg.subcommand,
        "status": "verdict-failure" if failures else "computed",
        "failures": failures,
        "config": to_jsonable(dataclasses.asdict(cfg)),
        "engine": engine_info(),
        "result": to_jsonable(result),
    }
    if labels:
        report["labels"] = labels
    return report


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "schema":
        out.write(json.dumps(SCHEMA, sort_keys=True, indent=2) + "\n")
        return EXIT_OK
    try:
        cfg, result, failures, labels, text = run(args)
    except (InputError, GraphError, DrcError, EngineError, UsageError, ValueError,
            FileNotFoundError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    report = render(cfg, result, failures, labels)
    if cfg.format == "text":
        out.write(text)
    elif cfg.format == "csv":
        out.write(to_csv(report))
    else:
        out.write(dumps(report))
    return EXIT_VERDICT if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
