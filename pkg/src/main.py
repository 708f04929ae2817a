#!/usr/bin/env python3
"""
pin2homalg - command-line entry point

Commands:
    tor       bigraded Tor over R by both computation paths, with a cross-check
    ss        spectral-sequence pages of M ⊠ N, hypothesized patterns, E^∞ vs target
    massey    triple and fourfold Massey products in an A∞ structure file
    check     A∞ relation report for a structure file
    polytope  associahedron / multiplihedron face data

Exit codes: 0 success, 2 invariant failure, 3 bad input.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import structlog
from pydantic import ValidationError

from . import polytope
from .ainf import (
    AInfModule,
    check_structure,
    load_structure,
    massey3,
    massey3_module,
    massey4,
    massey4_module,
    strict_module,
    strict_ring_algebra,
)
from .config_parser import ConfigParser, EngineConfig, RunConfig, golden_dir, parse_window
from .exceptions import BadInputError, EngineError, RelationFailure
from .resolve import cross_check, load_table, tor
from .rmodule import GradedModule, catalogue, load_module, rank_profile
from .ssq import (
    e_infty_vs_target,
    em_ss,
    load_pattern,
    page_from_table,
    run_patterns,
)
from .utils.logging_config import setup_logging
from .utils.rendering import render_page, render_table

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 2
EXIT_BAD_INPUT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pin2homalg", description="Exact F2 homological algebra over F[[V]][Q]/(Q^3)")
    parser.add_argument("--config", type=Path, help="YAML engine configuration")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--json-logs", action="store_true", default=None, help="emit logs as JSON")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", "--precision", type=int, help="V-adic precision")
    common.add_argument("--window", help="degree window lo:hi")
    common.add_argument("--nmax", type=int, dest="n_max", help="maximal homological degree / word length")
    common.add_argument("--rmax", type=int, dest="r_max", help="last spectral-sequence page")
    common.add_argument("--format", choices=("grid", "csv", "json"), default="grid")
    common.add_argument("--seed", type=int, help="seed for randomized pivoting")

    sub = parser.add_subparsers(dest="command", required=True)

    p_tor = sub.add_parser("tor", parents=[common], help="bigraded Tor")
    p_tor.add_argument("--left", required=True, help="catalogue name or module JSON")
    p_tor.add_argument("--right", required=True, help="catalogue name or module JSON")

    p_ss = sub.add_parser("ss", parents=[common], help="spectral sequence of M ⊠ N")
    p_ss.add_argument("--left", required=True)
    p_ss.add_argument("--right", required=True)
    p_ss.add_argument("--pattern", type=Path, help="YAML file of hypothesized differentials")
    p_ss.add_argument("--target", help="catalogue module or rank profile to compare E-infinity against")

    p_massey = sub.add_parser("massey", parents=[common], help="Massey products")
    p_massey.add_argument("inputs", nargs="+", help="structure JSON followed by 3 or 4 elements")

    p_check = sub.add_parser("check", parents=[common], help="A-infinity relation report")
    p_check.add_argument("inputs", nargs=1, help="structure JSON")

    p_poly = sub.add_parser("polytope", parents=[common], help="polytope face data")
    p_poly.add_argument("inputs", nargs=2, help="K or J, then n")
    what = p_poly.add_mutually_exclusive_group()
    what.add_argument("--f-vector", action="store_const", const="f-vector", dest="query")
    what.add_argument("--facets", action="store_const", const="facets", dest="query")
    what.add_argument("--cubes", action="store_const", const="cubes", dest="query")
    what.add_argument("--faces", action="store_const", const="faces", dest="query")
    what.add_argument("--relation-terms", action="store_const", const="relation-terms", dest="query")
    return parser


def resolve_module(ref: str, engine: EngineConfig) -> GradedModule:
    if ref.endswith(".json"):
        path = Path(ref)
        if not path.exists():
            raise BadInputError(f"module file not found: {ref}")
        return load_module(path)
    return catalogue(ref, engine.precision).module


def cmd_tor(run: RunConfig, out) -> int:
    engine = run.engine
    left = resolve_module(run.left, engine)
    right = resolve_module(run.right, engine)
    main_path = tor(left, right, "resolution", i_max=engine.n_max, j_range=engine.window)
    check_path = tor(left, right, "bar", i_max=engine.n_max, j_range=engine.window, bar_max_dim=engine.bar_max_dim)
    verdict = cross_check(main_path, check_path)
    if run.format == "json":
        out.write(json.dumps({
            "resolution": main_path.to_document(),
            "bar": check_path.to_document(),
            "cross_check": verdict.model_dump(),
        }, sort_keys=True) + "\n")
    else:
        out.write(render_table(main_path, run.format, f"Tor({left.name}, {right.name}) by resolution") + "\n")
        if run.format == "grid":
            out.write("\n" + render_table(check_path, "grid", "by bar complex") + "\n")
            out.write(f"\ncross-check: {'agree' if verdict.agree else 'DISAGREE'} on {verdict.compared} cells\n")
    return EXIT_OK if verdict.agree else EXIT_FAILURE


def _target(ref: str, engine: EngineConfig):
    try:
        return rank_profile(ref)
    except BadInputError:
        return catalogue(ref, engine.precision).module


def cmd_ss(run: RunConfig, out) -> int:
    engine = run.engine
    left = resolve_module(run.left, engine)
    right = resolve_module(run.right, engine)
    if run.pattern is not None:
        pattern = load_pattern(run.pattern)
        if pattern.start_table:
            start = load_table(golden_dir() / pattern.start_table)
        else:
            start = tor(left, right, "resolution", i_max=engine.n_max, j_range=engine.window)
        page = page_from_table(start, pattern.start_page)
        shown = run_patterns(page, pattern.patterns())
    else:
        if left.ring != right.ring:
            raise BadInputError("spectral sequence factors live over different rings")
        alg = strict_ring_algebra(left.ring)
        spectral = em_ss(
            strict_module(left, alg, "right"),
            strict_module(right, alg, "left"),
            engine.n_max,
            engine.r_max,
            engine.window,
        )
        shown = spectral.pages
        if spectral.comparison is not None and run.format == "grid":
            out.write(f"E2 vs Tor: {'agree' if spectral.comparison.agree else 'DISAGREE'} "
                      f"on {spectral.comparison.compared} cells\n\n")

    for page in shown:
        out.write(render_page(page, run.format) + "\n")
        if run.format == "grid":
            out.write("\n")

    code = EXIT_OK
    if run.target:
        report = e_infty_vs_target(shown, _target(run.target, engine))
        if run.format == "json":
            out.write(report.model_dump_json() + "\n")
        else:
            for line in report.lines:
                out.write(f"degree {line.degree}: E-infinity {line.e_infinity}, target {line.target}\n")
            out.write(f"target: {'agree' if report.agree else 'DISAGREE'}\n")
        code = EXIT_OK if report.agree else EXIT_FAILURE
    return code


def cmd_massey(run: RunConfig, out) -> int:
    if len(run.inputs) not in (4, 5):
        raise BadInputError("massey takes a structure file and three or four elements")
    structure = load_structure(run.inputs[0])
    rng = np.random.default_rng(run.engine.seed)
    names = run.inputs[1:]
    if isinstance(structure, AInfModule):
        x = structure.basis.parse(names[0])
        letters = [structure.algebra.basis.parse(n) for n in names[1:]]
        if len(letters) == 2:
            lines = [massey3_module(structure, x, *letters, rng).format()]
        else:
            lines = massey4_module(structure, x, *letters, rng=rng).format()
    else:
        chains = [structure.basis.parse(n) for n in names]
        if len(chains) == 3:
            lines = [massey3(structure, *chains, rng=rng).format()]
        else:
            lines = massey4(structure, *chains, rng=rng).format()
    if run.format == "json":
        out.write(json.dumps({"inputs": names, "classes": lines}) + "\n")
    else:
        out.write(f"<{', '.join(names)}> = " + " | ".join(lines) + "\n")
    return EXIT_OK


def cmd_check(run: RunConfig, out) -> int:
    structure = load_structure(run.inputs[0])
    report = check_structure(structure, run.engine.n_max, run.engine.window)
    if run.format == "json":
        out.write(report.model_dump_json() + "\n")
    else:
        status = "pass" if report.passed else "FAIL"
        out.write(f"{report.kind} {report.structure or run.inputs[0]}: {status} up to n = {report.n_max} "
                  f"({report.checked} tuples)\n")
        if report.failure is not None:
            f = report.failure
            out.write(f"first failure: n = {f.n}, inputs {f.inputs}, value {f.value}\n")
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_polytope(run: RunConfig, out, query: Optional[str]) -> int:
    kind, n_text = run.inputs
    try:
        n = int(n_text)
    except ValueError as exc:
        raise BadInputError(f"polytope size must be an integer, got {n_text!r}") from exc
    kind = kind.upper()
    query = query or "f-vector"
    if kind == "J":
        if query != "facets":
            raise BadInputError("multiplihedra support --facets only")
        facets = polytope.facets_j(n)
        for facet in facets:
            out.write(facet.describe() + "\n")
        out.write(f"{len(facets)} facets\n")
        return EXIT_OK
    if kind != "K":
        raise BadInputError(f"unknown polytope family {kind!r}")

    if query == "f-vector":
        if run.format == "csv":
            out.write(polytope.f_vector_csv([n]))
        else:
            out.write(",".join(str(v) for v in polytope.f_vector(n)) + "\n")
    elif query == "facets":
        for facet in polytope.facets_k(n):
            out.write(f"{facet.interval}: K{facet.left} x K{facet.right}\n")
    elif query == "cubes":
        families = polytope.cube_decomposition(n)
        sizes = sorted({len(f) for f in families})
        out.write(f"{len(families)} cubes of dimension {','.join(str(s) for s in sizes)}\n")
    elif query == "faces":
        out.write(polytope.faces_json(n) + "\n")
    elif query == "relation-terms":
        for term in polytope.relation_terms(n):
            out.write(f"({term.i},{term.j},{term.l}) {term.kind} {term.tag}\n")
    return EXIT_OK


def make_run_config(args: argparse.Namespace) -> RunConfig:
    parser = ConfigParser()
    parser.load_config(args.config)
    window = parse_window(args.window) if getattr(args, "window", None) else None
    engine = parser.merge({
        "precision": getattr(args, "precision", None),
        "window": window,
        "n_max": getattr(args, "n_max", None),
        "r_max": getattr(args, "r_max", None),
        "seed": getattr(args, "seed", None),
        "level": args.log_level,
        "json_logs": args.json_logs,
    })
    return RunConfig(
        command=args.command,
        inputs=list(getattr(args, "inputs", []) or []),
        left=getattr(args, "left", None),
        right=getattr(args, "right", None),
        format=args.format,
        pattern=getattr(args, "pattern", None),
        target=getattr(args, "target", None),
        engine=engine,
    )


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        run = make_run_config(args)
    except (ValueError, ValidationError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_BAD_INPUT
    except EngineError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code

    setup_logging(run.engine.logging.level, run.engine.logging.json_logs)
    logger.debug("run configured", command=run.command, precision=run.engine.precision, window=run.engine.window)

    handlers = {
        "tor": cmd_tor,
        "ss": cmd_ss,
        "massey": cmd_massey,
        "check": cmd_check,
    }
    try:
        if run.command == "polytope":
            return cmd_polytope(run, out, args.query)
        return handlers[run.command](run, out)
    except RelationFailure as e:
        logger.error("relation failure", error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except EngineError as e:
        logger.error("command failed", command=run.command, error=str(e))
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
