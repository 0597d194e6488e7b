"""Batch command-line front end.

Subcommands: flows, compat, path, certify, witness, export-matrix.  Stdout
carries pure data (JSON or text); progress and errors go to stderr, errors
additionally as one machine-readable JSON object.  Exit codes: 0 success,
1 negative verdict (witness found / not connected / incompatible), 2 usage
or input error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .certify import (
    certify_degree,
    find_indispensable,
    find_move_path,
    report_to_json,
    witness_to_json,
)
from .errors import (
    CapacityError,
    FlowcertError,
    InvalidElementError,
    NotAFlowError,
)
from .fibers import (
    DEFAULT_FIBER_CAP,
    DEFAULT_SWEEP_CAP,
    FlowMultiset,
    make_multiset,
    multiset_to_rows,
    signature,
)
from .flows import DEFAULT_FLOW_CAP, enumerate_flows, make_flow, vertex_embedding
from .groups import Group, group_to_json, make_group
from .moves import move_to_json

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

THREADS_ENV = "FLOWCERT_THREADS"


class UsageError(FlowcertError):
    """Bad flags or malformed input data."""


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of everything a certification run needs."""

    factors: tuple[int, ...]
    n: int
    d_max: int
    m: int
    flow_cap: int = DEFAULT_FLOW_CAP
    fiber_cap: int = DEFAULT_FIBER_CAP
    sweep_cap: int = DEFAULT_SWEEP_CAP
    threads: int = 1
    out: Optional[str] = None
    fmt: str = "json"


def make_run_config(**kwargs) -> RunConfig:
    cfg = RunConfig(**kwargs)
    if cfg.n < 1:
        raise UsageError(f"n must be >= 1, got {cfg.n}")
    if cfg.m < 2:
        raise UsageError(f"m must be >= 2, got {cfg.m}")
    if cfg.d_max < cfg.m:
        raise UsageError(f"dmax={cfg.d_max} must be >= m={cfg.m}")
    for name, value in (
        ("flow cap", cfg.flow_cap),
        ("fiber cap", cfg.fiber_cap),
        ("sweep cap", cfg.sweep_cap),
        ("threads", cfg.threads),
    ):
        if value < 1:
            raise UsageError(f"{name} must be positive, got {value}")
    if cfg.fmt not in ("json", "text"):
        raise UsageError(f"format must be json or text, got {cfg.fmt!r}")
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_group(text: str) -> Group:
    try:
        factors = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise UsageError(f"invalid --group value {text!r}; expected e.g. 3 or 2,2")
    if not factors:
        raise UsageError(f"invalid --group value {text!r}; expected e.g. 3 or 2,2")
    return make_group(factors)


def _resolve_threads(flag_value: int) -> int:
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return flag_value
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}")


def load_multiset(path: str, group: Group, n: int) -> FlowMultiset:
    """Read a JSON array of flow code arrays; reject bad rows by index."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    if isinstance(data, dict) and isinstance(data.get("flows"), list):
        rows = data["flows"]
    elif isinstance(data, list):
        rows = data
    else:
        raise UsageError(f"{path}: expected a JSON array of flow code arrays")
    if not rows:
        raise UsageError(f"{path}: no flows")
    flows = []
    for r, row in enumerate(rows):
        if not isinstance(row, list):
            raise UsageError(f"{path}: row {r}: expected an array of codes")
        if len(row) != n:
            raise UsageError(f"{path}: row {r}: expected {n} codes, got {len(row)}")
        try:
            flows.append(make_flow(group, row))
        except NotAFlowError as exc:
            raise NotAFlowError(f"{path}: row {r}: {exc}", sum_code=exc.sum_code)
        except InvalidElementError as exc:
            raise UsageError(f"{path}: row {r}: {exc}")
    return make_multiset(flows)


def _dump(data: dict) -> str:
    return json.dumps(data, sort_keys=True)


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _cmd_flows(args) -> int:
    group = _parse_group(args.group)
    flows = enumerate_flows(group, args.n, cap=args.flow_cap)
    if args.format == "text":
        text = "\n".join(" ".join(str(v) for v in f.values) for f in flows)
    else:
        text = _dump(
            {
                "format": 1,
                "group": group_to_json(group),
                "n": args.n,
                "flows": [list(f.values) for f in flows],
            }
        )
    _write(args, text)
    return EXIT_OK


def _cmd_export_matrix(args) -> int:
    group = _parse_group(args.group)
    flows = enumerate_flows(group, args.n, cap=args.flow_cap)
    lines = [f"{len(flows)} {args.n * group.order}"]
    for f in flows:
        lines.append(" ".join(str(c) for c in vertex_embedding(f).coords))
    _write(args, "\n".join(lines))
    return EXIT_OK


def _cmd_compat(args) -> int:
    group = _parse_group(args.group)
    a = load_multiset(args.a, group, args.n)
    b = load_multiset(args.b, group, args.n)
    sig_a, sig_b = signature(a), signature(b)
    if a.degree != b.degree:
        differing = list(range(args.n))
    else:
        differing = [i for i in range(args.n) if sig_a.counts[i] != sig_b.counts[i]]
    ok = not differing
    if args.format == "text":
        text = "compatible" if ok else (
            "incompatible at indices: " + " ".join(str(i) for i in differing)
        )
    else:
        payload = {"format": 1, "compatible": ok}
        if not ok:
            payload["differing_indices"] = differing
        text = _dump(payload)
    _write(args, text)
    return EXIT_OK if ok else EXIT_WITNESS


def _cmd_path(args) -> int:
    group = _parse_group(args.group)
    a = load_multiset(args.a, group, args.n)
    b = load_multiset(args.b, group, args.n)
    moves = find_move_path(a, b, args.m, fiber_cap=args.fiber_cap)
    connected = moves is not None
    if args.format == "text":
        if connected:
            lines = [f"path of length {len(moves)}"]
            for mv in moves:
                rows = move_to_json(mv)
                lines.append(f"out {rows['out']} in {rows['in']}")
            text = "\n".join(lines)
        else:
            text = "not connected"
    else:
        payload = {"format": 1, "connected": connected}
        if connected:
            payload["moves"] = [move_to_json(mv) for mv in moves]
        text = _dump(payload)
    _write(args, text)
    return EXIT_OK if connected else EXIT_WITNESS


def _cmd_certify(args) -> int:
    cfg = make_run_config(
        factors=_parse_group(args.group).factors,
        n=args.n,
        d_max=args.dmax,
        m=args.m,
        sweep_cap=args.sweep_cap,
        threads=_resolve_threads(args.threads),
        out=args.out,
        fmt=args.format,
    )
    group = make_group(cfg.factors)
    report = certify_degree(
        group,
        cfg.n,
        cfg.d_max,
        cfg.m,
        threads=cfg.threads,
        find_all=args.find_all,
        sweep_cap=cfg.sweep_cap,
        progress=_progress,
    )
    print(f"elapsed: {report.elapsed_ms} ms", file=sys.stderr)
    if cfg.fmt == "text":
        lines = []
        for s in report.per_degree:
            lines.append(
                f"degree {s.degree}: {s.fiber_count} fibers, "
                f"{s.multiset_count} multisets, {s.disconnected_count} disconnected"
            )
        lines.append(report.statement)
        text = "\n".join(lines)
    else:
        text = _dump(report_to_json(report, include_elapsed=False))
    _write(args, text)
    return EXIT_OK if report.verdict == "verified" else EXIT_WITNESS


def _cmd_witness(args) -> int:
    cfg = make_run_config(
        factors=_parse_group(args.group).factors,
        n=args.n,
        d_max=args.dmax,
        m=args.m,
        sweep_cap=args.sweep_cap,
        out=args.out,
        fmt=args.format,
    )
    group = make_group(cfg.factors)
    witness = find_indispensable(
        group, cfg.n, cfg.m, d_max=cfg.d_max, sweep_cap=cfg.sweep_cap
    )
    if cfg.fmt == "text":
        if witness is None:
            text = f"none up to degree {cfg.d_max}"
        else:
            text = (
                f"degree {witness.degree} witness\n"
                f"first {multiset_to_rows(witness.first)}\n"
                f"second {multiset_to_rows(witness.second)}"
            )
    else:
        payload = {
            "format": 1,
            "group": group_to_json(group),
            "n": cfg.n,
            "m": cfg.m,
            "d_max": cfg.d_max,
            "witness": None if witness is None else witness_to_json(witness),
        }
        text = _dump(payload)
    _write(args, text)
    return EXIT_OK if witness is None else EXIT_WITNESS


def _add_common(sub, *, n=True, fmt=True) -> None:
    sub.add_argument("--group", required=True, help="cyclic factors, e.g. 3 or 2,2")
    if n:
        sub.add_argument("--n", type=int, required=True, help="number of indices")
    if fmt:
        sub.add_argument("--format", choices=("json", "text"), default="json")
        sub.add_argument("--out", default=None, help="write output to a file")


def _build_parser() -> _Parser:
    parser = _Parser(prog="flowcert", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("flows", help="enumerate all flows")
    _add_common(p)
    p.add_argument("--flow-cap", type=int, default=DEFAULT_FLOW_CAP)
    p.set_defaults(handler=_cmd_flows)

    p = subs.add_parser("export-matrix", help="vertex matrix for external toric tools")
    _add_common(p, fmt=False)
    p.add_argument("--flow-cap", type=int, default=DEFAULT_FLOW_CAP)
    p.add_argument("--out", default=None, help="write output to a file")
    p.set_defaults(handler=_cmd_export_matrix)

    p = subs.add_parser("compat", help="compatibility of two multiset files")
    _add_common(p)
    p.add_argument("--a", required=True, help="first multiset file")
    p.add_argument("--b", required=True, help="second multiset file")
    p.set_defaults(handler=_cmd_compat)

    p = subs.add_parser("path", help="move path between two multiset files")
    _add_common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--m", type=int, required=True, help="move degree bound")
    p.add_argument("--fiber-cap", type=int, default=DEFAULT_FIBER_CAP)
    p.set_defaults(handler=_cmd_path)

    p = subs.add_parser("certify", help="connectivity sweep over all fibers")
    _add_common(p)
    p.add_argument("--dmax", type=int, required=True, help="highest degree to sweep")
    p.add_argument("--m", type=int, required=True, help="move degree bound")
    p.add_argument("--find-all", action="store_true", help="keep sweeping past failures")
    p.add_argument("--sweep-cap", type=int, default=DEFAULT_SWEEP_CAP)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(handler=_cmd_certify)

    p = subs.add_parser("witness", help="first disconnected fiber, if any")
    _add_common(p)
    p.add_argument("--m", type=int, required=True, help="move degree bound")
    p.add_argument("--dmax", type=int, default=4, help="highest degree to scan")
    p.add_argument("--sweep-cap", type=int, default=DEFAULT_SWEEP_CAP)
    p.set_defaults(handler=_cmd_witness)

    return parser


def _emit_error(kind: str, exc: Exception) -> None:
    print(
        json.dumps(
            {"format": 1, "error": {"type": kind, "message": str(exc)}},
            sort_keys=True,
        ),
        file=sys.stderr,
    )


def run_command(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        _emit_error("usage", exc)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        _emit_error("usage", exc)
        return EXIT_USAGE
    except CapacityError as exc:
        _emit_error("capacity", exc)
        return EXIT_CAPACITY
    except FlowcertError as exc:
        _emit_error(type(exc).__name__, exc)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
