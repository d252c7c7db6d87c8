"""Command-line interface: ``entscope COMMAND STATE [options]``.

stdout carries only the report (JSON or CSV); diagnostics go to stderr.
Exit codes: 0 ok, 2 parse/usage/file error, 3 dimension error, 4 numeric error.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .classify import DEFAULT_TOL, classify, theorem1_check, theorem3_check
from .coherence import IDENTITY_GAP_TOL, direct_basis_search, min_fidelity_coherence, verify_theorem5
from .exceptions import (
    ArgumentError,
    DimensionError,
    EntscopeError,
    ParseError,
    StateFileError,
)
from .geometric import AlsConfig, gm_m
from .partitions import enumerate_partitions, stirling2
from .roof import gm_mixed
from .stateio import parse_mixture, parse_state

EXIT_PARSE, EXIT_DIMENSION, EXIT_NUMERIC = 2, 3, 4

CSV_COLUMNS = {
    "classify": ["state", "mSep", "kEnt", "finest"],
    "gm": ["partition", "overlapSq", "iterations", "converged"],
    "coherence": ["state", "m", "value", "maxFidelity", "bestPartition"],
    "verify": ["state", "m", "gm", "coherence", "gap", "pass"],
    "roof": ["state", "m", "L", "gmUpperBound", "coherenceSqUpperBound", "gap"],
    "partitions": ["n", "m", "partition"],
}


@dataclass
class RunConfig:
    m: Optional[int] = None
    k: Optional[int] = None
    tol: float = DEFAULT_TOL
    restarts: int = 32
    max_iterations: int = 500
    seed: int = 0
    L: Optional[int] = None
    output: str = "json"
    normalize: bool = False
    direct: bool = False
    gap_tol: float = IDENTITY_GAP_TOL

    def als(self) -> AlsConfig:
        return AlsConfig(restarts=self.restarts, max_iterations=self.max_iterations, seed=self.seed)


def _need_m(cfg):
    if cfg.m is None:
        raise ArgumentError("this command needs --m")
    return cfg.m


def cmd_classify(spec: str, cfg: RunConfig) -> dict:
    psi = parse_state(spec, cfg.normalize)
    res = classify(psi, cfg.tol).to_dict()
    if cfg.m is not None:
        res["separabilityCheck"] = dict(zip(("condI", "condII"), theorem1_check(psi, cfg.m, cfg.tol)), m=cfg.m)
    if cfg.k is not None:
        res["depthCheck"] = dict(zip(("condI", "condII"), theorem3_check(psi, cfg.k, cfg.tol)), k=cfg.k)
    rows = [{"state": spec, "mSep": res["mSep"], "kEnt": res["kEnt"], "finest": res["finest"]}]
    return {"state": spec, "n": psi.n, "dims": list(psi.dims), "tol": cfg.tol, **res, "_rows": rows}


def cmd_gm(spec: str, cfg: RunConfig) -> dict:
    psi = parse_state(spec, cfg.normalize)
    res = gm_m(psi, _need_m(cfg), cfg.als())
    out = {"state": spec, "m": cfg.m, "seed": cfg.seed, "isUpperBound": res.diagnostics["method"] == "als"}
    out.update(res.to_dict())
    out["_rows"] = res.diagnostics["table"]
    return out


def cmd_coherence(spec: str, cfg: RunConfig) -> dict:
    psi = parse_state(spec, cfg.normalize)
    m = _need_m(cfg)
    res = direct_basis_search(psi, m, cfg.als()) if cfg.direct else min_fidelity_coherence(psi, m, cfg.als())
    d = res.to_dict()
    out = {"state": spec, "m": m, "seed": cfg.seed, "method": "direct" if cfg.direct else "min", **d}
    out["_rows"] = [
        {"state": spec, "m": m, "value": res.value, "maxFidelity": res.max_fidelity, "bestPartition": d["bestPartition"]}
    ]
    return out


def cmd_verify(spec: str, cfg: RunConfig) -> dict:
    psi = parse_state(spec, cfg.normalize)
    ms = [cfg.m] if cfg.m is not None else list(range(1, psi.n + 1))
    reports = [verify_theorem5(psi, m, cfg.als(), tol=cfg.gap_tol).to_dict() for m in ms]
    rows = [{"state": spec, **{k: r[k] for k in ("m", "gm", "coherence", "gap", "pass")}} for r in reports]
    return {"state": spec, "seed": cfg.seed, "pass": all(r["pass"] for r in reports), "results": reports, "_rows": rows}


def cmd_roof(spec: str, cfg: RunConfig) -> dict:
    rho = parse_mixture(spec, cfg.normalize)
    rep = gm_mixed(rho, _need_m(cfg), cfg.L, cfg.als())
    d = rep.to_dict()
    row = {k: d[k] for k in ("m", "gmUpperBound", "coherenceSqUpperBound", "gap")}
    row.update(state=spec, L=rep.gm_roof.L)
    return {"state": spec, "seed": cfg.seed, "L": rep.gm_roof.L, **d, "_rows": [row]}


def cmd_partitions(n: int, cfg: RunConfig) -> dict:
    if cfg.m is not None:
        parts = [str(p) for p in enumerate_partitions(n, cfg.m)]
        rows = [{"n": n, "m": cfg.m, "partition": p} for p in parts]
        return {"n": n, "m": cfg.m, "count": len(parts), "partitions": parts, "_rows": rows}
    counts = {m: sum(1 for _ in enumerate_partitions(n, m)) for m in range(1, n + 1)}
    for m, c in counts.items():
        assert c == stirling2(n, m)
    rows = [{"n": n, "m": m, "partition": c} for m, c in counts.items()]
    return {"n": n, "counts": {str(m): c for m, c in counts.items()}, "total": sum(counts.values()), "_rows": rows}


COMMANDS = {
    "classify": cmd_classify,
    "gm": cmd_gm,
    "coherence": cmd_coherence,
    "verify": cmd_verify,
    "roof": cmd_roof,
    "partitions": cmd_partitions,
}


def render(command: str, report: dict, output: str, deterministic: bool) -> str:
    rows = report.pop("_rows", [])
    if output == "csv":
        buf = io.StringIO()
        cols = CSV_COLUMNS[command]
        if command == "partitions" and "counts" in report:
            cols = ["n", "m", "count"]
            rows = [{"n": r["n"], "m": r["m"], "count": r["partition"]} for r in rows]
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    body = {"command": command, "version": __version__, **report}
    if not deterministic:
        body["timestamp"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(body, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entscope", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "partitions":
            sp.add_argument("n", type=int, help="number of parties")
        else:
            sp.add_argument("state", help='state expression, e.g. "ghz(3)" or "0.5*bell(psip) + 0.5*bell(psim)"')
        sp.add_argument("--m", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--max-iter", dest="max_iterations", type=int, default=500)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--L", type=int)
        sp.add_argument("--output", choices=["json", "csv"], default="json")
        sp.add_argument("--normalize", action="store_true")
        sp.add_argument("--deterministic", action="store_true", help="omit the timestamp")
        if name == "coherence":
            sp.add_argument("--direct", action="store_true", help="use the direct basis search")
        if name == "verify":
            sp.add_argument("--gap-tol", dest="gap_tol", type=float, default=IDENTITY_GAP_TOL)
    return parser


def _exit_code(exc) -> int:
    if isinstance(exc, DimensionError):
        return EXIT_DIMENSION
    if isinstance(exc, (ParseError, ArgumentError, StateFileError)):
        return EXIT_PARSE
    # NonPSDError, IsometryError, BudgetExceeded and bad norms
    return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        m=args.m,
        k=args.k,
        tol=args.tol,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        seed=args.seed,
        L=args.L,
        output=args.output,
        normalize=args.normalize,
        direct=getattr(args, "direct", False),
        gap_tol=getattr(args, "gap_tol", IDENTITY_GAP_TOL),
    )
    target = args.n if args.command == "partitions" else args.state
    try:
        report = COMMANDS[args.command](target, cfg)
    except (EntscopeError, ValueError) as exc:
        print(f"entscope: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    sys.stdout.write(render(args.command, report, cfg.output, args.deterministic))
    return 0


if __name__ == "__main__":
    sys.exit(main())
