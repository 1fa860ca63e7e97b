"""Command-line front end.

    confined-compton solve --state 1,0 --rc 10
    confined-compton profile --state 1,0 --state 2,1 --rc 0.1 --format csv
    confined-compton reproduce --table 2
    confined-compton scan --n-max 9 --l-max 5 --rc 0.1 --rc inf --quantity J0

Exit codes: 0 success, 2 accuracy failure, 3 solver failure, 4 I/O failure.
Output goes to --out, else to $CONFINED_COMPTON_OUT/<command>.<format>, else stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import (AccuracyError, ContractError, ConvergenceError, DivergenceError, DomainError,
                     EvaluationError, SearchError, WrongRootError)
from .pipeline import compute
from .radial import StateSpec
from .reproduce import reproduce
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec

EXIT_OK, EXIT_ACCURACY, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
OUT_ENV = "CONFINED_COMPTON_OUT"
SCHEMA = 1
_SOLVER_ERRORS = (ConvergenceError, SearchError, WrongRootError, EvaluationError, DivergenceError,
                  ContractError, DomainError)


@dataclass(frozen=True)
class RunConfig:
    states: tuple = ((1, 0),)
    Z: float = 1.0
    rcs: tuple = (math.inf,)
    qspec: QuadratureSpec = DEFAULT_QUADRATURE
    p_max: float | None = None
    fmt: str = "json"
    out: str | None = None
    moments: tuple = (-1, 1, 2)
    alphas: tuple = ()
    jobs: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for n, l in self.states:
            if not (int(n) == n and int(l) == l and n > l >= 0):
                raise DomainError(f"invalid state (n={n}, l={l}): need n > l >= 0")
        if not self.Z > 0:
            raise DomainError(f"Z must be positive, got {self.Z}")
        for rc in self.rcs:
            if not rc > 0:
                raise DomainError(f"rc must be positive or inf, got {rc}")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.fmt}")

    def specs(self):
        return [StateSpec(self.Z, rc, n, l) for rc in self.rcs for n, l in self.states]


# ---------------------------------------------------------------------------
# argument parsing


def _state(text):
    try:
        n, l = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"state must look like n,l (got {text!r})") from None
    return n, l


def _radius(text):
    if text.strip().lower() in ("inf", "infinity", "free"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"rc must be a number or 'inf' (got {text!r})") from None


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--Z", type=float, default=1.0, help="nuclear charge")
    common.add_argument("--rc", type=_radius, action="append", help="confinement radius (a.u.) or inf; repeatable")
    common.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    common.add_argument("--panel-order", type=int, default=None, help="Gauss points per panel")
    common.add_argument("--pmax-override", type=float, default=None, help="fixed momentum cutoff (a.u.)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
    common.add_argument("--out", default=None, help="output file (default: stdout or $%s)" % OUT_ENV)
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = argparse.ArgumentParser(prog="confined-compton", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="energies, moments and entropies per state")
    s.add_argument("--state", type=_state, action="append", help="n,l (repeatable)")
    s.add_argument("--moments", type=_ints, default=(-1, 1, 2), help="comma list of m for <p^m>")
    s.add_argument("--alphas", type=_floats, default=(), help="comma list of entropic-moment orders")

    s = sub.add_parser("profile", parents=[common], help="J(q) and -J ln J on a uniform q grid")
    s.add_argument("--state", type=_state, action="append", help="n,l (repeatable)")
    s.add_argument("--q-max", type=float, default=10.0)
    s.add_argument("--points", type=int, default=501)

    s = sub.add_parser("reproduce", parents=[common], help="recompute a published table and compare")
    s.add_argument("--table", type=int, choices=(1, 2, 3), required=True)

    s = sub.add_parser("scan", parents=[common], help="a quantity versus n for each l and rc")
    s.add_argument("--n-max", type=int, default=9)
    s.add_argument("--l-max", type=int, default=5)
    s.add_argument("--quantity", choices=("J0", "shannon", "onicescu"), default="J0")
    return p


def _config(args) -> RunConfig:
    qspec = DEFAULT_QUADRATURE.with_overrides(relative_tolerance=args.tol, panel_order=args.panel_order)
    states = tuple(getattr(args, "state", None) or ((1, 0),))
    return RunConfig(
        states=states,
        Z=args.Z,
        rcs=tuple(args.rc or (math.inf,)),
        qspec=qspec,
        p_max=args.pmax_override,
        fmt=args.fmt,
        out=args.out,
        moments=tuple(getattr(args, "moments", (-1, 1, 2))),
        alphas=tuple(getattr(args, "alphas", ())),
        jobs=max(1, args.jobs),
    )


# ---------------------------------------------------------------------------
# per-state work (top level so that worker processes can pickle it)


def _error_kind(exc) -> int:
    return EXIT_ACCURACY if isinstance(exc, AccuracyError) else EXIT_SOLVER


def _solve_task(task):
    spec, qspec, p_max, moments, alphas = task
    try:
        rec = compute(spec, qspec, p_max=p_max, moments=moments, alphas=alphas).record
        return EXIT_OK, rec.as_dict()
    except (AccuracyError,) + _SOLVER_ERRORS as exc:
        return _error_kind(exc), {"state": spec.label, "n": spec.n, "l": spec.l, "Z": spec.Z,
                                  "rc": spec.rc if spec.confined else "inf",
                                  "error": type(exc).__name__, "message": str(exc)}


def _profile_task(task):
    spec, qspec, p_max, q = task
    try:
        res = compute(spec, qspec, p_max=p_max)
        J = np.asarray(res.cp(q), dtype=float)
        return EXIT_OK, {"state": spec.label, "n": spec.n, "l": spec.l, "Z": spec.Z,
                         "rc": spec.rc if spec.confined else "inf", "tol": qspec.relative_tolerance,
                         "q": q.tolist(), "J": J.tolist(), "entropy_density": (-xlogy(J, J)).tolist()}
    except (AccuracyError,) + _SOLVER_ERRORS as exc:
        return _error_kind(exc), {"state": spec.label, "error": type(exc).__name__, "message": str(exc)}


_SCAN_FIELD = {"J0": "J0", "shannon": "shannon", "onicescu": "onicescu"}


def _scan_task(task):
    spec, qspec, quantity = task
    route = "numeric" if spec.confined else "closed"
    row = {"rc": spec.rc if spec.confined else "inf", "l": spec.l, "n": spec.n, "Z": spec.Z}
    try:
        rec = compute(spec, qspec, route=route).record
        row.update(value=getattr(rec, _SCAN_FIELD[quantity]), tol=rec.tolerances[_SCAN_FIELD[quantity]], error="")
        return EXIT_OK, row
    except (AccuracyError,) + _SOLVER_ERRORS as exc:
        row.update(value=math.nan, tol=math.nan, error=f"{type(exc).__name__}: {exc}")
        return _error_kind(exc), row


def _run(fn, tasks, jobs):
    """Ordered results; a pool is used only when it can help."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _status(codes):
    bad = [c for c in codes if c != EXIT_OK]
    if not bad:
        return EXIT_OK
    return EXIT_SOLVER if EXIT_SOLVER in bad else EXIT_ACCURACY


# ---------------------------------------------------------------------------
# serialization


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _finite(x):
    """Strict JSON: non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def _json_text(command, payload) -> str:
    doc = _finite({"schema": SCHEMA, "command": command, **payload})
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _fmt_rc(rc):
    return rc if rc == "inf" else repr(float(rc))


_SOLVE_HEADER = ["state", "n", "l", "Z", "rc_au", "energy_au", "J0_au", "p2_virial_au", "p4_position_au",
                 "shannon", "onicescu_au", "tol_energy", "tol_quadrature", "tol_shannon",
                 "raw_norm", "half_norm_residual", "p_max_au", "tail_exponent", "clamp_count",
                 "norm_residual", "node_count", "tail_bound", "error"]


def _solve_csv(results, moments) -> str:
    mcols = [f"p{m}_au" if m >= 0 else f"p_m{-m}_au" for m in moments]
    header = _SOLVE_HEADER[:9] + mcols + _SOLVE_HEADER[9:]
    rows = []
    for _, d in results:
        base = [d["state"], d["n"], d["l"], d["Z"], _fmt_rc(d["rc"])]
        if "error" in d:
            rows.append(base + [""] * (len(header) - len(base) - 1) + [f"{d['error']}: {d['message']}"])
            continue
        g = d["diagnostics"]
        rows.append(base + [
            d["energy_au"]["value"], d["J0_au"]["value"], d["p2_virial_au"]["value"], d["p4_position_au"]["value"],
            *[d["moments_au"][str(m)]["value"] for m in moments],
            d["shannon"]["value"], d["onicescu_au"]["value"],
            d["energy_au"]["tol"], d["J0_au"]["tol"], d["shannon"]["tol"],
            g["raw_norm"], g["half_norm_residual"], g["p_max"], g["tail_exponent"], g["clamp_count"],
            g["norm_residual"], g["node_count"], g["tail_bound"], "",
        ])
    return _csv_text(header, rows)


def _profile_csv(results) -> str:
    rows = []
    for _, d in results:
        if "error" in d:
            rows.append([d["state"], "", "", "", "", "", "", f"{d['error']}: {d['message']}"])
            continue
        for q, J, s in zip(d["q"], d["J"], d["entropy_density"]):
            rows.append([d["state"], d["Z"], _fmt_rc(d["rc"]), q, J, s, d["tol"], ""])
    return _csv_text(["state", "Z", "rc_au", "q_au", "J_au", "minus_J_lnJ", "tol", "error"], rows)


def _write(text, cfg: RunConfig, command) -> None:
    path = cfg.out
    if path is None and os.environ.get(OUT_ENV):
        path = os.path.join(os.environ[OUT_ENV], f"{command}.{cfg.fmt}")
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(cfg: RunConfig):
    tasks = [(s, cfg.qspec, cfg.p_max, cfg.moments, cfg.alphas) for s in cfg.specs()]
    results = _run(_solve_task, tasks, cfg.jobs)
    if cfg.fmt == "csv":
        text = _solve_csv(results, cfg.moments)
    else:
        text = _json_text("solve", {"records": [d for _, d in results]})
    return text, _status([c for c, _ in results])


def cmd_profile(cfg: RunConfig, q_max=10.0, points=501):
    if not (q_max > 0 and points >= 2):
        raise DomainError("need q_max > 0 and at least 2 points")
    q = np.linspace(0.0, q_max, points)
    tasks = [(s, cfg.qspec, cfg.p_max, q) for s in cfg.specs()]
    results = _run(_profile_task, tasks, cfg.jobs)
    if cfg.fmt == "csv":
        text = _profile_csv(results)
    else:
        text = _json_text("profile", {"units": {"q": "a.u.", "J": "a.u."}, "profiles": [d for _, d in results]})
    return text, _status([c for c, _ in results])


def cmd_reproduce(cfg: RunConfig, table: int):
    cells = reproduce(table, cfg.qspec)
    failed = [c for c in cells if not c.passed]
    if cfg.fmt == "csv":
        rows = [[c.table, c.state, c.Z, _fmt_rc("inf" if math.isinf(c.rc) else c.rc), c.quantity, c.computed,
                 c.reference, c.source, c.deviation, "rel" if c.relative else "abs", c.tolerance,
                 "pass" if c.passed else "fail", c.note] for c in cells]
        text = _csv_text(["table", "state", "Z", "rc_au", "quantity", "computed", "reference", "source",
                          "deviation", "deviation_kind", "tolerance", "status", "erratum"], rows)
    else:
        text = _json_text("reproduce", {
            "table": table,
            "cells": [{"state": c.state, "Z": c.Z, "rc": "inf" if math.isinf(c.rc) else c.rc, "quantity": c.quantity,
                       "computed": c.computed, "reference": c.reference, "source": c.source,
                       "deviation": c.deviation, "relative": c.relative, "tol": c.tolerance,
                       "passed": c.passed, "erratum": c.note} for c in cells],
            "failures": len(failed),
        })
    for c in failed:
        print(c.line(), file=sys.stderr)
    return text, EXIT_ACCURACY if failed else EXIT_OK


def cmd_scan(cfg: RunConfig, n_max=9, l_max=5, quantity="J0"):
    if not (1 <= n_max <= 9 and 0 <= l_max <= 5):
        raise DomainError("scan ranges: 1 <= n_max <= 9, 0 <= l_max <= 5")
    specs = [StateSpec(cfg.Z, rc, n, l) for rc in cfg.rcs for l in range(l_max + 1) for n in range(l + 1, n_max + 1)]
    results = _run(_scan_task, [(s, cfg.qspec, quantity) for s in specs], cfg.jobs)
    rows = [d for _, d in results]
    if cfg.fmt == "csv":
        unit = {"J0": "J0_au", "shannon": "shannon", "onicescu": "onicescu_au"}[quantity]
        text = _csv_text(["rc_au", "l", "n", "Z", unit, "tol", "error"],
                         [[_fmt_rc(r["rc"]), r["l"], r["n"], r["Z"], r["value"], r["tol"], r["error"]] for r in rows])
    else:
        text = _json_text("scan", {"quantity": quantity, "rows": rows})
    return text, _status([c for c, _ in results])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
    except DomainError as exc:
        parser.error(str(exc))
    try:
        if args.command == "solve":
            text, code = cmd_solve(cfg)
        elif args.command == "profile":
            text, code = cmd_profile(cfg, args.q_max, args.points)
        elif args.command == "reproduce":
            text, code = cmd_reproduce(cfg, args.table)
        else:
            text, code = cmd_scan(cfg, args.n_max, args.l_max, args.quantity)
    except DomainError as exc:
        parser.error(str(exc))
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        _write(text, cfg, args.command)
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
