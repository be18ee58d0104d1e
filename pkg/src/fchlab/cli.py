"""Command-line front end.

Exit status is 0 on success, 1 on invalid input (including unknown
subcommands and flags) and 2 on numerical failure such as blow-up.
"""
from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from datetime import datetime, timezone
import io as _io
import itertools
import json
import math
import os
from pathlib import Path
import re
import sys

import numpy as np

from .analyticity import NoFit, fourier_decay_fit
from .bony import bony_parts, commutator, commutator_bound_audit, commutator_split
from .evolution import BlowUpError, NORM_NAMES, ProbeInvalid, SolverConfig, integrate
from .io import (
    RunManifest, fmt, profile_field, read_snapshot, write_csv, write_manifest,
    write_snapshot,
)
from .littlewood_paley import BesovSpec, besov_norm, block_norms, critical_index, es_norm_truncated
from .model import FchParams, Form
from .picard import IterationFailure, audited_constant, bound_check, lifespan, picard_run
from .spectral import make_grid, pointwise_product, random_field

__all__ = ["main", "build_parser", "parse_sweep_config", "EXIT_OK", "EXIT_USAGE", "EXIT_NUMERIC"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
DEFAULT_LENGTH = 32 * math.pi
SUBCOMMANDS = ("simulate", "picard", "besov", "bony-check", "commutator-audit",
               "lifespan", "analyticity", "sweep")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _norm_exponent(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    return float(t)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _grid_args(p, n=256, length=DEFAULT_LENGTH, n_flag="--n"):
    p.add_argument(n_flag, dest="n", type=int, default=n, help="grid points (power of two)")
    p.add_argument("--length", type=float, default=length, help="period L")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="fchlab", description="fractional Camassa-Holm numerical laboratory")
    sub = root.add_subparsers(dest="command", parser_class=_Parser, metavar="SUBCOMMAND")

    p = sub.add_parser("simulate", help="integrate the equation and record norms")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--form", choices=[f.value for f in Form], default=Form.NONLOCAL_31.value)
    _grid_args(p)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--u0", required=True, help="profile such as cosine:amp,k or a snapshot path")
    p.add_argument("--monitor-stride", type=int, default=10)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--blowup-threshold", type=float, default=1e6)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("picard", help="run the transport iteration")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--n-max", type=int, default=8)
    c = p.add_mutually_exclusive_group(required=True)
    c.add_argument("--c-hat", type=float)
    c.add_argument("--auto-c", action="store_true", help="estimate the constant by audits")
    p.add_argument("--ensemble", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--u0", required=True)
    _grid_args(p)
    p.add_argument("--time-steps", type=int, default=200)
    p.add_argument("--t-end", type=float, default=None, help="default: the lifespan estimate")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("besov", help="Besov norm of a snapshot")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=_norm_exponent, default=2.0)
    p.add_argument("--r", type=_norm_exponent, default=1.0)

    p = sub.add_parser("bony-check", help="closure residuals of the paraproduct splits")
    p.add_argument("--nu", type=float, default=1.5)
    _grid_args(p, n=512)
    p.add_argument("--ensemble", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("commutator-audit", help="empirical commutator constants")
    p.add_argument("--nu", type=float, required=True)
    _grid_args(p, n_flag="--grid-n")
    p.add_argument("--ensemble", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("lifespan", help="existence time from a constant and a datum")
    p.add_argument("--u0", required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--c-hat", type=float, required=True)
    _grid_args(p)

    p = sub.add_parser("analyticity", help="E_s norms and decay fits along a run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--s", type=float, action="append", required=True)
    p.add_argument("--kmax", type=int, default=24)
    p.add_argument("--out-dir", default=None, help="default: the run directory")

    p = sub.add_parser("sweep", help="run a subcommand over a cartesian parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    return root


# --------------------------------------------------------------------------
# subcommands

def _manifest(args, out_dir, grid=None, params=None, seed=None, started=""):
    flags = {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
             for k, v in vars(args).items() if k != "func"}
    g = None if grid is None else {"L": grid.L, "N": grid.N,
                                   "dealias_fraction": grid.dealias_fraction}
    write_manifest(out_dir, RunManifest(args.command, flags, g, params, seed=seed,
                                        started=started, finished=_now()))


def _out_dir(path) -> Path:
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_simulate(args, out) -> int:
    started = _now()
    grid = make_grid(args.length, args.n)
    params = FchParams(args.nu, Form(args.form))
    config = SolverConfig(args.dt, args.t_end, args.cfl, args.monitor_stride,
                          args.blowup_threshold)
    u0 = profile_field(args.u0, grid)
    d = _out_dir(args.out_dir)
    status = EXIT_OK
    try:
        record = integrate(u0, config, params)
    except BlowUpError as exc:
        record = exc.record
        status = EXIT_NUMERIC
        (d / "blowup.json").write_text(json.dumps(
            {"message": str(exc), "t": exc.t, "step": exc.step}, indent=2) + "\n")
        print(f"blow-up: {exc}", file=out)
    for i, (t, u) in enumerate(zip(record.times, record.snapshots)):
        write_snapshot(d / f"snap_{i:05d}.bin", u, t, args.nu)
    write_csv(d / "norms.csv", ("t",) + NORM_NAMES,
              ([t] + [n[k] for k in NORM_NAMES] for t, n in zip(record.times, record.norms)))
    _manifest(args, d, grid, {"nu": args.nu, "form": args.form, "steps": record.steps},
              started=started)
    if status == EXIT_OK:
        print(f"t_end={fmt(record.times[-1])} steps={record.steps} "
              f"snapshots={len(record.times)}", file=out)
    return status


def cmd_picard(args, out) -> int:
    started = _now()
    grid = make_grid(args.length, args.n)
    nu = args.nu
    u0 = profile_field(args.u0, grid)
    C = audited_constant(grid, nu, args.ensemble, args.seed) if args.auto_c else args.c_hat
    est = lifespan(u0, C, nu)
    T = est.T if args.t_end is None else args.t_end
    params = FchParams(nu, Form.SIMPLIFIED_32)
    trace = picard_run(u0, args.n_max, T, params, args.time_steps, C_hat=C)
    d = _out_dir(args.out_dir)
    rows = []
    for n in range(trace.n_max):
        for i, t in enumerate(trace.time_grid):
            rows.append((n, t, trace.w_n1[n, i], trace.bound_margin[n + 1, i]))
    write_csv(d / "diffs.csv", ("n", "t", "w_n1", "bound_margin"), rows)
    for n, it in enumerate(trace.iterates):
        write_snapshot(d / f"iterate_{n:03d}.bin", it.field(len(it) - 1), T, nu)
    try:
        violations = len(bound_check(trace, C, trace.u0_norm).violations)
    except ValueError:
        violations = None
    sups = trace.sup_w_n1()
    summary = {
        "nu": nu, "C_hat": C, "T": T, "u0_norm": trace.u0_norm,
        "lifespan": {"T": est.T, "inverse_C": est.branches[0],
                     "inverse_8C_norm": _finite(est.branches[1])},
        "sup_w_n1": [float(x) for x in sups],
        "sup_norms": [float(x) for x in trace.norms.max(axis=1)],
        "decay_ratios": [float(x) for x in trace.decay_ratios()],
        "sup_w_nn": {str(n): float(v.max()) for n, v in trace.w_nn.items()},
        "bound_violations": violations,
    }
    (d / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _manifest(args, d, grid, {"nu": nu, "C_hat": C, "T": T}, seed=args.seed, started=started)
    print(f"T={fmt(T)} C_hat={fmt(C)} sup_w_last={fmt(float(sups[-1]))}", file=out)
    return EXIT_OK


def _finite(x):
    return x if math.isfinite(x) else None


def cmd_besov(args, out) -> int:
    u, _, _ = read_snapshot(args.path)
    spec = BesovSpec(args.s, args.p, args.r)
    qs, l2, linf = block_norms(u)
    blocks = l2 if args.p == 2 else linf
    weighted = 2.0 ** (qs * args.s) * blocks
    print(f"# norm={fmt(besov_norm(u, spec))}", file=out)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("q", "block_l2", "block_linf", "weighted"))
    for row in zip(qs, l2, linf, weighted):
        w.writerow([fmt(v) for v in row])
    return EXIT_OK


def cmd_bony_check(args, out) -> int:
    grid = make_grid(args.length, args.n)
    s0 = critical_index(args.nu).s0
    rng = np.random.default_rng(args.seed)
    rows = []
    for i in range(args.ensemble):
        u = random_field(grid, rng, decay=s0 + 0.5)
        v = random_field(grid, rng, decay=s0 + 0.5)
        uv = pointwise_product(u, v)
        scale = max(uv.l2_norm(), 1e-300)
        closure = (bony_parts(u, v).total() - uv).l2_norm() / scale
        c = commutator(u, v, args.nu)
        split = commutator_split(u, v, args.nu)
        split_res = (split.F + split.G - c).l2_norm() / max(c.l2_norm(), 1e-300)
        rows.append((i, closure, split_res))
    header = ("sample", "closure_residual", "split_residual")
    _emit_table(out, args.out_dir, "bony_check.csv", header, rows)
    summary = {"max_closure_residual": max(r[1] for r in rows) if rows else 0.0,
               "max_split_residual": max(r[2] for r in rows) if rows else 0.0}
    _emit_json(out, args.out_dir, "bony_check.json", summary)
    if args.out_dir:
        _manifest(args, Path(args.out_dir), grid, {"nu": args.nu}, seed=args.seed)
    return EXIT_OK


def cmd_commutator_audit(args, out) -> int:
    grid = make_grid(args.length, args.n)
    rep = commutator_bound_audit(args.ensemble, grid, args.nu, args.seed)
    rows = [(i, *r) for i, r in enumerate(rep.ratios)]
    _emit_table(out, args.out_dir, "audit.csv", ("sample", "ratio_e1", "ratio_e2", "ratio_e3"),
                rows)
    _emit_json(out, args.out_dir, "audit.json", rep.summary())
    if args.out_dir:
        _manifest(args, Path(args.out_dir), grid, {"nu": args.nu}, seed=args.seed)
    return EXIT_OK


def _emit_table(out, out_dir, name, header, rows):
    if out_dir:
        write_csv(_out_dir(out_dir) / name, header, rows)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def _emit_json(out, out_dir, name, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_dir:
        (_out_dir(out_dir) / name).write_text(text)
    else:
        out.write(text)


def cmd_lifespan(args, out) -> int:
    grid = make_grid(args.length, args.n)
    est = lifespan(profile_field(args.u0, grid), args.c_hat, args.nu)
    print(f"T={fmt(est.T)}", file=out)
    print(f"u0_norm={fmt(est.u0_norm)} inverse_C={fmt(est.branches[0])} "
          f"inverse_8C_norm={fmt(est.branches[1])}", file=out)
    return EXIT_OK


def cmd_analyticity(args, out) -> int:
    run = Path(args.run_dir)
    snaps = sorted(run.glob("snap_*.bin"))
    if not snaps:
        raise ValueError(f"no snapshots in {run}")
    d = _out_dir(args.out_dir or run)
    es_rows, decay_rows = [], []
    for path in snaps:
        u, t, nu = read_snapshot(path)
        nu = nu if nu >= 1 else 1.5
        for s in args.s:
            r = es_norm_truncated(u, s, args.kmax, nu)
            es_rows.append((t, s, r.value, r.argmax_k, r.converged))
        try:
            fit = fourier_decay_fit(u)
            decay_rows.append((t, fit.A, fit.sigma_raw if fit.ok else math.nan, fit.residual))
        except NoFit:
            decay_rows.append((t, math.nan, math.nan, math.nan))
    write_csv(d / "es.csv", ("t", "s", "value", "argmax_k", "converged"), es_rows)
    write_csv(d / "decay.csv", ("t", "A", "sigma", "residual"), decay_rows)
    print(f"snapshots={len(snaps)} s={','.join(fmt(s) for s in args.s)}", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# sweeps

_NO_OUT_DIR = ("besov", "lifespan")
_TEMPLATE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_-]*)\}")


def parse_sweep_config(text: str) -> tuple[str, dict[str, list[str]]]:
    """Parse ``key = value`` lines; repeated keys build an axis.

    ``command`` names the subcommand.  Blank lines and ``#`` comments are
    ignored.  Returns ``(command, {key: [values...]})`` in first-seen order.
    """
    command = None
    axes: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if key == "command":
            if command is not None and command != value:
                raise ValueError(f"line {lineno}: command given twice")
            command = value
        else:
            axes.setdefault(key, []).append(value)
    if command is None:
        raise ValueError("sweep config needs a 'command = ...' line")
    if command not in SUBCOMMANDS or command == "sweep":
        raise ValueError(f"cannot sweep over {command!r}")
    return command, axes


def _expand(value: str, cell: dict[str, str]) -> str:
    return _TEMPLATE.sub(lambda m: cell[m.group(1)], value)


def _cell_argv(command, cell: dict[str, str], template_keys: set[str], out_dir: Path):
    argv = [command]
    for key, value in cell.items():
        if key in template_keys:
            continue
        argv += [f"--{key}", _expand(value, cell)]
    if command in _NO_OUT_DIR:
        return argv
    return argv + ["--out-dir", str(out_dir)]


def _last_norms(cell_dir: Path) -> list[str]:
    path = cell_dir / "norms.csv"
    if not path.exists():
        return [""] * (1 + len(NORM_NAMES))
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[-1] if len(rows) > 1 else [""] * (1 + len(NORM_NAMES))


def cmd_sweep(args, out) -> int:
    command, axes = parse_sweep_config(Path(args.config).read_text())
    d = _out_dir(args.out_dir)
    keys = list(axes)
    template_keys = {m for vals in axes.values() for v in vals for m in _TEMPLATE.findall(v)}
    unknown = template_keys - set(keys)
    if unknown:
        raise ValueError(f"undefined template variables: {sorted(unknown)}")
    cells = [dict(zip(keys, combo)) for combo in itertools.product(*axes.values())] if keys else []

    def run(i_cell):
        i, cell = i_cell
        cell_dir = d / f"cell_{i:04d}"
        cell_dir.mkdir(parents=True, exist_ok=True)
        buf = _io.StringIO()
        code = main(_cell_argv(command, cell, template_keys, cell_dir), out=buf, err=buf)
        (cell_dir / "stdout.txt").write_text(buf.getvalue())
        return code

    threads = max(1, int(os.environ.get("FCHLAB_THREADS", "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        codes = list(pool.map(run, enumerate(cells)))

    extra = ("t_final",) + NORM_NAMES if command == "simulate" else ()
    header = ("cell",) + tuple(keys) + ("exit_code",) + extra
    rows = []
    for i, (cell, code) in enumerate(zip(cells, codes)):
        row = [f"cell_{i:04d}"] + [_expand(cell[k], cell) for k in keys] + [code]
        if extra:
            row += _last_norms(d / f"cell_{i:04d}")
        rows.append(row)
    write_csv(d / "summary.csv", header, rows)
    _manifest(args, d, params={"command": command, "cells": len(cells)})
    failed = sum(c != EXIT_OK for c in codes)
    print(f"cells={len(cells)} failed={failed}", file=out)
    return EXIT_OK


_HANDLERS = {
    "simulate": cmd_simulate,
    "picard": cmd_picard,
    "besov": cmd_besov,
    "bony-check": cmd_bony_check,
    "commutator-audit": cmd_commutator_audit,
    "lifespan": cmd_lifespan,
    "analyticity": cmd_analyticity,
    "sweep": cmd_sweep,
}


def main(argv=None, out=None, err=None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:      # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        print(parser.format_usage().rstrip(), file=err)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args, out)
    except (BlowUpError, IterationFailure, ProbeInvalid, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
