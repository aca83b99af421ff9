"""Command-line front end.

Exit codes: 0 success, 1 a bound assertion failed, 2 usage or parse error,
3 a mathematical precondition failed, 4 infeasible geometry.

Basis files are headerless CSV, ``ambient_dim`` rows by ``dim`` columns.  A
single file may hold two bases separated by a blank line.  Experiment
configs are JSON objects with the fields of
:class:`subrip.montecarlo.ExperimentConfig`; ``affinity_sq`` and
``affinity_sq_grid`` are accepted in place of ``affinity`` and
``affinity_grid``.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import montecarlo as mc
from .core import affinity, distance_sq_from_affinity, orthonormalize, principal_angles
from .errors import AmbientMismatch, DomainError, Infeasible, SubspaceError
from .generator import PairSpec, make_pair

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_MATH, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

FIG5_DIMS = ((1, 5), (3, 6), (5, 5), (5, 10), (10, 10))
FIG5_POINTS = 11
FIG6_CELLS = ((500, 100), (500, 200), (500, 400), (1000, 200), (2000, 200))


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])


def _write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def config_hash(cfg: mc.ExperimentConfig) -> str:
    canon = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


# -- geometry ----------------------------------------------------------------


def read_bases(paths) -> list:
    """Parse one or two basis matrices from headerless CSV files."""
    blocks = []
    for p in paths:
        try:
            text = Path(p).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {p}: {exc}") from exc
        current = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                if current:
                    blocks.append(current)
                    current = []
                continue
            try:
                current.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise UsageError(f"{p}:{lineno}: not a number ({exc})") from exc
        if current:
            blocks.append(current)
    if len(blocks) != 2:
        raise UsageError(f"expected two basis matrices, found {len(blocks)}")
    out = []
    for b in blocks:
        widths = {len(r) for r in b}
        if len(widths) != 1:
            raise UsageError(f"ragged rows in basis matrix (row lengths {sorted(widths)})")
        out.append(np.array(b, dtype=float))
    return out


def geometry_report(A, B) -> dict:
    X1, X2 = orthonormalize(A), orthonormalize(B)
    if X1.ambient_dim != X2.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions differ: {X1.ambient_dim} vs {X2.ambient_dim}")
    a = affinity(X1, X2)
    d_sq = distance_sq_from_affinity(min(a * a, min(X1.dim, X2.dim)), X1.dim, X2.dim)
    return {
        "cosines": [float(c) for c in principal_angles(X1, X2).cosines],
        "affinity": a,
        "affinity_sq": a * a,
        "distance": math.sqrt(d_sq),
        "distance_sq": d_sq,
    }


def cmd_geometry(args) -> int:
    A, B = read_bases(args.files)
    print(json.dumps(geometry_report(A, B), indent=2))
    return EXIT_OK


def cmd_make_pair(args) -> int:
    if args.spectrum:
        spec = PairSpec.explicit(args.N, args.d2, [float(x) for x in args.spectrum.split(",")], args.seed)
    else:
        if args.affinity_sq is None:
            raise UsageError("give --affinity-sq or --spectrum")
        spec = PairSpec(args.N, args.d1, args.d2, math.sqrt(args.affinity_sq), args.seed)
    X1, X2, sp = make_pair(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, X in (("U1.csv", X1), ("U2.csv", X2)):
        with open(out / name, "w") as fh:
            for row in X.basis:
                fh.write(",".join(fmt(v) for v in row) + "\n")
    info = {
        "N": spec.N, "d1": spec.d1, "d2": spec.d2, "seed": spec.seed,
        "spectrum_mode": spec.spectrum_mode,
        "cosines": [float(c) for c in sp.cosines],
        "affinity": sp.affinity, "affinity_sq": sp.affinity_sq,
    }
    _write_json(out / "pair.json", info)
    print(json.dumps(info, indent=2))
    return EXIT_OK


# -- experiments -------------------------------------------------------------


def load_config(path, trials=None, seed=None) -> mc.ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    return build_config(raw, trials, seed)


def build_config(raw: dict, trials=None, seed=None) -> mc.ExperimentConfig:
    raw = dict(raw)
    if trials is not None:
        raw["trials"] = trials
    if seed is not None:
        raw["master_seed"] = seed
    raw.setdefault("master_seed", 42)
    try:
        return mc.ExperimentConfig.from_dict(raw)
    except (DomainError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc


def write_outputs(out: Path, cfg, summaries, started) -> list:
    """Serialize summaries; returns the list of files written."""
    out.mkdir(parents=True, exist_ok=True)
    files = []
    multi = len(summaries) > 1
    if multi:
        _write_json(out / "summary.json", {"summaries": [s.to_dict() for s in summaries]})
    else:
        _write_json(out / "summary.json", summaries[0].to_dict())
    files.append("summary.json")

    for i, s in enumerate(summaries):
        name = f"histogram_{i}.csv" if multi else "histogram.csv"
        rows = zip(s.histogram_edges[:-1], s.histogram_edges[1:], s.histogram_counts)
        _write_csv(out / name, ["bin_left", "bin_right", "count"], rows)
        files.append(name)

    rows = []
    for i, s in enumerate(summaries):
        for r in s.per_epsilon:
            rows.append([r.epsilon, r.threshold_kind, r.deviation_threshold, r.empirical_violation,
                         r.theoretical_bound, r.vacuous, r.asserted, r.passed, i])
    _write_csv(out / "per_epsilon.csv",
               ["epsilon", "threshold_kind", "deviation_threshold", "empirical_violation",
                "theoretical_bound", "vacuous", "asserted", "passed", "cell"], rows)
    files.append("per_epsilon.csv")

    if multi or cfg.kind in ("affinity_sweep", "ambient_sweep"):
        _write_csv(out / "cells.csv",
                   ["cell", "label", "N", "n", "d1", "d2", "affinity_sq", "spectrum_mode", "estimate", "mean", "std"],
                   [[i, s.label, s.params.get("N"), s.params.get("n"), s.params.get("d1"), s.params.get("d2"),
                     s.params.get("affinity_sq"), s.params.get("spectrum_mode", ""), s.estimate, s.mean, s.std]
                    for i, s in enumerate(summaries)])
        files.append("cells.csv")
    if cfg.kind == "affinity_sweep" and "estimate_curve" in summaries[0].extras:
        _write_csv(out / "estimate_curve.csv", ["affinity_sq", "estimate"], summaries[0].extras["estimate_curve"])
        files.append("estimate_curve.csv")

    manifest = {
        "tool_version": __version__,
        "config_hash": config_hash(cfg),
        "config": cfg.to_dict(),
        "master_seed": cfg.master_seed,
        "started": started,
        "finished": _now(),
        "outputs": files + ["manifest.json"],
    }
    _write_json(out / "manifest.json", manifest)
    return files


def report_failures(summaries) -> int:
    bad = [(s, r) for s in summaries for r in s.failures]
    for s, r in bad:
        print(
            f"FAIL {s.label} eps={r.epsilon:g} {r.threshold_kind}: "
            f"empirical {r.empirical_violation:.6g} > bound {r.theoretical_bound:.6g} "
            f"+ {mc.SLACK_STD:g} std ({r.binomial_std:.3g})",
            file=sys.stderr,
        )
    return EXIT_ASSERT if bad else EXIT_OK


def execute(cfg, out, threads) -> int:
    started = _now()
    summaries = mc.run(cfg, threads)
    write_outputs(Path(out), cfg, summaries, started)
    for s in summaries:
        print(f"{s.label}: estimate={s.estimate:.6g} mean={s.mean:.6g} std={s.std:.6g} ({s.wall_time:.1f}s)")
    return report_failures(summaries)


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.trials, args.seed)
    return execute(cfg, args.out, mc.resolve_threads(args.threads))


LEMMA_DEFAULTS = {
    "lemma_f_ratio": {"n": 200, "epsilons": [0.3, 0.5]},
    "lemma_angle": {"n": 200, "epsilons": [0.1, 0.15, 0.2]},
    "lemma_support_norm": {"n": 200, "d1": 10, "epsilons": [0.02, 0.05]},
    "lemma_corr_ratio": {"n": 200, "omega": 0.5, "epsilons": [0.3, 0.5]},
}


def cmd_lemma_checks(args) -> int:
    threads = mc.resolve_threads(args.threads)
    if args.config:
        cfg = load_config(args.config, args.trials, args.seed)
        if cfg.kind not in mc.LEMMA_KINDS:
            raise UsageError(f"lemma-checks needs a lemma config, got kind {cfg.kind!r}")
        return execute(cfg, args.out, threads)
    code = EXIT_OK
    for kind, extra in LEMMA_DEFAULTS.items():
        raw = {"kind": kind, "trials": 20_000, **extra}
        if args.omega is not None and kind == "lemma_corr_ratio":
            raw["omega"] = args.omega
        cfg = build_config(raw, args.trials, args.seed if args.seed is not None else 42)
        code = max(code, execute(cfg, Path(args.out) / kind, threads))
    return code


# -- figure presets ----------------------------------------------------------


def preset(figure: str, seed: int, trials=None) -> list:
    """``(subdir, config)`` pairs for a figure."""
    if figure == "fig4":
        raw = {"kind": "affinity_sweep", "N": 500, "n": 200, "d1": 5, "d2": 10,
               "affinity_sq_grid": [1, 2, 3, 4], "trials": 10_000}
        return [("", build_config(raw, trials, seed))]
    if figure == "fig5":
        out = []
        for d1, d2 in FIG5_DIMS:
            grid = list(np.linspace(0.0, d1, FIG5_POINTS))
            raw = {"kind": "affinity_sweep", "N": 500, "n": 200, "d1": d1, "d2": d2,
                   "affinity_sq_grid": grid, "trials": 500}
            out.append((f"d1_{d1}_d2_{d2}", build_config(raw, trials, seed)))
        return out
    if figure == "fig6":
        # each cell sweeps the affinity like fig5, under one projector per trial
        raw = {"kind": "ambient_sweep", "cells": [list(c) for c in FIG6_CELLS], "d1": 5, "d2": 10,
               "affinity_sq_grid": list(np.linspace(0.0, 5.0, FIG5_POINTS)), "trials": 2000}
        return [("", build_config(raw, trials, seed))]
    raise UsageError(f"unknown figure {figure!r}; expected fig4, fig5 or fig6")


def cmd_reproduce(args) -> int:
    threads = mc.resolve_threads(args.threads)
    seed = args.seed if args.seed is not None else 42
    out = Path(args.out)
    code = EXIT_OK
    overview = []
    for sub, cfg in preset(args.figure, seed, args.trials):
        started = _now()
        summaries = mc.run(cfg, threads)
        write_outputs(out / sub if sub else out, cfg, summaries, started)
        code = max(code, report_failures(summaries))
        for s in summaries:
            p = s.params
            overview.append([p["N"], p["n"], p["d1"], p["d2"], p["affinity_sq"], s.estimate, s.mean, s.std, s.trials])
            print(f"{s.label} (d1={p['d1']}, d2={p['d2']}, N={p['N']}, n={p['n']}): "
                  f"estimate={s.estimate:.6g} mean={s.mean:.6g} std={s.std:.6g}")
        if args.figure in ("fig5", "fig6"):
            rows = [[s.params["N"], s.params["n"], cfg.d1, cfg.d2, s.params["affinity_sq"], lo, hi, c]
                    for s in summaries
                    for lo, hi, c in zip(s.histogram_edges[:-1], s.histogram_edges[1:], s.histogram_counts)]
            _write_csv(out / sub / "surface.csv",
                       ["N", "n", "d1", "d2", "affinity_sq", "bin_left", "bin_right", "count"], rows)
    _write_csv(out / f"{args.figure}.csv",
               ["N", "n", "d1", "d2", "affinity_sq", "estimate", "mean", "std", "trials"], overview)
    return code


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subrip", description="Subspace geometry under Gaussian random projection.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", help="principal angles, affinity and distance of two bases")
    g.add_argument("files", nargs="+", help="one CSV holding two blank-line separated bases, or two CSVs")
    g.set_defaults(func=cmd_geometry)

    def common(q):
        q.add_argument("--out", default="out", help="output directory (default: out)")
        q.add_argument("--trials", type=int, help="override the trial count")
        q.add_argument("--threads", type=int, help="worker threads (default: $SUBSPACE_RIP_THREADS or 1)")
        q.add_argument("--seed", type=int, help="master seed (default 42)")

    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config", help="JSON experiment config")
    common(r)
    r.set_defaults(func=cmd_run)

    f = sub.add_parser("reproduce", help="run the preset grid for a figure")
    f.add_argument("figure", help="fig4, fig5 or fig6")
    common(f)
    f.set_defaults(func=cmd_reproduce)

    lem = sub.add_parser("lemma-checks", help="run the probability-lemma checks")
    lem.add_argument("config", nargs="?", help="lemma config; omitted runs all four at n=200")
    lem.add_argument("--omega", type=float, help="correlation for the correlated-ratio check")
    common(lem)
    lem.set_defaults(func=cmd_lemma_checks)

    m = sub.add_parser("make-pair", help="write a generated subspace pair as CSV bases")
    m.add_argument("--N", type=int, required=True)
    m.add_argument("--d1", type=int, default=1)
    m.add_argument("--d2", type=int, required=True)
    m.add_argument("--affinity-sq", type=float)
    m.add_argument("--spectrum", help="comma-separated cosines (overrides --d1 and --affinity-sq)")
    m.add_argument("--seed", type=int, default=42)
    m.add_argument("--out", default="pair")
    m.set_defaults(func=cmd_make_pair)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Infeasible as exc:
        print(f"infeasible geometry: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SubspaceError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
