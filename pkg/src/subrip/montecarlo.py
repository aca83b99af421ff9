"""Deterministic Monte Carlo experiments.

Each trial is a pure function of ``derive_seed(master_seed, trial_index)``.
Trials are evaluated in chunks on a thread pool and gathered back in
trial-index order before any reduction, so every summary is identical for
any number of workers.

Concentration experiments draw one projector per trial and apply it to every
subspace pair that shares the same ``(N, n)``.  A grid point of a sweep
therefore reproduces, record for record, a standalone run at that point with
the same master seed.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from .core import affinity, distance_sq_from_affinity
from .errors import DomainError, SpectrumInfeasible, SubspaceError
from .generator import PairSpec, make_pair, make_set
from .projection import make_projector, project_many
from .rng import derive_seed, gaussian

log = logging.getLogger(__name__)

KINDS = (
    "pair_concentration",
    "affinity_sweep",
    "ambient_sweep",
    "rip_pair",
    "rip_set",
    "lemma_f_ratio",
    "lemma_angle",
    "lemma_support_norm",
    "lemma_corr_ratio",
)
LEMMA_KINDS = KINDS[5:]

ASSERT_MIN_N = 100
SLACK_STD = 3.0
# events are |dev| > threshold + ROUNDING_SLACK, so exact fixed points
# (containment) do not register as violations through rounding noise
ROUNDING_SLACK = 1e-9
RECORD_LIMIT = 2000
MAX_BINS = 1000


@dataclass
class ExperimentConfig:
    """One experiment.  Field names match the JSON config schema.

    ``affinity`` / ``affinity_grid`` are affinities (not squared); the
    ``affinity_sq`` forms are accepted by :meth:`from_dict` and converted.
    ``spectrum`` fixes the principal-angle cosines of the pair explicitly.
    ``cells`` lists ``(N, n)`` pairs for the ambient sweep; ``n_list``
    expands to ``(N, n)`` for every entry.  ``set_targets`` switches
    ``rip_set`` to the shared-anchor construction.
    """

    kind: str
    N: int = 500
    n: int | None = 200
    n_list: tuple | None = None
    cells: tuple | None = None
    d1: int = 5
    d2: int = 10
    L: int | None = None
    affinity: float | None = None
    affinity_grid: tuple | None = None
    spectrum: tuple | None = None
    set_targets: tuple | None = None
    omega: float = 0.0
    epsilons: tuple = ()
    trials: int = 10_000
    master_seed: int = 42
    bins: int | str = "fd"
    keep_records: bool | None = None

    def __post_init__(self):
        for name in ("n_list", "affinity_grid", "spectrum", "set_targets", "epsilons"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, tuple(float(x) if name != "n_list" else int(x) for x in v))
        if self.cells is not None:
            self.cells = tuple((int(a), int(b)) for a, b in self.cells)
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if int(self.trials) < 1:
            raise DomainError("trials must be >= 1")
        if any(not e > 0 for e in self.epsilons):
            raise DomainError("all epsilons must be positive")
        if self.kind in ("rip_set",) and (self.L is None or self.L < 2):
            raise DomainError("rip_set needs L >= 2")
        if self.kind == "lemma_corr_ratio" and not (0.0 <= self.omega <= 1.0):
            raise DomainError("omega must lie in [0, 1]")
        if self.spectrum is not None and len(self.spectrum) != self.d1:
            raise DomainError(f"spectrum has {len(self.spectrum)} entries, d1={self.d1}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        if "affinity_sq" in raw:
            raw["affinity"] = math.sqrt(float(raw.pop("affinity_sq")))
        if "affinity_sq_grid" in raw:
            raw["affinity_grid"] = [math.sqrt(float(a)) for a in raw.pop("affinity_sq_grid")]
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "kind" not in raw:
            raise DomainError("config needs a 'kind'")
        return cls(**raw)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = [list(x) if isinstance(x, tuple) else x for x in v]
            out[f.name] = v
        return out

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    @property
    def affinities(self) -> tuple:
        if self.affinity_grid is not None:
            return self.affinity_grid
        if self.spectrum is not None:
            return (math.sqrt(sum(x * x for x in self.spectrum)),)
        if self.affinity is None:
            raise DomainError("config needs 'affinity', 'affinity_grid' or 'spectrum'")
        return (self.affinity,)

    @property
    def geometry_seed(self) -> int:
        return derive_seed(self.master_seed, 0, "geometry")

    @property
    def records_kept(self) -> bool:
        if self.keep_records is None:
            return self.trials <= RECORD_LIMIT
        return bool(self.keep_records)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    measured: float
    estimate: float
    deviation: float
    seed_used: int


@dataclass
class EpsilonRow:
    epsilon: float
    threshold_kind: str
    deviation_threshold: float
    empirical_violation: float
    theoretical_bound: float
    vacuous: bool
    asserted: bool
    passed: bool | None
    binomial_std: float


@dataclass
class ExperimentSummary:
    label: str
    params: dict
    trials: int
    estimate: float
    mean: float
    std: float
    histogram_edges: list
    histogram_counts: list
    per_epsilon: list = field(default_factory=list)
    records: list | None = None
    extras: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def failures(self) -> list:
        return [r for r in self.per_epsilon if r.asserted and not r.passed]

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "config": self.config,
            "params": self.params,
            "trials": self.trials,
            "estimate": self.estimate,
            "mean": self.mean,
            "std": self.std,
            "histogram": {"edges": self.histogram_edges, "counts": self.histogram_counts},
            "per_epsilon": [dataclasses.asdict(r) for r in self.per_epsilon],
            "extras": self.extras,
            "wall_time": self.wall_time,
        }
        if self.records is not None:
            d["records"] = [dataclasses.asdict(r) for r in self.records]
        return d


# -- execution ---------------------------------------------------------------


def resolve_threads(threads=None) -> int:
    if threads is None:
        threads = os.environ.get("SUBSPACE_RIP_THREADS", 1)
    threads = int(threads)
    if threads < 1:
        raise DomainError("threads must be >= 1")
    return threads


def map_trials(fn, trials: int, threads: int = 1) -> np.ndarray:
    """Evaluate ``fn(t)`` for ``t in range(trials)``; rows in index order.

    ``fn`` must return a 1-d sequence of floats of fixed length.  Errors are
    re-raised with the failing trial index in the message.
    """

    def call(t):
        try:
            return fn(t)
        except SubspaceError as exc:
            raise type(exc)(f"trial {t}: {exc}") from exc

    def chunk(ts):
        return [call(t) for t in ts]

    if threads <= 1 or trials < 2:
        rows = chunk(range(trials))
    else:
        bounds = np.linspace(0, trials, min(trials, threads * 4) + 1).astype(int)
        pieces = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = [r for part in pool.map(chunk, pieces) for r in part]
    return np.asarray(rows, dtype=float).reshape(trials, -1)


def histogram(x, bins="fd"):
    x = np.asarray(x, dtype=float)
    if np.ptp(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        # a spike (containment); automatic rules cannot split a rounding-width range
        bins = 1
    edges = np.histogram_bin_edges(x, bins=bins)
    if len(edges) - 1 > MAX_BINS:
        edges = np.histogram_bin_edges(x, bins=MAX_BINS)
    counts, edges = np.histogram(x, bins=edges)
    return [float(e) for e in edges], [int(c) for c in counts]


def binomial_std(p, trials) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / trials)


def _violation_row(eps, report: est.BoundReport, violations, n, trials, kind_label=None):
    emp = float(np.mean(violations))
    bound = float(report.probability_bound)
    vac = report.vacuous
    asserted = (not vac) and n >= ASSERT_MIN_N
    sd = binomial_std(bound, trials) if not vac else float("nan")
    passed = (emp <= bound + SLACK_STD * sd) if asserted else None
    if not vac and n < 50 and emp > bound:
        log.info("bound %s exceeded at small n=%d (eps=%g): %.4g > %.4g", report.bound_kind.value, n, eps, emp, bound)
    return EpsilonRow(
        epsilon=float(eps),
        threshold_kind=kind_label or report.bound_kind.value,
        deviation_threshold=float(report.deviation_threshold),
        empirical_violation=emp,
        theoretical_bound=bound,
        vacuous=bool(vac),
        asserted=bool(asserted),
        passed=passed,
        binomial_std=sd,
    )


def _records(measured, estimate, trials, master_seed):
    return [
        TrialRecord(t, float(m), float(estimate), float(abs(m - estimate)), derive_seed(master_seed, t))
        for t, m in enumerate(measured)
    ]


def _moments(x):
    x = np.asarray(x, dtype=float)
    std = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
    return float(np.mean(x)), std


# -- concentration -----------------------------------------------------------


@dataclass
class _Pair:
    label: str
    X1: object
    X2: object
    cosines: np.ndarray
    spectrum_mode: str

    @property
    def d1(self):
        return self.X1.dim

    @property
    def d2(self):
        return self.X2.dim


def _build_pair(N, d1, d2, aff, spectrum, seed, label, allow_fallback=False) -> _Pair:
    if spectrum is not None:
        spec = PairSpec(N, d1, d2, math.sqrt(sum(x * x for x in spectrum)), seed, tuple(spectrum))
    else:
        spec = PairSpec(N, d1, d2, float(aff), seed)
    try:
        X1, X2, sp = make_pair(spec)
        mode = spec.spectrum_mode
    except SpectrumInfeasible:
        if not allow_fallback:
            raise
        lam = min(float(aff) / math.sqrt(d1), 1.0)
        spec = PairSpec(N, d1, d2, lam * math.sqrt(d1), seed, (lam,) * d1)
        X1, X2, sp = make_pair(spec)
        mode = "equal_fallback"
    return _Pair(label, X1, X2, sp.cosines.copy(), mode)


def _concentration(cfg: ExperimentConfig, pairs: list, N: int, n: int, threads: int) -> list:
    """Shared-projector trials over ``pairs``; one summary per pair."""
    t0 = time.perf_counter()
    for p in pairs:
        if not p.d2 < n:
            raise DomainError(f"need d2 < n, got d2={p.d2}, n={n}")
    subspaces = [X for p in pairs for X in (p.X1, p.X2)]

    def trial(t):
        P = make_projector(n, N, derive_seed(cfg.master_seed, t))
        Y = project_many(P, subspaces)
        return [float(np.sum((Y[2 * i].basis.T @ Y[2 * i + 1].basis) ** 2)) for i in range(len(pairs))]

    table = map_trials(trial, cfg.trials, threads)
    elapsed = time.perf_counter() - t0

    out = []
    for i, p in enumerate(pairs):
        aff_sq = float(np.sum(p.cosines ** 2))
        params = est.PairParams(p.d1, p.d2, n, min(aff_sq, p.d1), tuple(p.cosines))
        estimate = est.est_affinity_sq(params)
        D_x = params.distance_sq
        D_est = est.est_distance_sq(D_x, p.d1, p.d2, n)
        measured = table[:, i]
        D_y = np.array([distance_sq_from_affinity(min(m, p.d1), p.d1, p.d2) for m in measured])
        dev = np.abs(measured - estimate)
        D_dev = np.abs(D_y - D_est)
        mean, std = _moments(measured)
        rows = []
        for eps in cfg.epsilons:
            for kind in (est.BoundKind.PAIR_RELAXED, est.BoundKind.PAIR_TIGHT, est.BoundKind.DISTANCE):
                rep = est.deviation_event(params, eps, kind)
                d = D_dev if kind is est.BoundKind.DISTANCE else dev
                rows.append(_violation_row(eps, rep, d > rep.deviation_threshold + ROUNDING_SLACK, n, cfg.trials))
        edges, counts = histogram(measured, cfg.bins)
        se = std / math.sqrt(cfg.trials) if cfg.trials > 1 else float("nan")
        out.append(
            ExperimentSummary(
                label=p.label,
                params={
                    "N": N, "n": n, "d1": p.d1, "d2": p.d2,
                    "affinity_sq": aff_sq, "cosines": [float(c) for c in p.cosines],
                    "spectrum_mode": p.spectrum_mode, "distance_sq": D_x,
                },
                trials=cfg.trials,
                estimate=float(estimate),
                mean=mean,
                std=std,
                histogram_edges=edges,
                histogram_counts=counts,
                per_epsilon=rows,
                records=_records(measured, estimate, cfg.trials, cfg.master_seed) if cfg.records_kept else None,
                extras={
                    "distance_estimate": float(D_est),
                    "distance_mean": float(np.mean(D_y)),
                    "centering_z": float(abs(mean - estimate) / se) if se > 0 else 0.0,
                    "tight_factor": est.tight_threshold_factor(p.cosines),
                },
                config=cfg.to_dict(),
                wall_time=elapsed,
            )
        )
    return out


def _pairs_for(cfg: ExperimentConfig, N: int, fallback: bool) -> list:
    seed = cfg.geometry_seed
    if cfg.spectrum is not None:
        return [_build_pair(N, cfg.d1, cfg.d2, None, cfg.spectrum, seed, "spectrum")]
    return [
        _build_pair(N, cfg.d1, cfg.d2, a, None, seed, f"aff_sq={a * a:.6g}", allow_fallback=fallback)
        for a in cfg.affinities
    ]


def _n_of(cfg):
    if cfg.n is None:
        raise DomainError("config needs 'n'")
    return int(cfg.n)


def run_pair_concentration(cfg: ExperimentConfig, threads: int = 1) -> ExperimentSummary:
    """Projected squared affinity of one fixed pair over ``cfg.trials`` projectors."""
    if cfg.affinity_grid is not None and len(cfg.affinity_grid) != 1:
        raise DomainError("pair_concentration takes a single affinity; use affinity_sweep for a grid")
    pairs = _pairs_for(cfg, cfg.N, fallback=False)
    return _concentration(cfg, pairs, cfg.N, _n_of(cfg), threads)[0]


def run_spectra(cfg: ExperimentConfig, spectra, threads: int = 1) -> list:
    """Concentration for several explicit spectra under shared projectors.

    Spectrum ``k`` fixes the cosines of a pair with ``d1 = len(spectra[k])``
    and ``d2 = cfg.d2``; ``cfg.d1`` and the affinity fields are ignored.  A
    one-entry spectrum is the line-subspace experiment.
    """
    seed = cfg.geometry_seed
    pairs = [
        _build_pair(cfg.N, len(s), cfg.d2, None, tuple(s), seed, f"spectrum={','.join(f'{x:g}' for x in s)}")
        for s in spectra
    ]
    return _concentration(cfg, pairs, cfg.N, _n_of(cfg), threads)


def estimate_curve(d1, d2, n, points=101):
    """Closed-form projected affinity over ``aff_sq`` in [0, d1]."""
    grid = np.linspace(0.0, d1, points)
    return [(float(a), float(est.est_affinity_sq(est.PairParams(d1, d2, n, float(a))))) for a in grid]


def run_affinity_sweep(cfg: ExperimentConfig, threads: int = 1) -> list:
    """One summary per affinity in ``cfg.affinity_grid``.

    When the uniform-scaled spectrum is infeasible (affinity close to
    ``sqrt(d1)``) the grid point falls back to equal cosines and says so in
    ``params['spectrum_mode']``.
    """
    pairs = _pairs_for(cfg, cfg.N, fallback=True)
    n = _n_of(cfg)
    out = _concentration(cfg, pairs, cfg.N, n, threads)
    curve = estimate_curve(cfg.d1, cfg.d2, n)
    for s in out:
        s.extras["estimate_curve"] = curve
    return out


def ambient_cells(cfg: ExperimentConfig) -> list:
    if cfg.cells is not None:
        return list(cfg.cells)
    if cfg.n_list is not None:
        return [(cfg.N, n) for n in cfg.n_list]
    return [(cfg.N, _n_of(cfg))]


def run_ambient_sweep(cfg: ExperimentConfig, threads: int = 1) -> list:
    """One summary per ``(N, n)`` cell at fixed dimensions and affinity."""
    out = []
    for N, n in ambient_cells(cfg):
        pairs = _pairs_for(cfg, N, fallback=True)
        for s in _concentration(cfg, pairs, N, n, threads):
            s.label = f"N={N},n={n},{s.label}"
            out.append(s)
    return out


# -- restricted isometry -----------------------------------------------------


def rip_geometry(cfg: ExperimentConfig):
    if cfg.kind == "rip_set":
        targets = cfg.set_targets
        return make_set(cfg.N, cfg.d1, cfg.L, cfg.geometry_seed, targets)
    pair = _pairs_for(cfg, cfg.N, fallback=False)[0]
    return [pair.X1, pair.X2]


def run_rip(cfg: ExperimentConfig, threads: int = 1, subspaces=None) -> ExperimentSummary:
    """Frequency of the ``(1 +/- eps)`` distance sandwich over all pairs.

    The per-trial statistic is the worst relative distortion
    ``max_{i<j} |D_Y^2 / D_X^2 - 1|``; the sandwich holds at ``eps`` iff it is
    at most ``eps``.  ``subspaces`` overrides the generated geometry.
    """
    t0 = time.perf_counter()
    n = _n_of(cfg)
    Xs = list(subspaces) if subspaces is not None else rip_geometry(cfg)
    if len(Xs) < 2:
        raise DomainError("need at least two subspaces")
    N = Xs[0].ambient_dim
    idx = [(i, j) for i in range(len(Xs)) for j in range(i + 1, len(Xs))]
    D_x = np.array([
        distance_sq_from_affinity(min(affinity(Xs[i], Xs[j]) ** 2, min(Xs[i].dim, Xs[j].dim)), Xs[i].dim, Xs[j].dim)
        for i, j in idx
    ])

    def trial(t):
        P = make_projector(n, N, derive_seed(cfg.master_seed, t))
        Y = project_many(P, Xs)
        worst = 0.0
        for k, (i, j) in enumerate(idx):
            a2 = min(float(np.sum((Y[i].basis.T @ Y[j].basis) ** 2)), min(Y[i].dim, Y[j].dim))
            D_y = distance_sq_from_affinity(a2, Y[i].dim, Y[j].dim)
            if D_x[k] > 0:
                r = abs(D_y / D_x[k] - 1.0)
            else:
                r = 0.0 if D_y <= ROUNDING_SLACK else math.inf
            worst = max(worst, r)
        return [worst]

    measured = map_trials(trial, cfg.trials, threads)[:, 0]
    elapsed = time.perf_counter() - t0

    dims = sorted({X.dim for X in Xs})
    set_mode = cfg.kind == "rip_set"
    rows = []
    for eps in cfg.epsilons:
        if set_mode:
            rep = est.rip_set_report(max(dims), len(Xs), n, eps)
        else:
            d1, d2 = Xs[0].dim, Xs[1].dim
            rep = est.rip_pair_report(min(d1, d2), max(d1, d2), n, eps)
        rows.append(_violation_row(eps, rep, measured > eps + ROUNDING_SLACK, n, cfg.trials))

    mean, std = _moments(measured)
    edges, counts = histogram(measured, cfg.bins)
    return ExperimentSummary(
        label=f"{cfg.kind},L={len(Xs)}",
        params={"N": N, "n": n, "dims": [X.dim for X in Xs], "L": len(Xs), "distance_sq": [float(x) for x in D_x]},
        trials=cfg.trials,
        estimate=0.0,
        mean=mean,
        std=std,
        histogram_edges=edges,
        histogram_counts=counts,
        per_epsilon=rows,
        records=_records(measured, 0.0, cfg.trials, cfg.master_seed) if cfg.records_kept else None,
        extras={
            "success_frequency": {f"{r.epsilon!r}": 1.0 - r.empirical_violation for r in rows},
            "success_lower_bound": {f"{r.epsilon!r}": 1.0 - r.theoretical_bound for r in rows},
        },
        config=cfg.to_dict(),
        wall_time=elapsed,
    )


# -- appendix lemmas ---------------------------------------------------------


def _lemma_pair(seed, n):
    z = gaussian(seed, 2 * n, scale=1.0 / math.sqrt(n))
    return z[:n], z[n:]


def lemma_statistic(kind: str, seed: int, n: int, d: int = 1, omega: float = 0.0) -> float:
    """The per-trial statistic of one appendix lemma (see run_lemma_checks)."""
    a1, a2 = _lemma_pair(seed, n)
    if kind == "lemma_f_ratio":
        return float((a1 @ a1) / (a2 @ a2))
    if kind == "lemma_angle":
        return float(abs(a1 @ a2) / math.sqrt((a1 @ a1) * (a2 @ a2)))
    if kind == "lemma_support_norm":
        return float((a1[:d] @ a1[:d]) / (a1 @ a1))
    if kind == "lemma_corr_ratio":
        p = omega * a2 + math.sqrt(1.0 - omega * omega) * a1
        return float((p @ p) / (a2 @ a2))
    raise DomainError(f"not a lemma kind: {kind}")


def lemma_moments(kind: str, n: int, d: int = 1):
    """Exact mean and variance of the lemma statistic where known."""
    if kind == "lemma_f_ratio" and n > 4:
        return n / (n - 2), 4.0 * n * (n - 1) / ((n - 2) ** 2 * (n - 4))
    if kind == "lemma_support_norm":
        return d / n, 2.0 * d * (n - d) / (n * n * (n + 2))
    return None, None


def run_lemma_checks(cfg: ExperimentConfig, threads: int = 1) -> ExperimentSummary:
    """Empirical deviation frequencies for one appendix lemma.

    * ``lemma_f_ratio``: ``F = |a1|^2/|a2|^2``, event ``|F - 1| > eps``,
      bound ``4/(eps^2 n)``.
    * ``lemma_angle``: ``|cos angle(a1, a2)|``, event ``> eps``, bound
      ``exp(-eps^2 n/2)``.
    * ``lemma_support_norm``: ``|w_T|^2`` for ``w = a1/|a1|`` and
      ``T = {1..d1}``, event ``| . - d/n| > eps``, bound ``2d/(eps^2 n^2)``.
    * ``lemma_corr_ratio``: ``p = omega q + sqrt(1-omega^2) w``; statistic
      ``|p|^2/|q|^2``, event ``| . - 1| > (1-omega^2) eps``, bound
      ``4/(eps^2 n)``.  With ``omega = 0`` the records equal the F-ratio ones.
    """
    t0 = time.perf_counter()
    kind, n, d, omega = cfg.kind, _n_of(cfg), int(cfg.d1), float(cfg.omega)
    if kind not in LEMMA_KINDS:
        raise DomainError(f"not a lemma kind: {kind}")
    if kind == "lemma_support_norm" and not (1 <= d <= n):
        raise DomainError(f"support size d={d} must lie in [1, n={n}]")

    measured = map_trials(
        lambda t: [lemma_statistic(kind, derive_seed(cfg.master_seed, t), n, d, omega)], cfg.trials, threads
    )[:, 0]
    elapsed = time.perf_counter() - t0

    center = {"lemma_angle": 0.0, "lemma_support_norm": d / n}.get(kind, 1.0)
    dev = np.abs(measured - center)
    rows = []
    for eps in cfg.epsilons:
        if kind == "lemma_f_ratio":
            rep = est.BoundReport(eps, eps, est.bound_p1(eps, n), est.BoundKind.P1)
        elif kind == "lemma_angle":
            rep = est.BoundReport(eps, eps, est.bound_p3(eps, n), est.BoundKind.P3)
        elif kind == "lemma_support_norm":
            rep = est.BoundReport(eps, eps, est.bound_p2(eps, d, n), est.BoundKind.P2)
        else:
            rep = est.BoundReport(eps, (1.0 - omega ** 2) * eps, est.bound_p1(eps, n), est.BoundKind.P1)
        rows.append(_violation_row(eps, rep, dev > rep.deviation_threshold, n, cfg.trials, kind_label=kind))

    mean, std = _moments(measured)
    m_th, v_th = lemma_moments(kind, n, d)
    extras = {"variance": float(np.var(measured, ddof=1)) if cfg.trials > 1 else 0.0}
    if m_th is not None:
        extras.update({
            "mean_theory": m_th,
            "variance_theory": v_th,
            "mean_z": float(abs(mean - m_th) / math.sqrt(v_th / cfg.trials)) if v_th > 0 else 0.0,
        })
    edges, counts = histogram(measured, cfg.bins)
    return ExperimentSummary(
        label=kind,
        params={"n": n, "d": d, "omega": omega},
        trials=cfg.trials,
        estimate=float(center),
        mean=mean,
        std=std,
        histogram_edges=edges,
        histogram_counts=counts,
        per_epsilon=rows,
        records=_records(measured, center, cfg.trials, cfg.master_seed) if cfg.records_kept else None,
        extras=extras,
        config=cfg.to_dict(),
        wall_time=elapsed,
    )


# -- dispatch ----------------------------------------------------------------


def run(cfg: ExperimentConfig, threads: int = 1) -> list:
    """Run any experiment kind; always returns a list of summaries."""
    if cfg.kind == "pair_concentration":
        return [run_pair_concentration(cfg, threads)]
    if cfg.kind == "affinity_sweep":
        return run_affinity_sweep(cfg, threads)
    if cfg.kind == "ambient_sweep":
        return run_ambient_sweep(cfg, threads)
    if cfg.kind in ("rip_pair", "rip_set"):
        return [run_rip(cfg, threads)]
    return [run_lemma_checks(cfg, threads)]


def is_unimodal(counts, tol_sigma=3.0) -> bool:
    """Counts rise to a single peak then fall, up to Poisson noise.

    A dip on the way up (or a rise on the way down) relative to the running
    extreme ``b`` is ignored unless it exceeds ``tol_sigma * sqrt(b + x)``,
    the standard deviation of the difference of two Poisson counts.
    """
    c = np.asarray(counts, dtype=float)
    peak = int(np.argmax(c))
    best = 0.0
    for x in c[:peak + 1]:
        if best - x > tol_sigma * math.sqrt(best + x):
            return False
        best = max(best, x)
    best = c[peak]
    for x in c[peak:]:
        if x - best > tol_sigma * math.sqrt(best + x):
            return False
        best = min(best, x)
    return True
