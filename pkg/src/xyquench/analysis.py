"""Field-time sweeps and entanglement collapse/revival analysis.

For a fixed evolution time the nearest-neighbour entanglement, as a
function of the initial field, can vanish at some ``a_c`` and later
reappear.  Whether it reappears is compared against the sign of
``a * dQ/da`` at ``a_c`` (Q = discord).

Collapse and revival are located through the smallest eigenvalue of the
partial transpose, which is smooth in ``a``; the log-negativity itself is
clipped at zero and useless for root finding.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .bases import FATOL, XATOL
from .correlators import DEFAULT_QUADRATURE, ModelParams, QuadratureSpec, correlator_set
from .discord import discord
from .entanglement import ZERO_TOL, log_negativity
from .errors import UnstableDerivative, XYQuenchError
from .qstate import build_state, eigenvalues, partial_transpose, validate
from .workdeficit import one_way_deficit

log = logging.getLogger(__name__)

MEASURES = ("ln", "discord", "deficit", "mi")
REVIVAL_THRESHOLD = 1e-4
REVIVAL_CEILING = 20.0
COLLAPSE_WINDOW = (0.0, 5.0)
COLLAPSE_STEP = 0.01
REVIVAL_STEP = 0.02
EXCEPTIONAL_ZONE = (0.9, 1.1)
SLOPE_STEP = 1e-3
SLOPE_AGREEMENT = 1e-3


@dataclass(frozen=True)
class SweepGrid:
    a_min: float
    a_max: float
    a_steps: int
    t_min: float
    t_max: float
    t_steps: int
    gamma: float = 0.5

    def __post_init__(self):
        if not self.a_min < self.a_max:
            raise ValueError("a_min must be < a_max")
        if not self.t_min <= self.t_max:
            raise ValueError("t_min must be <= t_max")
        if self.a_steps < 1 or self.t_steps < 1:
            raise ValueError("steps must be >= 1")

    def a_values(self) -> np.ndarray:
        return np.linspace(self.a_min, self.a_max, self.a_steps)

    def t_values(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_steps)


@dataclass(frozen=True)
class FieldProfilePoint:
    a_tilde: float
    t_tilde: float
    gamma: float
    ln: float | None = None
    discord: float | None = None
    deficit: float | None = None
    mutual_info: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class CollapseRevivalRecord:
    t_tilde: float
    a_c: float | None
    slope: float | None
    revived: bool
    max_ln_after_collapse: float
    a_revival_peak: float | None
    predicate_holds: bool
    exceptional_near_qpt: bool
    a_revival_onset: float | None = None
    error: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def state_at(a: float, t: float, gamma: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    return build_state(correlator_set(ModelParams(gamma, a, t), spec))


def pt_min_eigenvalue(a: float, t: float, gamma: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Smallest eigenvalue of the partial transpose; negative means entangled."""
    return float(eigenvalues(partial_transpose(state_at(a, t, gamma, spec)))[-1])


def _entangled(lam_min: float) -> bool:
    return lam_min < -ZERO_TOL


def _check_measures(measures: Iterable[str]) -> tuple[str, ...]:
    ms = tuple(measures)
    bad = set(ms) - set(MEASURES)
    if bad:
        raise ValueError(f"unknown measures {sorted(bad)}; choose from {MEASURES}")
    return ms


def evaluate_point(a: float, t: float, gamma: float, measures: Sequence[str] = ("ln", "discord"),
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> FieldProfilePoint:
    """Run the full pipeline at one (a, t); errors are captured, not raised."""
    try:
        s = state_at(a, t, gamma, spec)
        vals = {}
        if "ln" in measures:
            vals["ln"] = log_negativity(s)
        if "discord" in measures or "mi" in measures:
            d = discord(s)
            if "discord" in measures:
                vals["discord"] = d.discord
            if "mi" in measures:
                vals["mutual_info"] = d.mutual_info
        if "deficit" in measures:
            vals["deficit"] = one_way_deficit(s).deficit
        return FieldProfilePoint(a, t, gamma, **vals)
    except XYQuenchError as exc:
        log.warning("point a=%r t=%r failed: %s", a, t, exc)
        return FieldProfilePoint(a, t, gamma, error=f"{type(exc).__name__}: {exc}")


def _eval_star(args):
    return evaluate_point(*args)


def _run_points(jobs: list[tuple], workers: int) -> list[FieldProfilePoint]:
    if workers <= 1 or len(jobs) < 2:
        return [_eval_star(j) for j in jobs]
    chunk = max(1, len(jobs) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so output is indexed by grid position
        return list(pool.map(_eval_star, jobs, chunksize=chunk))


def field_profile(t: float, gamma: float, a_values: Iterable[float],
                  measures: Sequence[str] = ("ln", "discord"),
                  spec: QuadratureSpec = DEFAULT_QUADRATURE, workers: int = 1) -> list[FieldProfilePoint]:
    """Measures along the field axis at fixed time, one point per input field."""
    ms = _check_measures(measures)
    jobs = [(float(a), float(t), float(gamma), ms, spec) for a in a_values]
    return _run_points(jobs, workers)


def sweep(a_values: Iterable[float], t_values: Iterable[float], gamma: float,
          measures: Sequence[str] = ("ln", "discord"), spec: QuadratureSpec = DEFAULT_QUADRATURE,
          workers: int = 1) -> list[FieldProfilePoint]:
    """Row-major sweep over explicit axes: time is the slow index, field the fast one."""
    ms = _check_measures(measures)
    a_values = [float(a) for a in a_values]
    jobs = [(a, float(t), float(gamma), ms, spec) for t in t_values for a in a_values]
    return _run_points(jobs, workers)


def grid_sweep(grid: SweepGrid, measures: Sequence[str] = ("ln", "discord"),
               spec: QuadratureSpec = DEFAULT_QUADRATURE, workers: int = 1) -> list[FieldProfilePoint]:
    return sweep(grid.a_values(), grid.t_values(), grid.gamma, measures, spec, workers)


def _bisect_collapse(f, lo: float, hi: float, tol: float) -> float:
    """Shrink [lo, hi] with f(lo) entangled, f(hi) not, to width <= tol."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _entangled(f(mid)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _local_max(f, lo: float, hi: float, xatol: float = 1e-7) -> tuple[float, float]:
    res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": xatol})
    return float(res.x), float(-res.fun)


def find_collapse(t: float, gamma: float = 0.5, window: tuple[float, float] = COLLAPSE_WINDOW,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE, step: float = COLLAPSE_STEP,
                  tol: float = 1e-6, lam_min=None) -> float | None:
    """Smallest field in ``window`` where entanglement switches off, or None.

    Beyond sign changes on the sampling grid, every local maximum of the
    smallest PT eigenvalue that stays negative on the grid is refined, so
    zero-entanglement intervals narrower than ``step`` are still found.
    ``lam_min`` overrides the eigenvalue function (used for testing).
    """
    f = lam_min or (lambda a: pt_min_eigenvalue(a, t, gamma, spec))
    lo, hi = window
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    a = np.linspace(lo, hi, n)
    v = np.array([f(x) for x in a])
    ent = v < -ZERO_TOL
    for i in range(n - 1):
        if ent[i] and not ent[i + 1]:
            return _bisect_collapse(f, a[i], a[i + 1], tol)
        if 0 < i and ent[i - 1] and ent[i] and ent[i + 1] and v[i] >= v[i - 1] and v[i] >= v[i + 1]:
            x, peak = _local_max(f, a[i - 1], a[i + 1])
            if not _entangled(peak):
                return _bisect_collapse(f, a[i - 1], x, tol)
    return None


def _ln_from_lam(lam: float) -> float:
    return float(np.log2(1.0 - 2.0 * lam)) if _entangled(lam) else 0.0


def _revival_scan(f, a_c: float, ceiling: float, step: float):
    """(max_ln, field at max, first re-entangled field) over (a_c, ceiling]."""
    start = a_c + 1e-4
    if start >= ceiling:
        return 0.0, None, None
    n = max(2, int(math.ceil((ceiling - start) / step)) + 1)
    a = np.linspace(start, ceiling, n)
    v = np.array([f(x) for x in a])
    # refine the three deepest local minima of the PT eigenvalue
    interior = [i for i in range(1, n - 1) if v[i] <= v[i - 1] and v[i] <= v[i + 1]]
    candidates = [(v[i], a[i], i) for i in (0, n - 1)]
    for i in sorted(interior, key=lambda i: v[i])[:3]:
        x, neg = _local_max(lambda y: -f(y), a[i - 1], a[i + 1])
        candidates.append((-neg, x, i))
    lam, at, _ = min(candidates)
    ln = _ln_from_lam(lam)
    if ln <= 0:
        return 0.0, None, None

    first = next((i for i in range(n) if _entangled(v[i])), None)
    if first is None:
        # entangled only between grid points; refine up to the refined minimum
        first_c = min((c for c in candidates if _entangled(c[0])), key=lambda c: c[1])
        lo, hi = a[max(first_c[2] - 1, 0)], first_c[1]
    elif first == 0:
        return ln, float(at), float(a[0])
    else:
        lo, hi = a[first - 1], a[first]
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if _entangled(f(mid)):
            hi = mid
        else:
            lo = mid
    return ln, float(at), 0.5 * (lo + hi)


def find_revival(t: float, gamma: float, a_c: float, ceiling: float = REVIVAL_CEILING,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE, step: float = REVIVAL_STEP,
                 lam_min=None) -> tuple[float, float | None]:
    """Largest log-negativity for fields in (a_c, ceiling] and where it occurs.

    Returns (0.0, None) when the state stays separable over the whole range.
    """
    f = lam_min or (lambda a: pt_min_eigenvalue(a, t, gamma, spec))
    ln, peak, _ = _revival_scan(f, a_c, ceiling, step)
    return ln, peak


def _discord_at(a: float, t: float, gamma: float, spec: QuadratureSpec, search: dict) -> float:
    return discord(state_at(a, t, gamma, spec), **search).discord


def discord_slope(t: float, gamma: float, a_c: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                  h: float = SLOPE_STEP, agreement: float = SLOPE_AGREEMENT) -> float:
    """Central-difference dQ/da at ``a_c`` with a Richardson consistency check.

    The estimate at step h is compared with the one at h/2; on disagreement
    the measurement search is tightened once before giving up.
    """
    searches = ({"fatol": FATOL, "xatol": XATOL},
                {"fatol": 1e-13, "xatol": 1e-10, "max_iter": 2000, "grid": (64, 64)})
    for search in searches:
        q = {x: _discord_at(a_c + x, t, gamma, spec, search) for x in (-h, -h / 2, h / 2, h)}
        d_h = (q[h] - q[-h]) / (2 * h)
        d_half = (q[h / 2] - q[-h / 2]) / h
        if abs(d_h - d_half) <= agreement:
            # Richardson-extrapolated central difference
            return float((4 * d_half - d_h) / 3)
    raise UnstableDerivative(
        f"slope at a_c={a_c!r}, t={t!r}: h and h/2 estimates differ by {abs(d_h - d_half):.3e}"
    )


def is_exceptional(a_c: float | None, zone: tuple[float, float] = EXCEPTIONAL_ZONE) -> bool:
    return a_c is not None and zone[0] <= abs(a_c) <= zone[1]


def revival_predicate(record: CollapseRevivalRecord) -> bool:
    """True when a_c * dQ/da > 0, i.e. discord grows away from zero field at collapse."""
    if record.a_c is None or record.slope is None:
        raise ValueError("record has no collapse point or slope")
    return record.a_c * record.slope > 0


def collapse_revival(t: float, gamma: float = 0.5, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                     window: tuple[float, float] = COLLAPSE_WINDOW,
                     ceiling: float = REVIVAL_CEILING,
                     zone: tuple[float, float] = EXCEPTIONAL_ZONE) -> CollapseRevivalRecord | None:
    """Full record for one time, or None when entanglement never collapses."""
    a_c = find_collapse(t, gamma, window, spec)
    if a_c is None:
        return None
    max_ln, peak, onset = _revival_scan(
        lambda a: pt_min_eigenvalue(a, t, gamma, spec), a_c, ceiling, REVIVAL_STEP
    )
    revived = max_ln > REVIVAL_THRESHOLD
    exceptional = is_exceptional(a_c, zone)
    try:
        slope = discord_slope(t, gamma, a_c, spec)
    except XYQuenchError as exc:
        return CollapseRevivalRecord(t, a_c, None, revived, max_ln, peak, False, exceptional,
                                     onset, error=f"{type(exc).__name__}: {exc}")
    rec = CollapseRevivalRecord(t, a_c, slope, revived, max_ln, peak, False, exceptional, onset)
    return replace(rec, predicate_holds=revival_predicate(rec))


def _scan_star(args):
    t, gamma, spec, window, ceiling, zone = args
    try:
        return collapse_revival(t, gamma, spec, window, ceiling, zone)
    except XYQuenchError as exc:
        log.warning("scan at t=%r failed: %s", t, exc)
        return CollapseRevivalRecord(t, None, None, False, 0.0, None, False, False,
                                     error=f"{type(exc).__name__}: {exc}")


def derivative_scan(t_values: Iterable[float], gamma: float = 0.5,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE,
                    window: tuple[float, float] = COLLAPSE_WINDOW,
                    ceiling: float = REVIVAL_CEILING,
                    zone: tuple[float, float] = EXCEPTIONAL_ZONE,
                    workers: int = 1) -> list[CollapseRevivalRecord]:
    """Collapse/revival record for every time that shows a collapse.

    Failures at individual times are recorded in the ``error`` field and
    the scan continues.
    """
    jobs = [(float(t), float(gamma), spec, window, ceiling, zone) for t in t_values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_scan_star, jobs))
    else:
        out = [_scan_star(j) for j in jobs]
    return [r for r in out if r is not None]


def state_diagnostics(a: float, t: float, gamma: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    return validate(state_at(a, t, gamma, spec))
