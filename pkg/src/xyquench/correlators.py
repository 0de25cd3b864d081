"""Two-site correlators of the quenched infinite XY chain.

The chain starts in the zero-temperature ground state at transverse field
``a_tilde`` and evolves under the zero-field Hamiltonian.  Every correlator
is a single integral over the half Brillouin zone ``phi in [0, pi]``; the
four independent ones (G(+1), G(-1), S, M^z) are evaluated together on one
set of quadrature nodes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless quench parameters.

    ``a_tilde = a/J`` is the initial transverse field, ``t_tilde = J t / hbar``
    the evolution time after the field is switched off.
    """

    gamma: float
    a_tilde: float
    t_tilde: float

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not self.t_tilde >= 0.0:
            raise ValueError(f"t_tilde must be >= 0, got {self.t_tilde}")
        if not np.isfinite(self.a_tilde):
            raise ValueError(f"a_tilde must be finite, got {self.a_tilde}")


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 512
    base_order: int = 64

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1 or self.base_order < 1:
            raise ValueError("max_subdivisions and base_order must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class CorrelatorSet:
    mz: float
    txx: float
    tyy: float
    tzz: float
    txy: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.mz, self.txx, self.tyy, self.tzz, self.txy)


def dispersion(x, phi, gamma):
    """Single-particle dispersion sqrt(gamma^2 sin^2 phi + (x - cos phi)^2)."""
    phi = np.asarray(phi, dtype=float)
    return np.sqrt((gamma * np.sin(phi)) ** 2 + (x - np.cos(phi)) ** 2)


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_sums(f, lo, hi, order):
    """Gauss-Legendre estimate on each panel [lo[k], hi[k]].

    Returns an array of shape (ncomp, npanels).
    """
    x, w = _legendre(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float)
    vals = vals.reshape(vals.shape[:-1] + pts.shape)
    return (vals @ w) * half


def integrate_bz(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    lo: float = 0.0,
    hi: float = np.pi,
):
    """Integrate ``f`` over [lo, hi] (default the half zone [0, pi]).

    Composite Gauss-Legendre with adaptive bisection.  Gauss nodes are
    interior, so ``f`` is never evaluated at the endpoints.  ``f`` maps a 1-D
    node array to either an array of the same length or a stacked array of
    shape (k, n) for k integrands sharing the nodes; the return value is a
    float or a length-k array accordingly.

    Raises ConvergenceFailure when more than ``spec.max_subdivisions``
    bisections are needed.
    """
    n = spec.base_order
    pending_lo = np.array([lo], dtype=float)
    pending_hi = np.array([hi], dtype=float)
    coarse = _panel_sums(f, pending_lo, pending_hi, n)
    scalar = coarse.ndim == 1
    if scalar:
        coarse = coarse[None, :]
    total = np.zeros(coarse.shape[0])
    err_total = np.zeros(coarse.shape[0])
    width = hi - lo
    splits = 0

    while pending_lo.size:
        mid = 0.5 * (pending_lo + pending_hi)
        left = _panel_sums(f, pending_lo, mid, n)
        right = _panel_sums(f, mid, pending_hi, n)
        if scalar:
            left, right = left[None, :], right[None, :]
        fine = left + right
        err = np.abs(fine - coarse)
        # running magnitude estimate for the relative criterion
        guess = np.abs(total + fine.sum(axis=1))
        tol = np.maximum(spec.abs_tol, spec.rel_tol * guess)
        budget = tol[:, None] * (pending_hi - pending_lo)[None, :] / width
        ok = np.all(err <= budget, axis=0)

        total += fine[:, ok].sum(axis=1)
        err_total += err[:, ok].sum(axis=1)

        bad = ~ok
        if not bad.any():
            break
        splits += int(bad.sum())
        if splits > spec.max_subdivisions:
            raise ConvergenceFailure(
                f"quadrature did not reach tolerance after {spec.max_subdivisions} "
                "subdivisions; the integrand may oscillate too fast (large t_tilde)"
            )
        pending_lo = np.concatenate([pending_lo[bad], mid[bad]])
        pending_hi = np.concatenate([mid[bad], pending_hi[bad]])
        coarse = np.concatenate([left[:, bad], right[:, bad]], axis=1)

    return float(total[0]) if scalar else total


def _integrands(p: ModelParams) -> Callable[[np.ndarray], np.ndarray]:
    """Stacked integrands [G(+1), G(-1), S, M^z] at the nodes ``phi``.

    Each row already carries its 1/pi prefactor.
    """
    g, a, t = p.gamma, p.a_tilde, p.t_tilde

    def f(phi):
        s = np.sin(phi)
        c = np.cos(phi)
        gs2 = (g * s) ** 2
        lam0 = np.sqrt(gs2 + c * c)
        lama = np.sqrt(gs2 + (a - c) ** 2)
        osc_c = np.cos(2.0 * lam0 * t)
        osc_s = np.sin(2.0 * lam0 * t)
        den = lama * lam0 * lam0

        static = gs2 + (c - a) * c
        # sin(R phi) sin(phi) part; sin(-phi) = -sin(phi) flips its sign for R = -1
        g_odd = g * s * s * (static + a * c * osc_c) / den
        g_even = -c * (static * c - a * gs2 * osc_c) / den
        s_int = -g * a * s * s * osc_s / (lama * lam0)
        mz = (osc_c * g * g * a * s * s - c * ((c - a) * c + gs2)) / den
        return np.stack([g_odd + g_even, -g_odd + g_even, s_int, mz]) / np.pi

    return f


def _integrals(p: ModelParams, spec: QuadratureSpec) -> np.ndarray:
    return integrate_bz(_integrands(p), spec)


def correlator_g(R: int, p: ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    if R not in (-1, 1):
        raise ValueError(f"R must be +1 or -1, got {R}")
    vals = _integrals(p, spec)
    return float(vals[0] if R == 1 else vals[1])


def correlator_s(p: ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return float(_integrals(p, spec)[2])


def magnetization_z(p: ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return float(_integrals(p, spec)[3])


def correlator_set(p: ModelParams, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> CorrelatorSet:
    """All five two-site correlators; T^zz follows from Wick's theorem."""
    g_plus, g_minus, s, mz = (float(v) for v in _integrals(p, spec))
    tzz = mz * mz - g_plus * g_minus + s * s
    return CorrelatorSet(mz=mz, txx=g_minus, tyy=g_plus, tzz=tzz, txy=s)
