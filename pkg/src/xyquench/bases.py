"""Projective qubit measurements and the basis search shared by discord and deficit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import OptimizerFailure

TWO_PI = 2.0 * np.pi

# Search defaults: coarse grid seeding, then Nelder-Mead from the best cell.
GRID_THETA = 32
GRID_PHI = 32
FATOL = 1e-9
XATOL = 1e-7
MAX_ITER = 500


@dataclass(frozen=True)
class MeasurementBasis:
    """Bloch angles of the first basis vector cos(t/2)|0> + e^{i p} sin(t/2)|1>."""

    theta: float
    phi: float

    @classmethod
    def wrapped(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Fold arbitrary angles back onto theta in [0, pi], phi in [0, 2 pi)."""
        theta = float(np.mod(theta, TWO_PI))
        if theta > np.pi:
            theta = TWO_PI - theta
            phi = phi + np.pi
        phi = float(np.mod(phi, TWO_PI))
        if phi >= TWO_PI:
            phi = 0.0
        return cls(theta, phi)

    def vectors(self) -> np.ndarray:
        return basis_vectors(np.array([self.theta]), np.array([self.phi]))[0]


def basis_vectors(theta, phi) -> np.ndarray:
    """Orthonormal basis vectors, shape (n, 2, 2): [n, k] is the k-th ket.

    The second ket carries a minus sign on its |0> component so the pair is
    orthogonal for every (theta, phi).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    e = np.exp(1j * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = e * s
    out[..., 1, 0] = -np.conj(e) * s
    out[..., 1, 1] = c
    return out


def projectors(b: MeasurementBasis) -> tuple[np.ndarray, np.ndarray]:
    v = b.vectors()
    return np.outer(v[0], v[0].conj()), np.outer(v[1], v[1].conj())


def swap_parties(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)


def branch_blocks(m: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Unnormalised conditional states of A for measurements on B.

    ``vecs`` has shape (n, 2, 2) as returned by :func:`basis_vectors`; the
    result has shape (n, 2, 2, 2) indexed [basis, outcome, a, a'].
    """
    r = np.asarray(m).reshape(2, 2, 2, 2)
    return np.einsum("nkb,abcd,nkd->nkac", vecs.conj(), r, vecs, optimize=True)


def block_spectra(blocks: np.ndarray) -> np.ndarray:
    """Eigenvalues of stacked 2x2 Hermitian blocks, last axis of length 2."""
    d0 = blocks[..., 0, 0].real
    d1 = blocks[..., 1, 1].real
    mean = 0.5 * (d0 + d1)
    r = np.hypot(0.5 * (d0 - d1), np.abs(blocks[..., 0, 1]))
    return np.stack([mean + r, mean - r], axis=-1)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log2(safe), 0.0)


PROB_FLOOR = 1e-12


def branch_entropies(blocks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sum_k p_k S(rho_k), -sum lambda log lambda) for each basis.

    The first is the averaged conditional entropy; the second is the entropy
    of the dephased joint state, whose spectrum is the union of the
    unnormalised branch spectra.
    """
    lam = block_spectra(blocks)  # (n, 2 outcomes, 2)
    p = lam.sum(axis=-1)
    joint = -_xlog2x(lam).sum(axis=(-1, -2))
    # p S(lam/p) = -sum lam log lam + p log p
    live = p >= PROB_FLOOR
    cond = np.where(live, -_xlog2x(lam).sum(axis=-1) + _xlog2x(p), 0.0).sum(axis=-1)
    return cond, joint


def minimize_over_bases(objective, *, grid=(GRID_THETA, GRID_PHI), fatol=FATOL,
                        xatol=XATOL, max_iter=MAX_ITER) -> tuple[float, MeasurementBasis]:
    """Minimise ``objective(theta_array, phi_array) -> values`` over the Bloch sphere.

    A coarse theta x phi grid seeds a Nelder-Mead refinement.  The refined
    point is kept only if it improves on the grid.
    """
    nt, nphi = grid
    th, ph = np.meshgrid(
        np.linspace(0.0, np.pi, nt), np.arange(nphi) * (TWO_PI / nphi), indexing="ij"
    )
    vals = objective(th.ravel(), ph.ravel())
    k = int(np.argmin(vals))
    start = np.array([th.ravel()[k], ph.ravel()[k]])
    best_val = float(vals[k])

    def f(x):
        return float(objective(np.array([x[0]]), np.array([x[1]]))[0])

    step = np.array([np.pi / (nt - 1), TWO_PI / nphi]) if nt > 1 else np.array([0.1, 0.1])
    simplex = np.array([start, start + [step[0] / 2, 0], start + [0, step[1] / 2]])
    res = minimize(
        f, start, method="Nelder-Mead",
        options={"xatol": xatol, "fatol": fatol, "maxiter": max_iter,
                 "initial_simplex": simplex},
    )
    if not res.success:
        raise OptimizerFailure(f"basis refinement did not converge: {res.message}")
    if res.fun <= best_val:
        return float(res.fun), MeasurementBasis.wrapped(*res.x)
    return best_val, MeasurementBasis.wrapped(*start)
