"""Two-qubit density matrices of the nearest-neighbour pair.

States built from a :class:`CorrelatorSet` are X-shaped (non-zero entries
only on the diagonal and anti-diagonal) and remember that, so their spectra
come from two closed-form 2x2 blocks.  Matrices supplied directly go
through ``numpy.linalg.eigvalsh``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet
from .errors import InvalidSpectrum, NotPositive

PSD_TOL = 1e-9
TRACE_DRIFT = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

_OUTER = (0, 3)
_INNER = (1, 2)
_OFF_X = np.ones((4, 4), dtype=bool)
_OFF_X[np.arange(4), np.arange(4)] = False
_OFF_X[np.arange(4), 3 - np.arange(4)] = False


def _frozen(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """4x4 density matrix in the basis |00>, |01>, |10>, |11> (A is the left factor).

    ``x_shaped`` is set only by constructors that guarantee the X structure.
    """

    m: np.ndarray
    x_shaped: bool = False

    def __post_init__(self):
        arr = _frozen(self.m)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        object.__setattr__(self, "m", arr)


@dataclass(frozen=True, eq=False)
class SingleQubitState:
    m: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.m)
        if arr.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {arr.shape}")
        object.__setattr__(self, "m", arr)


@dataclass(frozen=True, eq=False)
class PartialTranspose:
    """Partial transpose of a two-qubit state; Hermitian but possibly indefinite."""

    m: np.ndarray
    x_shaped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "m", _frozen(self.m))


@dataclass(frozen=True)
class Diagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    x_shape_defect: float

    def ok(self, tol: float = PSD_TOL) -> bool:
        return (
            self.hermiticity_defect <= tol
            and self.trace_defect <= tol
            and self.min_eigenvalue >= -tol
        )


def _x_block_eigs(m: np.ndarray) -> np.ndarray:
    out = []
    for i, j in (_OUTER, _INNER):
        mean = 0.5 * (m[i, i].real + m[j, j].real)
        half = 0.5 * (m[i, i].real - m[j, j].real)
        r = np.hypot(half, abs(m[i, j]))
        out.extend((mean + r, mean - r))
    return np.sort(np.array(out))[::-1]


def eigenvalues(s) -> np.ndarray:
    """Real spectrum in descending order.

    Accepts a TwoQubitState, a PartialTranspose or a bare Hermitian matrix.
    """
    if getattr(s, "x_shaped", False):
        return _x_block_eigs(s.m)
    m = s.m if hasattr(s, "m") else np.asarray(s)
    return np.linalg.eigvalsh(m)[::-1]


def build_state(cs: CorrelatorSet) -> TwoQubitState:
    """Assemble the two-site state from its Pauli expansion coefficients."""
    m = (
        np.kron(I2, I2)
        + cs.mz * (np.kron(SZ, I2) + np.kron(I2, SZ))
        + cs.txy * (np.kron(SX, SY) + np.kron(SY, SX))
        + cs.txx * np.kron(SX, SX)
        + cs.tyy * np.kron(SY, SY)
        + cs.tzz * np.kron(SZ, SZ)
    ) / 4.0
    state = TwoQubitState(m, x_shaped=True)
    lowest = eigenvalues(state)[-1]
    if lowest < -PSD_TOL:
        raise NotPositive(
            f"state has eigenvalue {lowest:.3e}; quadrature tolerance may be too loose"
        )
    return state


def _clean_spectrum(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -PSD_TOL:
        raise InvalidSpectrum(f"eigenvalue {lam.min():.3e} below -{PSD_TOL}")
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if abs(total - 1.0) > TRACE_DRIFT and total > 0:
        lam = lam / total
    return lam


def entropy(x) -> float:
    """Von Neumann entropy in bits of a state or of a spectrum."""
    if isinstance(x, (TwoQubitState, SingleQubitState)):
        lam = eigenvalues(x) if isinstance(x, TwoQubitState) else np.linalg.eigvalsh(x.m)
    else:
        lam = x
    lam = _clean_spectrum(lam)
    nz = lam[lam > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def reduced_state(s: TwoQubitState, keep: str = "A") -> SingleQubitState:
    t = s.m.reshape(2, 2, 2, 2)  # (a, b, a', b')
    if keep == "A":
        return SingleQubitState(np.einsum("ijkj->ik", t))
    if keep == "B":
        return SingleQubitState(np.einsum("ijil->jl", t))
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(s: TwoQubitState, side: str = "A") -> PartialTranspose:
    t = s.m.reshape(2, 2, 2, 2)
    if side == "A":
        pt = t.transpose(2, 1, 0, 3)
    elif side == "B":
        pt = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return PartialTranspose(pt.reshape(4, 4), x_shaped=s.x_shaped)


def validate(s, tol: float = PSD_TOL) -> Diagnostics:
    """Report how far ``s`` is from a valid X-shaped density matrix."""
    m = np.asarray(s.m if hasattr(s, "m") else s, dtype=complex)
    herm = float(np.abs(m - m.conj().T).max())
    trace = float(abs(np.trace(m) - 1.0))
    lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    xdef = float(np.abs(m[_OFF_X]).max())
    return Diagnostics(herm, trace, float(lam.min()), xdef)


# Common reference states
def bell_phi_plus() -> TwoQubitState:
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return TwoQubitState(np.outer(v, v.conj()), x_shaped=True)


def product_state(rho_a, rho_b) -> TwoQubitState:
    ma = getattr(rho_a, "m", rho_a)
    mb = getattr(rho_b, "m", rho_b)
    return TwoQubitState(np.kron(ma, mb))


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.eye(4) / 4, x_shaped=True)
