"""Negativity and logarithmic negativity of two-qubit states."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import TwoQubitState, eigenvalues, partial_transpose

# PT eigenvalues above -ZERO_TOL count as non-negative
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class EntanglementResult:
    negativity: float
    log_negativity: float


def negativity(s: TwoQubitState, side: str = "A") -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    lam = eigenvalues(partial_transpose(s, side))
    neg = lam[lam < -ZERO_TOL]
    if neg.size == 0:
        return 0.0
    return float(-neg.sum())


def log_negativity(s: TwoQubitState, side: str = "A") -> float:
    """log2 of the trace norm of the partial transpose, in ebits."""
    n = negativity(s, side)
    return float(np.log2(2.0 * n + 1.0)) if n > 0 else 0.0


def entanglement(s: TwoQubitState) -> EntanglementResult:
    n = negativity(s)
    return EntanglementResult(n, float(np.log2(2.0 * n + 1.0)) if n > 0 else 0.0)
