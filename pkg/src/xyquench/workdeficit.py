"""One-way quantum work-deficit.

With only one-way communication the best local protocol dephases B in some
basis and ships it to A, who then holds the dephased joint state.  The
locally extractable work is therefore 2 - min_b S(dephased), the global work
is 2 - S(rho), and the deficit is their difference:

    Delta = min_b S(sum_k (I x P_k) rho (I x P_k)) - S(rho).

The dephased state is block diagonal with blocks p_k rho_{A|k}, so its
entropy is H(p) + sum_k p_k S(rho_{A|k}); the search uses that form while
:func:`dephase` builds the matrix explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import (
    MeasurementBasis,
    basis_vectors,
    branch_blocks,
    branch_entropies,
    minimize_over_bases,
    projectors,
    swap_parties,
)
from .qstate import I2, TwoQubitState, entropy


@dataclass(frozen=True)
class DeficitResult:
    deficit: float
    optimal_basis: MeasurementBasis
    dephased_entropy: float


def dephase(s: TwoQubitState, b: MeasurementBasis, side: str = "B") -> TwoQubitState:
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    out = np.zeros((4, 4), dtype=complex)
    for p in projectors(b):
        op = np.kron(I2, p) if side == "B" else np.kron(p, I2)
        out += op @ s.m @ op
    return TwoQubitState(out)


def dephased_entropy_grid(s: TwoQubitState, theta, phi, side: str = "B") -> np.ndarray:
    m = s.m if side == "B" else swap_parties(s.m)
    return branch_entropies(branch_blocks(m, basis_vectors(theta, phi)))[1]


def one_way_deficit(s: TwoQubitState, side: str = "B", **search) -> DeficitResult:
    m = s.m if side == "B" else swap_parties(s.m)

    def objective(theta, phi):
        return branch_entropies(branch_blocks(m, basis_vectors(theta, phi)))[1]

    best, basis = minimize_over_bases(objective, **search)
    return DeficitResult(deficit=best - entropy(s), optimal_basis=basis, dephased_entropy=best)
