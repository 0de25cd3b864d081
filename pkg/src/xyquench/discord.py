"""Mutual information, classical correlations and quantum discord.

Measurements are rank-one projective measurements on one qubit (B unless
``side="A"``), parametrised by Bloch angles.  The conditional entropy is
minimised over the sphere by :func:`xyquench.bases.minimize_over_bases`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import (
    PROB_FLOOR,
    MeasurementBasis,
    basis_vectors,
    branch_blocks,
    branch_entropies,
    minimize_over_bases,
    projectors,
    swap_parties,
)
from .qstate import SingleQubitState, TwoQubitState, entropy, reduced_state

NEG_TOL = 1e-9


@dataclass(frozen=True)
class ConditionalEnsemble:
    probs: tuple[float, float]
    states: tuple[SingleQubitState, SingleQubitState]


@dataclass(frozen=True)
class DiscordResult:
    mutual_info: float
    classical_corr: float
    discord: float
    optimal_basis: MeasurementBasis


def _measured_last(s: TwoQubitState, side: str) -> np.ndarray:
    if side == "B":
        return s.m
    if side == "A":
        return swap_parties(s.m)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def conditional_ensemble(s: TwoQubitState, b: MeasurementBasis, side: str = "B") -> ConditionalEnsemble:
    """Outcome probabilities and post-measurement states of the unmeasured qubit."""
    m = _measured_last(s, side)
    blocks = branch_blocks(m, b.vectors()[None])[0]
    probs, states = [], []
    for blk in blocks:
        p = float(np.trace(blk).real)
        if p < PROB_FLOOR:
            probs.append(max(p, 0.0))
            states.append(SingleQubitState(np.eye(2) / 2))
        else:
            probs.append(p)
            states.append(SingleQubitState(blk / p))
    return ConditionalEnsemble(tuple(probs), tuple(states))


def conditional_entropy(s: TwoQubitState, b: MeasurementBasis, side: str = "B") -> float:
    """Average entropy of the unmeasured qubit after measuring in basis ``b``."""
    m = _measured_last(s, side)
    cond, _ = branch_entropies(branch_blocks(m, b.vectors()[None]))
    return float(cond[0])


def conditional_entropy_grid(s: TwoQubitState, theta, phi, side: str = "B") -> np.ndarray:
    """Vectorised :func:`conditional_entropy` over arrays of angles."""
    m = _measured_last(s, side)
    cond, _ = branch_entropies(branch_blocks(m, basis_vectors(theta, phi)))
    return cond


def mutual_information(s: TwoQubitState) -> float:
    return entropy(reduced_state(s, "A")) + entropy(reduced_state(s, "B")) - entropy(s)


def classical_correlations(s: TwoQubitState, side: str = "B", **search) -> tuple[float, MeasurementBasis]:
    """J = S(unmeasured marginal) - min over bases of the conditional entropy."""
    m = _measured_last(s, side)

    def objective(theta, phi):
        return branch_entropies(branch_blocks(m, basis_vectors(theta, phi)))[0]

    best, basis = minimize_over_bases(objective, **search)
    keep = "A" if side == "B" else "B"
    return entropy(reduced_state(s, keep)) - best, basis


def discord(s: TwoQubitState, side: str = "B", **search) -> DiscordResult:
    mi = mutual_information(s)
    j, basis = classical_correlations(s, side, **search)
    q = mi - j
    if -NEG_TOL < q < 0:
        q = 0.0
    return DiscordResult(mutual_info=mi, classical_corr=j, discord=q, optimal_basis=basis)


__all__ = [
    "ConditionalEnsemble",
    "DiscordResult",
    "MeasurementBasis",
    "classical_correlations",
    "conditional_ensemble",
    "conditional_entropy",
    "conditional_entropy_grid",
    "discord",
    "mutual_information",
    "projectors",
]
