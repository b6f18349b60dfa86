"""Local Kraus channels and ensemble monotonicity trials.

A channel acts on one subsystem with a complete Kraus set; applying it
to a pure state yields a weighted ensemble of pure branches.  Averaged
mirror entanglement must not increase under such local operations, and
``monotonicity_trial`` measures the slack of that inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .monotones import mirror_entanglement
from .spectra import LUSpectrum
from .states import PureBipartiteState, haar_unitary

COMPLETENESS_TOL = 1e-10
# Branches below this weight are dropped: renormalizing a near-null
# vector just amplifies noise.
BRANCH_DROP = 1e-14


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Complete set of local Kraus operators acting on side 'A' or 'B'."""

    side: str
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise ValueError(f"side must be 'A' or 'B', got {self.side!r}")
        ops = tuple(np.asarray(a, dtype=complex) for a in self.operators)
        if len(ops) < 1:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        for a in ops:
            if a.shape != (dim, dim):
                raise ValueError("Kraus operators must be square matrices of equal size")
        total = sum(a.conj().T @ a for a in ops)
        err = np.linalg.norm(total - np.eye(dim))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness violated by {err!r}")
        for a in ops:
            a.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.operators)


def random_channel(dX: int, m: int, side: str, seed: int) -> KrausChannel:
    """Random channel from a Haar unitary on a dX*m dimensional dilation.

    Slicing the first dX columns of the dilation unitary into m blocks
    gives a Kraus set whose completeness holds by construction.
    """
    if dX < 1 or m < 1:
        raise ValueError(f"need dX >= 1 and m >= 1, got ({dX}, {m})")
    u = haar_unitary(dX * m, seed)
    ops = tuple(u[k * dX:(k + 1) * dX, :dX] for k in range(m))
    return KrausChannel(side, ops)


def apply_channel(state: PureBipartiteState, ch: KrausChannel) -> list[tuple[float, PureBipartiteState]]:
    """Weighted pure-state ensemble produced by a local channel.

    Branch weights are the squared norms of (A_k x I)|psi> (or
    (I x B_k)|psi> for side 'B'); zero-weight branches are dropped and
    the rest renormalized.
    """
    acted = state.dA if ch.side == "A" else state.dB
    if ch.dim != acted:
        raise ValueError(f"channel dimension {ch.dim} does not match side {ch.side} dimension {acted}")
    M = state.amplitudes
    branches = []
    total = 0.0
    for a in ch.operators:
        N = a @ M if ch.side == "A" else M @ a.T
        w = float(np.linalg.norm(N) ** 2)
        total += w
        if w < BRANCH_DROP:
            continue
        branches.append((w, PureBipartiteState(state.dA, state.dB, N / np.sqrt(w))))
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"branch weights sum to {total!r}, expected 1")
    return branches


class MonotonicityTrial(NamedTuple):
    before: float
    after: float
    slack: float


def monotonicity_trial(state: PureBipartiteState, ch: KrausChannel, spec: LUSpectrum) -> MonotonicityTrial:
    """Slack of E(psi) >= sum_k w_k E(psi_k) for one channel application."""
    before = mirror_entanglement(state, spec)
    after = sum(w * mirror_entanglement(s, spec) for w, s in apply_channel(state, ch))
    return MonotonicityTrial(before, after, before - after)
