"""Time-series recording shared by both propagators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainMismatchError
from .potentials import PotentialField
from .state import DensityPhase, Lattice, WaveFunction, inner


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Per-record norm/energy plus optional overlap and arrival probability."""

    times: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    overlap: np.ndarray | None = None
    arrival_prob: np.ndarray | None = None

    def __post_init__(self):
        n = self.times.size
        for name in ("norm", "energy", "overlap", "arrival_prob"):
            v = getattr(self, name)
            if v is not None and v.size != n:
                raise ValueError(f"{name} length {v.size} != times length {n}")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for name in ("overlap", "arrival_prob"):
            v = getattr(self, name)
            if v is not None and (v.min() < -1e-10 or v.max() > 1 + 1e-10):
                raise ValueError(f"{name} outside the unit interval")


@dataclass(frozen=True, eq=False)
class Snapshot:
    """State decomposition captured at one time, plus the reconstructed
    effective potential when available (continuous runs only)."""

    time: float
    density_phase: DensityPhase
    w: PotentialField | None = None


@dataclass(eq=False)
class RunResult:
    """Carrier for a full trajectory: final state, series, snapshots.

    Discrete runs also fill ``density_times``/``density_map`` (one density row
    per recorded time: the space-time density map).
    """

    final_state: WaveFunction
    series: ObservableSeries
    snapshots: list[Snapshot] = field(default_factory=list)
    density_times: np.ndarray | None = None
    density_map: np.ndarray | None = None


def vacuum_overlap(psi: WaveFunction, reference: WaveFunction) -> float:
    """|<reference|psi>|^2 for two normalized states on the same domain."""
    return abs(inner(reference, psi)) ** 2


def arrival_probability(psi: WaveFunction, delta: int) -> float:
    """Total density on the delta rightmost sites of a chain."""
    if not isinstance(psi.domain, Lattice):
        raise DomainMismatchError("arrival probability is defined on lattices")
    if not 0 < delta <= psi.domain.s:
        raise ValueError(f"delta must be in 1..{psi.domain.s}, got {delta}")
    return float(np.sum(psi.density()[psi.domain.s - delta :]))
