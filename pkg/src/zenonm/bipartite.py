"""Two measured qubits, each with its own reservoir, prepared in a|00> + b|11>.

Each qubit-reservoir pair evolves as ``|1,0> -> u |1,0> + v |0,1>`` where the
survival amplitude after ``N`` measurements spaced ``tau`` apart is
``u = exp(-gamma(tau) N tau / 2)`` and ``v = sqrt(1 - u^2)``.  Tracing the
16-dimensional state down to two of the four factors gives X-shaped 4x4
matrices in the basis |00>, |01>, |10>, |11>; this module writes them in
closed form and keeps the full-state construction as an oracle.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidGrid
from .linalg import DensityMatrix, PureState, partial_trace, trace_distance
from .spectral import QuadratureOptions, SpectralParams, effective_decay_rate
from .sweep import Axis, GridSpec, HeatmapGrid, SignMap, run_sweep, to_sign_map

SIGN_ZERO_BAND = 1e-12


@dataclass(frozen=True)
class BellState:
    a: float
    b: float

    def __post_init__(self):
        if abs(self.a * self.a + self.b * self.b - 1.0) > 1e-12:
            raise ValueError(f"a^2 + b^2 must be 1, got {self.a**2 + self.b**2!r}")

    @classmethod
    def symmetric(cls) -> "BellState":
        return cls(1 / math.sqrt(2), 1 / math.sqrt(2))


@dataclass(frozen=True)
class MeasurementModel:
    """Measurement schedule and bath of each qubit.

    ``spectral2`` sets a different bath for the second qubit; by default both
    qubits see ``spectral``.
    """

    spectral: SpectralParams
    n_measurements: int = 20
    spectral2: Optional[SpectralParams] = None

    def __post_init__(self):
        if self.n_measurements < 1:
            raise ValueError("n_measurements must be >= 1")

    def params_for(self, qubit: int) -> SpectralParams:
        if qubit == 1 and self.spectral2 is not None:
            return self.spectral2
        return self.spectral


@dataclass(frozen=True)
class SurvivalAmplitudes:
    u: float
    v: float

    def __post_init__(self):
        if not (0.0 <= self.u <= 1.0 and 0.0 <= self.v <= 1.0):
            raise ValueError(f"amplitudes must lie in [0, 1], got ({self.u}, {self.v})")
        if abs(self.u * self.u + self.v * self.v - 1.0) > 1e-12:
            raise ValueError("u^2 + v^2 must equal 1")

    @classmethod
    def from_u(cls, u: float) -> "SurvivalAmplitudes":
        return cls(u, math.sqrt(max(0.0, 1.0 - u * u)))


class PartitionKind(str, enum.Enum):
    QUBIT_QUBIT = "qq"
    RESERVOIR_RESERVOIR = "rr"
    QUBIT_RESERVOIR = "qr"

    @property
    def label(self) -> str:
        return {"qq": "q1q2", "rr": "r1r2", "qr": "q1r2"}[self.value]

    @property
    def factors(self) -> tuple:
        """Indices kept from the (q1, q2, r1, r2) ordering."""
        return {"qq": (0, 1), "rr": (2, 3), "qr": (0, 3)}[self.value]


def survival_amplitudes(
    tau: float,
    m: MeasurementModel,
    q: QuadratureOptions = QuadratureOptions(),
    qubit: int = 0,
) -> SurvivalAmplitudes:
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if tau == 0:
        return SurvivalAmplitudes(1.0, 0.0)
    decay = effective_decay_rate(tau, m.params_for(qubit), q) * m.n_measurements * tau
    return SurvivalAmplitudes(math.exp(-0.5 * decay), math.sqrt(-math.expm1(-decay)))


def x_state_entries(
    partition: PartitionKind,
    bell: BellState,
    s1: SurvivalAmplitudes,
    s2: SurvivalAmplitudes,
    as_printed: bool = False,
):
    """(f1, f2, f3, f4, f5): diagonal |00>,|01>,|10>,|11> and the |00><11| coherence.

    ``as_printed`` reproduces the printed qubit-reservoir population
    ``f1 = a^2 + b^2 u1^2 v2^2``, which is not unit-trace unless u1 = u2.
    """
    a, b = bell.a, bell.b
    u1, v1, u2, v2 = s1.u, s1.v, s2.u, s2.v
    partition = PartitionKind(partition)
    if partition is PartitionKind.RESERVOIR_RESERVOIR:
        u1, v1, u2, v2 = v1, u1, v2, u2
    b2 = b * b
    if partition is PartitionKind.QUBIT_RESERVOIR:
        f1 = a * a + b2 * ((u1 * v2) ** 2 if as_printed else (v1 * u2) ** 2)
        return f1, b2 * (v1 * v2) ** 2, b2 * (u1 * u2) ** 2, b2 * (u1 * v2) ** 2, a * b * u1 * v2
    return (
        a * a + b2 * (v1 * v2) ** 2,
        b2 * (v1 * u2) ** 2,
        b2 * (u1 * v2) ** 2,
        b2 * (u1 * u2) ** 2,
        a * b * u1 * u2,
    )


def reduced_density(
    partition: PartitionKind,
    bell: BellState,
    s1: SurvivalAmplitudes,
    s2: SurvivalAmplitudes,
    as_printed: bool = False,
) -> DensityMatrix:
    partition = PartitionKind(partition)
    f1, f2, f3, f4, f5 = x_state_entries(partition, bell, s1, s2, as_printed)
    m = np.array(
        [
            [f1, 0.0, 0.0, f5],
            [0.0, f2, 0.0, 0.0],
            [0.0, 0.0, f3, 0.0],
            [f5, 0.0, 0.0, f4],
        ]
    )
    if as_printed:
        return DensityMatrix.unchecked(m, partition.label)
    return DensityMatrix(m, partition.label)


def _ket(*bits: int) -> np.ndarray:
    vec = np.zeros(1 << len(bits))
    vec[int("".join(map(str, bits)), 2)] = 1.0
    return vec


def full_state_oracle(bell: BellState, s1: SurvivalAmplitudes, s2: SurvivalAmplitudes) -> PureState:
    """The 16-dim pure state over (q1, q2, r1, r2) before any partial trace."""
    u1, v1, u2, v2 = s1.u, s1.v, s2.u, s2.v
    psi = bell.a * _ket(0, 0, 0, 0)
    # qubit i excited with its reservoir empty (u_i), or decayed into it (v_i)
    for q1, r1, c1 in ((1, 0, u1), (0, 1, v1)):
        for q2, r2, c2 in ((1, 0, u2), (0, 1, v2)):
            psi = psi + bell.b * c1 * c2 * _ket(q1, q2, r1, r2)
    return PureState(psi)


def oracle_reduced_density(
    partition: PartitionKind, bell: BellState, s1: SurvivalAmplitudes, s2: SurvivalAmplitudes
) -> DensityMatrix:
    partition = PartitionKind(partition)
    rho = full_state_oracle(bell, s1, s2).density()
    return partial_trace(rho, [2, 2, 2, 2], partition.factors, label=partition.label)


def state_at(
    tau: float,
    partition: PartitionKind,
    bell: BellState,
    m: MeasurementModel,
    q: QuadratureOptions = QuadratureOptions(),
) -> DensityMatrix:
    """Reduced matrix when both qubits are measured at interval ``tau``."""
    return reduced_density(
        partition,
        bell,
        survival_amplitudes(tau, m, q, 0),
        survival_amplitudes(tau, m, q, 1),
    )


def delta_measure(
    tau1: float,
    tau2: float,
    partition: PartitionKind,
    bell: BellState,
    m: MeasurementModel,
    q: QuadratureOptions = QuadratureOptions(),
) -> float:
    """D[rho(tau2), rho(tau1 + tau2)] - D[rho(0), rho(tau1)]; positive means backflow."""
    if tau1 < 0 or tau2 < 0:
        raise ValueError("tau1 and tau2 must be >= 0")
    rho = lambda x: state_at(x, partition, bell, m, q)  # noqa: E731
    return trace_distance(rho(tau2), rho(tau1 + tau2)) - trace_distance(rho(0.0), rho(tau1))


def delta_kernel(tau1: float, tau2: float, fixed: dict) -> float:
    return delta_measure(
        tau1, tau2, fixed["partition"], fixed["bell"], fixed["measurement"], fixed["quadrature"]
    )


def _check_grid(name: str, values: Sequence[float]) -> None:
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(v <= 0) or np.any(np.diff(v) <= 0):
        raise InvalidGrid(f"{name} grid must be positive and strictly increasing")


def delta_map(
    tau1_grid: Sequence[float],
    tau2_grid: Sequence[float],
    partition: PartitionKind,
    bell: BellState,
    m: MeasurementModel,
    q: QuadratureOptions = QuadratureOptions(),
    workers: int = 1,
    progress: bool = False,
) -> HeatmapGrid:
    """Delta(tau1, tau2) on a grid; x = tau1, y = tau2."""
    _check_grid("tau1", tau1_grid)
    _check_grid("tau2", tau2_grid)
    spec = GridSpec(
        Axis.from_values("tau1", tau1_grid),
        Axis.from_values("tau2", tau2_grid),
        {"partition": PartitionKind(partition), "bell": bell, "measurement": m, "quadrature": q},
    )
    return run_sweep(spec, delta_kernel, workers, progress=progress)


def nonmarkov_sign_map(
    tau1_grid: Sequence[float],
    tau2_grid: Sequence[float],
    partition: PartitionKind,
    bell: BellState,
    m: MeasurementModel,
    q: QuadratureOptions = QuadratureOptions(),
    workers: int = 1,
    progress: bool = False,
) -> SignMap:
    """Sign[Delta]; ``positive_count`` is the size of the non-Markovian region."""
    h = delta_map(tau1_grid, tau2_grid, partition, bell, m, q, workers, progress)
    return to_sign_map(h, SIGN_ZERO_BAND)
