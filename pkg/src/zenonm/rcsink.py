"""Donor-acceptor pair draining into a dissipative sink.

An exciton starts on the donor; the donor couples to the acceptor with
strength V and the acceptor decays into its phonon reservoir at rate
``lambda_c``.  At resonance the populations are

    |xi|^2  = exp(-lambda_c t / 2) [cos(W t) + lambda_c / (4 W) sin(W t)]^2
    |eta|^2 = exp(-lambda_c t / 2) V^2 / W^2 sin^2(W t)
    |chi|^2 = 1 - |xi|^2 - |eta|^2 = lambda_c int_0^t |eta(s)|^2 ds

with 2W = sqrt(4 V^2 - (lambda_c / 2)^2).  W turns imaginary for
lambda_c > 4V; the same expressions are evaluated with complex W and stay real.
The sink population is taken from the integral form: the subtraction loses all
relative accuracy at small t, where |chi|^2 ~ lambda_c V^2 t^3 / 3.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bipartite import BellState
from .errors import DegenerateDenominator, InvalidGrid, NonPhysical
from .linalg import DensityMatrix, trace_distance
from .sweep import Axis, GridSpec, HeatmapGrid, run_sweep

SIGN_ZERO_BAND = 1e-12
_POP_FLOOR = -1e-10
_IMAG_TOL = 1e-12
_SUM_TOL = 1e-10
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class RCParams:
    coupling: float = 1.0
    lambda_c: float = 0.0
    bell: BellState = field(default_factory=BellState.symmetric)

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError(f"coupling V must be > 0, got {self.coupling}")
        if not self.lambda_c >= 0:
            raise ValueError(f"lambda_c must be >= 0, got {self.lambda_c}")


@dataclass(frozen=True)
class RCAmplitudes:
    xi2: float
    eta2: float
    chi2: float


def rabi_frequency(p: RCParams) -> complex:
    """W with 2W = sqrt(4 V^2 - (lambda_c / 2)^2); purely imaginary when overdamped."""
    return 0.5 * cmath.sqrt(4.0 * p.coupling**2 - (p.lambda_c / 2.0) ** 2)


def _sin_over(omega: complex, t: float) -> complex:
    """sin(omega t) / omega, continuous through omega = 0."""
    x = omega * t
    if abs(x) < 1e-4:
        return t * (1.0 - x * x / 6.0 + x**4 / 120.0)
    return cmath.sin(x) / omega


def _acceptor_population(s: np.ndarray, omega: complex, p: RCParams) -> np.ndarray:
    x = omega * s
    if abs(omega) < 1e-8:
        ratio = s * (1.0 - x * x / 6.0)
    else:
        ratio = np.sin(x) / omega
    return (np.exp(-p.lambda_c * s / 2.0) * p.coupling**2 * ratio * ratio).real


def sink_population(t: float, p: RCParams) -> float:
    """lambda_c * int_0^t |eta|^2 ds by panelled 24-point Gauss-Legendre."""
    if p.lambda_c == 0.0 or t == 0.0:
        return 0.0
    omega = rabi_frequency(p)
    rate = max(1.0, abs(omega), p.lambda_c / 2.0)
    edges = np.linspace(0.0, t, int(math.ceil(t * rate)) + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    s = mid[:, None] + half[:, None] * _GL_NODES
    vals = _acceptor_population(s, omega, p)
    return p.lambda_c * float(np.sum((vals @ _GL_WEIGHTS) * half))


def rc_amplitudes(t: float, p: RCParams) -> RCAmplitudes:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    lam = p.lambda_c
    omega = rabi_frequency(p)
    damp = math.exp(-lam * t / 2.0)
    s = _sin_over(omega, t)
    donor = cmath.cos(omega * t) + lam / 4.0 * s
    xi2 = damp * donor * donor
    eta2 = damp * p.coupling**2 * s * s
    for name, val in (("xi2", xi2), ("eta2", eta2)):
        if abs(val.imag) > _IMAG_TOL:
            raise NonPhysical(f"{name} has imaginary residue {val.imag:.3e}")
    xi2, eta2 = xi2.real, eta2.real
    chi2 = sink_population(t, p)
    if min(xi2, eta2) < _POP_FLOOR:
        raise NonPhysical(f"negative population at t={t}, lambda_c={lam}")
    if abs(xi2 + eta2 + chi2 - 1.0) > _SUM_TOL:
        raise NonPhysical(f"populations sum to {xi2 + eta2 + chi2!r} at t={t}, lambda_c={lam}")
    return RCAmplitudes(max(xi2, 0.0), max(eta2, 0.0), chi2)


def tripartite_density(t: float, p: RCParams) -> DensityMatrix:
    """8x8 donor(1)-sink(1)-sink(2) matrix in the basis |d1 r1 r2> = |000> ... |111>."""
    amp = rc_amplitudes(t, p)
    a, b = p.bell.a, p.bell.b
    xi2, eta2, chi2 = amp.xi2, amp.eta2, amp.chi2
    xc = math.sqrt(xi2 * chi2)
    m = np.zeros((8, 8))
    m[0, 0] = (eta2 + xi2) * b * b + a * a * eta2
    m[1, 1] = b * b * chi2
    m[1, 2] = m[2, 1] = a * b * chi2
    m[1, 4] = m[4, 1] = a * b * xc
    m[2, 2] = a * a * chi2
    m[2, 4] = m[4, 2] = a * a * xc
    m[4, 4] = a * a * xi2
    return DensityMatrix(m, "d1r1r2")


def rc_distance_measure(t: float, tau: float, p: RCParams) -> float:
    """(D[rho(t), rho(t+tau)] - D[rho(0), rho(tau)]) / D[rho(0), rho(tau)]."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    ref = trace_distance(tripartite_density(0.0, p), tripartite_density(tau, p))
    if ref < 1e-12:
        raise DegenerateDenominator(f"D[rho(0), rho(tau)] = {ref:.3e} for tau={tau}")
    now = trace_distance(tripartite_density(t, p), tripartite_density(t + tau, p))
    return (now - ref) / ref


def rc_kernel(t: float, lambda_c: float, fixed: dict) -> float:
    return rc_distance_measure(t, fixed["tau"], replace(fixed["rc"], lambda_c=lambda_c))


def rc_map(
    t_grid: Sequence[float],
    lambda_grid: Sequence[float],
    tau: float,
    p: RCParams = RCParams(),
    workers: int = 1,
    progress: bool = False,
) -> HeatmapGrid:
    """D(t, tau) over (t, lambda_c); x = t, y = lambda_c.

    ``metadata["positive_counts"]`` holds, for each lambda_c, the number of t
    cells with D > 1e-12.
    """
    for name, g in (("t", t_grid), ("lambda_c", lambda_grid)):
        v = np.asarray(g, dtype=float)
        if v.size == 0 or np.any(v < 0) or np.any(np.diff(v) <= 0):
            raise InvalidGrid(f"{name} grid must be non-negative and strictly increasing")
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    spec = GridSpec(
        Axis.from_values("t", t_grid),
        Axis.from_values("lambda_c", lambda_grid),
        {"tau": float(tau), "rc": p},
    )
    h = run_sweep(spec, rc_kernel, workers, progress=progress)
    with np.errstate(invalid="ignore"):
        h.metadata["positive_counts"] = [int(c) for c in np.count_nonzero(h.cells > SIGN_ZERO_BAND, axis=1)]
    return h
