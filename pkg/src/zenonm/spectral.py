"""Decay of a measured qubit into a low-frequency bosonic bath.

The effective decay rate under measurements spaced ``tau`` apart is the overlap
of the bath spectral density with the measurement-induced line shape,

    gamma(tau) = int_0^inf J(w) F_tau(w - dW) dw,
    J(w)       = 2 L w / (w^2 + alpha^2),
    F_tau(x)   = tau / (2 pi) * sinc^2(x tau / 2),

and the unmeasured rate is ``gamma_0 = J(dW)``.  Zeno behaviour means
``gamma(tau) < gamma_0``; anti-Zeno means ``gamma(tau) > gamma_0``.  Units:
hbar = 1, qubit splitting dW = 1 by default.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import quadrature
from .errors import InvalidGrid
from .sweep import Axis, GridSpec, HeatmapGrid, SignMap, run_sweep, to_sign_map

BOUNDARY_BAND = 1e-9

# beyond the dense region panels grow geometrically in lobe count
_NODE_GROWTH = 1.5


@dataclass(frozen=True)
class SpectralParams:
    """Bath and qubit constants.

    ``tunneling`` is carried for completeness of the unit system (Delta = 2);
    it does not enter the decay rate in the rotating-wave approximation.
    """

    alpha: float
    coupling: float = 0.01
    delta_omega: float = 1.0
    tunneling: float = 2.0

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError(f"coupling must be > 0, got {self.coupling}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.delta_omega > 0:
            raise ValueError(f"delta_omega must be > 0, got {self.delta_omega}")


@dataclass(frozen=True)
class QuadratureOptions:
    """Tolerances for the decay-rate integral.

    ``abs_tol`` is measured per unit coupling (the integral is carried out for
    J / coupling and rescaled), which makes gamma / gamma_0 exactly independent
    of the coupling.  ``tail_tol`` bounds the truncated tail relative to gamma_0.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    tail_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "tail_tol", "max_subdivisions"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


class ZenoKind(str, enum.Enum):
    ZENO = "Zeno"
    ANTI_ZENO = "AntiZeno"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class ZenoClass:
    kind: ZenoKind
    ratio: float

    @property
    def sign(self) -> int:
        return {ZenoKind.ZENO: -1, ZenoKind.ANTI_ZENO: 1, ZenoKind.BOUNDARY: 0}[self.kind]


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (series below |x| = 1e-4)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)


def spectral_density(omega, p: SpectralParams):
    omega = np.asarray(omega, dtype=float)
    out = 2.0 * p.coupling * omega / (omega * omega + p.alpha * p.alpha)
    return float(out) if out.ndim == 0 else out


def modulating_function(omega, tau: float, p: SpectralParams):
    """Line shape of measurements every ``tau``, centred on the qubit splitting."""
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    s = sinc((np.asarray(omega, dtype=float) - p.delta_omega) * tau / 2.0)
    out = tau / (2.0 * math.pi) * s * s
    return float(out) if out.ndim == 0 else out


def natural_decay_rate(p: SpectralParams) -> float:
    return spectral_density(p.delta_omega, p)


def tail_bound(tau: float, omega_cut: float, p: SpectralParams) -> float:
    """Upper bound on int_{omega_cut}^inf J F dw (valid for omega_cut > dW)."""
    return 8.0 * p.coupling / (math.pi * tau * (omega_cut - p.delta_omega) ** 2)


def cutoff_frequency(tau: float, p: SpectralParams, q: QuadratureOptions) -> float:
    """Smallest omega_cut whose tail bound equals ``tail_tol * gamma_0``."""
    unit_g0 = natural_decay_rate(p) / p.coupling
    return p.delta_omega + math.sqrt(8.0 / (math.pi * tau * q.tail_tol * unit_g0))


def _breakpoints(tau: float, p: "SpectralParams", q: "QuadratureOptions", omega_cut: float) -> np.ndarray:
    """Panel edges: 0, alpha, omega_cut and the sinc nodes dW + 2 pi k / tau.

    One panel per sinc lobe out to the frequency where the remaining tail is
    below ``rel_tol * gamma_0``; further out the panels span geometrically
    more lobes, since the integrand there is below the requested accuracy.
    """
    dw = p.delta_omega
    lobe = 2.0 * math.pi / tau
    unit_g0 = natural_decay_rate(p) / p.coupling
    dense_reach = math.sqrt(2.0 / (math.pi * tau * q.rel_tol * unit_g0))
    k_lo = -int(math.floor(dw / lobe))
    k_hi = int((omega_cut - dw) / lobe)
    k_dense = min(k_hi, max(1, int(math.ceil(dense_reach / lobe))))
    ks = np.arange(k_lo, k_dense + 1, dtype=float)
    tail = []
    k = k_dense
    while k < k_hi:
        k = min(int(k * _NODE_GROWTH) + 1, k_hi)
        tail.append(k)
    nodes = dw + lobe * np.concatenate([ks, np.asarray(tail, dtype=float)])
    pts = np.concatenate([[0.0, p.alpha, omega_cut], nodes])
    return np.unique(pts[(pts >= 0.0) & (pts <= omega_cut)])


def _unit_integrand(tau: float, alpha: float, delta_omega: float, modulation):
    a2 = alpha * alpha
    scale = tau / (2.0 * math.pi)

    def f(w):
        s = sinc((w - delta_omega) * tau / 2.0)
        val = 2.0 * w / (w * w + a2) * scale * s * s
        if modulation is not None:
            val = val * modulation(w)
        return val

    return f


def _quadrature(tau, p, q, modulation) -> quadrature.QuadResult:
    cut = cutoff_frequency(tau, p, q)
    return quadrature.integrate(
        _unit_integrand(tau, p.alpha, p.delta_omega, modulation),
        _breakpoints(tau, p, q, cut),
        abs_tol=q.abs_tol,
        rel_tol=q.rel_tol,
        max_subdivisions=q.max_subdivisions,
    )


@lru_cache(maxsize=65536)
def _unit_rate(tau: float, alpha: float, delta_omega: float, q: QuadratureOptions) -> float:
    p = SpectralParams(alpha=alpha, coupling=1.0, delta_omega=delta_omega)
    return _quadrature(tau, p, q, None).value


def decay_rate_cache_clear() -> None:
    _unit_rate.cache_clear()


def effective_decay_rate(
    tau: float,
    p: SpectralParams,
    q: QuadratureOptions = QuadratureOptions(),
    modulation: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> float:
    """gamma(tau) by adaptive Gauss-Kronrod quadrature on [0, omega_cut].

    ``modulation`` is an optional multiplicative factor f(w) on the integrand
    (default: f = 1, the rotating-wave choice).  The certified tail bound
    assumes |f| <= 1.  Results without ``modulation`` are memoized.
    """
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if modulation is None:
        unit = _unit_rate(float(tau), float(p.alpha), float(p.delta_omega), q)
    else:
        unit = _quadrature(tau, replace(p, coupling=1.0), q, modulation).value
    return p.coupling * unit


def decay_ratio(tau: float, p: SpectralParams, q: QuadratureOptions = QuadratureOptions()) -> float:
    """gamma(tau) / gamma_0, computed coupling-free."""
    unit = replace(p, coupling=1.0)
    return effective_decay_rate(tau, unit, q) / natural_decay_rate(unit)


def classify_zeno(
    tau: float,
    p: SpectralParams,
    q: QuadratureOptions = QuadratureOptions(),
    band: float = BOUNDARY_BAND,
) -> ZenoClass:
    ratio = decay_ratio(tau, p, q)
    if ratio < 1.0 - band:
        kind = ZenoKind.ZENO
    elif ratio > 1.0 + band:
        kind = ZenoKind.ANTI_ZENO
    else:
        kind = ZenoKind.BOUNDARY
    return ZenoClass(kind, ratio)


def jump_time(
    p: SpectralParams,
    tau_lo: float,
    tau_hi: float,
    q: QuadratureOptions = QuadratureOptions(),
    xtol: float = 1e-8,
) -> float:
    """Interval at which gamma(tau) crosses gamma_0, by bisection on [tau_lo, tau_hi]."""
    f_lo = decay_ratio(tau_lo, p, q) - 1.0
    f_hi = decay_ratio(tau_hi, p, q) - 1.0
    if f_lo == 0.0:
        return tau_lo
    if f_hi == 0.0:
        return tau_hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"gamma - gamma_0 does not change sign on [{tau_lo}, {tau_hi}]")
    lo, hi = tau_lo, tau_hi
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = decay_ratio(mid, p, q) - 1.0
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zeno_ratio_kernel(tau: float, alpha: float, fixed: dict) -> float:
    """Sweep cell: gamma(tau)/gamma_0 - 1 at bath frequency ``alpha``."""
    p = replace(fixed["spectral"], alpha=alpha)
    return decay_ratio(tau, p, fixed["quadrature"]) - 1.0


def _check_grid(name: str, values: Sequence[float]) -> None:
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(v <= 0) or np.any(np.diff(v) <= 0):
        raise InvalidGrid(f"{name} grid must be positive and strictly increasing")


def zeno_ratio_map(
    tau_grid: Sequence[float],
    alpha_grid: Sequence[float],
    p: SpectralParams,
    q: QuadratureOptions = QuadratureOptions(),
    workers: int = 1,
    progress: bool = False,
) -> HeatmapGrid:
    """gamma/gamma_0 - 1 over (tau, alpha); x = tau, y = alpha."""
    _check_grid("tau", tau_grid)
    _check_grid("alpha", alpha_grid)
    spec = GridSpec(
        Axis.from_values("tau", tau_grid),
        Axis.from_values("alpha", alpha_grid),
        {"spectral": p, "quadrature": q},
    )
    return run_sweep(spec, zeno_ratio_kernel, workers, progress=progress)


def zeno_phase_map(
    tau_grid: Sequence[float],
    alpha_grid: Sequence[float],
    p: SpectralParams,
    q: QuadratureOptions = QuadratureOptions(),
    workers: int = 1,
    band: float = BOUNDARY_BAND,
    progress: bool = False,
) -> SignMap:
    """Sign of gamma/gamma_0 - 1: -1 Zeno, +1 anti-Zeno, 0 within ``band``."""
    return to_sign_map(zeno_ratio_map(tau_grid, alpha_grid, p, q, workers, progress), band)
