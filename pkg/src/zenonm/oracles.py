"""Brute-force cross-checks of the closed-form models.

* the 4x4 reduced matrices against partial traces of the 16-dim pure state;
* the donor/acceptor populations against RK4 integration of the
  non-Hermitian single-excitation Hamiltonian

      H = [[0, V], [V, -i lambda_c / 2]]     (basis |1_d 0_a>, |0_d 1_a>)

  whose norm loss is the population handed to the sink.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .bipartite import (
    BellState,
    PartitionKind,
    SurvivalAmplitudes,
    oracle_reduced_density,
    reduced_density,
)
from .rcsink import RCParams, rc_amplitudes, tripartite_density


@dataclass
class OracleResult:
    name: str
    passed: bool
    detail: str


def rk4_populations_batch(t_values: Sequence[float], params: Sequence[RCParams], step: float = 1e-4):
    """Populations (donor, acceptor, sink), shape (len(params), len(t_values), 3).

    Fixed-step RK4 with step at most ``step``; all parameter sets advance together.
    """
    t_values = np.asarray(t_values, dtype=float)
    if np.any(np.diff(t_values) < 0) or np.any(t_values < 0):
        raise ValueError("t_values must be sorted and non-negative")
    gen = np.array(
        [-1j * np.array([[0.0, q.coupling], [q.coupling, -0.5j * q.lambda_c]]) for q in params]
    )

    def rhs(c):
        return np.einsum("kij,kj->ki", gen, c)

    c = np.zeros((len(params), 2), dtype=complex)
    c[:, 0] = 1.0
    now = 0.0
    out = np.empty((len(params), t_values.size, 3))
    for i, target in enumerate(t_values):
        n = int(np.ceil((target - now) / step - 1e-9))
        dt = (target - now) / n if n > 0 else 0.0
        for _ in range(n):
            k1 = rhs(c)
            k2 = rhs(c + 0.5 * dt * k1)
            k3 = rhs(c + 0.5 * dt * k2)
            k4 = rhs(c + dt * k3)
            c = c + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        now = target
        d, a = np.abs(c[:, 0]) ** 2, np.abs(c[:, 1]) ** 2
        out[:, i, 0] = d
        out[:, i, 1] = a
        out[:, i, 2] = 1.0 - d - a
    return out


def rk4_populations(t_values: Sequence[float], p: RCParams, step: float = 1e-4):
    return rk4_populations_batch(t_values, [p], step)[0]


def random_inputs(rng: np.random.Generator):
    """Random (Bell state, s1, s2) with b bounded away from 0."""
    theta = rng.uniform(0.05, 0.5 * np.pi)
    bell = BellState(float(np.cos(theta)), float(np.sin(theta)))
    s1 = SurvivalAmplitudes.from_u(float(rng.uniform(0.0, 1.0)))
    s2 = SurvivalAmplitudes.from_u(float(rng.uniform(0.0, 1.0)))
    return bell, s1, s2


def check_reduced_matrices(n_samples: int, rng: np.random.Generator, tol: float = 1e-12) -> List[OracleResult]:
    worst = {k: 0.0 for k in PartitionKind}
    strict_violations = 0
    strict_checked = 0
    for _ in range(n_samples):
        bell, s1, s2 = random_inputs(rng)
        for kind in PartitionKind:
            closed = reduced_density(kind, bell, s1, s2).matrix
            brute = oracle_reduced_density(kind, bell, s1, s2).matrix
            worst[kind] = max(worst[kind], float(np.max(np.abs(closed - brute))))
        strict = reduced_density(PartitionKind.QUBIT_RESERVOIR, bell, s1, s2, as_printed=True)
        excess = abs(bell.b**2 * (s1.u**2 - s2.u**2))
        if excess > 1e-10:
            strict_checked += 1
            if abs(strict.trace - 1.0) <= 1e-10:
                strict_violations += 1
    results = [
        OracleResult(
            f"reduced-{kind.value}-vs-partial-trace",
            worst[kind] <= tol,
            f"max |closed - oracle| = {worst[kind]:.3e} over {n_samples} samples",
        )
        for kind in PartitionKind
    ]
    results.append(
        OracleResult(
            "strict-qr-fails-trace",
            strict_violations == 0 and strict_checked > 0,
            f"{strict_checked} samples with u1 != u2, {strict_violations} unexpectedly unit-trace",
        )
    )
    return results


def check_rc_amplitudes(
    lambdas: Sequence[float] = (0.0, 0.5, 1.0, 2.0),
    t_max: float = 10.0,
    n_times: int = 41,
    tol: float = 1e-6,
) -> List[OracleResult]:
    times = np.linspace(0.0, t_max, n_times)
    params = [RCParams(coupling=1.0, lambda_c=lam) for lam in lambdas]
    refs = rk4_populations_batch(times, params)
    out = []
    for p, ref in zip(params, refs):
        closed = np.array([[a.xi2, a.eta2, a.chi2] for a in (rc_amplitudes(t, p) for t in times)])
        err = float(np.max(np.abs(closed - ref)))
        out.append(
            OracleResult(f"rc-amplitudes-vs-rk4-lambda={p.lambda_c:g}", err <= tol, f"max error {err:.3e}")
        )
    return out


def check_tripartite(lambdas=(0.0, 0.5, 2.0), times=np.linspace(0.0, 10.0, 21)) -> List[OracleResult]:
    bad = []
    for lam in lambdas:
        p = RCParams(lambda_c=lam)
        for t in times:
            try:
                tripartite_density(float(t), p).validate()
            except Exception as exc:
                bad.append(f"lambda={lam:g} t={t:g}: {exc}")
    return [OracleResult("tripartite-density-valid", not bad, "; ".join(bad) or "all valid")]


def run_oracle_suite(seed: int = 0, n_samples: int = 500) -> List[OracleResult]:
    rng = np.random.default_rng(seed)
    return check_reduced_matrices(n_samples, rng) + check_rc_amplitudes() + check_tripartite()
