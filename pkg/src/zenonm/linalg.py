"""Small dense complex-Hermitian matrix algebra.

Every density matrix in the package is a plain ``numpy`` complex array wrapped
in :class:`DensityMatrix`.  Composite bases are big-endian: subsystem 0 owns
the most significant digit of the basis index, so ``|q1 q2> = |1 0>`` is
index 2 of a two-qubit space.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadFactorization,
    DimensionMismatch,
    InvalidState,
    NoConvergence,
    NonHermitianInput,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_FLOOR = -1e-10
NORM_TOL = 1e-12

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-14


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def _jacobi(a: np.ndarray, want_vectors: bool, max_sweeps: int, rel_tol: float):
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if want_vectors else None
    fro = float(np.linalg.norm(a))
    if fro == 0.0 or n == 1:
        return a.diagonal().real.copy(), v
    thresh = rel_tol * fro
    # rotations below this size cannot keep the off-diagonal norm above thresh
    skip = thresh / n

    for _ in range(max_sweeps):
        if np.linalg.norm(a - np.diag(a.diagonal())) <= thresh:
            return a.diagonal().real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                ph = apq / mag
                sph = s * ph
                sphc = s * ph.conjugate()

                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - sphc * aq
                a[:, q] = sph * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - sph * rq
                a[q, :] = sphc * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - sphc * vq
                    v[:, q] = sph * vp + c * vq
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eigenvalues_hermitian(
    m: np.ndarray,
    vectors: bool = False,
    *,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    rel_tol: float = JACOBI_REL_TOL,
):
    """Eigenvalues (ascending) of a Hermitian matrix by cyclic Jacobi rotations.

    With ``vectors=True`` returns ``(w, V)`` where the columns of ``V`` are the
    orthonormal eigenvectors, ``M = V diag(w) V^H``.

    Raises NonHermitianInput if ``m`` is not Hermitian to 1e-12 and
    NoConvergence if the sweep budget is exhausted.
    """
    m = np.asarray(m)
    if not is_hermitian(m):
        raise NonHermitianInput("matrix is not Hermitian within 1e-12")
    a = 0.5 * (m + m.conj().T).astype(complex)
    w, v = _jacobi(a, vectors, max_sweeps, rel_tol)
    order = np.argsort(w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


@dataclass(eq=False)
class PureState:
    """Normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm^2 = {norm2!r}, expected 1")
        amps.setflags(write=False)
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self, label: str = "") -> "DensityMatrix":
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), label)


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian, unit-trace matrix with a free-text partition label.

    Hermiticity and the trace are checked on construction.  Positivity needs a
    diagonalization, so it is checked by :meth:`validate` only.
    """

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidState(f"density matrix must be square, got shape {mat.shape}")
        if not is_hermitian(mat):
            raise InvalidState("density matrix is not Hermitian within 1e-12")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {tr!r} differs from 1 by more than {TRACE_TOL}")
        mat.setflags(write=False)
        self.matrix = mat

    @classmethod
    def unchecked(cls, matrix: np.ndarray, label: str = "") -> "DensityMatrix":
        """Wrap ``matrix`` without any invariant checks (for diagnostics only)."""
        obj = cls.__new__(cls)
        mat = np.array(matrix, dtype=complex)
        mat.setflags(write=False)
        obj.matrix = mat
        obj.label = label
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return eigenvalues_hermitian(self.matrix)

    def is_psd(self, floor: float = PSD_FLOOR) -> bool:
        return bool(self.eigenvalues().min() >= floor)

    def validate(self) -> "DensityMatrix":
        """Check all invariants (Hermitian, unit trace, PSD); return self."""
        if not is_hermitian(self.matrix):
            raise InvalidState("density matrix is not Hermitian within 1e-12")
        tr = self.trace
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {tr!r} differs from 1 by more than {TRACE_TOL}")
        lo = self.eigenvalues().min()
        if lo < PSD_FLOOR:
            raise InvalidState(f"smallest eigenvalue {lo!r} below {PSD_FLOOR}")
        return self


MatrixLike = Union[DensityMatrix, np.ndarray]


def _as_array(r: MatrixLike) -> np.ndarray:
    return r.matrix if isinstance(r, DensityMatrix) else np.asarray(r)


def trace_distance(r1: MatrixLike, r2: MatrixLike) -> float:
    """``0.5 * sum |eig(r1 - r2)|``."""
    a, b = _as_array(r1), _as_array(r2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    diff = a - b
    # rows that vanish identically only contribute zero eigenvalues
    support = np.flatnonzero(np.any(diff != 0, axis=1))
    if support.size == 0:
        return 0.0
    block = diff[np.ix_(support, support)]
    return 0.5 * float(np.sum(np.abs(eigenvalues_hermitian(block))))


def tensor_product(a, b):
    """Kronecker product of two states or two matrices (first factor most significant)."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix), a.label + b.label)
    if isinstance(a, (PureState, DensityMatrix)) or isinstance(b, (PureState, DensityMatrix)):
        raise TypeError("tensor_product needs two operands of the same kind")
    return np.kron(np.asarray(a), np.asarray(b))


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def partial_trace(
    rho: MatrixLike,
    subsystem_dims: Sequence[int],
    keep: Sequence[int],
    label: str | None = None,
) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept factors appear in ascending subsystem order in the result.
    """
    mat = _as_array(rho)
    dims = [int(d) for d in subsystem_dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != mat.shape[0]:
        raise BadFactorization(f"subsystem dims {dims} do not factor dimension {mat.shape[0]}")
    kept = sorted(set(int(k) for k in keep))
    if not kept or kept[0] < 0 or kept[-1] >= len(dims):
        raise ValueError(f"keep={list(keep)} must be a nonempty subset of 0..{len(dims) - 1}")
    if 2 * len(dims) > len(_LETTERS):
        raise ValueError("too many subsystems")

    n = len(dims)
    rows = _LETTERS[:n]
    cols = "".join(_LETTERS[n + i] if i in kept else rows[i] for i in range(n))
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    reduced = np.einsum(f"{rows}{cols}->{out}", mat.reshape(dims + dims))
    dk = int(np.prod([dims[i] for i in kept]))
    if label is None:
        label = getattr(rho, "label", "")
    return DensityMatrix(reduced.reshape(dk, dk), label)
