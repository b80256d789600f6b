"""Finite-rank state space: symmetric matrices under the Frobenius pairing.

The model state lives in the cone of d x d real positive semidefinite
matrices, the finite-rank slice of the positive self-adjoint Hilbert-Schmidt
operators. Everything downstream (jump measures, Riccati flows, simulation)
speaks this module's language: ``frob_inner`` is the inner product, ``outer``
builds rank-one directions, and the cone is re-entered through
``project_psd`` / certified through ``min_eig``.

Complex arithmetic is deliberately absent here; it appears only at the
transform layer as (real, imaginary) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Cone-membership slack: a matrix counts as PSD when its smallest eigenvalue
# is >= -PSD_SLACK * (1 + frobenius norm).
PSD_SLACK = 1e-10

# Relative tolerance for linear-algebra identities (adjoint checks etc.).
LIN_TOL = 1e-9


def _as_square(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a.mat if isinstance(a, SymMatrix) else a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _symmetrised(a) -> np.ndarray:
    m = _as_square(a)
    s = 0.5 * (m + m.T)
    s.setflags(write=False)
    return s


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Real symmetric d x d matrix; storage is symmetrised on construction."""

    mat: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "mat", _symmetrised(self.mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.mat))

    def __add__(self, other):
        return SymMatrix(self.mat + _as_square(other))

    def __sub__(self, other):
        return SymMatrix(self.mat - _as_square(other))

    def __mul__(self, c: float):
        return SymMatrix(float(c) * self.mat)

    __rmul__ = __mul__

    def __neg__(self):
        return SymMatrix(-self.mat)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, norm={self.norm:.6g})"


class PsdMatrix(SymMatrix):
    """Symmetric matrix certified to sit in the cone (up to PSD_SLACK)."""

    def __post_init__(self):
        super().__post_init__()
        lam = float(np.linalg.eigvalsh(self.mat)[0])
        if lam < -PSD_SLACK * (1.0 + self.norm):
            raise ValueError(
                f"matrix is not positive semidefinite: min eigenvalue {lam:.3e}"
            )


@dataclass(frozen=True, eq=False)
class HVector:
    """Point in the d-dimensional curve/asset space paired with the cone."""

    vec: np.ndarray = field()

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float)
        if v.ndim != 1:
            raise ValueError(f"vector must be 1-d, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector has non-finite entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


def as_matrix(x) -> np.ndarray:
    """Coerce SymMatrix / array-like to a plain symmetric ndarray."""
    if isinstance(x, SymMatrix):
        return x.mat
    return _symmetrised(x)


def as_vector(v) -> np.ndarray:
    if isinstance(v, HVector):
        return v.vec
    out = np.asarray(v, dtype=float)
    if out.ndim != 1:
        raise ValueError(f"vector must be 1-d, got shape {out.shape}")
    return out


def frob_inner(a, b) -> float:
    """Frobenius pairing sum_ij a[i,j] b[i,j]."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return float(np.sum(ma * mb))


def outer(a, b) -> SymMatrix:
    """Symmetrised rank-one product of two vectors: sym(a b^T)."""
    va, vb = as_vector(a), as_vector(b)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return SymMatrix(np.outer(va, vb))


def min_eig(x) -> float:
    """Smallest eigenvalue, the cone-membership certificate."""
    return float(np.linalg.eigvalsh(as_matrix(x))[0])


def project_psd(x) -> PsdMatrix:
    """Nearest cone point in Frobenius norm: clip negative eigenvalues."""
    m = as_matrix(x)
    lam, q = np.linalg.eigh(m)
    if lam[0] >= 0.0:
        return PsdMatrix(m)
    clipped = (q * np.maximum(lam, 0.0)) @ q.T
    return PsdMatrix(clipped)


def psd_sqrt(x) -> PsdMatrix:
    """Symmetric square root; eigenvalues are clipped at zero before rooting."""
    m = as_matrix(x)
    lam, q = np.linalg.eigh(m)
    if lam[0] < -PSD_SLACK * (1.0 + float(np.linalg.norm(m))):
        raise ValueError(
            f"psd_sqrt needs a PSD input, min eigenvalue {lam[0]:.3e}"
        )
    root = (q * np.sqrt(np.maximum(lam, 0.0))) @ q.T
    return PsdMatrix(root)


def psd_sqrt_batch(x: np.ndarray) -> np.ndarray:
    """Vectorised psd_sqrt over a stack (..., d, d); clips at zero silently.

    Simulation-path helper: inputs are engine states already known to sit in
    the cone up to projection slack, so no certificate is re-checked.
    """
    lam, q = np.linalg.eigh(x)
    root = np.sqrt(np.clip(lam, 0.0, None))
    return np.einsum("...ik,...k,...jk->...ij", q, root, q)


def project_psd_batch(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Vectorised projection; also returns the most negative eigenvalue seen."""
    lam, q = np.linalg.eigh(x)
    worst = float(lam.min()) if lam.size else 0.0
    if worst >= 0.0:
        return x, worst
    out = np.einsum(
        "...ik,...k,...jk->...ij", q, np.clip(lam, 0.0, None), q
    )
    return out, worst
