"""Drift semigroup of the curve-valued component.

Four generator kinds cover the use cases:

  * ``zero``       -- identity semigroup;
  * ``scalar``     -- a * I, semigroup e^{t a} I;
  * ``dense``      -- arbitrary d x d generator, semigroup via expm;
  * ``shift_grid`` -- left shift along a maturity grid with linear
                      interpolation and constant right extrapolation (flat
                      long end), mimicking forward-curve evolution.

The shift kind is an interpolation operator rather than a matrix
exponential, so its semigroup law holds only up to the O(grid spacing)
interpolation error; its dense surrogate (for resolvent experiments) is the
first-order upwind difference matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .symcone import as_vector

GENERATOR_KINDS = ("zero", "scalar", "dense", "shift_grid")


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    kind: str
    dim: int
    value: float = 0.0
    matrix: np.ndarray | None = None
    maturities: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "dense":
            m = np.asarray(self.matrix, dtype=float)
            if m.shape != (self.dim, self.dim):
                raise ValueError(
                    f"dense generator must be ({self.dim}, {self.dim}), got {m.shape}"
                )
            object.__setattr__(self, "matrix", m)
        if self.kind == "shift_grid":
            g = np.asarray(self.maturities, dtype=float)
            if g.ndim != 1 or g.shape[0] != self.dim:
                raise ValueError("maturity grid must be 1-d of length dim")
            if not np.all(np.diff(g) > 0):
                raise ValueError("maturity grid must be strictly increasing")
            object.__setattr__(self, "maturities", g)


def shift_matrix(grid: np.ndarray, t: float) -> np.ndarray:
    """Linear-interpolation left shift: (Lv)_i = v(grid_i + t), flat at the end."""
    d = grid.shape[0]
    out = np.zeros((d, d))
    targets = grid + t
    for i, x in enumerate(targets):
        if x >= grid[-1]:
            out[i, -1] = 1.0
            continue
        j = int(np.searchsorted(grid, x, side="right")) - 1
        j = max(j, 0)
        w = (x - grid[j]) / (grid[j + 1] - grid[j])
        out[i, j] = 1.0 - w
        out[i, j + 1] = w
    return out


def apply_semigroup(gen: GeneratorSpec, t: float, v) -> np.ndarray:
    """Evaluate e^{tA} v (interpolation shift for the grid kind)."""
    vec = as_vector(v)
    if vec.shape[0] != gen.dim:
        raise ValueError(f"vector length {vec.shape[0]} != generator dim {gen.dim}")
    if t < 0:
        raise ValueError("semigroup time must be >= 0")
    if gen.kind == "zero":
        return vec.copy()
    if gen.kind == "scalar":
        return np.exp(t * gen.value) * vec
    if gen.kind == "dense":
        return expm(t * gen.matrix) @ vec
    return shift_matrix(gen.maturities, t) @ vec


def apply_adjoint_semigroup(gen: GeneratorSpec, t: float, v) -> np.ndarray:
    """Evaluate e^{tA*} v: the transposed action of apply_semigroup."""
    vec = as_vector(v)
    if vec.shape[0] != gen.dim:
        raise ValueError(f"vector length {vec.shape[0]} != generator dim {gen.dim}")
    if t < 0:
        raise ValueError("semigroup time must be >= 0")
    if gen.kind == "zero":
        return vec.copy()
    if gen.kind == "scalar":
        return np.exp(t * gen.value) * vec
    if gen.kind == "dense":
        return expm(t * gen.matrix.T) @ vec
    return shift_matrix(gen.maturities, t).T @ vec


def upwind_matrix(grid: np.ndarray) -> np.ndarray:
    """First-order upwind difference generator of the left shift.

    Last row is zero: constant right extrapolation means a flat long end.
    """
    g = np.asarray(grid, dtype=float)
    d = g.shape[0]
    a = np.zeros((d, d))
    for i in range(d - 1):
        h = g[i + 1] - g[i]
        a[i, i] = -1.0 / h
        a[i, i + 1] = 1.0 / h
    return a


def dense_generator(gen: GeneratorSpec) -> np.ndarray:
    """Materialize the generator as a matrix (upwind surrogate for shift_grid)."""
    if gen.kind == "zero":
        return np.zeros((gen.dim, gen.dim))
    if gen.kind == "scalar":
        return gen.value * np.eye(gen.dim)
    if gen.kind == "dense":
        return gen.matrix.copy()
    return upwind_matrix(gen.maturities)


def yosida(gen: GeneratorSpec, n: float) -> GeneratorSpec:
    """Bounded resolvent approximation n A (nI - A)^{-1} as a dense generator."""
    if n <= 0:
        raise ValueError("resolvent parameter must be positive")
    a = dense_generator(gen)
    shifted = n * np.eye(gen.dim) - a
    if np.linalg.cond(shifted) > 1e12:
        raise np.linalg.LinAlgError(
            "nI - A is numerically singular; pick n beyond the spectral bound"
        )
    approx = n * (a @ np.linalg.inv(shifted))
    return GeneratorSpec(kind="dense", dim=gen.dim, matrix=approx)


def growth_bound(gen: GeneratorSpec) -> tuple[float, float]:
    """(M, w) with |e^{tA} v| <= M e^{w t} |v| for all t >= 0.

    Dense kind uses the logarithmic norm (largest eigenvalue of the
    symmetric part) with M = 1; the interpolation shift averages values, so
    sqrt(d) with w = 0 bounds it.
    """
    if gen.kind == "zero":
        return 1.0, 0.0
    if gen.kind == "scalar":
        return 1.0, gen.value
    if gen.kind == "dense":
        sym = 0.5 * (gen.matrix + gen.matrix.T)
        return 1.0, float(np.linalg.eigvalsh(sym)[-1])
    return float(np.sqrt(gen.dim)), 0.0
