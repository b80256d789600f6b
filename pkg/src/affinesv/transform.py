"""Joint transform values: analytic route vs Monte Carlo route.

The analytic route reads the solved Riccati triple at the query time and
assembles

    E[ exp(i <Y_t, v1> - <X_t, u2>) ]
      = exp(-phi(t) - <x0, psi2(t)>) * exp(i <y0, v(t)>),

a complex number of modulus at most one whenever u2 sits in the cone. The
Monte Carlo route averages the same functional over simulated paths; the
two are compared in units of the Monte Carlo standard error, componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .riccati import RiccatiSolution
from .simulate import PathBatch
from .symcone import HVector, PsdMatrix, as_matrix, as_vector


@dataclass(frozen=True, eq=False)
class TransformQuery:
    """Direction pair (v1, u2) and time for one transform evaluation."""

    v1: HVector
    u2: PsdMatrix
    t: float

    def __post_init__(self):
        if not isinstance(self.v1, HVector):
            object.__setattr__(self, "v1", HVector(as_vector(self.v1)))
        if not isinstance(self.u2, PsdMatrix):
            object.__setattr__(self, "u2", PsdMatrix(as_matrix(self.u2)))
        if not (self.t > 0 and np.isfinite(self.t)):
            raise ValueError("query time must be positive and finite")


@dataclass(frozen=True)
class MCEstimate:
    estimate: complex
    stderr: float
    n_paths: int


@dataclass(frozen=True)
class CompareReport:
    z_re: float
    z_im: float
    z_max: float = 3.0

    @property
    def ok(self) -> bool:
        return max(abs(self.z_re), abs(self.z_im)) <= self.z_max


def affine_value(sol: RiccatiSolution, x0, y0, query: TransformQuery) -> complex:
    """Evaluate the transform from a Riccati solution covering query.t."""
    phi = sol.phi_at(query.t)
    v = sol.psi1_at(query.t)
    psi2 = sol.psi2_at(query.t)
    decay = float(np.sum(as_matrix(x0) * psi2))
    theta = float(np.dot(as_vector(y0), v))
    mod = float(np.exp(-phi - decay))
    return complex(mod * np.cos(theta), mod * np.sin(theta))


def mc_transform(batch: PathBatch, query: TransformQuery) -> MCEstimate:
    """Monte Carlo average of exp(i <Y_t, v1> - <X_t, u2>) over a path batch."""
    x_t, y_t = batch.state_at(query.t)
    w = np.exp(-np.einsum("nij,ij->n", x_t, query.u2.mat))
    if query.v1.norm > 0:
        if y_t is None:
            raise ValueError("query needs the curve component, but it was not simulated")
        theta = y_t @ query.v1.vec
        re = w * np.cos(theta)
        im = w * np.sin(theta)
    else:
        re = w
        im = np.zeros_like(w)
    n = re.shape[0]
    est = complex(re.mean(), im.mean())
    se_re = float(re.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    se_im = float(im.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return MCEstimate(estimate=est, stderr=max(se_re, se_im), n_paths=n)


def compare(affine: complex, mc: MCEstimate, z_max: float = 3.0) -> CompareReport:
    """Componentwise z-scores of the two routes in Monte Carlo error units.

    A zero standard error (degenerate estimator) demands exact agreement.
    """
    if mc.stderr <= 0.0:
        exact = abs(affine - mc.estimate) <= 1e-12 * (1.0 + abs(affine))
        big = 0.0 if exact else np.inf
        return CompareReport(z_re=big, z_im=big, z_max=z_max)
    z_re = (affine.real - mc.estimate.real) / mc.stderr
    z_im = (affine.imag - mc.estimate.imag) / mc.stderr
    return CompareReport(z_re=float(z_re), z_im=float(z_im), z_max=z_max)
