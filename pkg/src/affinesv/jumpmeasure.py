"""Atomic jump measures on the cone with state-dependent intensity.

The jump system carries two finite atomic measures: a state-independent part
(atoms with constant arrival rates) and a state-scaled part whose atoms fire
at rate mass * <weight, x> / |xi|^2, so total intensity is affine in the
state. General measures must be pre-discretised into atoms by the caller;
nothing here integrates densities.

Small jumps are those inside the closed unit Frobenius ball; ``chi`` keeps
them and kills everything larger. The truncation ladder drops atoms with
radius <= 1/k (strict keep on > 1/k), which is how the well-posedness
argument approaches the full measure from inside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .symcone import PsdMatrix, SymMatrix, as_matrix, frob_inner

# exp() argument beyond which kernel evaluation refuses to proceed.
_EXP_ARG_MAX = 700.0


def chi(xi) -> SymMatrix:
    """Small-jump truncation: identity on the closed unit ball, zero outside."""
    m = as_matrix(xi)
    if float(np.linalg.norm(m)) <= 1.0:
        return SymMatrix(m)
    return SymMatrix(np.zeros_like(m))


def kernel_K(xi, u) -> float:
    """Compensated exponential kernel exp(-<xi,u>) - 1 + <chi(xi),u>.

    Nonnegative whenever xi is a small cone jump and u sits in the cone
    (then t = <xi,u> >= 0 and e^-t - 1 + t >= 0). Raises OverflowError when
    the exponential argument leaves the representable range.
    """
    mxi = as_matrix(xi)
    t = frob_inner(mxi, u)
    if -t > _EXP_ARG_MAX:
        raise OverflowError(f"kernel exponent {-t:.3e} out of range")
    small = float(np.linalg.norm(mxi)) <= 1.0
    lin = frob_inner(mxi, u) if small else 0.0
    return float(np.expm1(-t) + lin)


@dataclass(frozen=True, eq=False)
class Atom:
    """State-independent jump: size ``xi`` in the cone, arrival rate ``mass``."""

    xi: PsdMatrix
    mass: float

    def __post_init__(self):
        if not isinstance(self.xi, PsdMatrix):
            object.__setattr__(self, "xi", PsdMatrix(as_matrix(self.xi)))
        if self.xi.norm == 0.0:
            raise ValueError("jump atom must have positive norm")
        if not (np.isfinite(self.mass) and self.mass >= 0.0):
            raise ValueError(f"atom mass must be finite and >= 0, got {self.mass}")


@dataclass(frozen=True, eq=False)
class VectorAtom:
    """State-scaled jump: fires at rate mass * <weight, x> / |xi|^2."""

    xi: PsdMatrix
    weight: PsdMatrix
    mass: float

    def __post_init__(self):
        if not isinstance(self.xi, PsdMatrix):
            object.__setattr__(self, "xi", PsdMatrix(as_matrix(self.xi)))
        if not isinstance(self.weight, PsdMatrix):
            object.__setattr__(self, "weight", PsdMatrix(as_matrix(self.weight)))
        if self.xi.dim != self.weight.dim:
            raise ValueError("atom size and weight dimensions differ")
        if self.xi.norm == 0.0:
            raise ValueError("jump atom must have positive norm")
        if not (np.isfinite(self.mass) and self.mass >= 0.0):
            raise ValueError(f"atom mass must be finite and >= 0, got {self.mass}")


@dataclass(frozen=True, eq=False)
class JumpMeasureSpec:
    """Finite atomic jump system: constant atoms plus state-scaled atoms."""

    dim: int
    m_atoms: tuple[Atom, ...] = ()
    mu_atoms: tuple[VectorAtom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "m_atoms", tuple(self.m_atoms))
        object.__setattr__(self, "mu_atoms", tuple(self.mu_atoms))
        for a in self.m_atoms:
            if a.xi.dim != self.dim:
                raise ValueError(
                    f"m-atom dimension {a.xi.dim} != spec dimension {self.dim}"
                )
        for a in self.mu_atoms:
            if a.xi.dim != self.dim:
                raise ValueError(
                    f"mu-atom dimension {a.xi.dim} != spec dimension {self.dim}"
                )

    @property
    def n_atoms(self) -> int:
        return len(self.m_atoms) + len(self.mu_atoms)

    @cached_property
    def arrays(self) -> dict:
        """Dense views for vectorised path engines (read-only convenience)."""
        d = self.dim
        xm = np.array([a.xi.mat for a in self.m_atoms]).reshape(-1, d, d)
        xmu = np.array([a.xi.mat for a in self.mu_atoms]).reshape(-1, d, d)
        wmu = np.array([a.weight.mat for a in self.mu_atoms]).reshape(-1, d, d)
        return {
            "xi_m": xm,
            "mass_m": np.array([a.mass for a in self.m_atoms]),
            "xi_mu": xmu,
            "weight_mu": wmu,
            # rate of a state-scaled atom at x is scale * <weight, x>
            "scale_mu": np.array(
                [a.mass / a.xi.norm**2 for a in self.mu_atoms]
            ),
        }


def intensity_at(spec: JumpMeasureSpec, x) -> float:
    """Total jump arrival rate at state x (affine in x)."""
    mx = as_matrix(x)
    if mx.shape != (spec.dim, spec.dim):
        raise ValueError(f"state shape {mx.shape} != ({spec.dim}, {spec.dim})")
    rate = sum(a.mass for a in spec.m_atoms)
    for a in spec.mu_atoms:
        r = a.mass * frob_inner(a.weight, mx) / a.xi.norm ** 2
        if r < 0.0:
            raise ValueError("negative state-scaled rate: state left the cone")
        rate += r
    return float(rate)


def compensator_small_jumps(spec: JumpMeasureSpec, x) -> SymMatrix:
    """Mean small-jump drift sum_atoms chi(xi) * rate(x), removed by the flow."""
    mx = as_matrix(x)
    out = np.zeros((spec.dim, spec.dim))
    for a in spec.m_atoms:
        out += chi(a.xi).mat * a.mass
    for a in spec.mu_atoms:
        out += chi(a.xi).mat * (a.mass * frob_inner(a.weight, mx) / a.xi.norm ** 2)
    return SymMatrix(out)


def truncate_ladder(spec: JumpMeasureSpec, k: int) -> JumpMeasureSpec:
    """Keep atoms with radius strictly greater than 1/k (boundary excluded)."""
    if k < 1:
        raise ValueError(f"ladder index must be >= 1, got {k}")
    cut = 1.0 / k
    return JumpMeasureSpec(
        dim=spec.dim,
        m_atoms=tuple(a for a in spec.m_atoms if a.xi.norm > cut),
        mu_atoms=tuple(a for a in spec.mu_atoms if a.xi.norm > cut),
    )
