"""Generalised Riccati system for the joint transform.

The exponentially affine transform of the joint process (curve component Y,
cone component X) is driven by three coupled pieces:

  * a scalar accumulator   phi' = F(psi2),          phi(0) = 0,
  * a linear curve part    psi1(t) = i S*(t) v1     (closed form; only the
    real profile v(t) = S*(t) v1 is stored),
  * a cone-valued part     psi2' = R(psi1, psi2),   psi2(0) = u2,

with F(u) = <b, u> - sum_m mass * K(xi, u) and

  R(v, u) = B*(u) + 0.5 * (sqrtD v)(sqrtD v)^T
            - sum_mu mass/|xi|^2 * K(xi, u) * weight.

The quadratic term is positive because psi1 = i v makes the square of the
imaginary direction real and negative twice over.

Integration is classical RK4 on half-steps with cone projection after every
substep (rejecting the step if projection moves the state materially) and
Simpson accumulation of phi using the recorded midpoint states. The initial
condition must sit in the cone; transforms outside it are not attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jumpmeasure import JumpMeasureSpec, kernel_K, truncate_ladder
from .params import AdmissibleParams, NoiseSpec
from .semigroup import GeneratorSpec, apply_adjoint_semigroup
from .symcone import (
    HVector,
    PsdMatrix,
    SymMatrix,
    as_matrix,
    as_vector,
    frob_inner,
    psd_sqrt,
)

# Relative projection shift beyond which a step is rejected as too coarse.
PROJ_TOL = 1e-6

_EXP_ARG_MAX = 700.0


class RiccatiStepError(RuntimeError):
    """Step rejected: projection shift too large or state non-finite."""


def effective_quadratic_matrix(noise: NoiseSpec) -> np.ndarray:
    """Quadratic coefficient of the flow: D for the white driver.

    For the colored driver the commuting noise-equivalence case identifies
    the coefficient with Q itself; the solution records which mode fed it.
    """
    return noise.matrix.mat


def F_fn(params: AdmissibleParams, u) -> float:
    """Constant-coefficient part <b,u> - sum over constant atoms of mass*K."""
    acc = frob_inner(params.b, u)
    for a in params.jumps.m_atoms:
        acc -= a.mass * kernel_K(a.xi, u)
    return float(acc)


def R_fn(params: AdmissibleParams, d_eff, v, u) -> SymMatrix:
    """State-coefficient part of the cone Riccati field at profile v."""
    sd = psd_sqrt(as_matrix(d_eff)).mat
    w = sd @ as_vector(v)
    out = params.B.apply_adjoint_batch(as_matrix(u)[None])[0] + 0.5 * np.outer(w, w)
    for a in params.jumps.mu_atoms:
        out = out - (a.mass / a.xi.norm ** 2) * kernel_K(a.xi, u) * a.weight.mat
    return SymMatrix(out)


def solve_psi1(gen: GeneratorSpec, v1, grid) -> np.ndarray:
    """Curve profile v(t) = S*(t) v1 on the given times, stacked (len(grid), d)."""
    vec = as_vector(v1)
    return np.stack([apply_adjoint_semigroup(gen, float(t), vec) for t in grid])


@dataclass(frozen=True, eq=False)
class RiccatiInput:
    params: AdmissibleParams
    noise: NoiseSpec
    gen: GeneratorSpec
    v1: HVector
    u2: PsdMatrix
    horizon: float
    dt: float

    def __post_init__(self):
        if not isinstance(self.v1, HVector):
            object.__setattr__(self, "v1", HVector(as_vector(self.v1)))
        if not isinstance(self.u2, PsdMatrix):
            object.__setattr__(self, "u2", PsdMatrix(as_matrix(self.u2)))
        if self.u2.dim != self.params.dim:
            raise ValueError("initial cone condition has wrong dimension")
        if self.v1.dim != self.gen.dim:
            raise ValueError("curve direction has wrong dimension")
        if self.gen.dim != self.params.dim:
            raise ValueError(
                "curve and matrix components must share one dimension; "
                f"got generator dim {self.gen.dim} vs state dim {self.params.dim}"
            )
        if not (self.horizon > 0 and np.isfinite(self.horizon)):
            raise ValueError("horizon must be positive and finite")
        if not (0 < self.dt <= self.horizon):
            raise ValueError("step must satisfy 0 < dt <= horizon")


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """Solution triple on a uniform grid, with linear interpolation between nodes."""

    grid: np.ndarray
    phi: np.ndarray
    psi1: np.ndarray  # (n+1, dim_y): real profile v(t)
    psi2: np.ndarray  # (n+1, dim_x, dim_x)
    noise_mode: str
    min_eig_floor: float = 0.0  # most negative pre-projection eigenvalue seen
    max_proj_shift: float = 0.0

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def _locate(self, t: float) -> tuple[int, int, float]:
        if t < -1e-12 or t > self.horizon * (1 + 1e-12) + 1e-12:
            raise ValueError(f"time {t} outside solved range [0, {self.horizon}]")
        t = min(max(t, 0.0), self.horizon)
        dt = self.grid[1] - self.grid[0] if len(self.grid) > 1 else 1.0
        i = int(np.clip(np.floor(t / dt), 0, len(self.grid) - 2))
        w = (t - self.grid[i]) / dt
        if w < 1e-9:
            return i, i, 0.0
        if w > 1 - 1e-9:
            return i + 1, i + 1, 0.0
        return i, i + 1, float(w)

    def phi_at(self, t: float) -> float:
        i, j, w = self._locate(t)
        return float((1 - w) * self.phi[i] + w * self.phi[j])

    def psi1_at(self, t: float) -> np.ndarray:
        i, j, w = self._locate(t)
        return (1 - w) * self.psi1[i] + w * self.psi1[j]

    def psi2_at(self, t: float) -> np.ndarray:
        i, j, w = self._locate(t)
        return (1 - w) * self.psi2[i] + w * self.psi2[j]


def _atom_tables(jumps: JumpMeasureSpec):
    """Flatten atoms for vectorised kernel sums inside the stepper."""
    arr = jumps.arrays
    small_m = np.array(
        [np.linalg.norm(x) <= 1.0 for x in arr["xi_m"]], dtype=float
    )
    small_mu = np.array(
        [np.linalg.norm(x) <= 1.0 for x in arr["xi_mu"]], dtype=float
    )
    return arr, small_m, small_mu


def _kernel_sum_m(arr, small, u):
    """sum_a mass_a * K(xi_a, u) for the constant atoms."""
    if arr["xi_m"].shape[0] == 0:
        return 0.0
    t = np.einsum("aij,ij->a", arr["xi_m"], u)
    if np.any(-t > _EXP_ARG_MAX):
        raise OverflowError("kernel exponent out of range in constant-atom sum")
    k = np.expm1(-t) + small * t
    return float(arr["mass_m"] @ k)


def _kernel_sum_mu(arr, small, u):
    """sum_a mass_a/|xi_a|^2 * K(xi_a, u) * weight_a, a symmetric matrix."""
    if arr["xi_mu"].shape[0] == 0:
        return 0.0
    t = np.einsum("aij,ij->a", arr["xi_mu"], u)
    if np.any(-t > _EXP_ARG_MAX):
        raise OverflowError("kernel exponent out of range in state-atom sum")
    k = np.expm1(-t) + small * t
    return np.einsum("a,aij->ij", arr["scale_mu"] * k, arr["weight_mu"])


def _project_tracked(u: np.ndarray) -> tuple[np.ndarray, float, float]:
    lam, q = np.linalg.eigh(u)
    floor = float(lam[0])
    if floor >= 0.0:
        return u, floor, 0.0
    proj = (q * np.maximum(lam, 0.0)) @ q.T
    return proj, floor, float(np.linalg.norm(proj - u))


def solve_riccati(inp: RiccatiInput) -> RiccatiSolution:
    """Integrate the system on [0, horizon] with the input step size.

    RK4 on two half-steps per grid interval; the interval midpoint state
    feeds Simpson's rule for phi. Every substep result is projected back to
    the cone, and the step is rejected if the projection moves the state by
    more than PROJ_TOL relative (the signal that dt is too coarse).
    """
    params, gen = inp.params, inp.gen
    d_eff = effective_quadratic_matrix(inp.noise)
    n_steps = max(1, int(round(inp.horizon / inp.dt)))
    dt = inp.horizon / n_steps
    grid = np.linspace(0.0, inp.horizon, n_steps + 1)

    # Curve profile on the quarter grid: RK4 substages need v at t, t+dt/4,
    # t+dt/2, ... and Simpson reuses the same points.
    tq = np.arange(4 * n_steps + 1) * (dt / 4.0)
    v_q = solve_psi1(gen, inp.v1.vec, tq)
    sd = psd_sqrt(d_eff).mat
    w_q = v_q @ sd  # sd is symmetric, so this is (sd @ v) row-wise
    src = 0.5 * np.einsum("ki,kj->kij", w_q, w_q)

    arr, small_m, small_mu = _atom_tables(params.jumps)
    b = params.b.mat
    bop = params.B

    def f_of(u):
        return float(np.sum(b * u)) - _kernel_sum_m(arr, small_m, u)

    def field(qidx, u):
        out = bop.apply_adjoint_batch(u[None])[0] + src[qidx]
        return out - _kernel_sum_mu(arr, small_mu, u)

    d = params.dim
    psi2 = np.empty((n_steps + 1, d, d))
    phi = np.empty(n_steps + 1)
    psi2[0] = inp.u2.mat
    phi[0] = 0.0

    u = inp.u2.mat.copy()
    floor = 0.0
    worst_shift = 0.0
    h = dt / 2.0
    f_left = f_of(u)
    for step in range(n_steps):
        u_mid = None
        for half in range(2):
            q0 = 4 * step + 2 * half
            k1 = field(q0, u)
            k2 = field(q0 + 1, u + 0.5 * h * k1)
            k3 = field(q0 + 1, u + 0.5 * h * k2)
            k4 = field(q0 + 2, u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            u = 0.5 * (u + u.T)
            if not np.all(np.isfinite(u)):
                raise RiccatiStepError(
                    f"non-finite state at t={grid[step] + (half + 1) * h:.6g}"
                )
            u, lam, shift = _project_tracked(u)
            floor = min(floor, lam)
            worst_shift = max(worst_shift, shift)
            if shift > PROJ_TOL * (1.0 + float(np.linalg.norm(u))):
                raise RiccatiStepError(
                    f"projection shift {shift:.3e} at t={grid[step] + (half + 1) * h:.6g}; "
                    "reduce dt"
                )
            if half == 0:
                u_mid = u
        f_mid = f_of(u_mid)
        f_right = f_of(u)
        phi[step + 1] = phi[step] + (dt / 6.0) * (f_left + 4.0 * f_mid + f_right)
        psi2[step + 1] = u
        f_left = f_right

    return RiccatiSolution(
        grid=grid,
        phi=phi,
        psi1=v_q[::4].copy(),
        psi2=psi2,
        noise_mode=inp.noise.mode,
        min_eig_floor=floor,
        max_proj_shift=worst_shift,
    )


def solve_riccati_ladder(inp: RiccatiInput, k: int) -> RiccatiSolution:
    """Solve with the jump system truncated at radius 1/k (drift unchanged)."""
    trimmed = AdmissibleParams(
        dim=inp.params.dim,
        b=inp.params.b,
        B=inp.params.B,
        jumps=truncate_ladder(inp.params.jumps, k),
    )
    return solve_riccati(
        RiccatiInput(
            params=trimmed,
            noise=inp.noise,
            gen=inp.gen,
            v1=inp.v1,
            u2=inp.u2,
            horizon=inp.horizon,
            dt=inp.dt,
        )
    )


def bns_closed_form(
    params: AdmissibleParams,
    gen: GeneratorSpec,
    noise: NoiseSpec,
    x0,
    y0,
    v1,
    t: float,
    *,
    quad_order: int = 48,
) -> complex:
    """Characteristic function of Y_t in the constant-intensity (Levy) case.

    With no state-scaled atoms the cone part is explicit,

      psi2(t) = 0.5 * int_0^t e^{(t-s) B*} (sqrtD S*(s) v1)^(x2) ds,

    and the transform splits into three exponential factors: the curve
    phase, the accumulated constant coefficient, and the initial-state
    decay. Both time integrals are evaluated by fixed-order Gauss-Legendre
    quadrature, which converges spectrally for these smooth integrands.
    """
    if params.jumps.mu_atoms:
        raise ValueError("closed form requires a constant-intensity jump system")
    if t <= 0:
        raise ValueError("time must be positive")
    d = params.dim
    vec1 = as_vector(v1)
    sd = psd_sqrt(effective_quadratic_matrix(noise)).mat
    mstar = params.B.dense_action.T

    nodes, weights = np.polynomial.legendre.leggauss(quad_order)

    def psi2_of(s: float) -> np.ndarray:
        # map [-1, 1] -> [0, s]
        taus = 0.5 * s * (nodes + 1.0)
        acc = np.zeros((d, d))
        for tau, wgt in zip(taus, weights):
            w = sd @ apply_adjoint_semigroup(gen, tau, vec1)
            g = np.outer(w, w)
            flowed = _expm_apply(mstar, s - tau, g.ravel()).reshape(d, d)
            acc += wgt * flowed
        return 0.5 * (0.5 * s) * acc  # 0.5 from the formula, 0.5 s from the map

    phase = float(np.dot(as_vector(y0), apply_adjoint_semigroup(gen, t, vec1)))

    s_nodes = 0.5 * t * (nodes + 1.0)
    acc_phi = 0.0
    for s, wgt in zip(s_nodes, weights):
        acc_phi += wgt * F_fn(params, psi2_of(s))
    phi = 0.5 * t * acc_phi

    decay = frob_inner(as_matrix(x0), psi2_of(t))
    mod = float(np.exp(-phi - decay))
    return complex(mod * np.cos(phase), mod * np.sin(phase))


def _expm_apply(m: np.ndarray, t: float, vec: np.ndarray) -> np.ndarray:
    if not np.any(m):
        return vec.copy()
    from scipy.linalg import expm

    return expm(t * m) @ vec
