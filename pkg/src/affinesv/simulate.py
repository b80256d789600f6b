"""Path engine: jump-driven cone dynamics plus the Gaussian curve component.

Between jumps the cone state follows the deterministic flow

    dx/dt = b + B(x) - (small-jump compensator at x),

the ordinary drift left over once jumps are handled explicitly. Jump times
come from Ogata thinning: the total intensity is affine in the state, hence
unbounded along paths, so the majorant is refreshed from the current state
(lam_bar = intensity * (1 + eta), eta = 0.5) after every accepted jump and
every flow window of length dt. Intensity growth over a window is checked at
each candidate and at the window end; a violated bound rewinds to the last
refresh point and redraws with eta doubled, which keeps the thinning exact
at the checked points. Jump sizes are drawn with probability proportional
to per-atom rates at the pre-jump state, and every changed state is
re-projected onto the cone.

The curve component uses an exponential Euler step with volatility frozen
on each window:

    Y_{t+dt} = S(dt) (Y_t + Sigma_t sqrt(dt) zeta),

where Sigma_t = sqrt(X_t) sqrt(Q) for the colored driver and
sqrt(D) sqrt(X_t) for the white one.

Everything is vectorised across paths. Randomness comes from two
counter-based streams spawned from the seed (jumps and Gaussians), so the
cone component of ``simulate_paths`` is bit-identical to ``simulate_X`` at
the same seed, and identical seeds reproduce batches exactly. Square roots
of path states are cached and recomputed only for paths whose state moved
beyond roundoff since the last refresh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jumpmeasure import chi
from .params import AdmissibleParams, NoiseSpec
from .semigroup import GeneratorSpec, shift_matrix
from .symcone import (
    HVector,
    PsdMatrix,
    as_matrix,
    as_vector,
    project_psd_batch,
    psd_sqrt,
    psd_sqrt_batch,
)

ETA0 = 0.5
LAMBDA_CAP = 1e12
_MOVE_EPS = 1e-14
_MAX_EVENT_ITER = 1_000_000


class MajorantOverflowError(RuntimeError):
    """Thinning bound blew past the cap: the intensity looks explosive."""


@dataclass(frozen=True, eq=False)
class SimConfig:
    params: AdmissibleParams
    noise: NoiseSpec
    gen: GeneratorSpec
    x0: PsdMatrix
    y0: HVector
    horizon: float
    dt: float
    n_paths: int
    seed: int
    antithetic: bool = False
    record_times: tuple[float, ...] | None = None  # None: every grid node

    def __post_init__(self):
        if not isinstance(self.x0, PsdMatrix):
            object.__setattr__(self, "x0", PsdMatrix(as_matrix(self.x0)))
        if not isinstance(self.y0, HVector):
            object.__setattr__(self, "y0", HVector(as_vector(self.y0)))
        if self.x0.dim != self.params.dim:
            raise ValueError("initial cone state has wrong dimension")
        if self.gen.dim != self.params.dim or self.y0.dim != self.params.dim:
            raise ValueError("curve and cone dimensions must agree")
        if self.noise.dim != self.params.dim:
            raise ValueError("noise matrix has wrong dimension")
        if not (self.horizon > 0 and 0 < self.dt <= self.horizon):
            raise ValueError("need horizon > 0 and 0 < dt <= horizon")
        if self.n_paths < 1:
            raise ValueError("need at least one path")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic pairing needs an even path count")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)


@dataclass(frozen=True, eq=False)
class PathSample:
    """One trajectory on the recording grid with its jump log."""

    times: np.ndarray
    x_path: np.ndarray  # (m, d, d)
    y_path: np.ndarray | None  # (m, d)
    jump_log: tuple[tuple[float, np.ndarray], ...]


@dataclass(eq=False)
class PathBatch:
    """All paths of a run, recorded at selected grid times."""

    times: np.ndarray  # (m,)
    x: np.ndarray  # (m, n, d, d)
    y: np.ndarray | None  # (m, n, d)
    jump_path: np.ndarray
    jump_time: np.ndarray
    jump_atom: np.ndarray
    atom_sizes: np.ndarray  # (K, d, d), constant atoms first
    min_eig_floor: float
    seed: int

    @property
    def n_paths(self) -> int:
        return self.x.shape[1]

    def state_at(self, t: float) -> tuple[np.ndarray, np.ndarray | None]:
        hits = np.nonzero(np.abs(self.times - t) <= 1e-9 * (1.0 + abs(t)))[0]
        if hits.size == 0:
            raise ValueError(f"time {t} was not recorded (times: {self.times})")
        i = int(hits[0])
        return self.x[i], None if self.y is None else self.y[i]

    def sample(self, i: int) -> PathSample:
        mask = self.jump_path == i
        order = np.argsort(self.jump_time[mask], kind="stable")
        ts = self.jump_time[mask][order]
        ats = self.jump_atom[mask][order]
        log = tuple((float(t), self.atom_sizes[a]) for t, a in zip(ts, ats))
        return PathSample(
            times=self.times,
            x_path=self.x[:, i],
            y_path=None if self.y is None else self.y[:, i],
            jump_log=log,
        )


class _JumpTables:
    """Dense per-atom arrays shared by intensity, drift and size selection."""

    def __init__(self, params: AdmissibleParams):
        arr = params.jumps.arrays
        d = params.dim
        self.d = d
        self.xi_m = arr["xi_m"]
        self.mass_m = arr["mass_m"]
        self.xi_mu = arr["xi_mu"]
        self.weight_mu = arr["weight_mu"]
        self.scale_mu = arr["scale_mu"]
        self.base_rate = float(np.sum(self.mass_m))
        self.sizes = np.concatenate([self.xi_m, self.xi_mu], axis=0)
        chi_m = np.zeros((d, d))
        for x, m in zip(self.xi_m, self.mass_m):
            chi_m += chi(x).mat * m
        self.chi_m_sum = chi_m
        self.chi_mu = np.stack(
            [chi(x).mat for x in self.xi_mu], axis=0
        ) if self.xi_mu.shape[0] else np.zeros((0, d, d))
        self.const_drift = params.b.mat - chi_m
        self.bop = params.B

    def mu_rates(self, x: np.ndarray) -> np.ndarray:
        """(n, K_mu) state-scaled atom rates, clipped at zero."""
        if self.xi_mu.shape[0] == 0:
            return np.zeros((x.shape[0], 0))
        r = np.einsum("nij,aij->na", x, self.weight_mu) * self.scale_mu
        return np.clip(r, 0.0, None)

    def intensity(self, x: np.ndarray) -> np.ndarray:
        return self.base_rate + self.mu_rates(x).sum(axis=1)

    def atom_rates(self, x: np.ndarray) -> np.ndarray:
        """(n, K) per-atom rates in atom_sizes order."""
        n = x.shape[0]
        const = np.broadcast_to(self.mass_m, (n, self.mass_m.shape[0]))
        return np.concatenate([const, self.mu_rates(x)], axis=1)

    def drift(self, x: np.ndarray) -> np.ndarray:
        out = self.const_drift + self.bop.apply_batch(x)
        if self.xi_mu.shape[0]:
            r = np.einsum("nij,aij->na", x, self.weight_mu) * self.scale_mu
            out = out - np.einsum("na,aij->nij", r, self.chi_mu)
        return out

    def flow(self, x: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """RK4 step of the inter-jump flow with per-path horizon h.

        Returns the advanced states and a mask of paths that moved beyond
        roundoff (used to invalidate square-root/projection caches).
        """
        if x.shape[0] == 0:
            return x, np.zeros(0, dtype=bool)
        k1 = self.drift(x)
        if not np.any(np.abs(k1) > 0.0):
            return x, np.zeros(x.shape[0], dtype=bool)
        hh = h[:, None, None]
        k2 = self.drift(x + 0.5 * hh * k1)
        k3 = self.drift(x + 0.5 * hh * k2)
        k4 = self.drift(x + hh * k3)
        dx = (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        scale = 1.0 + np.abs(x).max(axis=(1, 2))
        moved = np.abs(dx).max(axis=(1, 2)) > _MOVE_EPS * scale
        return x + dx, moved


def _exp_step(rng, rate: np.ndarray) -> np.ndarray:
    e = rng.exponential(1.0, size=rate.shape)
    out = np.full(rate.shape, np.inf)
    pos = rate > 0
    out[pos] = e[pos] / rate[pos]
    return out


def _categorical(rng, rates: np.ndarray) -> np.ndarray:
    """Draw one column index per row with probability proportional to rates."""
    cum = np.cumsum(rates, axis=1)
    total = cum[:, -1]
    u = rng.uniform(size=rates.shape[0]) * total
    return (u[:, None] >= cum).sum(axis=1).clip(max=rates.shape[1] - 1)


def _gauss_step_matrix(gen: GeneratorSpec, dt: float) -> np.ndarray:
    if gen.kind == "zero":
        return np.eye(gen.dim)
    if gen.kind == "scalar":
        return float(np.exp(gen.value * dt)) * np.eye(gen.dim)
    if gen.kind == "dense":
        from scipy.linalg import expm

        return expm(dt * gen.matrix)
    return shift_matrix(gen.maturities, dt)


def _run_engine(cfg: SimConfig, with_y: bool) -> PathBatch:
    n, d = cfg.n_paths, cfg.params.dim
    n_steps = cfg.n_steps
    dt = cfg.horizon / n_steps
    grid = cfg.grid()

    if cfg.record_times is None:
        rec_idx = {i: slot for slot, i in enumerate(range(n_steps + 1))}
    else:
        rec_idx = {}
        for t in cfg.record_times:
            i = int(round(t / dt))
            if not (0 <= i <= n_steps) or abs(grid[i] - t) > 1e-9 * (1 + abs(t)):
                raise ValueError(f"record time {t} is not a grid node")
            rec_idx.setdefault(i, None)
        rec_idx = {i: slot for slot, i in enumerate(sorted(rec_idx))}
    m_rec = len(rec_idx)

    tables = _JumpTables(cfg.params)
    ss = np.random.SeedSequence(cfg.seed)
    jump_ss, gauss_ss = ss.spawn(2)
    rng_j = np.random.Generator(np.random.Philox(jump_ss))
    rng_g = np.random.Generator(np.random.Philox(gauss_ss))

    x = np.broadcast_to(cfg.x0.mat, (n, d, d)).copy()
    x_rec = np.empty((m_rec, n, d, d))
    y = y_rec = None
    sq_state = sq_dirty = step_mat = sq_noise = None
    if with_y:
        y = np.broadcast_to(cfg.y0.vec, (n, d)).copy()
        y_rec = np.empty((m_rec, n, d))
        step_mat = _gauss_step_matrix(cfg.gen, dt)
        sq_noise = psd_sqrt(cfg.noise.matrix).mat
        sq_state = np.empty_like(x)
        sq_dirty = np.ones(n, dtype=bool)

    floor = 0.0
    proj_dirty = np.zeros(n, dtype=bool)
    jlog_path: list[np.ndarray] = []
    jlog_time: list[np.ndarray] = []
    jlog_atom: list[np.ndarray] = []

    def record(i_node: int):
        nonlocal floor
        slot = rec_idx.get(i_node)
        if slot is None:
            return
        lam = np.linalg.eigvalsh(x)
        floor = min(floor, float(lam.min()))
        x_rec[slot] = x
        if with_y:
            y_rec[slot] = y

    def gauss_draw() -> np.ndarray:
        if cfg.antithetic:
            half = rng_g.standard_normal((n // 2, d))
            return np.concatenate([half, -half], axis=0)
        return rng_g.standard_normal((n, d))

    record(0)
    for step in range(n_steps):
        t0, t1 = grid[step], grid[step + 1]

        if with_y:
            if sq_dirty.any():
                sq_state[sq_dirty] = psd_sqrt_batch(x[sq_dirty])
                sq_dirty[:] = False
            zeta = gauss_draw()
            if cfg.noise.mode == "Q":
                inc = np.einsum("nij,nj->ni", sq_state, zeta @ sq_noise)
            else:
                inc = np.einsum("nij,nj->ni", sq_state, zeta) @ sq_noise
            y = (y + np.sqrt(dt) * inc) @ step_mat.T

        # --- advance the cone component through [t0, t1] by thinning ---
        eta = np.full(n, ETA0)
        lam_bar = tables.intensity(x) * (1.0 + eta)
        x_ref = x.copy()
        t_ref = np.full(n, t0)
        t_cur = np.full(n, t0)
        tau = t_cur + _exp_step(rng_j, lam_bar)
        done = np.zeros(n, dtype=bool)
        it = 0
        while not done.all():
            it += 1
            if it > _MAX_EVENT_ITER:
                raise RuntimeError("event loop failed to converge in a window")
            if np.any(lam_bar > LAMBDA_CAP):
                raise MajorantOverflowError(
                    f"thinning bound exceeded {LAMBDA_CAP:.1e}; intensity explosive"
                )

            cand = (~done) & (tau <= t1)
            if cand.any():
                idx = np.nonzero(cand)[0]
                xa, moved = tables.flow(x[idx], tau[idx] - t_cur[idx])
                lam_a = tables.intensity(xa)
                ok = lam_a <= lam_bar[idx] * (1.0 + 1e-12)

                vi = idx[~ok]
                if vi.size:
                    x[vi] = x_ref[vi]
                    t_cur[vi] = t_ref[vi]
                    eta[vi] *= 2.0
                    lam_bar[vi] = tables.intensity(x_ref[vi]) * (1.0 + eta[vi])
                    tau[vi] = t_cur[vi] + _exp_step(rng_j, lam_bar[vi])

                oi = idx[ok]
                if oi.size:
                    x[oi] = xa[ok]
                    proj_dirty[oi] |= moved[ok]
                    if with_y:
                        sq_dirty[oi] |= moved[ok]
                    t_cur[oi] = tau[oi]
                    u = rng_j.uniform(size=oi.size)
                    acc = u * lam_bar[oi] <= lam_a[ok]

                    ai = oi[acc]
                    if ai.size:
                        rates = tables.atom_rates(x[ai])
                        choice = _categorical(rng_j, rates)
                        x[ai] = x[ai] + tables.sizes[choice]
                        proj, lam_min = project_psd_batch(x[ai])
                        floor = min(floor, lam_min)
                        x[ai] = proj
                        proj_dirty[ai] = False
                        if with_y:
                            sq_dirty[ai] = True
                        jlog_path.append(ai.copy())
                        jlog_time.append(tau[ai].copy())
                        jlog_atom.append(choice.astype(np.int64))
                        eta[ai] = ETA0
                        lam_bar[ai] = tables.intensity(x[ai]) * (1.0 + ETA0)
                        x_ref[ai] = x[ai]
                        t_ref[ai] = tau[ai]
                        tau[ai] = t_cur[ai] + _exp_step(rng_j, lam_bar[ai])

                    ri = oi[~acc]
                    if ri.size:
                        tau[ri] = t_cur[ri] + _exp_step(rng_j, lam_bar[ri])

            rest = (~done) & (tau > t1)
            if rest.any():
                idx = np.nonzero(rest)[0]
                xa, moved = tables.flow(x[idx], t1 - t_cur[idx])
                lam_a = tables.intensity(xa)
                ok = lam_a <= lam_bar[idx] * (1.0 + 1e-12)

                vi = idx[~ok]
                if vi.size:
                    x[vi] = x_ref[vi]
                    t_cur[vi] = t_ref[vi]
                    eta[vi] *= 2.0
                    lam_bar[vi] = tables.intensity(x_ref[vi]) * (1.0 + eta[vi])
                    tau[vi] = t_cur[vi] + _exp_step(rng_j, lam_bar[vi])

                oi = idx[ok]
                if oi.size:
                    x[oi] = xa[ok]
                    proj_dirty[oi] |= moved[ok]
                    if with_y:
                        sq_dirty[oi] |= moved[ok]
                    t_cur[oi] = t1
                    done[oi] = True

        if proj_dirty.any():
            pi = np.nonzero(proj_dirty)[0]
            proj, lam_min = project_psd_batch(x[pi])
            floor = min(floor, lam_min)
            x[pi] = proj
            proj_dirty[pi] = False
        record(step + 1)

    times = grid[sorted(rec_idx)]
    return PathBatch(
        times=times,
        x=x_rec,
        y=y_rec,
        jump_path=(
            np.concatenate(jlog_path) if jlog_path else np.zeros(0, dtype=np.int64)
        ),
        jump_time=(
            np.concatenate(jlog_time) if jlog_time else np.zeros(0)
        ),
        jump_atom=(
            np.concatenate(jlog_atom) if jlog_atom else np.zeros(0, dtype=np.int64)
        ),
        atom_sizes=tables.sizes,
        min_eig_floor=floor,
        seed=cfg.seed,
    )


def simulate_X(cfg: SimConfig) -> PathBatch:
    """Cone component only; bit-identical to the X part of simulate_paths."""
    return _run_engine(cfg, with_y=False)


def simulate_paths(cfg: SimConfig) -> PathBatch:
    """Joint run of the cone component and the curve component."""
    return _run_engine(cfg, with_y=True)


def simulate_Y(cfg: SimConfig, x_path: np.ndarray, *, path_index: int = 0) -> np.ndarray:
    """Curve component along one externally supplied cone trajectory.

    x_path must hold states at every grid node, shape (n_steps + 1, d, d).
    Draws come from a child stream keyed by (seed, path_index), so separate
    paths decorrelate while staying reproducible.
    """
    n_steps = cfg.n_steps
    dt = cfg.horizon / n_steps
    d = cfg.params.dim
    x_path = np.asarray(x_path, dtype=float)
    if x_path.shape != (n_steps + 1, d, d):
        raise ValueError(
            f"x_path must have shape ({n_steps + 1}, {d}, {d}), got {x_path.shape}"
        )
    ss = np.random.SeedSequence([cfg.seed, 1, path_index])
    rng = np.random.Generator(np.random.Philox(ss))
    step_mat = _gauss_step_matrix(cfg.gen, dt)
    sq_noise = psd_sqrt(cfg.noise.matrix).mat
    y = np.empty((n_steps + 1, d))
    y[0] = cfg.y0.vec
    for i in range(n_steps):
        sx = psd_sqrt_batch(x_path[i][None])[0]
        zeta = rng.standard_normal(d)
        if cfg.noise.mode == "Q":
            inc = sx @ (sq_noise @ zeta)
        else:
            inc = sq_noise @ (sx @ zeta)
        y[i + 1] = step_mat @ (y[i] + np.sqrt(dt) * inc)
    return y


@dataclass(frozen=True)
class MomentReport:
    ode_mean: float
    mc_mean: float
    stderr: float
    z: float

    @property
    def ok(self) -> bool:
        return abs(self.z) <= 3.0


def _mean_flow_tables(params: AdmissibleParams):
    """Affine ODE for the path mean: constant and linear parts.

    The flow subtracts chi(xi) * rate while jumps add xi * rate on
    average, so each atom's net mean contribution is (xi - chi(xi))
    times its rate; small atoms (norm <= 1) contribute nothing beyond
    what the linear drift already carries.
    """
    const = params.b.mat.copy()
    for a in params.jumps.m_atoms:
        const += (a.xi.mat - chi(a.xi).mat) * a.mass
    tails = []
    for a in params.jumps.mu_atoms:
        net = a.xi.mat - chi(a.xi).mat
        tails.append((net, a.weight.mat, a.mass / a.xi.norm ** 2))
    return const, tails


def moment_check_X(cfg: SimConfig, u, batch: PathBatch | None = None) -> MomentReport:
    """First-moment consistency: affine mean ODE vs the Monte Carlo mean of <X_T, u>."""
    mu_dir = as_matrix(u)
    const, tails = _mean_flow_tables(cfg.params)
    bop = cfg.params.B

    def mean_drift(m):
        out = const + bop.apply_batch(m[None])[0]
        for xi, w, scale in tails:
            out = out + scale * float(np.sum(w * m)) * xi
        return out

    m = cfg.x0.mat.copy()
    n_sub = 400
    h = cfg.horizon / n_sub
    for _ in range(n_sub):
        k1 = mean_drift(m)
        k2 = mean_drift(m + 0.5 * h * k1)
        k3 = mean_drift(m + 0.5 * h * k2)
        k4 = mean_drift(m + h * k3)
        m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    ode_mean = float(np.sum(m * mu_dir))

    if batch is None:
        batch = simulate_X(cfg)
    x_t, _ = batch.state_at(cfg.horizon)
    vals = np.einsum("nij,ij->n", x_t, mu_dir)
    mc_mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / np.sqrt(vals.shape[0]))
    z = (mc_mean - ode_mean) / stderr if stderr > 0 else 0.0
    return MomentReport(ode_mean=ode_mean, mc_mean=mc_mean, stderr=stderr, z=float(z))
