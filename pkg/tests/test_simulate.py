import numpy as np
import pytest
from scipy import stats

from affinesv.jumpmeasure import Atom, JumpMeasureSpec, VectorAtom
from affinesv.params import AdmissibleParams, NoiseSpec, zero_operator
from affinesv.semigroup import GeneratorSpec
from affinesv.simulate import (
    MajorantOverflowError,
    SimConfig,
    moment_check_X,
    simulate_X,
    simulate_Y,
    simulate_paths,
)
from affinesv.symcone import HVector, PsdMatrix


def _no_jump_params(dim=2, b=None):
    return AdmissibleParams(
        dim=dim,
        b=PsdMatrix(np.zeros((dim, dim)) if b is None else b),
        B=zero_operator(dim),
        jumps=JumpMeasureSpec(dim=dim, m_atoms=(), mu_atoms=()),
    )


def _cfg(params, **kw):
    d = params.dim
    base = dict(
        params=params,
        noise=NoiseSpec(mode="Q", matrix=PsdMatrix(np.eye(d))),
        gen=GeneratorSpec(kind="zero", dim=d),
        x0=PsdMatrix(0.5 * np.eye(d)),
        y0=HVector(np.zeros(d)),
        horizon=1.0,
        dt=0.1,
        n_paths=8,
        seed=7,
    )
    base.update(kw)
    return SimConfig(**base)


def test_config_validation():
    params = _no_jump_params()
    with pytest.raises(ValueError):
        _cfg(params, x0=PsdMatrix(np.eye(3)))
    with pytest.raises(ValueError):
        _cfg(params, n_paths=3, antithetic=True)
    with pytest.raises(ValueError):
        _cfg(params, dt=2.0)
    cfg = _cfg(params, record_times=(0.55,))
    with pytest.raises(ValueError):
        simulate_X(cfg)  # 0.55 is not a node of the 0.1 grid


def test_rerun_is_bit_identical():
    params = _no_jump_params(b=np.diag([0.3, 0.1]))
    a = simulate_paths(_cfg(params, n_paths=16))
    b = simulate_paths(_cfg(params, n_paths=16))
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.jump_time, b.jump_time)


def test_cone_only_run_matches_joint_run():
    params = _no_jump_params(b=np.diag([0.3, 0.1]))
    joint = simulate_paths(_cfg(params, n_paths=16))
    cone = simulate_X(_cfg(params, n_paths=16))
    assert cone.y is None
    assert np.array_equal(joint.x, cone.x)
    assert np.array_equal(joint.jump_time, cone.jump_time)
    assert np.array_equal(joint.jump_path, cone.jump_path)


def test_jumpfree_linear_drift_is_exact():
    b = np.diag([0.4, 0.2])
    params = _no_jump_params(b=b)
    batch = simulate_X(_cfg(params, n_paths=2))
    x_t, _ = batch.state_at(1.0)
    assert np.allclose(x_t[0], 0.5 * np.eye(2) + b, atol=1e-12)


def test_constant_intensity_jump_count_poisson():
    lam = 3.0
    params = AdmissibleParams(
        dim=2,
        b=PsdMatrix(np.diag([2.0, 1.5])),
        B=zero_operator(2),
        jumps=JumpMeasureSpec(
            dim=2,
            m_atoms=(Atom(xi=PsdMatrix(np.diag([0.5, 0.3])), mass=lam),),
            mu_atoms=(),
        ),
    )
    n = 600
    batch = simulate_X(_cfg(params, n_paths=n, horizon=2.0, dt=0.25, seed=13))
    counts = np.bincount(batch.jump_path, minlength=n)
    mean, var = counts.mean(), counts.var(ddof=1)
    expected = lam * 2.0
    assert abs(mean - expected) <= 4.0 * np.sqrt(expected / n)
    assert abs(var - expected) <= 6.0 * expected / np.sqrt(n)


def test_state_scaled_rate_doubles_with_state():
    # jumps feed x22 while the rate reads x11, so the intensity never moves
    # and the count stays Poisson with mean linear in the starting state
    jumps = JumpMeasureSpec(
        dim=2,
        m_atoms=(),
        mu_atoms=(
            VectorAtom(
                xi=PsdMatrix(np.diag([0.0, 2.0])),  # large: no truncation drift
                weight=PsdMatrix(np.diag([1.0, 0.0])),
                mass=2.0,
            ),
        ),
    )
    params = AdmissibleParams(
        dim=2, b=PsdMatrix(np.zeros((2, 2))), B=zero_operator(2), jumps=jumps
    )

    def total_jumps(scale):
        cfg = _cfg(
            params,
            x0=PsdMatrix(np.diag([scale, 0.1])),
            n_paths=2000,
            horizon=2.0,
            dt=0.25,
            seed=19,
        )
        return simulate_X(cfg).jump_time.size

    lo, hi = total_jumps(1.0), total_jumps(2.0)
    assert hi / lo == pytest.approx(2.0, rel=0.08)


def test_antithetic_pairs_mirror_without_jumps():
    params = _no_jump_params()
    cfg = _cfg(params, n_paths=8, antithetic=True, x0=PsdMatrix(np.eye(2)))
    batch = simulate_paths(cfg)
    _, y_t = batch.state_at(1.0)
    assert np.allclose(y_t[:4], -y_t[4:], atol=1e-12)


def test_majorant_overflow_raises():
    jumps = JumpMeasureSpec(
        dim=1,
        m_atoms=(),
        mu_atoms=(
            VectorAtom(
                xi=PsdMatrix(np.array([[2.0]])),
                weight=PsdMatrix(np.array([[1.0]])),
                mass=4e11,
            ),
        ),
    )
    params = AdmissibleParams(
        dim=1, b=PsdMatrix(np.zeros((1, 1))), B=zero_operator(1), jumps=jumps
    )
    cfg = _cfg(
        params,
        x0=PsdMatrix(np.array([[1.0]])),
        y0=HVector(np.zeros(1)),
        n_paths=2,
        horizon=1.0,
        dt=0.5,
    )
    with pytest.raises(MajorantOverflowError):
        simulate_X(cfg)


def test_record_subset_matches_full_grid():
    params = _no_jump_params(b=np.diag([0.2, 0.7]))
    full = simulate_paths(_cfg(params, n_paths=6))
    sub = simulate_paths(_cfg(params, n_paths=6, record_times=(0.5, 1.0)))
    assert np.allclose(sub.times, [0.5, 1.0])
    full_half, _ = full.state_at(0.5)
    sub_half, _ = sub.state_at(0.5)
    assert np.array_equal(full_half, sub_half)


def test_moment_check_unit_ray_growth(scenarios):
    scn = scenarios["yule"]
    cfg = SimConfig(
        params=scn.params, noise=scn.noise, gen=scn.gen, x0=scn.x0, y0=scn.y0,
        horizon=1.0, dt=0.05, n_paths=20_000, seed=31, record_times=(1.0,),
    )
    rep = moment_check_X(cfg, np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert rep.ode_mean == pytest.approx(np.e, abs=1e-8)
    assert rep.ok


def test_sample_jump_log_sorted():
    lam = 2.0
    params = AdmissibleParams(
        dim=1,
        b=PsdMatrix(np.array([[1.5]])),
        B=zero_operator(1),
        jumps=JumpMeasureSpec(
            dim=1,
            m_atoms=(Atom(xi=PsdMatrix(np.array([[0.5]])), mass=lam),),
            mu_atoms=(),
        ),
    )
    cfg = _cfg(params, x0=PsdMatrix(np.array([[1.0]])), y0=HVector(np.zeros(1)),
               n_paths=5, horizon=3.0, dt=0.5, seed=3)
    batch = simulate_X(cfg)
    for i in range(5):
        s = batch.sample(i)
        ts = [t for t, _ in s.jump_log]
        assert ts == sorted(ts)
        assert all(0.0 <= t <= 3.0 for t in ts)
        for _, size in s.jump_log:
            assert np.allclose(size, np.array([[0.5]]))


def test_curve_given_cone_path_reproducible_and_gaussian():
    d = 2
    params = _no_jump_params(dim=d)
    cfg = _cfg(params, n_paths=1, horizon=1.0, dt=0.02,
               x0=PsdMatrix(np.diag([0.9, 0.4])), y0=HVector(np.array([1.0, -1.0])))
    x_path = np.broadcast_to(np.diag([0.9, 0.4]), (cfg.n_steps + 1, d, d)).copy()

    one = simulate_Y(cfg, x_path, path_index=4)
    two = simulate_Y(cfg, x_path, path_index=4)
    other = simulate_Y(cfg, x_path, path_index=5)
    assert np.array_equal(one, two)
    assert not np.array_equal(one, other)
    assert one.shape == (cfg.n_steps + 1, d)

    # frozen X and identity noise: Y_1 - y0 ~ N(0, x0); check both variances
    ends = np.stack([simulate_Y(cfg, x_path, path_index=i)[-1] for i in range(400)])
    devs = ends - np.array([1.0, -1.0])
    for j, v in enumerate((0.9, 0.4)):
        z = (np.var(devs[:, j], ddof=1) - v) / (v * np.sqrt(2.0 / 399))
        assert abs(z) <= 4.0
    with pytest.raises(ValueError):
        simulate_Y(cfg, x_path[:-1])


def test_min_eig_floor_reported(scenarios):
    scn = scenarios["general-state-dep"]
    cfg = SimConfig(
        params=scn.params, noise=scn.noise, gen=scn.gen, x0=scn.x0, y0=scn.y0,
        horizon=1.0, dt=scn.sim_dt, n_paths=200, seed=scn.seed,
    )
    batch = simulate_paths(cfg)
    assert batch.min_eig_floor <= 0.0
    assert batch.min_eig_floor >= -1e-8
    lam = np.linalg.eigvalsh(batch.x)
    assert float(lam.min()) >= -1e-8


def test_thinning_interarrival_ks_small():
    lam = 2.0
    params = AdmissibleParams(
        dim=2,
        b=PsdMatrix(np.diag([1.2, 0.8])),
        B=zero_operator(2),
        jumps=JumpMeasureSpec(
            dim=2,
            m_atoms=(Atom(xi=PsdMatrix(np.diag([0.5, 0.3])), mass=lam),),
            mu_atoms=(),
        ),
    )
    cfg = _cfg(params, x0=PsdMatrix(0.2 * np.eye(2)), n_paths=40,
               horizon=25.0, dt=0.5, seed=71, record_times=(25.0,))
    batch = simulate_X(cfg)
    gaps = []
    for p in range(cfg.n_paths):
        times = np.sort(batch.jump_time[batch.jump_path == p])
        if times.size:
            gaps.append(np.diff(times, prepend=0.0))
    gaps = np.concatenate(gaps)
    assert gaps.size > 1500
    res = stats.kstest(gaps, "expon", args=(0.0, 1.0 / lam))
    assert res.pvalue > 0.01
