import numpy as np
import pytest
from hypothesis import given

from affinesv.symcone import (
    HVector,
    PsdMatrix,
    SymMatrix,
    as_matrix,
    as_vector,
    frob_inner,
    min_eig,
    outer,
    project_psd,
    project_psd_batch,
    psd_sqrt,
    psd_sqrt_batch,
)

from conftest import psd_matrices, sym_matrices, vectors


def test_symmetrisation():
    m = SymMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.array_equal(m.mat, np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_matrix_is_write_protected():
    m = SymMatrix(np.eye(2))
    with pytest.raises(ValueError):
        m.mat[0, 0] = 5.0


def test_psd_rejects_indefinite():
    with pytest.raises(ValueError):
        PsdMatrix(np.diag([1.0, -1.0]))


def test_psd_accepts_roundoff_negative():
    # eigenvalues a hair below zero are treated as zero, not rejected
    m = PsdMatrix(np.diag([1.0, -1e-13]))
    assert m.dim == 2


def test_arithmetic_and_norm():
    a = SymMatrix(np.diag([1.0, 2.0]))
    b = SymMatrix(np.diag([0.5, 0.5]))
    assert np.array_equal((a + b).mat, np.diag([1.5, 2.5]))
    assert np.array_equal((a - b).mat, np.diag([0.5, 1.5]))
    assert np.array_equal((2.0 * a).mat, np.diag([2.0, 4.0]))
    assert np.array_equal((-a).mat, np.diag([-1.0, -2.0]))
    assert a.norm == pytest.approx(np.sqrt(5.0))


def test_hvector():
    v = HVector(np.array([3.0, 4.0]))
    assert v.dim == 2
    assert v.norm == pytest.approx(5.0)


def test_as_matrix_as_vector_validation():
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_vector(np.zeros((2, 2)))
    assert as_matrix(SymMatrix(np.eye(2))).shape == (2, 2)
    assert as_vector(HVector(np.zeros(3))).shape == (3,)


def test_frob_inner_known_value():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    b = np.array([[0.0, 1.0], [1.0, 4.0]])
    assert frob_inner(a, b) == pytest.approx(2.0 + 2.0 + 12.0)


@given(sym_matrices(dim=3), sym_matrices(dim=3))
def test_frob_inner_symmetric(a, b):
    assert frob_inner(a, b) == pytest.approx(frob_inner(b, a), abs=1e-12)


@given(psd_matrices(dim=3), psd_matrices(dim=3))
def test_cone_self_duality_probe(u, x):
    # pairing of two cone elements is never negative
    assert frob_inner(u, x) >= -1e-10


def test_outer_symmetrises():
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    assert np.allclose(outer(a, b).mat, np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_min_eig_diag():
    assert min_eig(np.diag([3.0, -2.0, 1.0])) == pytest.approx(-2.0)


def test_project_psd_clips_negative_part():
    p = project_psd(np.diag([2.0, -3.0]))
    assert np.allclose(p.mat, np.diag([2.0, 0.0]))


@given(sym_matrices(dim=3))
def test_project_psd_idempotent(a):
    once = project_psd(a)
    twice = project_psd(once)
    assert np.allclose(once.mat, twice.mat, atol=1e-10)
    assert min_eig(once) >= -1e-10


@given(psd_matrices(dim=3))
def test_project_psd_fixes_cone_points(x):
    assert np.allclose(project_psd(x).mat, 0.5 * (x + x.T), atol=1e-9)


@given(psd_matrices(dim=3))
def test_psd_sqrt_roundtrip(x):
    r = psd_sqrt(x).mat
    assert np.allclose(r @ r, x, atol=1e-8 * (1.0 + np.abs(x).max()))


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -0.5]))


def test_batch_helpers_match_single():
    rng = np.random.default_rng(5)
    mats = []
    for _ in range(6):
        a = rng.normal(size=(3, 3))
        mats.append(a @ a.T)
    batch = np.stack(mats)
    roots = psd_sqrt_batch(batch)
    for m, r in zip(mats, roots):
        assert np.allclose(r, psd_sqrt(m).mat, atol=1e-10)

    shifted = batch - 0.5 * np.eye(3)
    proj, worst = project_psd_batch(shifted)
    assert worst <= 0.0
    for s, p in zip(shifted, proj):
        assert np.allclose(p, project_psd(s).mat, atol=1e-10)
        assert worst <= min_eig(0.5 * (s + s.T)) + 1e-12
