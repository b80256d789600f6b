"""Shipped scenarios, one per worked model family.

  * ``yule``              -- single-ray state-scaled jumps whose compensating
                            drift cancels the flow exactly: the ray weight is
                            a pure birth process with an explicit Laplace
                            transform, the sharpest end-to-end oracle.
  * ``bns``               -- constant-intensity (Levy-driven) volatility with
                            mean reversion: the transform also has a
                            closed-form quadrature representation, giving a
                            dual route to the same number.
  * ``fixed-onb``         -- diagonal family: constant and state-scaled atoms
                            along a fixed orthonormal basis, colored-noise
                            mode with diagonal Q (the commuting case).
  * ``general-state-dep`` -- white-driver mode with non-diagonal D, skewed
                            rank-one state-scaled jumps and a non-normal
                            relaxation matrix; nothing commutes.

Scenarios are plain dicts in the JSON schema understood by the CLI; the
``example`` subcommand materializes them to files.
"""

from __future__ import annotations

import numpy as np

PRESET_NAMES = ("yule", "bns", "fixed-onb", "general-state-dep")


def _e(i: int, d: int) -> list[list[float]]:
    m = np.zeros((d, d))
    m[i, i] = 1.0
    return m.tolist()


def _diag(*vals: float) -> list[list[float]]:
    return np.diag(vals).tolist()


def _yule() -> dict:
    e11 = _e(0, 2)
    return {
        "name": "yule",
        "dim": 2,
        "params": {
            "b": _diag(0.0, 0.0),
            "B": {
                "kind": "ray",
                "terms": [{"z": e11, "g": e11, "coeff": 1.0}],
            },
            "jumps": {
                "m_atoms": [],
                "mu_atoms": [{"xi": e11, "weight": e11, "mass": 1.0}],
            },
        },
        "noise": {"mode": "Q", "matrix": _diag(1.0, 1.0)},
        "gen": {"kind": "zero"},
        "x0": e11,
        "y0": [0.0, 0.0],
        "horizon": 1.0,
        "queries": [
            {"v1": [0.0, 0.0], "u2": e11, "t": 1.0},
            {"v1": [0.6, 0.2], "u2": _diag(0.4, 0.0), "t": 1.0},
        ],
        "moment_dirs": [e11],
        "riccati": {"dt": 0.001},
        "sim": {"dt": 0.05, "n_paths": 100000, "seed": 11},
    }


def _bns() -> dict:
    return {
        "name": "bns",
        "dim": 2,
        "params": {
            "b": [[0.17, 0.02], [0.02, 0.12]],
            "B": {"kind": "sandwich", "c": [[-0.3, 0.05], [0.0, -0.2]], "terms": []},
            "jumps": {
                "m_atoms": [{"xi": _diag(0.3, 0.2), "mass": 0.5}],
                "mu_atoms": [],
            },
        },
        "noise": {"mode": "Q", "matrix": _diag(1.0, 1.0)},
        "gen": {"kind": "scalar", "value": -0.1},
        "x0": [[0.04, 0.01], [0.01, 0.03]],
        "y0": [0.3, -0.1],
        "horizon": 1.0,
        "queries": [
            {"v1": [1.0, 0.4], "u2": _diag(0.0, 0.0), "t": 1.0},
            {"v1": [0.5, 0.0], "u2": _diag(0.2, 0.1), "t": 0.8},
            {"v1": [0.0, 0.0], "u2": _diag(0.3, 0.3), "t": 1.0},
        ],
        "moment_dirs": [_diag(1.0, 1.0)],
        "riccati": {"dt": 0.001},
        "sim": {"dt": 0.02, "n_paths": 100000, "seed": 23},
    }


def _fixed_onb() -> dict:
    d = 3
    return {
        "name": "fixed-onb",
        "dim": d,
        "params": {
            "b": _diag(0.17, 0.06, 0.08),
            "B": {
                "kind": "sandwich",
                "c": _diag(-0.3, -0.2, -0.1),
                # compensating rank-one terms matching the mu-atoms below
                "terms": [
                    {
                        "z": (0.5 * np.array(_e(0, d))).tolist(),
                        "g": _diag(0.5, 0.2, 0.1),
                        "coeff": 0.4 / 0.5 ** 2,
                    },
                    {
                        "z": (0.8 * np.array(_e(2, d))).tolist(),
                        "g": _diag(0.1, 0.3, 0.4),
                        "coeff": 0.25 / 0.8 ** 2,
                    },
                ],
            },
            "jumps": {
                "m_atoms": [
                    {"xi": (0.4 * np.array(_e(0, d))).tolist(), "mass": 0.3},
                    {"xi": (1.5 * np.array(_e(1, d))).tolist(), "mass": 0.2},
                ],
                "mu_atoms": [
                    {
                        "xi": (0.5 * np.array(_e(0, d))).tolist(),
                        "weight": _diag(0.5, 0.2, 0.1),
                        "mass": 0.4,
                    },
                    {
                        "xi": (0.8 * np.array(_e(2, d))).tolist(),
                        "weight": _diag(0.1, 0.3, 0.4),
                        "mass": 0.25,
                    },
                ],
            },
        },
        "noise": {"mode": "Q", "matrix": _diag(1.0, 0.6, 0.3)},
        "gen": {"kind": "scalar", "value": -0.2},
        "x0": _diag(0.8, 0.5, 0.3),
        "y0": [0.1, 0.0, -0.2],
        "horizon": 1.0,
        "queries": [
            {"v1": [1.0, 0.5, 0.0], "u2": _diag(0.0, 0.0, 0.0), "t": 1.0},
            {"v1": [0.0, 0.0, 0.0], "u2": _diag(0.5, 0.5, 0.5), "t": 1.0},
            {"v1": [0.3, 0.0, 0.2], "u2": _diag(0.2, 0.1, 0.3), "t": 0.5},
        ],
        "moment_dirs": [_e(0, d), _diag(1.0, 1.0, 1.0)],
        "riccati": {"dt": 0.001},
        "sim": {"dt": 0.02, "n_paths": 30000, "seed": 37},
    }


def _general_state_dep() -> dict:
    d = 3
    w = np.array([0.6, 0.3, 0.1])
    xi_ray = np.outer(w, w)
    m_xi = np.array([[0.2, 0.05, 0.0], [0.05, 0.15, 0.0], [0.0, 0.0, 0.1]])
    g_ray = np.array([[0.4, 0.1, 0.0], [0.1, 0.3, 0.0], [0.0, 0.0, 0.2]])
    b = 0.4 * m_xi + 0.05 * np.eye(d)
    coeff = 0.3 / float(np.linalg.norm(xi_ray)) ** 2
    return {
        "name": "general-state-dep",
        "dim": d,
        "params": {
            "b": b.tolist(),
            "B": {
                "kind": "sandwich",
                "c": [[-0.4, 0.1, 0.0], [0.0, -0.3, 0.05], [0.0, 0.0, -0.2]],
                "terms": [
                    {"z": xi_ray.tolist(), "g": g_ray.tolist(), "coeff": coeff}
                ],
            },
            "jumps": {
                "m_atoms": [{"xi": m_xi.tolist(), "mass": 0.4}],
                "mu_atoms": [
                    {"xi": xi_ray.tolist(), "weight": g_ray.tolist(), "mass": 0.3}
                ],
            },
        },
        "noise": {
            "mode": "D",
            "matrix": [
                [0.5, 0.15, 0.0],
                [0.15, 0.4, 0.1],
                [0.0, 0.1, 0.3],
            ],
        },
        "gen": {
            "kind": "dense",
            "matrix": [
                [-0.5, 0.2, 0.0],
                [0.0, -0.4, 0.1],
                [0.0, 0.0, -0.3],
            ],
        },
        "x0": [[0.6, 0.1, 0.0], [0.1, 0.4, 0.05], [0.0, 0.05, 0.25]],
        "y0": [0.2, -0.1, 0.05],
        "horizon": 1.0,
        "queries": [
            {"v1": [0.8, 0.3, -0.2], "u2": _diag(0.0, 0.0, 0.0), "t": 1.0},
            {"v1": [0.2, 0.0, 0.4], "u2": _diag(0.3, 0.2, 0.1), "t": 0.8},
            {"v1": [0.0, 0.0, 0.0], "u2": _diag(0.4, 0.4, 0.4), "t": 1.0},
        ],
        "moment_dirs": [_diag(1.0, 1.0, 1.0)],
        "riccati": {"dt": 0.001},
        "sim": {"dt": 0.02, "n_paths": 30000, "seed": 53},
    }


_BUILDERS = {
    "yule": _yule,
    "bns": _bns,
    "fixed-onb": _fixed_onb,
    "general-state-dep": _general_state_dep,
}


def preset(name: str) -> dict:
    if name not in _BUILDERS:
        raise KeyError(
            f"unknown scenario {name!r}; shipped: {', '.join(PRESET_NAMES)}"
        )
    return _BUILDERS[name]()
