"""Scenario schema, JSON/CSV emission, and deterministic report encoding.

A scenario file bundles everything one run needs: parameters, noise wiring,
curve generator, initial states, transform queries, moment-check directions
and solver/simulation settings. Reports are emitted with sorted keys, no
timestamps, and repr-faithful floats, so a fixed seed reproduces a report
byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .jumpmeasure import Atom, JumpMeasureSpec, VectorAtom
from .params import AdmissibleParams, BOperator, NoiseSpec, RayTerm
from .riccati import RiccatiSolution
from .semigroup import GeneratorSpec
from .symcone import HVector, PsdMatrix
from .transform import TransformQuery


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    dim: int
    params: AdmissibleParams
    noise: NoiseSpec
    gen: GeneratorSpec
    x0: PsdMatrix
    y0: HVector
    horizon: float
    queries: tuple[TransformQuery, ...]
    moment_dirs: tuple[np.ndarray, ...]
    riccati_dt: float
    sim_dt: float
    n_paths: int
    seed: int


def _mat(obj, name: str) -> np.ndarray:
    m = np.asarray(obj, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    return m


def _b_operator_from(d: int, obj: dict) -> BOperator:
    kind = obj.get("kind")
    terms = tuple(
        RayTerm(
            z=_mat(t["z"], "ray term z"),
            g=_mat(t["g"], "ray term g"),
            coeff=float(t["coeff"]),
        )
        for t in obj.get("terms", [])
    )
    if kind == "ray":
        return BOperator(dim=d, kind="ray", terms=terms)
    if kind == "sandwich":
        return BOperator(
            dim=d, kind="sandwich", c=_mat(obj["c"], "sandwich factor"), terms=terms
        )
    if kind == "dense":
        return BOperator(
            dim=d, kind="dense", matrix=np.asarray(obj["matrix"], dtype=float)
        )
    raise ValueError(f"unknown drift-operator kind {kind!r}")


def _jumps_from(d: int, obj: dict) -> JumpMeasureSpec:
    m_atoms = tuple(
        Atom(xi=PsdMatrix(_mat(a["xi"], "atom xi")), mass=float(a["mass"]))
        for a in obj.get("m_atoms", [])
    )
    mu_atoms = tuple(
        VectorAtom(
            xi=PsdMatrix(_mat(a["xi"], "atom xi")),
            weight=PsdMatrix(_mat(a["weight"], "atom weight")),
            mass=float(a["mass"]),
        )
        for a in obj.get("mu_atoms", [])
    )
    return JumpMeasureSpec(dim=d, m_atoms=m_atoms, mu_atoms=mu_atoms)


def _gen_from(d: int, obj: dict) -> GeneratorSpec:
    kind = obj.get("kind")
    if kind == "zero":
        return GeneratorSpec(kind="zero", dim=d)
    if kind == "scalar":
        return GeneratorSpec(kind="scalar", dim=d, value=float(obj["value"]))
    if kind == "dense":
        return GeneratorSpec(
            kind="dense", dim=d, matrix=_mat(obj["matrix"], "generator matrix")
        )
    if kind == "shift_grid":
        return GeneratorSpec(
            kind="shift_grid",
            dim=d,
            maturities=np.asarray(obj["maturities"], dtype=float),
        )
    raise ValueError(f"unknown generator kind {kind!r}")


def scenario_from_dict(obj: dict) -> Scenario:
    try:
        d = int(obj["dim"])
        p = obj["params"]
        params = AdmissibleParams(
            dim=d,
            b=PsdMatrix(_mat(p["b"], "drift b")),
            B=_b_operator_from(d, p["B"]),
            jumps=_jumps_from(d, p["jumps"]),
        )
        noise_obj = obj["noise"]
        noise = NoiseSpec(
            mode=noise_obj["mode"],
            matrix=PsdMatrix(_mat(noise_obj["matrix"], "noise matrix")),
        )
        gen = _gen_from(d, obj["gen"])
        queries = tuple(
            TransformQuery(
                v1=HVector(np.asarray(q["v1"], dtype=float)),
                u2=PsdMatrix(_mat(q["u2"], "query u2")),
                t=float(q["t"]),
            )
            for q in obj["queries"]
        )
        sim = obj.get("sim", {})
        return Scenario(
            name=str(obj["name"]),
            dim=d,
            params=params,
            noise=noise,
            gen=gen,
            x0=PsdMatrix(_mat(obj["x0"], "x0")),
            y0=HVector(np.asarray(obj["y0"], dtype=float)),
            horizon=float(obj["horizon"]),
            queries=queries,
            moment_dirs=tuple(
                _mat(m, "moment direction") for m in obj.get("moment_dirs", [])
            ),
            riccati_dt=float(obj.get("riccati", {}).get("dt", 1e-3)),
            sim_dt=float(sim.get("dt", 0.02)),
            n_paths=int(sim.get("n_paths", 10000)),
            seed=int(sim.get("seed", 0)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed scenario config: {exc!r}") from exc


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def _py(obj):
    """Recursively convert numpy scalars/arrays for deterministic JSON."""
    if isinstance(obj, dict):
        return {k: _py(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_py(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _py(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dump_report(obj: dict) -> str:
    """Canonical JSON encoding: sorted keys, stable float repr, no stamps."""
    return json.dumps(_py(obj), sort_keys=True, indent=2) + "\n"


def riccati_csv(sol: RiccatiSolution) -> str:
    """Solution table: time, accumulator, curve profile, cone upper triangle."""
    d_y = sol.psi1.shape[1]
    d_x = sol.psi2.shape[1]
    cols = ["t", "phi"]
    cols += [f"v_{i}" for i in range(d_y)]
    cols += [f"psi2_{i}{j}" for i in range(d_x) for j in range(i, d_x)]
    lines = [",".join(cols)]
    for k in range(sol.grid.shape[0]):
        row = [repr(float(sol.grid[k])), repr(float(sol.phi[k]))]
        row += [repr(float(v)) for v in sol.psi1[k]]
        row += [
            repr(float(sol.psi2[k, i, j]))
            for i in range(d_x)
            for j in range(i, d_x)
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def paths_csv(batch, max_paths: int = 20) -> str:
    """Recorded states, one row per (path, time); truncated path count."""
    m, n, d, _ = batch.x.shape
    n_out = min(n, max_paths)
    cols = ["path", "t"]
    cols += [f"x_{i}{j}" for i in range(d) for j in range(i, d)]
    if batch.y is not None:
        cols += [f"y_{i}" for i in range(batch.y.shape[2])]
    lines = [",".join(cols)]
    for p in range(n_out):
        for k in range(m):
            row = [str(p), repr(float(batch.times[k]))]
            row += [
                repr(float(batch.x[k, p, i, j]))
                for i in range(d)
                for j in range(i, d)
            ]
            if batch.y is not None:
                row += [repr(float(v)) for v in batch.y[k, p]]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def batch_summary(batch) -> dict:
    """Cross-path statistics per recorded time plus jump accounting."""
    m, n, d, _ = batch.x.shape
    per_time = []
    for k in range(m):
        diag = np.stack([batch.x[k, :, i, i] for i in range(d)], axis=1)
        entry = {
            "t": float(batch.times[k]),
            "x_diag_mean": diag.mean(axis=0).tolist(),
            "x_diag_std": diag.std(axis=0, ddof=1).tolist() if n > 1 else [0.0] * d,
        }
        if batch.y is not None:
            entry["y_mean"] = batch.y[k].mean(axis=0).tolist()
            entry["y_std"] = (
                batch.y[k].std(axis=0, ddof=1).tolist() if n > 1 else [0.0] * d
            )
        per_time.append(entry)
    counts = np.bincount(batch.jump_path, minlength=n) if n else np.zeros(0)
    return {
        "n_paths": int(n),
        "per_time": per_time,
        "jumps_total": int(batch.jump_path.shape[0]),
        "jumps_per_path_mean": float(counts.mean()) if n else 0.0,
        "jumps_per_path_max": int(counts.max()) if n else 0,
        "min_eig_floor": float(batch.min_eig_floor),
    }
