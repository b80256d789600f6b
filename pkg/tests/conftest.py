"""Shared fixtures, hypothesis strategies, and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_FINITE = st.floats(
    min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False
)


@st.composite
def sym_matrices(draw, dim: int | None = None, scale: float = 5.0):
    d = dim if dim is not None else draw(st.integers(min_value=1, max_value=4))
    entries = draw(
        st.lists(
            st.floats(
                min_value=-scale, max_value=scale, allow_nan=False, allow_infinity=False
            ),
            min_size=d * d,
            max_size=d * d,
        )
    )
    a = np.array(entries).reshape(d, d)
    return 0.5 * (a + a.T)


@st.composite
def psd_matrices(draw, dim: int | None = None, scale: float = 2.0):
    d = dim if dim is not None else draw(st.integers(min_value=1, max_value=4))
    entries = draw(
        st.lists(
            st.floats(
                min_value=-scale, max_value=scale, allow_nan=False, allow_infinity=False
            ),
            min_size=d * d,
            max_size=d * d,
        )
    )
    a = np.array(entries).reshape(d, d)
    return a @ a.T


@st.composite
def vectors(draw, dim: int | None = None, scale: float = 5.0):
    d = dim if dim is not None else draw(st.integers(min_value=1, max_value=4))
    entries = draw(
        st.lists(
            st.floats(
                min_value=-scale, max_value=scale, allow_nan=False, allow_infinity=False
            ),
            min_size=d,
            max_size=d,
        )
    )
    return np.array(entries)


@pytest.fixture(scope="session")
def scenarios():
    from affinesv.presets import PRESET_NAMES, preset
    from affinesv.serialize import scenario_from_dict

    return {name: scenario_from_dict(preset(name)) for name in PRESET_NAMES}


ACCEPTANCE_LABELS = {
    "test_c01_laplace_oracle": "01 pure-jump Laplace oracle: solver vs exact, MC within 3 SE, under 60 s",
    "test_c02_mean_oracle": "02 first-moment oracle: MC mean of <X_1, e11> equals e within 3 SE",
    "test_c03_gaussian_cf": "03 Gaussian characteristic function: formula, closed form, solver, MC agree",
    "test_c04_cone_preservation": "04 cone preservation: psi2 grids and simulated states >= -1e-8",
    "test_c05_truncation_ladder": "05 truncation ladder: psi2 non-increasing in the cone order",
    "test_c06_semiflow": "06 semiflow identity at (s, t) = (0.3, 0.7) within 1e-6",
    "test_c07_yosida_convergence": "07 resolvent approximation: psi discrepancy monotone, < 1e-3 at n = 64",
    "test_c08_noise_model_equivalence": "08 Q-form vs D-form: identical transforms, matching path laws",
    "test_c09_thinning_exponential": "09 thinning: inter-jump times exponential (KS at 1%)",
    "test_c10_deterministic_reports": "10 determinism: repeated verify runs are byte-identical",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    status_of = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}
    seen: dict[str, str] = {}
    for cat, tag in status_of.items():
        for rep in terminalreporter.stats.get(cat, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            base = nodeid.split("::")[-1].split("[")[0]
            if base not in ACCEPTANCE_LABELS:
                continue
            if seen.get(base) != "FAIL":
                seen[base] = tag
    if not seen:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for base, label in ACCEPTANCE_LABELS.items():
        if base in seen:
            terminalreporter.write_line(f"[{seen[base]}] {label}")
