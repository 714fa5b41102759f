import math

import numpy as np
import pytest

from overlaplab.models import Coupling, Family, ModelSpec, PhaseState
from overlaplab.trig import TrigSum

# registry for acceptance pass/fail lines (one per criterion)
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str):
    ACCEPTANCE_RESULTS[number] = (bool(ok), detail)
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance {number}] {status}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")


@pytest.fixture(scope="session")
def forcing():
    return TrigSum.default()


@pytest.fixture(scope="session")
def torus_fig_spec(forcing):
    """The reproduction setup: doubly periodic family, bare mu forcing."""
    return ModelSpec(Family.TORUS, 0.99, 0.1, forcing, Coupling.MU_ONLY)


def torus_spec(eps, mu=0.0, f=None, coupling=Coupling.MU_ONLY):
    return ModelSpec(Family.TORUS, eps, mu, f or TrigSum.default(), coupling)


def cubic_spec(eps, mu=0.0, f=None, coupling=Coupling.MU_ONLY):
    return ModelSpec(Family.CUBIC, eps, mu, f or TrigSum.default(), coupling)
