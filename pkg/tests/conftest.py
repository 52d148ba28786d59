import time

import numpy as np
import pytest

from storagecode.code import CodeSpace, connection_set_from_element

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

_SPACES: dict[tuple, tuple[CodeSpace, float]] = {}


def code_space(instance) -> tuple[CodeSpace, float]:
    """Reduced echelon form of H for a family instance, built once per session.

    Returns the space and the wall time of the original build.
    """
    key = (instance.family, instance.r, instance.k)
    if key not in _SPACES:
        conn = connection_set_from_element(instance.element)
        t0 = time.perf_counter()
        space = CodeSpace.build(conn)
        _SPACES[key] = (space, time.perf_counter() - t0)
    return _SPACES[key]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
