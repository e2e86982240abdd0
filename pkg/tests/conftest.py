import time
import warnings

import pytest

from conelike.assembly import assemble_film
from conelike.developing import build_zeta
from conelike.tetra import TetraParams
from conelike.weierstrass import MeshQualityWarning, build_fundamental_mesh, weierstrass_data

CANONICAL = {
    "ThetaPlus": (0.3, 0.3),
    "ThetaMinus": (0.6, 0.6),
    "C2Plus": (0.2, 0.85),
    "C2Minus": (0.85, 0.2),
    "C4": (0.66, 0.66),
}

_CACHE = {}


class Built:
    """Everything the pipeline produces for one parameter point, with wall-clock timings."""

    def __init__(self, s, t, resolution=64):
        self.params = TetraParams(s, t)
        t0 = time.perf_counter()
        self.zeta = build_zeta(self.params)
        t1 = time.perf_counter()
        self.W = weierstrass_data(self.zeta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MeshQualityWarning)
            self.patch = build_fundamental_mesh(self.W, resolution)
        self.film = assemble_film(self.params, self.patch)
        t2 = time.perf_counter()
        self.zeta_seconds = t1 - t0
        self.seconds = t2 - t0


def built(s, t, resolution=64) -> Built:
    key = (s, t, resolution)
    if key not in _CACHE:
        _CACHE[key] = Built(s, t, resolution)
    return _CACHE[key]


@pytest.fixture(scope="session")
def theta_plus():
    return built(*CANONICAL["ThetaPlus"])


@pytest.fixture(scope="session")
def theta_minus():
    return built(*CANONICAL["ThetaMinus"])


@pytest.fixture(scope="session")
def c4():
    return built(*CANONICAL["C4"])


@pytest.fixture(scope="session")
def c2_plus():
    return built(*CANONICAL["C2Plus"])


@pytest.fixture(scope="session")
def c2_minus():
    return built(*CANONICAL["C2Minus"])


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def record(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE.append((number, ok, detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
