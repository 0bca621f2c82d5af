import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from cartan_ribbons.assembly import assemble  # noqa: E402
from cartan_ribbons.curves import ellipsoid_u_curve, torus_unknot  # noqa: E402
from cartan_ribbons.ribbon import build_ribbon  # noqa: E402
from cartan_ribbons.surface import builtin_surface  # noqa: E402
from cartan_ribbons.topology import detect_vertices, develop_all, gauss_bonnet_audit  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
ELLIPSOID = (5.0, 4.0, 1.0)
# curvature lines v = 1 + 3 sin^2(theta) cross the equator at equally spaced points
ELLIPSOID_V = tuple(1 + 3 * np.sin(np.radians(a)) ** 2 for a in (15, 45, 75))


@pytest.fixture(scope="session")
def torus():
    return builtin_surface("torus")


@pytest.fixture(scope="session")
def torus_curves(torus):
    return [torus_unknot(torus, 3, 1, 0.0, name="gamma1"),
            torus_unknot(torus, 3, 1, np.pi / 3, name="gamma2")]


@pytest.fixture(scope="session")
def ellipsoid_curves():
    return [ellipsoid_u_curve(ELLIPSOID, v, lower=low) for low in (False, True) for v in ELLIPSOID_V]


class Scene:
    def __init__(self, ribbons):
        self.provisional = ribbons
        self.rz = assemble(ribbons)
        self.graph = detect_vertices(self.rz)
        self.planar = develop_all(self.rz)
        self.audit = gauss_bonnet_audit(self.rz, self.graph, self.planar)


@pytest.fixture(scope="session")
def torus_scene(torus_curves):
    return Scene([build_ribbon(c, 2048, w_max=3.0) for c in torus_curves])


@pytest.fixture(scope="session")
def ellipsoid_scene(ellipsoid_curves):
    return Scene([build_ribbon(c, 2048, w_max=3.0) for c in ellipsoid_curves])


# fixed example streams so the suite output is reproducible
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    results = getattr(acc, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(results, key=lambda k: (int(str(k)[:2].rstrip("abcdefghijklmnopqrstuvwxyz")), str(k)))
    for key in order:
        ok, title, detail = results[key]
        terminalreporter.write_line(f"criterion {key:<11} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
