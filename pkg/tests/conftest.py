import pytest
from hypothesis import settings

from tessella.geom.plane import Isometry, Point, UnitRotation
from tessella.rules import Child, InflationRule, builtin

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def mirrored_pinwheel():
    """Pinwheel with a single prototile: left-handed children become reflected poses."""
    pw = builtin("pinwheel")
    flip = Isometry(UnitRotation(Point(1, 0), True), Point(0, 0))
    kids = [Child(0, c.pose if c.type == 0 else c.pose @ flip) for c in pw.children[0]]
    return InflationRule([pw.prototiles[0]], pw.lam, [kids], radicand=5,
                         expansion=pw.expansion, name="pinwheel-mirror")


@pytest.fixture(scope="session")
def pinwheel():
    return builtin("pinwheel")


@pytest.fixture(scope="session")
def square():
    return builtin("square")


@pytest.fixture(scope="session")
def mirror():
    return mirrored_pinwheel()


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call" and "test_criterion_" in rep.nodeid:
                name = rep.nodeid.split("test_criterion_")[1]
                lines.append(f"criterion {name[:2]}: {'PASS' if rep.passed else 'FAIL'}  ({name[3:]})")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
