import json
import pathlib
import sys

import pytest

from cylwave.model import Coaxial, Hollow, Medium, ModeSpec, solve_mode

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))  # makes the oracles module importable

VACUUM = Medium.from_relative(1.0, 1.0)


def make_mode(family, n=0, m=1, ratio=2.0, a=1e-3, L=5e-3, l=1, theta0=0.3, phi0=0.2, medium=VACUUM):
    """Solved mode; ratio=None gives a hollow guide of radius a."""
    geo = Hollow(a) if ratio is None else Coaxial(a, ratio * a)
    spec = ModeSpec("TEM", theta0=theta0, phi0=phi0) if family == "TEM" else \
        ModeSpec(family, n, m, theta0=theta0, phi0=phi0)
    return solve_mode(spec, geo, medium, L, l)


@pytest.fixture(scope="session")
def oracle_roots():
    return json.loads((HERE / "data" / "oracle_roots.json").read_text())


# a representative mode for every formula branch
BRANCHES = [
    ("TEM", 0, 1, 2.0),
    ("TM", 0, 1, 2.0), ("TM", 1, 2, 1.2), ("TM", 2, 1, 5.0),
    ("TE", 0, 1, 2.0), ("TE", 1, 1, 2.0), ("TE", 2, 2, 5.0),
    ("TM", 0, 1, None), ("TM", 2, 2, None),
    ("TE", 0, 1, None), ("TE", 1, 2, None),
]


def branch_id(b):
    fam, n, m, ratio = b
    geo = "hollow" if ratio is None else f"coax{ratio:g}"
    return fam if fam == "TEM" else f"{fam}{n},{m}-{geo}"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
