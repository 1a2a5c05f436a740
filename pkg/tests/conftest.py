import pytest

from eqasm.assembler import assemble
from eqasm.isa import default_config
from eqasm.sim import Simulator


@pytest.fixture(scope="session")
def cfg():
    return default_config()


def simulate(text, config=None, **kwargs):
    """Assemble and run; returns the simulator (trace in ``sim.trace``)."""
    config = config or default_config()
    program, _ = assemble(text, config)
    strict = kwargs.pop("strict", True)
    sim = Simulator.from_program(config, program, **kwargs)
    sim.run(strict=strict)
    return sim


@pytest.fixture
def run():
    return simulate


_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, [title, True])
    entry[1] = entry[1] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}")
