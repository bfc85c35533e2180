import pytest

from bdgkit.profile import solve_phi

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def profile():
    return solve_phi(512)


@pytest.fixture(scope="session")
def field20(profile):
    from bdgkit.graph_solver import solve_dirichlet
    return solve_dirichlet(20.0, profile, nr=100, ntheta=100)


@pytest.fixture(scope="session")
def record():
    def _record(ac: int, ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"AC{ac:<2d} {'PASS' if ok else 'FAIL'}  {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[2:4])):
            terminalreporter.write_line(line)
