from __future__ import annotations

import pytest

from fctp.model import new_instance, root_tree


@pytest.fixture
def star():
    """Center 1 (b=3) with leaves 2 and 3 (b=2), p=-1, q=1 on both arcs."""
    inst = new_instance([3, 2, 2], [(1, 2), (1, 3)], [-1, -1], [1, 1])
    return root_tree(inst)


@pytest.fixture
def single_arc():
    inst = new_instance([2, 2], [(1, 2)], [-1], [1])
    return root_tree(inst)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record an acceptance line; all lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def emit(line: str) -> None:
        lines.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
