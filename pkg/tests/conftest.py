import itertools

import pytest

from implinet import BitString


def all_strings(n):
    return [BitString.from_bits(bits) for bits in itertools.product((0, 1), repeat=n)]


def implies_by_index(a, c):
    """Reference order: every position compared separately."""
    assert a.width == c.width
    return all(a[i] <= c[i] for i in range(1, a.width + 1))


@pytest.fixture
def bs():
    return BitString.parse


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
