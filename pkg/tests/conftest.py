import sys

import pytest
from hypothesis import settings

from amplikit.cells import StepTuple, parse_recipe
from amplikit.chords import ChordDiagram

settings.register_profile("amplikit", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("amplikit")


def cd_example() -> ChordDiagram:
    """Six chords on fifteen markers; the running example for domino data."""
    return ChordDiagram(range(1, 16), [(3, 4, 5, 6), (5, 6, 8, 9), (1, 2, 8, 9),
                                       (10, 11, 12, 13), (9, 10, 12, 13), (8, 9, 13, 14)])


def example_recipe(final_cyc: int = 0, final_refl: int = 0):
    """Four product steps on twelve markers, with pre, cyc and refl in between."""
    S = StepTuple
    steps = [S((3, 4, 5, 6, 12), frozenset({2})),
             S((1, 2, 5, 6, 12), frozenset(), 2, 1),
             S((6, 7, 8, 9, 11), frozenset({10, 12})),
             S((5, 6, 10, 11, 12), frozenset(), final_cyc, final_refl)]
    return parse_recipe(range(1, 13), steps)


@pytest.fixture
def cd():
    return cd_example()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
