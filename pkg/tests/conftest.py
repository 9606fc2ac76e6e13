import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from rainbowfact.factorgen import canonical_one_factorization, random_relabelled
from rainbowfact.switching import jm_square_walk

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_factorization(n: int, seed: int, steps: int = 30):
    rng = random.Random(seed)
    g = random_relabelled(canonical_one_factorization(n), rng)
    return jm_square_walk(g, steps, rng).graph if n >= 4 else g


@st.composite
def factorizations(draw, sizes=(4, 6, 8, 10)):
    n = draw(st.sampled_from(sizes))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_factorization(n, seed)


@pytest.fixture
def rng():
    return random.Random(12345)


def twist_setting(seed: int, n: int = 20, k: int = 8, steps: int = 200):
    """A strict graph on ``k + 1`` colours of a random factorization with ``x``, ``c`` and ``D``.

    Twists need fifteen vertices and plenty of room around them, so these
    instances live at ``n`` around twenty.
    """
    from rainbowfact.graph import ColourPartition, restrict

    rng = random.Random(seed)
    g = random_factorization(n, seed, steps)
    cols = rng.sample(list(g.colours), k + 1)
    h = restrict(g, cols)
    c = cols[0]
    part = ColourPartition.equitable(cols[1:])
    x = rng.randrange(n)
    return h, x, c, part


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
