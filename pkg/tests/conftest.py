from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hypermatch.hypergraph import build_hypergraph  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def hypergraphs(draw, max_n=12, max_m=14, ds=(2, 3, 4)):
    """Small d-uniform hypergraphs with distinct edges."""
    d = draw(st.sampled_from(ds))
    n = draw(st.integers(d, max_n))
    edge = st.lists(st.integers(0, n - 1), min_size=d, max_size=d, unique=True).map(
        lambda e: tuple(sorted(e)))
    edges = draw(st.lists(edge, max_size=max_m, unique=True))
    return build_hypergraph(n, d, edges)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
