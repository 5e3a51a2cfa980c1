import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from affmodel.polyalg import QQ, polynomial_ring

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def monomials(n, max_deg=3):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple).filter(lambda m: sum(m) <= max_deg)


@st.composite
def polys(draw, ring, max_deg=3, max_terms=4, scale=5, nonzero=False):
    terms = draw(st.dictionaries(monomials(ring.ngens, max_deg), st.integers(-scale, scale),
                                 min_size=1 if nonzero else 0, max_size=max_terms))
    f = ring.from_terms(terms)
    if nonzero and not f:
        f = ring.one
    return f


def ring3(field=QQ, order=None):
    if order is None:
        return polynomial_ring("x y z", field)
    return polynomial_ring("x y z", field, order)


# one pass/fail line per acceptance criterion, filled in by test_acceptance
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, secs, title, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'} {secs:8.2f}s  {title}"
                                    + (f"  [{detail}]" if detail and not ok else ""))
