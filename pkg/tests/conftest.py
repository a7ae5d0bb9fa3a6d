import pytest
from hypothesis import HealthCheck, settings

from dcrel.concrete import FinPreord, FinSet
from dcrel.factsys import make_system
from dcrel.reldbl import RelDouble

settings.register_profile("dcrel", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dcrel")


def rel_double(cat, e, m):
    return RelDouble(cat, make_system(cat, e, m))


@pytest.fixture(scope="session")
def finset():
    return FinSet(2)


@pytest.fixture(scope="session")
def preord():
    return FinPreord()


@pytest.fixture(scope="session")
def rel_finset(finset):
    return rel_double(finset, "epi", "mono")


@pytest.fixture(scope="session")
def rel_span():
    return rel_double(FinSet(2), "iso", "all")


@pytest.fixture(scope="session")
def rel_alliso():
    return rel_double(FinSet(2), "all", "iso")


@pytest.fixture(scope="session")
def rel_preord():
    return rel_double(FinPreord(), "surj", "embedding")


def relation(D, a, b, pairs):
    """The relation of ``D.hom(a, b)`` with exactly the given element pairs."""
    want = sorted(set(pairs))
    found = [r for r in D.hom(a, b) if sorted(set(r.pairs())) == want and len(r.pairs()) == len(want)]
    assert len(found) == 1, (pairs, found)
    return found[0]
