import itertools

from hypothesis import given, strategies as st

from dcrel.concrete import FinPreord, FinSet
from dcrel.limits import Cone, competing_cones, is_limit_cone, limit_comparison, limit_failure, search_limit

S = FinSet(2)
PROBES = [S.obj(n) for n in range(5)]


def test_concrete_cones_are_limits():
    for a, b in itertools.product(S.objects(), repeat=2):
        assert is_limit_cone(S, S.product(a, b), PROBES)
        for f in S.hom(a, S.obj(2)):
            for g in S.hom(b, S.obj(2)):
                assert is_limit_cone(S, S.pullback(f, g), PROBES)
    assert is_limit_cone(S, S.terminal(), PROBES)


def test_fake_product_fails_with_counter_cone():
    two, three = S.obj(2), S.obj(3)
    diagram = ("product", two, two)
    for legs in itertools.product(S.hom(three, two), repeat=2):
        assert limit_failure(S, Cone(three, legs, diagram), PROBES) is not None


def test_search_agrees_with_construction():
    cone = S.product(S.obj(1), S.obj(2))
    found = search_limit(S, ("product", S.obj(1), S.obj(2)), candidates=PROBES)
    assert found.apex.size == 2
    assert limit_comparison(S, cone, found) is not None


def test_preorder_pullbacks_are_limits():
    P = FinPreord()
    objs = P.objects()
    for a, b, c in itertools.product(objs, repeat=3):
        for f in P.hom(a, c):
            for g in P.hom(b, c):
                assert is_limit_cone(P, P.pullback(f, g), objs)


def test_kernel_pair_of_identity():
    one = S.obj(2)
    kp = S.pullback(S.identity(one), S.identity(one))
    assert kp.apex == one
    assert all(leg == S.identity(one) for leg in kp.legs)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=2), st.lists(st.integers(0, 1), min_size=2, max_size=2))
def test_pullback_counts_match_set_comprehension(t1, t2):
    f = S.map(S.obj(2), S.obj(2), t1)
    g = S.map(S.obj(2), S.obj(2), t2)
    expected = [(x, y) for x in range(2) for y in range(2) if t1[x] == t2[y]]
    cone = S.pullback(f, g)
    assert cone.apex.size == len(expected)
    assert sorted(zip(cone.legs[0].table, cone.legs[1].table)) == expected
    assert len(competing_cones(S, ("pullback", f, g), S.obj(1))) == len(expected)
