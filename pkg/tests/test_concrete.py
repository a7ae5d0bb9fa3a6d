import itertools

import pytest
from hypothesis import given, strategies as st

from dcrel.basecat import CategoryError
from dcrel.concrete import CHAIN2, CODISC2, DISC2, EMPTY, POINT, FinPreord, FinPreordObj, FinSet
from dcrel.limits import is_coequalizer_of, kernel_pair

S = FinSet(3)


def fs(n):
    return S.obj(n)


def all_functions(n, k):
    return [list(t) for t in itertools.product(range(k), repeat=n)]


def test_hom_sizes_finset():
    assert len(S.hom(fs(2), fs(2))) == 4
    assert len(S.hom(fs(0), fs(2))) == 1
    assert len(S.hom(fs(2), fs(0))) == 0
    assert len(S.hom(fs(3), fs(2))) == 8


def test_hom_chain_to_discrete_is_the_two_constants():
    P = FinPreord()
    homs = P.hom(CHAIN2, DISC2)
    assert sorted(h.table for h in homs) == [(0, 0), (1, 1)]


def test_monotone_count_matches_brute_force():
    P = FinPreord()
    for a, b in itertools.product(P.objects(), repeat=2):
        brute = [t for t in all_functions(a.size, b.size)
                 if all((t[i], t[j]) in b.leq for (i, j) in a.leq)]
        assert len(P.hom(a, b)) == len(brute)


def test_constant_map_epi_not_mono():
    f = S.map(fs(2), fs(1), [0, 0])
    assert S.is_epi(f) and not S.is_mono(f)


def test_bijection_disc_to_chain():
    P = FinPreord()
    m = P.map(DISC2, CHAIN2, [0, 1])
    assert P.is_mono(m) and P.is_epi(m) and not P.is_iso(m)
    assert not P.is_embedding(m)
    assert not P.is_regular_epi(m)
    # the oracle agrees: m is not the coequalizer of its kernel pair
    k = kernel_pair(P, m)
    assert not is_coequalizer_of(P, m, *k.legs, probes=P.objects())


def test_non_monotone_map_rejected():
    P = FinPreord()
    with pytest.raises(CategoryError):
        P.map(CHAIN2, CHAIN2, [1, 0])


def test_compose_swap_twice_is_identity():
    swap = S.map(fs(2), fs(2), [1, 0])
    assert S.compose(swap, swap) == S.identity(fs(2))


def test_map_to_singleton_is_unique():
    f = S.map(fs(2), fs(1), [0, 0])
    assert S.hom(fs(2), fs(1)) == [f]
    assert S.terminal_map(fs(2)) == f


def test_products_and_kernel_pairs():
    assert S.product(fs(2), fs(3)).apex.size == 6
    c = S.map(fs(2), fs(1), [0, 0])
    kp = S.pullback(c, c)
    assert kp.apex.size == 4
    assert kernel_pair(S, c).apex.size == 4


def test_preorder_product_order():
    P = FinPreord()
    prod = P.product(CHAIN2, CHAIN2).apex
    assert prod.size == 4
    assert len(prod.leq) == 9


def test_regular_epis_finset():
    f = S.map(fs(2), fs(1), [0, 0])
    assert S.is_regular_epi(f)
    g = S.map(fs(3), fs(2), [0, 1, 1])
    assert is_coequalizer_of(S, g, *kernel_pair(S, g).legs, probes=[fs(k) for k in range(4)])


def test_isos_regular():
    P = FinPreord()
    for a in P.objects():
        assert P.is_regular_epi(P.identity(a))


def test_preorder_validation():
    with pytest.raises(CategoryError):
        FinPreordObj(2, frozenset({(0, 0)}))
    with pytest.raises(CategoryError):
        FinPreordObj(3, frozenset({(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)}))
    assert {repr(o) for o in FinPreord().objects()} == {"empty", "point", "disc2", "chain2", "codisc2"}
    assert EMPTY.size == 0 and POINT.size == 1 and len(CODISC2.leq) == 4


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_finset_composition_is_function_composition(a, b, c, data):
    if (a and not b) or (b and not c):
        return
    f = S.map(fs(a), fs(b), data.draw(st.lists(st.integers(0, max(b - 1, 0)), min_size=a, max_size=a)))
    g = S.map(fs(b), fs(c), data.draw(st.lists(st.integers(0, max(c - 1, 0)), min_size=b, max_size=b)))
    assert S.compose(f, g).table == tuple(g.table[x] for x in f.table)


@given(st.sampled_from(range(5)), st.sampled_from(range(5)))
def test_mono_iff_injective_in_preord(i, j):
    P = FinPreord()
    a, b = P.objects()[i], P.objects()[j]
    for f in P.hom(a, b):
        assert P.is_mono(f) == (len(set(f.table)) == len(f.table))
        assert P.is_epi(f) == (set(f.table) == set(range(b.size)))
