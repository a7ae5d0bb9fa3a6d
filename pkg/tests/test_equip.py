import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import relation
from dcrel import equip
from dcrel.equip import (all_cells, bar, check_companion_equations, check_double_laws_exhaustive, check_triangles, comma_failure, companion,
                         conjoint, dagger, dagger_swap, extend, is_cartesian, is_opcartesian, is_tabulating,
                         local_product, local_product_direct, local_terminal, modular_failure, restrict,
                         tabulator, tilt_bijection_failure, tilt_cell, untilt_cell)
from dcrel.presets import get_preset


def fs(D, n):
    return D.base.obj(n)


def graph(f):
    return sorted((x, f.table[x]) for x in range(f.dom.size))


def test_companion_of_identity_is_unit(rel_finset):
    D = rel_finset
    for a in D.carriers:
        i = D.base.identity(a)
        assert companion(D, i) == D.unit(a) == conjoint(D, i)


def test_companion_is_graph(rel_finset):
    D = rel_finset
    c = D.base
    f = c.map(fs(D, 2), fs(D, 1), [0, 0])
    assert sorted(companion(D, f).pairs()) == [(0, 0), (1, 0)]
    for a, b in itertools.product(D.carriers, repeat=2):
        for f in c.hom(a, b):
            assert sorted(companion(D, f).pairs()) == graph(f)
            assert sorted(conjoint(D, f).pairs()) == sorted((y, x) for x, y in graph(f))


def test_companion_equations_and_triangles(rel_finset, rel_span):
    for D in (rel_finset, rel_span):
        c = D.base
        for a, b in itertools.product(D.carriers, repeat=2):
            for f in c.hom(a, b):
                assert check_companion_equations(D, f) is None
                assert check_triangles(D, f) is None


def test_restrict_along_identities(rel_finset):
    D = rel_finset
    c = D.base
    for p in D.all_relations()[:20]:
        rel, cell = restrict(D, p, c.identity(p.src), c.identity(p.tgt))
        assert rel == p and D.is_identity_cell(cell)


def test_restrict_full_relation(rel_finset):
    D = rel_finset
    c = D.base
    two, one = fs(D, 2), fs(D, 1)
    full = relation(D, two, two, itertools.product(range(2), repeat=2))
    f = c.map(one, two, [0])
    g = c.map(one, two, [1])
    rel, cell = restrict(D, full, f, g)
    assert rel.pairs() == [(0, 0)]
    assert is_cartesian(D, cell, oracle=True).agree


def test_extend_along_identities(rel_finset):
    D = rel_finset
    c = D.base
    for q in D.all_relations()[:20]:
        rel, cell = extend(D, q, c.identity(q.src), c.identity(q.tgt))
        assert rel == q and D.base.is_iso(cell.alpha)


def test_extend_diagonal_to_point(rel_finset):
    D = rel_finset
    c = D.base
    two = fs(D, 2)
    bang = D.terminal_map(two)
    rel, cell = extend(D, D.unit(two), bang, bang)
    assert rel.pairs() == [(0, 0)]
    assert cell.alpha.table == (0, 0)
    v = is_opcartesian(D, cell, oracle=True)
    assert v.structural and v.oracle


def test_recognition_examples(rel_finset):
    D = rel_finset
    c = D.base
    two = fs(D, 2)
    for r in D.hom(two, two):
        v1, v2 = is_cartesian(D, D.identity_cell(r), oracle=True), is_opcartesian(D, D.identity_cell(r), oracle=True)
        assert v1.structural and v1.oracle and v2.structural and v2.oracle
    small = relation(D, two, two, [(0, 0)])
    big = relation(D, two, two, [(0, 0), (1, 1)])
    (cell,) = D.cells(small, big, c.identity(two), c.identity(two))
    a, b = is_cartesian(D, cell, oracle=True), is_opcartesian(D, cell, oracle=True)
    assert (a.structural, a.oracle, b.structural, b.oracle) == (False, False, False, False)


def test_tabulators(rel_finset):
    D = rel_finset
    c = D.base
    two = fs(D, 2)
    apex, l, r, cell = tabulator(D, D.unit(two))
    assert apex == two and l == r == c.identity(two)
    for a in D.carriers:
        bang_rel = companion(D, D.terminal_map(a))
        apex, l, r, cell = tabulator(D, bang_rel)
        assert apex == a and l == c.identity(a) and r == D.terminal_map(a)
        assert is_tabulating(D, cell)
    full = relation(D, two, two, itertools.product(range(2), repeat=2))
    assert tabulator(D, full)[0].size == 4


def test_local_products(rel_finset):
    D = rel_finset
    two = fs(D, 2)
    p = relation(D, two, two, [(0, 0)])
    q = relation(D, two, two, [(0, 0), (1, 1)])
    assert local_product(D, p, q).pairs() == [(0, 0)]
    assert sorted(local_terminal(D, two, two).pairs()) == list(itertools.product(range(2), repeat=2))


def test_local_product_is_intersection(rel_finset):
    D = rel_finset
    for a, b in itertools.product(D.carriers, repeat=2):
        rels = D.hom(a, b)
        for p, q in itertools.product(rels, repeat=2):
            got = local_product(D, p, q)
            assert sorted(got.pairs()) == sorted(set(p.pairs()) & set(q.pairs()))
            assert got == local_product_direct(D, p, q)


def test_dagger_is_converse(rel_finset, rel_span):
    for D in (rel_finset, rel_span):
        for p in D.all_relations():
            d = dagger(D, p)
            assert d == dagger_swap(D, p)
            assert dagger(D, d) == p
    D = rel_finset
    for p in D.all_relations():
        assert sorted(dagger(D, p).pairs()) == sorted((b, a) for a, b in p.pairs())


def test_dagger_of_companion_is_conjoint(rel_finset):
    D = rel_finset
    c = D.base
    for a, b in itertools.product(D.carriers, repeat=2):
        for f in c.hom(a, b):
            assert dagger(D, companion(D, f)) == conjoint(D, f)


def test_bar_pairs(rel_finset):
    D = rel_finset
    two = fs(D, 2)
    p = relation(D, two, two, [(0, 1)])
    pb = bar(D, p)
    assert pb.tgt == D.one and len(pb.pairs()) == 1


def test_tilt_round_trip(rel_finset):
    D = rel_finset
    c = D.base
    for a in D.carriers:
        ua = D.unit(a)
        cell = D.identity_cell(ua)
        t = tilt_cell(D, cell)
        assert untilt_cell(D, t, ua) == cell
        for p in D.all_relations():
            assert tilt_bijection_failure(D, a, p) is None


def test_modular_law_and_comma(rel_finset):
    D = rel_finset
    c = D.base
    two = fs(D, 2)
    for f in c.hom(two, two):
        for r in D.hom(two, two)[::3]:
            for s in D.hom(two, two)[::3]:
                assert modular_failure(D, f, r, s) is None
    for a, b in itertools.product(D.carriers, repeat=2):
        for f in c.hom(a, two):
            for g in c.hom(b, two):
                assert comma_failure(D, f, g) is None


def test_structural_recognition_matches_oracle_span(rel_span):
    D = rel_span
    one = fs(D, 1)
    rels = D.hom(one, one)
    for cell in all_cells(D, rels):
        assert is_cartesian(D, cell, oracle=True).agree
        assert is_opcartesian(D, cell, oracle=True).agree


@given(st.data())
def test_dagger_involution_property(rel_preord, data):
    D = rel_preord
    p = data.draw(st.sampled_from(D.all_relations()))
    assert dagger(D, dagger(D, p)) == p


@pytest.fixture
def rel_chain3():
    return get_preset("chain3").build()


def test_exhaustive_laws_on_thin_frames(rel_chain3):
    rep = check_double_laws_exhaustive(rel_chain3)
    assert rep.holds
    assert rep.details["horizontal_pairs"] > 0 and rep.details["vertical_pairs"] > 0


def test_exhaustive_laws_skip_when_a_frame_has_two_cells(rel_span):
    rep = check_double_laws_exhaustive(rel_span)
    assert rep.verdict == "skipped"
    a, b = rep.witness
    assert (a.top, a.bottom, a.f, a.g) == (b.top, b.bottom, b.f, b.g) and a != b


def test_exhaustive_laws_catch_a_missing_composite(rel_chain3, monkeypatch):
    D = rel_chain3
    honest = equip.all_cells
    cells = honest(D)
    # drop one identity cell; composing it with itself must land on its frame
    victim = next(x for x in cells if x == D.identity_cell(x.top))
    monkeypatch.setattr(equip, "all_cells", lambda D, rels=None: [x for x in honest(D, rels) if x != victim])
    rep = check_double_laws_exhaustive(D)
    assert rep.fails and "composite frame has no cell" in rep.witness[0]
