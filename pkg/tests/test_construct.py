import itertools

import pytest

from conftest import relation
from dcrel.basecat import CategoryError
from dcrel.concrete import CHAIN2, DISC2
from dcrel.construct import (cauchise, check_cauchy, check_comprehensive_factorisation, check_fin_fib_system,
                             comprehensive_factorise, find_right_adjoint, is_monic_cover, is_representable,
                             maps_theorem_check, revalidate_adjoint, theorem_suite, vertical_isomorphism)
from dcrel.equip import companion, conjoint
from dcrel.factsys import factorise
from dcrel.reldbl import RelDouble
from dcrel.report import FAILS, PropertyReport


def fs(D, n):
    return D.base.obj(n)


def test_factorise_identity(rel_finset):
    D = rel_finset
    c = D.base
    for a in D.carriers:
        e, m, _ = comprehensive_factorise(D, c.identity(a))
        assert c.is_iso(e) and c.is_iso(m)


def test_factorise_one_point_image(rel_finset):
    D = rel_finset
    c = D.base
    f = c.map(c.obj(3), fs(D, 2), [1, 1, 1])
    e, m, _ = comprehensive_factorise(D, f)
    assert e.cod.size == 1 and c.is_epi(e)
    assert m.table == (1,)
    e0, m0 = factorise(c, D.system, f)
    assert (e, m) == (e0, m0)


@pytest.mark.parametrize("fixture", ["rel_finset", "rel_span", "rel_preord"])
def test_factorisation_round_trip(fixture, request):
    D = request.getfixturevalue(fixture)
    assert check_comprehensive_factorisation(D).holds
    assert check_fin_fib_system(D).holds


def test_factorise_refuses_without_scheme(rel_finset):
    D = RelDouble(rel_finset.base, rel_finset.system)
    D.cache["comprehension_left_sided"] = PropertyReport("comprehension_left_sided", FAILS)
    with pytest.raises(CategoryError):
        comprehensive_factorise(D, D.base.identity(fs(D, 1)))


def test_companion_has_right_adjoint(rel_finset):
    D = rel_finset
    c = D.base
    for a, b in itertools.product(D.carriers, repeat=2):
        for f in c.hom(a, b):
            w = find_right_adjoint(D, companion(D, f))
            assert w is not None and w.q == conjoint(D, f)
            assert revalidate_adjoint(D, w)
            assert is_representable(D, companion(D, f)) == f


def test_partial_relation_not_left_adjoint(rel_finset):
    D = rel_finset
    two = fs(D, 2)
    assert find_right_adjoint(D, relation(D, two, two, [(0, 0)])) is None


def test_preord_non_representable_adjoint(rel_preord):
    D = rel_preord
    c = D.base
    m = c.map(DISC2, CHAIN2, [0, 1])
    p = conjoint(D, m)
    w = find_right_adjoint(D, p)
    assert w is not None and w.q == companion(D, m)
    assert revalidate_adjoint(D, w)
    assert is_representable(D, p) is None
    assert w.representing is None
    # no monotone map chain2 -> disc2 at all has that graph
    assert all(companion(D, g) != p for g in c.hom(CHAIN2, DISC2))


def test_cauchy_verdicts(rel_finset, rel_span, rel_preord):
    assert check_cauchy(rel_finset).holds
    assert check_cauchy(rel_span).holds
    rep = check_cauchy(rel_preord)
    assert rep.fails and rep.witness.representing is None
    assert rep.details["agrees_with_anti_right_proper"] is True


def test_maps_theorem(rel_finset, rel_preord):
    assert maps_theorem_check(rel_finset).holds
    assert maps_theorem_check(rel_finset).details["monic_cover_legs_not_iso"] == []
    rep = maps_theorem_check(rel_preord)
    assert rep.holds
    legs = [leg for _, leg in rep.details["monic_cover_legs_not_iso"]]
    assert legs
    c = rel_preord.base
    for leg in legs:
        assert is_monic_cover(rel_preord, leg) and not c.is_iso(leg)


def test_cauchise_refuses_non_unit_pure(rel_alliso):
    with pytest.raises(CategoryError):
        cauchise(rel_alliso)


def test_cauchise_idempotent_finset(rel_finset):
    K = cauchise(rel_finset)
    assert vertical_isomorphism(K, cauchise(K)) is None


def test_suite_alliso(rel_alliso):
    res = theorem_suite(rel_alliso)
    assert res.passed, res.failures
    assert res.observations["unit_pure"] is False and res.observations["left_proper"] is False
