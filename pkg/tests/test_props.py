import itertools

import pytest

from dcrel.props import (bc_diamond, check_bc_pullbacks, check_classes, check_comprehension_scheme,
                         check_discrete, check_local_shape, check_strong_tabulators, check_unit_pure,
                         classify_vertical, is_cover, is_inclusion, probe_arrows, recheck_unit_pure_witness)


def fs(D, n):
    return D.base.obj(n)


def test_unit_pure_verdicts(rel_finset, rel_span, rel_alliso, rel_preord):
    assert check_unit_pure(rel_finset).holds
    assert check_unit_pure(rel_span).holds
    assert check_unit_pure(rel_preord).holds
    rep = check_unit_pure(rel_alliso)
    assert rep.fails
    cell = rep.witness["cell"]
    assert cell.f != cell.g
    assert recheck_unit_pure_witness(rel_alliso, rep.witness)


def test_alliso_cells_between_full_units(rel_alliso):
    # oracle: with full units every pair of arrows carries exactly one cell
    D = rel_alliso
    c = D.base
    two = fs(D, 2)
    for f, g in itertools.product(c.hom(two, two), repeat=2):
        assert len(D.cells(D.unit(two), D.unit(two), f, g)) == 1


def test_local_shape(rel_finset, rel_span, rel_preord):
    for D in (rel_finset, rel_preord):
        shape = check_local_shape(D)
        assert shape["locally_preordered"].holds and shape["locally_posetal"].holds
    shape = check_local_shape(rel_span)
    assert shape["locally_preordered"].fails
    w = shape["locally_preordered"].witness
    assert len(w["cells"]) == 2 and w["cells"][0] != w["cells"][1]
    assert w["cells"][0].frame() == w["cells"][1].frame()


def test_identity_in_every_class(rel_finset, rel_span, rel_preord):
    for D in (rel_finset, rel_span, rel_preord):
        for a in D.carriers:
            assert classify_vertical(D, D.base.identity(a)) == \
                {"cover": True, "inclusion": True, "fibration": True, "final": True}


def test_classes_finset(rel_finset):
    D = rel_finset
    c = D.base
    for f in probe_arrows(D):
        cl = classify_vertical(D, f)
        assert cl["cover"] == cl["final"] == c.is_epi(f)
        assert cl["inclusion"] == cl["fibration"] == c.is_mono(f)


def test_span_covers_are_isos(rel_span):
    # the extension of Id_A along (f, f) is the span (f, f) itself, which is
    # the unit span only when f is invertible
    D = rel_span
    c = D.base
    for f in probe_arrows(D):
        assert is_cover(D, f) == c.is_iso(f)
        assert is_inclusion(D, f) == c.is_mono(f)


@pytest.mark.parametrize("fixture", ["rel_finset", "rel_span", "rel_alliso", "rel_preord"])
def test_class_reports(fixture, request):
    D = request.getfixturevalue(fixture)
    for rep in check_classes(D):
        assert not rep.fails, rep


def test_bc_kernel_pair(rel_finset):
    D = rel_finset
    c = D.base
    f = c.map(fs(D, 2), fs(D, 1), [0, 0])
    kp = c.pullback(f, f)
    ok, cell = bc_diamond(D, kp.legs[0], kp.legs[1], f, f)
    assert ok and c.is_iso(cell.alpha)


def test_bc_rejects_non_pullback(rel_finset):
    # a commuting square [2] -> [2], [2] -> [2] over [1] with identity legs;
    # the pullback of the two maps to [1] has four elements, not two
    D = rel_finset
    c = D.base
    two = fs(D, 2)
    bang = D.terminal_map(two)
    ok, cell = bc_diamond(D, c.identity(two), c.identity(two), bang, bang)
    assert not ok
    assert cell is not None and not c.is_iso(cell.alpha)
    with pytest.raises(ValueError):
        bc_diamond(D, c.identity(two), c.map(two, two, [1, 0]), c.identity(two), c.identity(two))


@pytest.mark.parametrize("fixture", ["rel_finset", "rel_span", "rel_preord"])
def test_structural_properties(fixture, request):
    D = request.getfixturevalue(fixture)
    assert check_bc_pullbacks(D).holds
    assert check_discrete(D).holds
    assert check_strong_tabulators(D).holds
    full = check_comprehension_scheme(D, "full")
    left = check_comprehension_scheme(D, "left_sided")
    assert full.holds and left.holds


def test_terminal_discrete(rel_finset):
    assert check_discrete(rel_finset, objects=[rel_finset.one]).holds
