"""Named property checkers for relation double categories.

Each checker returns a :class:`~dcrel.report.PropertyReport`.  A failing
report carries a witness that can be re-checked on its own (see the
``recheck_*`` helpers used by the tests).
"""
from __future__ import annotations

import itertools

from .equip import (companion, conjoint, diagonal, extend, is_opcartesian, is_tabulating,
                    local_product, local_product_direct, local_terminal, restrict, tabulation_failure,
                    tabulator)
from .factsys import orthogonal
from .report import SKIPPED, PropertyReport, Timer, verdict


def probe_arrows(D, objects=None):
    c = D.base
    objs = D.carriers if objects is None else objects
    return [f for a in objs for b in objs for f in c.hom(a, b)]


def _names(objs):
    return [repr(o) for o in objs]


def _report(name, failure, probes, t, **details):
    return PropertyReport(name, verdict(failure is None), failure, probes, t.ms, details)


# ---------------------------------------------------------------------------
# unit-purity and local shape


def unit_pure_failure(D, x, y):
    c = D.base
    ux, uy = D.unit(x), D.unit(y)
    for f in c.hom(x, y):
        for g in c.hom(x, y):
            cells = D.cells(ux, uy, f, g)
            if f != g and cells:
                return {"reason": "cell between units over distinct arrows", "cell": cells[0]}
            if f == g and len(cells) != 1:
                return {"reason": f"{len(cells)} cells over the identical pair", "f": f}
    return None


def check_unit_pure(D, objects=None):
    objs = D.carriers if objects is None else objects
    with Timer() as t:
        failure = None
        for x, y in itertools.product(objs, objs):
            failure = unit_pure_failure(D, x, y)
            if failure:
                break
    return _report("unit_pure", failure, _names(objs), t)


def recheck_unit_pure_witness(D, witness):
    """Re-validate a unit-purity counterexample from its cell alone."""
    cell = witness.get("cell")
    if cell is None:
        f = witness["f"]
        x, y = D.base.dom(f), D.base.cod(f)
        return len(D.cells(D.unit(x), D.unit(y), f, f)) != 1
    return (D.is_cell(cell) and cell.f != cell.g and cell.top == D.unit(D.base.dom(cell.f))
            and cell.bottom == D.unit(D.base.cod(cell.f)))


def check_locally_preordered(D, relations=None):
    rels = D.all_relations() if relations is None else relations
    with Timer() as t:
        failure = None
        frames = 0
        c = D.base
        for r in rels:
            for s in rels:
                for f in c.hom(r.src, s.src):
                    for g in c.hom(r.tgt, s.tgt):
                        frames += 1
                        cells = D.cells(r, s, f, g)
                        if len(cells) > 1:
                            failure = {"frame": (r, s, f, g), "cells": cells[:2]}
                            break
                    if failure:
                        break
                if failure:
                    break
            if failure:
                break
    return _report("locally_preordered", failure, f"{len(rels)} relations over carriers", t, frames=frames)


def check_local_shape(D, unit_pure=None, discrete=None, relations=None):
    """``{"locally_preordered": report, "locally_posetal": report}``.

    Posetality is read off as preordered and unit-pure, which is only
    licensed on discrete instances; the discreteness check runs first.
    """
    pre = check_locally_preordered(D, relations)
    up = check_unit_pure(D) if unit_pure is None else unit_pure
    disc = check_discrete(D) if discrete is None else discrete
    with Timer() as t:
        if not disc.holds:
            post = PropertyReport("locally_posetal", SKIPPED, None, None, 0.0,
                                  {"reason": "instance not discrete"})
        else:
            witness = pre.witness if not pre.holds else up.witness
            post = PropertyReport("locally_posetal", verdict(pre.holds and up.holds), witness,
                                  pre.probes, 0.0, {"preordered": pre.holds, "unit_pure": up.holds})
    post.ms = pre.ms + t.ms
    return {"locally_preordered": pre, "locally_posetal": post}


# ---------------------------------------------------------------------------
# Beck-Chevalley diamonds


def bc_diamond(D, g, f, h, k):
    """Beck-Chevalley comparison for the commuting square ``g;h == f;k``
    (``g : A -> B``, ``f : A -> C``, ``h : B -> D``, ``k : C -> D``).

    Returns ``(ok, comparison cell)``: the extension of ``Id_A`` along
    ``(g, f)`` maps into the restriction of ``Id_D`` along ``(h, k)`` by the
    unique cell through the opcartesian and cartesian cells; ``ok`` says
    whether that comparison is invertible.
    """
    c = D.base
    gh = c.compose(g, h)
    if gh != c.compose(f, k):
        raise ValueError("bc_diamond needs a commuting square")
    a, dd = c.dom(g), c.cod(h)
    ua = D.unit(a)
    ext, opc = extend(D, ua, g, f)
    res, cart = restrict(D, D.unit(dd), h, k)
    unit_gh = D.unit_cell(gh)
    # the cell ext => Id_D over (h, k) induced by the opcartesian cell
    chi = [x for x in D.cells(ext, D.unit(dd), h, k) if D.vcompose(opc, x) == unit_gh]
    if len(chi) != 1:
        return False, None
    comp = [d for d in D.cells(ext, res, c.identity(c.cod(g)), c.identity(c.cod(f)))
            if D.vcompose(d, cart) == chi[0]]
    if len(comp) != 1:
        return False, None
    return c.is_iso(comp[0].alpha), comp[0]


def is_cover(D, f):
    c = D.base
    return extend(D, D.unit(c.dom(f)), f, f)[0] == D.unit(c.cod(f))


def is_inclusion(D, f):
    c = D.base
    return restrict(D, D.unit(c.cod(f)), f, f)[0] == D.unit(c.dom(f))


def fibration_cell(D, f):
    """The cell ``Id_A => f^* ; !_!`` over ``(f, !)``."""
    c = D.base
    a = c.dom(f)
    bang = D.terminal_map(a)
    ext, cell = extend(D, D.unit(a), f, bang)
    composite = D.compose_h(conjoint(D, f), companion(D, bang))
    if composite != ext:
        raise AssertionError("f^* ; !_! differs from the extension along (f, !)")
    return cell


def is_fibration(D, f, probes=None):
    return is_tabulating(D, fibration_cell(D, f), probes)


def is_final(D, f):
    c = D.base
    one = D.one
    return bc_diamond(D, f, D.terminal_map(c.dom(f)), D.terminal_map(c.cod(f)), c.identity(one))[0]


def classify_vertical(D, f, probes=None):
    return {
        "cover": is_cover(D, f),
        "inclusion": is_inclusion(D, f),
        "fibration": is_fibration(D, f, probes),
        "final": is_final(D, f),
    }


def classify_all(D, arrows=None):
    arrows = probe_arrows(D) if arrows is None else arrows
    return {f: classify_vertical(D, f) for f in arrows}


def check_bc_pullbacks(D, objects=None):
    """Both identity diamonds of every pullback of a cospan among the
    probe objects factor as opcartesian followed by cartesian."""
    c = D.base
    objs = D.carriers if objects is None else objects
    with Timer() as t:
        failure = None
        squares = 0
        for b, cc, d in itertools.product(objs, objs, objs):
            for h in c.hom(b, d):
                for k in c.hom(cc, d):
                    cone = c.pullback(h, k)
                    g, f = cone.legs
                    squares += 1
                    for square in ((g, f, h, k), (f, g, k, h)):
                        ok, _ = bc_diamond(D, *square)
                        if not ok:
                            failure = {"square": square}
                            break
                    if failure:
                        break
                if failure:
                    break
            if failure:
                break
    return _report("bc_pullbacks", failure, _names(objs), t, squares=squares)


def discrete_squares(D, x):
    """The two squares whose Beck-Chevalley property makes ``x`` discrete."""
    c = D.base
    i = c.identity(x)
    dx = diagonal(D, x)
    xx = D.product(x, x).apex
    # (X x X) x X and the reassociation from X x (X x X)
    x_xx = D.product(x, xx)
    p1, p23 = x_xx.legs
    q2, q3 = D.product(x, x).legs
    assoc = D.pair(D.pair(p1, c.compose(p23, q2), x, x), c.compose(p23, q3), xx, x)
    h = c.compose(D.times(i, dx), assoc)
    k = D.times(dx, i)
    return [(i, i, dx, dx), (dx, dx, h, k)]


def check_discrete(D, objects=None):
    objs = D.carriers if objects is None else objects
    with Timer() as t:
        failure = None
        for x in objs:
            for square in discrete_squares(D, x):
                if not bc_diamond(D, *square)[0]:
                    failure = {"object": x, "square": square}
                    break
            if failure:
                break
    rep = _report("discrete", failure, _names(objs), t)
    D.cache["discrete"] = rep.holds
    return rep


# ---------------------------------------------------------------------------
# comprehension schemes


def strong_tabulator_failure(D, p, probes=None, oracle=False):
    _, _, _, cell = tabulator(D, p)
    w = tabulation_failure(D, cell, probes)
    if w is not None:
        return {"relation": p, "not tabulating": w}
    if not D.in_M(D.pair(p.left, p.right, p.src, p.tgt)):
        return {"relation": p, "legs not in M": True}
    op = is_opcartesian(D, cell, oracle)
    if not op or not op.agree:
        return {"relation": p, "tabulating cell not opcartesian": op}
    return None


def check_strong_tabulators(D, relations=None, probes=None):
    rels = D.all_relations() if relations is None else relations
    with Timer() as t:
        failure = None
        for p in rels:
            failure = strong_tabulator_failure(D, p, probes)
            if failure:
                break
    return _report("strong_tabulators", failure, f"{len(rels)} relations", t)


def check_comprehension_scheme(D, variant="full", probes=None):
    """``full``: strong M-tabulators for every relation and every M-arrow
    ``<l, r>`` out of a carrier tabulates the extension of its domain's unit
    along ``(l, r)``.  ``left_sided``: the same restricted to relations into
    the terminal object and to single arrows ``f`` in M against ``!``."""
    c = D.base
    one = D.one
    with Timer() as t:
        failure = None
        rels = D.all_relations()
        if variant == "left_sided":
            rels = [p for p in rels if p.tgt == one]
        for p in rels:
            failure = strong_tabulator_failure(D, p, probes)
            if failure:
                break
        if failure is None:
            if variant == "full":
                for x, a, b in itertools.product(D.carriers, D.carriers, D.carriers):
                    p1, p2 = D.product(a, b).legs
                    for m in c.hom(x, D.product(a, b).apex):
                        if not D.in_M(m):
                            continue
                        _, cell = extend(D, D.unit(x), c.compose(m, p1), c.compose(m, p2))
                        if not is_tabulating(D, cell, probes):
                            failure = {"M-arrow": m, "does not tabulate": cell.bottom}
                            break
                    if failure:
                        break
            elif variant == "left_sided":
                for f in probe_arrows(D):
                    if D.in_M(f) and not is_tabulating(D, fibration_cell(D, f), probes):
                        failure = {"M-arrow": f, "does not tabulate": fibration_cell(D, f).bottom}
                        break
            else:
                raise ValueError(f"unknown variant {variant!r}")
    return _report(f"comprehension_{variant}", failure, _names(D.carriers), t)


# ---------------------------------------------------------------------------
# cartesian structure (local products and terminals)


def check_local_products(D, objects=None, relations_per_hom=None):
    """For every hom among carriers: the local product is the product in
    the hom-category of globular cells and agrees with the direct pullback
    construction; the local terminal receives exactly one cell from each
    relation."""
    c = D.base
    objs = D.carriers if objects is None else objects
    with Timer() as t:
        failure = None
        for a, b in itertools.product(objs, objs):
            hom = D.hom(a, b)
            if relations_per_hom is not None:
                hom = hom[:relations_per_hom]
            ia, ib = c.identity(a), c.identity(b)
            top = local_terminal(D, a, b)
            for r in hom:
                if len(D.cells(r, top, ia, ib)) != 1:
                    failure = {"local terminal": top, "relation": r}
                    break
            if failure:
                break
            for p, q in itertools.product(hom, hom):
                meet = local_product(D, p, q)
                if meet != local_product_direct(D, p, q):
                    failure = {"local product mismatch": (p, q)}
                    break
                for r in hom:
                    n = len(D.cells(r, meet, ia, ib))
                    if n != len(D.cells(r, p, ia, ib)) * len(D.cells(r, q, ia, ib)):
                        failure = {"local product not universal": (p, q), "tested with": r}
                        break
                if failure:
                    break
            if failure:
                break
    return _report("local_products", failure, _names(objs), t)


# ---------------------------------------------------------------------------
# vertical classes


def check_classes(D, unit_pure=None, strong_tabulators=None, cauchy=None, arrows=None):
    """The class identities for covers, inclusions, fibrations and finals.

    Returns a list of reports; conditional identities are ``skipped`` when
    their hypotheses fail on the instance.
    """
    c = D.base
    arrows = probe_arrows(D) if arrows is None else arrows
    out = []
    with Timer() as t:
        flags = classify_all(D, arrows)
    cls = {k: [f for f in arrows if flags[f][k]] for k in ("cover", "inclusion", "fibration", "final")}
    E = [f for f in arrows if D.in_E(f)]
    M = [f for f in arrows if D.in_M(f)]
    monos = [f for f in arrows if c.is_mono(f)]
    epis = [f for f in arrows if c.is_epi(f)]
    probes = _names(D.carriers)

    def diff(xs, ys):
        sx, sy = set(xs), set(ys)
        return sorted(sx ^ sy, key=repr)[:1] or None

    def rep(name, witness, **details):
        out.append(PropertyReport(name, verdict(witness is None), witness, probes, t.ms, details))

    def skip(name, why):
        out.append(PropertyReport(name, SKIPPED, None, probes, 0.0, {"reason": why}))

    rep("covers_are_final", next((f for f in cls["cover"] if f not in cls["final"]), None))
    rep("covers_equal_finals", diff(cls["cover"], cls["final"]))
    rep("finals_equal_E", diff(cls["final"], E))
    rep("fibrations_equal_M", diff(cls["fibration"], M))
    up = unit_pure.holds if unit_pure is not None else check_unit_pure(D).holds
    if up:
        rep("covers_epic", next((f for f in cls["cover"] if f not in epis), None))
        rep("inclusions_monic", next((f for f in cls["inclusion"] if f not in monos), None))
        st = strong_tabulators.holds if strong_tabulators is not None else check_strong_tabulators(D).holds
        if st:
            rep("inclusions_equal_monos", diff(cls["inclusion"], monos))
        else:
            skip("inclusions_equal_monos", "strong tabulators fail")
    else:
        for name in ("covers_epic", "inclusions_monic", "inclusions_equal_monos"):
            skip(name, "instance not unit-pure")
    # fibrations are stable under pullback
    w = None
    for m in cls["fibration"]:
        for x in D.carriers:
            for g in c.hom(x, c.cod(m)):
                cone = c.pullback(g, m)
                if not is_fibration(D, cone.legs[0]):
                    w = {"fibration": m, "along": g}
                    break
            if w:
                break
        if w:
            break
    rep("fibrations_pullback_stable", w)
    # fibrations compose
    fib = set(cls["fibration"])
    w = next(((f, g) for f in cls["fibration"] for g in cls["fibration"]
              if c.cod(f) == c.dom(g) and c.compose(f, g) not in fib and not is_fibration(D, c.compose(f, g))),
             None)
    rep("fibrations_compose", w)
    mc = {f for f in arrows if flags[f]["cover"] and c.is_mono(f)}

    def monic_cover(f):
        return f in mc if f in flags else (is_cover(D, f) and c.is_mono(f))

    w = None
    for f, g in itertools.product(arrows, arrows):
        if c.cod(f) != c.dom(g):
            continue
        fg = c.compose(f, g)
        if monic_cover(f) and monic_cover(g) and not monic_cover(fg):
            w = ("not closed under composition", f, g)
        elif monic_cover(fg) and monic_cover(g) and not monic_cover(f):
            w = ("not right-cancellable", f, g)
        if w:
            break
    rep("monic_covers_compose_and_cancel", w)
    if up and cauchy is not None and cauchy.holds:
        w = next(((e, m) for e in cls["cover"] for m in cls["inclusion"] if not orthogonal(c, e, m)), None)
        rep("covers_orthogonal_to_inclusions", w)
    else:
        skip("covers_orthogonal_to_inclusions", "needs a unit-pure Cauchy instance")
    for r in out:
        r.details.setdefault("classes", {k: len(v) for k, v in cls.items()})
    return out
