"""Constructions read off a relation double category.

* the comprehensive factorisation (final arrow, then fibration) of a
  vertical arrow, compared against the factorisation system it came from;
* horizontal adjoints, representability and the Cauchy property;
* Cauchisation: a new vertical category whose arrows are the maps
  (relations whose left leg is a monic cover);
* the consolidated theorem suite.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .basecat import BUDGET, CategoryError, EnumerationBudgetExceeded
from .equip import (all_cells, check_companion_equations, check_double_laws_exhaustive, check_triangles, comma_failure, companion, conjoint,
                    dagger, dagger_swap, extend, is_cartesian, is_opcartesian, modular_failure, tabulator, tilt_bijection_failure,
                    triangle_failure)
from .factsys import ArrowClass, check_ofs, check_regepi_equivalence, factorise
from .props import (check_bc_pullbacks, check_classes, check_comprehension_scheme, check_discrete,
                    check_local_products, check_local_shape, check_strong_tabulators, check_unit_pure,
                    is_cover, is_fibration, is_final, probe_arrows)
from .reldbl import RelDouble, check_double_laws
from .report import HOLDS, SKIPPED, PropertyReport, Timer, verdict

# ---------------------------------------------------------------------------
# comprehensive factorisation


def _left_sided_scheme(D):
    rep = D.cache.get("comprehension_left_sided")
    if rep is None:
        rep = check_comprehension_scheme(D, "left_sided")
        D.cache["comprehension_left_sided"] = rep
    return rep


def comprehensive_factorise(D, f, check=True):
    """``(e, m, apex)`` with ``e`` final, ``m`` a fibration and ``e;m == f``.

    ``m`` is the left leg of the tabulator of ``f^* ; !_!`` (the extension
    of the unit along ``(f, !)``) and ``e`` the unique arrow with
    ``e ; m == f``.
    """
    if check and not _left_sided_scheme(D).holds:
        raise CategoryError("left-sided comprehension scheme not verified; refusing to factorise")
    c = D.base
    a = c.dom(f)
    bang = D.terminal_map(a)
    rel = D.compose_h(conjoint(D, f), companion(D, bang))
    _, cell = extend(D, D.unit(a), f, bang)
    if cell.bottom != rel:
        raise CategoryError("f^* ; !_! differs from the extension along (f, !)")
    t_obj, m, _, tab = tabulator(D, rel)
    # the factorisation of the extension cell through the tabulating cell
    es = [u for u in c.hom(a, t_obj) if D.vcompose(D.unit_cell(u), tab) == cell]
    if len(es) != 1:
        raise CategoryError(f"{len(es)} factorisations through the tabulator of f^* ; !_!")
    e = es[0]
    if check:
        if not is_final(D, e):
            raise CategoryError(f"first factor {e!r} is not final")
        if not is_fibration(D, m):
            raise CategoryError(f"second factor {m!r} is not a fibration")
    return e, m, rel.apex


def factorisation_comparison(D, f):
    """The unique iso ``i`` between the comprehensive factorisation and the
    system's own, or a witness when there is none."""
    c = D.base
    e, m, _ = comprehensive_factorise(D, f)
    e0, m0 = factorise(c, D.system, f)
    isos = [i for i in c.lifts(m0, m) if c.compose(e0, i) == e]
    if len(isos) == 1 and c.is_iso(isos[0]):
        return isos[0], None
    return None, {"arrow": f, "comprehensive": (e, m), "system": (e0, m0), "comparisons": len(isos)}


def check_comprehensive_factorisation(D, arrows=None):
    arrows = probe_arrows(D) if arrows is None else arrows
    with Timer() as t:
        failure = None
        for f in arrows:
            _, failure = factorisation_comparison(D, f)
            if failure:
                break
    return PropertyReport("comprehensive_factorisation", verdict(failure is None), failure,
                          [repr(o) for o in D.carriers], t.ms, {"arrows": len(arrows)})


def check_fin_fib_system(D, arrows=None):
    """``(Fin, Fib)`` read off the double category is an OFS on the carriers
    and coincides with ``(E, M)`` exactly."""
    c = D.base
    arrows = probe_arrows(D) if arrows is None else arrows
    with Timer() as t:
        fin = ArrowClass("Fin", predicate=lambda f: is_final(D, f))
        fib = ArrowClass("Fib", predicate=lambda f: is_fibration(D, f))
        rep = check_ofs(c, fin, fib, D.carriers, factor_objects=D.carriers)
        failure = None if rep.ok else rep.failures[0]
        if failure is None:
            for f in arrows:
                if fin.contains(c, f) != bool(D.in_E(f)):
                    failure = ("Fin differs from E", f)
                    break
                if fib.contains(c, f) != bool(D.in_M(f)):
                    failure = ("Fib differs from M", f)
                    break
    return PropertyReport("fin_fib_system", verdict(failure is None), failure,
                          [repr(o) for o in D.carriers], t.ms, {"warnings": len(rep.warnings)})


# ---------------------------------------------------------------------------
# adjoints and the Cauchy property


@dataclass
class AdjointWitness:
    p: object
    q: object
    eta: object
    epsilon: object
    representing: object = None

    def describe(self):
        return {"left": repr(self.p), "right": repr(self.q),
                "representing": None if self.representing is None else repr(self.representing)}


def find_right_adjoint(D, p):
    """First ``q`` (in canonical order) with cells ``eta, epsilon`` making
    ``p -| q``; ``None`` if there is none.  Running out of budget raises
    :class:`EnumerationBudgetExceeded` rather than answering ``None``."""
    key = ("right_adjoint", p)
    if key in D.cache:
        return D.cache[key]
    c = D.base
    a, b = p.src, p.tgt
    ua, ub = D.unit(a), D.unit(b)
    ia, ib = c.identity(a), c.identity(b)
    steps = 0
    found = None
    for q in D.hom(b, a):
        etas = D.cells(ua, D.compose_h(p, q), ia, ia)
        if not etas:
            continue
        epss = D.cells(D.compose_h(q, p), ub, ib, ib)
        for eta, eps in itertools.product(etas, epss):
            steps += 1
            if steps > BUDGET.filler_cap:
                raise EnumerationBudgetExceeded(f"adjoint search for {p!r}", steps, BUDGET.filler_cap)
            if triangle_failure(D, p, q, eta, eps) is None:
                found = AdjointWitness(p, q, eta, eps, is_representable(D, p))
                break
        if found:
            break
    D.cache[key] = found
    return found


def revalidate_adjoint(D, w):
    """Independent re-check of both triangle identities of a witness."""
    c = D.base
    eta_ok = (w.eta.top == D.unit(w.p.src) and w.eta.bottom == D.compose_h(w.p, w.q) and D.is_cell(w.eta)
              and c.is_identity(w.eta.f) and c.is_identity(w.eta.g))
    eps_ok = (w.epsilon.bottom == D.unit(w.p.tgt) and w.epsilon.top == D.compose_h(w.q, w.p)
              and D.is_cell(w.epsilon))
    return eta_ok and eps_ok and triangle_failure(D, w.p, w.q, w.eta, w.epsilon) is None


def is_representable(D, p):
    """A vertical ``f`` with ``f_! == p``, or ``None``."""
    for f in D.base.hom(p.src, p.tgt):
        if companion(D, f) == p:
            return f
    return None


def left_adjoints(D, relations=None):
    rels = D.all_relations() if relations is None else relations
    out = []
    for p in rels:
        w = find_right_adjoint(D, p)
        if w is not None:
            out.append(w)
    return out


def check_cauchy(D, relations=None, unit_pure=None):
    with Timer() as t:
        adj = left_adjoints(D, relations)
        bad = next((w for w in adj if w.representing is None), None)
    up = check_unit_pure(D).holds if unit_pure is None else unit_pure.holds
    arp = D.system.flag("anti_right_proper")
    details = {"left_adjoints": len(adj), "anti_right_proper": arp, "unit_pure": up}
    if up:
        details["agrees_with_anti_right_proper"] = (bad is None) == bool(arp)
    return PropertyReport("cauchy", verdict(bad is None), bad, [repr(o) for o in D.carriers], t.ms, details)


def maps_theorem_check(D, unit_pure=None, relations=None):
    """For every left adjoint, the left leg of its tabulator is a monic cover."""
    up = check_unit_pure(D) if unit_pure is None else unit_pure
    if not up.holds:
        return PropertyReport("maps_theorem", SKIPPED, None, None, 0.0, {"reason": "instance not unit-pure"})
    c = D.base
    with Timer() as t:
        failure = None
        non_iso = []
        for w in left_adjoints(D, relations):
            x1 = w.p.left
            if not (is_cover(D, x1) and c.is_mono(x1)):
                failure = {"adjoint": w, "leg": x1}
                break
            if not c.is_iso(x1):
                non_iso.append((w.p, x1))
    return PropertyReport("maps_theorem", verdict(failure is None), failure, [repr(o) for o in D.carriers], t.ms,
                          {"monic_cover_legs_not_iso": non_iso})


def is_monic_cover(D, f):
    return D.base.is_mono(f) and is_cover(D, f)


# ---------------------------------------------------------------------------
# Cauchisation


class CauchyDouble:
    """Cauchisation of a unit-pure relation double category.

    Objects and horizontal arrows are those of ``base``.  A vertical arrow
    ``A -> B`` is a canonical relation ``A -/-> B`` that is a map; it is
    composed as a relation, and the identity is the horizontal unit.  A cell
    ``R => S`` over verticals ``(P, Q)`` is a globular cell ``R;Q => P;S`` of
    ``base``.  Cell-level checks only ask whether such cells exist, which is
    exact when ``base`` is locally preordered.
    """

    def __init__(self, base, source=None, mode="monic_cover"):
        if mode not in ("monic_cover", "adjoint"):
            raise ValueError(mode)
        self.base = base
        self.source = base if source is None else source
        self.mode = mode
        self.carriers = base.carriers
        self.one = base.one
        self._vhom = {}

    def __repr__(self):
        depth = 1 + (self.source.depth if isinstance(self.source, CauchyDouble) else 0)
        return f"Cau^{depth}({self.base.system.E.name}, {self.base.system.M.name})"

    @property
    def depth(self):
        return 1 + (self.source.depth if isinstance(self.source, CauchyDouble) else 0)

    def is_vertical(self, p):
        D = self.base
        if self.mode == "monic_cover":
            return is_monic_cover(D, p.left)
        return find_right_adjoint(D, p) is not None

    def vhom(self, a, b):
        key = (a, b)
        got = self._vhom.get(key)
        if got is None:
            got = [p for p in self.base.hom(a, b) if self.is_vertical(p)]
            self._vhom[key] = got
        return list(got)

    def vcompose(self, p, q):
        return self.base.compose_h(p, q)

    def videntity(self, a):
        return self.base.unit(a)

    def from_base(self, f):
        """The canonical functor on vertical arrows: ``f`` goes to ``f_!``."""
        return companion(self.base, f)

    def has_cell(self, r, s, p, q):
        D = self.base
        c = D.base
        top = D.compose_h(r, q)
        bottom = D.compose_h(p, s)
        return bool(D.cells(top, bottom, c.identity(r.src), c.identity(s.tgt)))

    def terminal_vertical(self, a):
        vs = self.vhom(a, self.one)
        if len(vs) != 1:
            raise CategoryError(f"{len(vs)} vertical arrows {a!r} -> 1 after Cauchisation")
        return vs[0]

    def right_adjoint(self, p):
        w = find_right_adjoint(self.base, p)
        if w is None:
            raise CategoryError(f"vertical arrow {p!r} has no right adjoint")
        return w.q


def _locally_preordered(D):
    rep = D.cache.get("locally_preordered")
    if rep is None:
        from .props import check_locally_preordered

        rep = check_locally_preordered(D)
        D.cache["locally_preordered"] = rep
    return rep.holds


def cauchise(X):
    """Cauchisation of a unit-pure relation double category, or of an
    earlier Cauchisation (its vertical arrows are then found as the left
    adjoints of the shared horizontal bicategory)."""
    if isinstance(X, CauchyDouble):
        return CauchyDouble(X.base, X, "adjoint")
    if not isinstance(X, RelDouble):
        raise TypeError("cauchise expects a RelDouble or a CauchyDouble")
    up = X.cache.get("unit_pure")
    if up is None:
        up = check_unit_pure(X)
        X.cache["unit_pure"] = up
    if not up.holds:
        raise CategoryError("Cauchisation needs a unit-pure instance")
    return CauchyDouble(X)


def _carrier_pairs(K):
    return list(itertools.product(K.carriers, K.carriers))


def check_cau_verticals(K):
    """Vertical arrows are relations in M, closed under composition, with
    units as identities; and they are exactly the left adjoints."""
    D = K.base
    with Timer() as t:
        failure = None
        for a, b in _carrier_pairs(K):
            vs = K.vhom(a, b)
            adj = [p for p in D.hom(a, b) if find_right_adjoint(D, p) is not None]
            if set(vs) != set(adj):
                failure = {"hom": (a, b), "maps differ from left adjoints": sorted(set(vs) ^ set(adj), key=repr)[:1]}
                break
            if not all(D.in_M(p.pairing) for p in vs):
                failure = {"pairing outside M": (a, b)}
                break
        if failure is None:
            for a in K.carriers:
                if K.videntity(a) not in K.vhom(a, a):
                    failure = {"identity is not vertical": a}
                    break
        if failure is None:
            for a, b, cc in itertools.product(K.carriers, K.carriers, K.carriers):
                for p in K.vhom(a, b):
                    for q in K.vhom(b, cc):
                        if K.vcompose(p, q) not in K.vhom(a, cc):
                            failure = {"composite not vertical": (p, q)}
                            break
                    if failure:
                        break
                if failure:
                    break
    return PropertyReport("cau_verticals", verdict(failure is None), failure, [repr(o) for o in K.carriers], t.ms,
                          {"verticals": sum(len(K.vhom(a, b)) for a, b in _carrier_pairs(K))})


def _cell_checks_allowed(K, name):
    if _locally_preordered(K.base):
        return None
    return PropertyReport(name, SKIPPED, None, None, 0.0,
                          {"reason": "cell-level checks need a locally preordered base"})


def check_cau_unit_pure(K):
    skip = _cell_checks_allowed(K, "cau_unit_pure")
    if skip:
        return skip
    D = K.base
    with Timer() as t:
        failure = None
        for a, b in _carrier_pairs(K):
            ua, ub = D.unit(a), D.unit(b)
            for p, q in itertools.product(K.vhom(a, b), K.vhom(a, b)):
                if K.has_cell(ua, ub, p, q) != (p == q):
                    failure = {"units": (a, b), "frame": (p, q)}
                    break
            if failure:
                break
    return PropertyReport("cau_unit_pure", verdict(failure is None), failure, [repr(o) for o in K.carriers], t.ms)


def check_cau_cauchy(K):
    D = K.base
    with Timer() as t:
        adj = left_adjoints(D)
        bad = next((w for w in adj if w.p not in K.vhom(w.p.src, w.p.tgt)), None)
    return PropertyReport("cau_cauchy", verdict(bad is None), bad, [repr(o) for o in K.carriers], t.ms,
                          {"left_adjoints": len(adj)})


def cau_tabulation_failure(K, t_obj, r, lv, rv, probes=None):
    """One-dimensional universality of the cell ``Id_T => r`` over the
    verticals ``(lv, rv)`` in ``K``."""
    D = K.base
    if not K.has_cell(D.unit(t_obj), r, lv, rv):
        return {"no cell": (r, lv, rv)}
    for x in (K.carriers if probes is None else probes):
        ux = D.unit(x)
        counts = {}
        for u in K.vhom(x, t_obj):
            key = (K.vcompose(u, lv), K.vcompose(u, rv))
            counts[key] = counts.get(key, 0) + 1
        for p2 in K.vhom(x, r.src):
            for q2 in K.vhom(x, r.tgt):
                if K.has_cell(ux, r, p2, q2) and counts.get((p2, q2), 0) != 1:
                    return {"probe": x, "frame": (p2, q2), "count": counts.get((p2, q2), 0)}
    return None


def cau_tabulator(K, r):
    D = K.base
    return r.apex, companion(D, r.left), companion(D, r.right)


def cau_opcartesian_failure(K, r, relations):
    """The tabulating cell of ``r`` is opcartesian: a cell ``Id_T => s``
    whose frame factors through the tabulator legs exists exactly when the
    corresponding cell ``r => s`` does."""
    D = K.base
    t_obj, lv, rv = cau_tabulator(K, r)
    ut = D.unit(t_obj)
    for s in relations:
        for p2 in K.vhom(r.src, s.src):
            lp = K.vcompose(lv, p2)
            for q2 in K.vhom(r.tgt, s.tgt):
                if K.has_cell(r, s, p2, q2) != K.has_cell(ut, s, lp, K.vcompose(rv, q2)):
                    return {"relation": r, "against": s, "frame": (p2, q2)}
    return None


def check_cau_strong_tabulators(K, relations=None, against=None):
    skip = _cell_checks_allowed(K, "cau_strong_tabulators")
    if skip:
        return skip
    D = K.base
    rels = D.all_relations() if relations is None else relations
    others = D.all_relations() if against is None else against
    with Timer() as t:
        failure = None
        for r in rels:
            t_obj, lv, rv = cau_tabulator(K, r)
            if lv not in K.vhom(t_obj, r.src) or rv not in K.vhom(t_obj, r.tgt):
                failure = {"legs are not vertical": r}
                break
            failure = cau_tabulation_failure(K, t_obj, r, lv, rv)
            if failure is None:
                failure = cau_opcartesian_failure(K, r, others)
            if failure:
                break
    return PropertyReport("cau_strong_tabulators", verdict(failure is None), failure,
                          f"{len(rels)} relations against {len(others)}", t.ms)


def cau_is_fibration(K, f):
    """``f`` (a vertical ``X -> A``) tabulates ``f^* ; !_!`` in ``K``."""
    D = K.base
    x = f.src
    target = D.compose_h(K.right_adjoint(f), K.terminal_vertical(x))
    return cau_tabulation_failure(K, x, target, f, K.terminal_vertical(x)) is None


def check_cau_comprehension(K, variant="left_sided"):
    """Left-sided comprehension in ``K``: relations into the terminal have
    strong tabulators whose left leg is a fibration of ``K``."""
    name = f"cau_comprehension_{variant}"
    if variant != "left_sided":
        return PropertyReport(name, SKIPPED, None, None, 0.0,
                              {"reason": "only the left-sided variant is checked on Cauchisations"})
    skip = _cell_checks_allowed(K, name)
    if skip:
        return skip
    D = K.base
    with Timer() as t:
        fib = [f for a, b in _carrier_pairs(K) for f in K.vhom(a, b) if cau_is_fibration(K, f)]
        rels = [p for p in D.all_relations() if p.tgt == K.one]
        st = check_cau_strong_tabulators(K, rels)
        failure = st.witness
        if failure is None:
            for p in rels:
                t_obj, lv, _ = cau_tabulator(K, p)
                if not cau_is_fibration(K, lv):
                    failure = {"tabulator leg is not a fibration": p}
                    break
    return PropertyReport(name, verdict(failure is None), failure, [repr(o) for o in K.carriers], t.ms,
                          {"fibrations": len(fib)})


def vertical_isomorphism(K1, K2):
    """``None`` when the two Cauchisations (over one base) have the same
    vertical arrows and composition, else a witness."""
    if K1.base is not K2.base:
        raise CategoryError("vertical comparison needs a shared base")
    for a, b in _carrier_pairs(K1):
        v1, v2 = K1.vhom(a, b), K2.vhom(a, b)
        if set(v1) != set(v2):
            return {"hom": (a, b), "difference": sorted(set(v1) ^ set(v2), key=repr)[:1]}
    return None


def base_comparison(K):
    """How ``f -> f_!`` relates the base vertical category to ``K``:
    faithful, functorial, and whether it is bijective on every hom."""
    D = K.base
    c = D.base
    faithful = functorial = bijective = True
    witness = None
    for a, b in _carrier_pairs(K):
        images = [K.from_base(f) for f in c.hom(a, b)]
        if len(set(images)) != len(images):
            faithful = False
            witness = witness or ("not faithful", a, b)
        if not all(p in K.vhom(a, b) for p in images):
            functorial = False
            witness = witness or ("image not vertical", a, b)
        if set(images) != set(K.vhom(a, b)):
            bijective = False
            witness = witness or ("extra vertical arrows", a, b)
    for a in K.carriers:
        if K.from_base(c.identity(a)) != K.videntity(a):
            functorial = False
    for a, b, cc in itertools.product(K.carriers, K.carriers, K.carriers):
        for f in c.hom(a, b):
            for g in c.hom(b, cc):
                if K.from_base(c.compose(f, g)) != K.vcompose(K.from_base(f), K.from_base(g)):
                    functorial = False
                    witness = witness or ("not functorial", f, g)
    return {"faithful": faithful, "functorial": functorial, "isomorphism": bijective, "witness": witness}


def vertical_isos(K):
    """Invertible vertical arrows of ``K`` as ``(p, inverse)`` pairs."""
    out = []
    for a, b in _carrier_pairs(K):
        for p in K.vhom(a, b):
            for q in K.vhom(b, a):
                if K.vcompose(p, q) == K.videntity(a) and K.vcompose(q, p) == K.videntity(b):
                    out.append((p, q))
                    break
    return out


@dataclass
class CauchySummary:
    reports: list
    base_comparison: dict
    new_isos: list
    idempotent: object

    @property
    def passed(self):
        return all(r.verdict != "fails" for r in self.reports) and self.idempotent is None

    def to_json(self):
        return {
            "reports": [r.to_json() for r in sorted(self.reports, key=lambda r: r.property)],
            "base_comparison": {k: v if isinstance(v, bool) else repr(v) for k, v in self.base_comparison.items()},
            "new_vertical_isos": [[repr(p), repr(q)] for p, q in self.new_isos],
            "idempotent": self.idempotent is None,
            "verdict": "PASS" if self.passed else "FAIL",
        }


def cauchy_suite(D):
    """Cauchise ``D`` and run the property checks on the result."""
    K = cauchise(D)
    reports = [check_cau_verticals(K), check_cau_unit_pure(K), check_cau_cauchy(K),
               check_cau_strong_tabulators(K), check_cau_comprehension(K, "left_sided"),
               check_cau_comprehension(K, "full")]
    comparison = base_comparison(K)
    c = D.base
    base_iso_images = {K.from_base(f) for a, b in _carrier_pairs(K) for f in c.hom(a, b) if c.is_iso(f)}
    new_isos = [(p, q) for p, q in vertical_isos(K) if p not in base_iso_images]
    idem = vertical_isomorphism(K, cauchise(K))
    return CauchySummary(reports, comparison, new_isos, idem)


# ---------------------------------------------------------------------------
# equipment identities


def _sample(items, cap, seed):
    if cap is None or len(items) <= cap:
        return items
    return random.Random(seed).sample(items, cap)


def check_equipment_identities(D, cap=None, seed=0):
    """Companion/conjoint equations, triangle identities, the modular law,
    dagger identities, tilt round trips and comma objects.  ``cap`` bounds
    the number of probes per family (sampled with ``seed``); ``None`` is
    exhaustive."""
    c = D.base
    arrows = probe_arrows(D)
    rels = D.all_relations()
    reports = []

    def run(name, items, fn, **details):
        with Timer() as t:
            failure = None
            n = 0
            for item in items:
                n += 1
                w = fn(item)
                if w is not None:
                    failure = {"probe": item, "failure": w}
                    break
        reports.append(PropertyReport(name, verdict(failure is None), failure, f"{n} probes", t.ms, details))

    run("companion_equations", arrows, lambda f: check_companion_equations(D, f))
    run("triangle_identities", arrows, lambda f: check_triangles(D, f))
    triples = [(f, r, s) for f in arrows for r in rels if r.src == c.dom(f) for s in D.hom(c.cod(f), r.tgt)]
    run("modular_law", _sample(triples, cap, seed), lambda x: modular_failure(D, *x), total=len(triples))
    discrete = D.cache.get("discrete")
    if discrete is None:
        discrete = check_discrete(D).holds
    if not discrete:
        for name in ("dagger", "tilt_round_trip"):
            reports.append(PropertyReport(name, SKIPPED, None, None, 0.0, {"reason": "instance not discrete"}))
    else:
        def dagger_probe(p):
            d = dagger(D, p)
            if dagger(D, d) != p:
                return "not an involution"
            return None

        run("dagger", _sample(rels, cap, seed), dagger_probe)
        run("dagger_of_companion", arrows, lambda f: None if dagger(D, companion(D, f)) == conjoint(D, f)
            else "f_! dagger is not f^*")
        pairs = [(p, q) for p in rels for q in D.hom(p.tgt, p.tgt)]
        pairs = _sample(pairs, cap if cap is not None else 400, seed)
        run("dagger_contravariant", pairs, lambda x: None
            if dagger_swap(D, D.compose_h(*x)) == D.compose_h(dagger_swap(D, x[1]), dagger_swap(D, x[0]))
            else "composite")
        run("tilt_round_trip", _sample(rels, cap, seed), lambda p: tilt_bijection_failure(D, p.src, p))
    up = D.cache.get("unit_pure")
    if up is None or up.holds:
        cospans = [(f, g) for f in arrows for g in arrows if c.cod(f) == c.cod(g)]
        run("comma_is_pullback", _sample(cospans, cap, seed), lambda x: comma_failure(D, *x))
    return reports


def check_recognition_oracle(D, cap=None, seed=0):
    """Structural cartesian/opcartesian criteria against the brute-force
    universal properties on every (or ``cap`` sampled) cell."""
    with Timer() as t:
        cells = _sample(all_cells(D), cap, seed)
        failure = None
        counts = {"cartesian": 0, "opcartesian": 0}
        for cell in cells:
            a = is_cartesian(D, cell, oracle=True)
            b = is_opcartesian(D, cell, oracle=True)
            counts["cartesian"] += a.structural
            counts["opcartesian"] += b.structural
            if not (a.agree and b.agree):
                failure = {"cell": cell, "cartesian": (a.structural, a.oracle),
                           "opcartesian": (b.structural, b.oracle)}
                break
    return PropertyReport("recognition_oracle", verdict(failure is None), failure, f"{len(cells)} cells", t.ms,
                          counts)


# ---------------------------------------------------------------------------
# the theorem suite


@dataclass
class SuiteResult:
    reports: dict = field(default_factory=dict)
    observations: dict = field(default_factory=dict)
    biconditionals: list = field(default_factory=list)

    @property
    def failures(self):
        bad = [name for name, r in self.reports.items() if r.verdict == "fails"]
        bad += [b["name"] for b in self.biconditionals if b["agree"] is False]
        return sorted(bad)

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "failures": self.failures,
            "observations": dict(sorted(self.observations.items())),
            "biconditionals": self.biconditionals,
            "reports": [self.reports[k].to_json() for k in sorted(self.reports)],
        }


# Observations are properties an instance may or may not have; the suite
# records them and compares each against its factorisation-side partner.
OBSERVED = ("unit_pure", "locally_preordered", "locally_posetal", "cauchy")


def _bicond(name, left_name, left, right_name, right):
    agree = None if left is None or right is None else bool(left) == bool(right)
    return {"name": name, left_name: left, right_name: right, "agree": agree}


def theorem_suite(D, cap=None, seed=0, jobs=1):
    """Run every checker on ``D``.

    The instance passes when every structural property holds and every
    biconditional between a factorisation-side flag and a double-side
    observation has agreeing sides.  ``cap`` bounds sampled probe families
    (``None``: exhaustive).
    """
    S = D.system
    res = SuiteResult()
    R = res.reports

    def add(rep):
        R[rep.property] = rep

    for flag in ("is_ofs", "is_stable"):
        add(PropertyReport(f"system_{flag}", verdict(S.flag(flag) is True),
                           None if S.flag(flag) else S.flags.get(flag), None, 0.0))
    add(check_regepi_equivalence(D.base, S, D.carriers))
    up = check_unit_pure(D)
    D.cache["unit_pure"] = up
    disc = check_discrete(D)
    add(disc)
    shape = check_local_shape(D, up, disc)
    D.cache["locally_preordered"] = shape["locally_preordered"]
    tasks = [
        lambda: check_double_laws(D, seed),
        lambda: check_local_products(D, relations_per_hom=cap),
        lambda: check_bc_pullbacks(D),
        lambda: check_comprehension_scheme(D, "full"),
        lambda: _left_sided_scheme(D),
        lambda: check_strong_tabulators(D),
    ]
    if cap is None:
        tasks.append(lambda: check_double_laws_exhaustive(D))
    if BUDGET.oracle:
        tasks.append(lambda: check_recognition_oracle(D, cap, seed))
    else:
        add(PropertyReport("recognition_oracle", SKIPPED, None, None, 0.0, {"reason": "oracle disabled"}))
    for rep in _run_all(tasks, jobs):
        add(rep)
    cauchy = check_cauchy(D, unit_pure=up)
    for rep in check_classes(D, up, R["strong_tabulators"], cauchy):
        add(rep)
    add(check_comprehensive_factorisation(D))
    add(check_fin_fib_system(D))
    for rep in check_equipment_identities(D, cap, seed):
        add(rep)
    add(maps_theorem_check(D, up))
    full, left = R["comprehension_full"], R["comprehension_left_sided"]
    add(PropertyReport("comprehension_variants_agree", verdict(full.verdict == left.verdict),
                       None if full.verdict == left.verdict else (full.verdict, left.verdict), None, 0.0))
    obs = {"unit_pure": up, "locally_preordered": shape["locally_preordered"],
           "locally_posetal": shape["locally_posetal"], "cauchy": cauchy}
    for name, rep in obs.items():
        res.observations[name] = rep.verdict == HOLDS if rep.verdict != SKIPPED else None
        res.observations[name + "_witness"] = None if rep.holds else rep.to_json().get("witness")
    for flag in ("left_proper", "right_proper", "proper", "anti_right_proper"):
        res.observations[flag] = S.flag(flag)
    o = res.observations
    res.biconditionals = [
        _bicond("left_proper_iff_unit_pure", "left_proper", o["left_proper"], "unit_pure", o["unit_pure"]),
        _bicond("right_proper_iff_locally_preordered", "right_proper", o["right_proper"],
                "locally_preordered", o["locally_preordered"]),
        _bicond("proper_iff_locally_posetal", "proper", o["proper"], "locally_posetal", o["locally_posetal"]),
        _bicond("anti_right_proper_iff_cauchy", "anti_right_proper", o["anti_right_proper"], "cauchy",
                o["cauchy"] if o["unit_pure"] else None),
    ]
    res.observations["classes"] = R["covers_equal_finals"].details.get("classes")
    return res


def _run_all(tasks, jobs):
    if jobs <= 1:
        return [t() for t in tasks]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]
