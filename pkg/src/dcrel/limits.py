"""Finite-limit search and universal-property oracles.

Diagrams are tuples: ``("terminal",)``, ``("product", a, b)``,
``("pullback", f, g)`` (a cospan ``f : A -> C <- B : g``) and
``("equalizer", f, g)``.  Cones list their legs in diagram order
(product: the two projections; pullback: the legs to ``dom f`` and
``dom g``; equalizer: the single inclusion).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .basecat import BUDGET, EnumerationBudgetExceeded


@dataclass(eq=False)
class Cone:
    apex: object
    legs: tuple
    diagram: tuple
    # concrete backends: map from the tuple of leg values to an element index
    index: dict = field(default=None, repr=False)

    def __iter__(self):
        return iter(self.legs)


@dataclass
class Absent:
    """No limit exists for ``diagram`` among the searched objects."""

    diagram: tuple

    def __bool__(self):
        return False


def diagram_objects(cat, diagram):
    kind = diagram[0]
    if kind == "terminal":
        return ()
    if kind == "product":
        return (diagram[1], diagram[2])
    if kind == "pullback":
        return (cat.dom(diagram[1]), cat.dom(diagram[2]))
    if kind == "equalizer":
        return (cat.dom(diagram[1]),)
    raise ValueError(f"unknown diagram {kind!r}")


def cone_commutes(cat, cone):
    kind = cone.diagram[0]
    if kind == "pullback":
        _, f, g = cone.diagram
        p, q = cone.legs
        return cat.compose(p, f) == cat.compose(q, g)
    if kind == "equalizer":
        _, f, g = cone.diagram
        (e,) = cone.legs
        return cat.compose(e, f) == cat.compose(e, g)
    return True


def competing_cones(cat, diagram, x):
    """All cones over ``diagram`` with apex ``x``, as tuples of legs."""
    kind = diagram[0]
    if kind == "terminal":
        return [()]
    if kind == "product":
        return list(itertools.product(cat.hom(x, diagram[1]), cat.hom(x, diagram[2])))
    if kind == "pullback":
        _, f, g = diagram
        out = []
        by_value = {}
        for q in cat.hom(x, cat.dom(g)):
            by_value.setdefault(cat.compose(q, g), []).append(q)
        for p in cat.hom(x, cat.dom(f)):
            for q in by_value.get(cat.compose(p, f), ()):
                out.append((p, q))
        return out
    if kind == "equalizer":
        _, f, g = diagram
        return [(p,) for p in cat.hom(x, cat.dom(f)) if cat.compose(p, f) == cat.compose(p, g)]
    raise ValueError(f"unknown diagram {kind!r}")


def limit_failure(cat, cone, probes=None):
    """``None`` when ``cone`` is a limit over the probe objects, else a
    witness ``(x, legs, count)``: a competing cone and how many mediating
    arrows it has."""
    if not cone_commutes(cat, cone):
        return ("does not commute", None, None)
    probes = cat.probe_set if probes is None else probes
    for x in probes:
        counts = {}
        for u in cat.hom(x, cone.apex):
            key = tuple(cat.compose(u, leg) for leg in cone.legs)
            counts[key] = counts.get(key, 0) + 1
        for legs in competing_cones(cat, cone.diagram, x):
            n = counts.get(tuple(legs), 0)
            if n != 1:
                return (x, legs, n)
    return None


def is_limit_cone(cat, cone, probes=None):
    return limit_failure(cat, cone, probes) is None


def search_limit(cat, diagram, candidates=None):
    """Exhaustive limit search: first apex in canonical order with a cone
    passing :func:`is_limit_cone`; :class:`Absent` otherwise."""
    objs = sorted(cat.objects() if candidates is None else candidates, key=cat.sort_key)
    steps = 0
    for x in objs:
        for legs in competing_cones(cat, diagram, x):
            steps += 1
            if steps > BUDGET.filler_cap:
                raise EnumerationBudgetExceeded(f"limit search for {diagram}", steps, BUDGET.filler_cap)
            cone = Cone(x, tuple(legs), diagram)
            if is_limit_cone(cat, cone):
                return cone
    return Absent(diagram)


def find_limit(cat, diagram):
    kind = diagram[0]
    if kind == "terminal":
        out = cat.terminal()
    elif kind == "product":
        out = cat.product(diagram[1], diagram[2])
    elif kind == "pullback":
        out = cat.pullback(diagram[1], diagram[2])
    elif kind == "equalizer":
        out = cat.equalizer(diagram[1], diagram[2])
    else:
        raise ValueError(f"unknown diagram {kind!r}")
    return out if out else Absent(diagram)


class LimitChoice:
    """Memo of chosen limit cones; every stored cone was verified."""

    def __init__(self, cat):
        self.cat = cat
        self.memo = {}

    def get(self, diagram):
        if diagram not in self.memo:
            found = search_limit(self.cat, diagram)
            if found:
                assert is_limit_cone(self.cat, found)
            self.memo[diagram] = found
        return self.memo[diagram]


def kernel_pair(cat, f):
    return cat.pullback(f, f)


def is_coequalizer_of(cat, q, k1, k2, probes=None):
    """Whether ``q`` coequalizes ``k1, k2`` couniversally over the probes."""
    if cat.compose(k1, q) != cat.compose(k2, q):
        return False
    probes = cat.probe_set if probes is None else probes
    src, tgt = cat.dom(q), cat.cod(q)
    for x in probes:
        wanted = {h for h in cat.hom(src, x) if cat.compose(k1, h) == cat.compose(k2, h)}
        got = {}
        for u in cat.hom(tgt, x):
            h = cat.compose(q, u)
            got[h] = got.get(h, 0) + 1
        if set(got) != wanted or any(n != 1 for n in got.values()):
            return False
    return True


def limit_comparison(cat, cone1, cone2):
    """Mutually inverse comparison arrows between two limits of one diagram."""
    u = cat.mediate(cone2, list(cone1.legs)) if cone1.legs else cat.hom(cone1.apex, cone2.apex)[0]
    v = cat.mediate(cone1, list(cone2.legs)) if cone2.legs else cat.hom(cone2.apex, cone1.apex)[0]
    if u is None or v is None:
        return None
    if cat.compose(u, v) != cat.identity(cone1.apex) or cat.compose(v, u) != cat.identity(cone2.apex):
        return None
    return u, v
