"""The double category of M-relations over a category with a stable OFS.

Horizontal arrows ``A -/-> B`` are M-arrows ``R -> A x B`` stored in a
canonical form (one representative per isomorphism class over ``A x B``),
so horizontal hom-sets are honest finite sets and "isomorphic relations"
becomes plain equality.  Coherence cells (unitors, associators, horizontal
composites of cells) are computed as the unique diagonal fillers that the
orthogonality of ``E`` against ``M`` provides.
"""
from __future__ import annotations

import random

from .basecat import CategoryError
from .factsys import FactorisationError, factorise, validate_system
from .report import PropertyReport, Timer, verdict


class InconsistencyError(Exception):
    """A filler or factorisation that the theory guarantees was not found."""


class MRelation:
    """A canonical M-relation ``<left, right> : apex -> src x tgt``."""

    __slots__ = ("src", "tgt", "apex", "left", "right", "pairing", "_hash")

    def __init__(self, src, tgt, apex, left, right, pairing):
        self.src, self.tgt, self.apex = src, tgt, apex
        self.left, self.right, self.pairing = left, right, pairing
        self._hash = hash((pairing, src, tgt))

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, MRelation) and self._hash == other._hash and self.pairing == other.pairing
                and self.src == other.src and self.tgt == other.tgt)

    def __hash__(self):
        return self._hash

    def pairs(self):
        """Element pairs ``(left x, right x)`` for concrete backends."""
        return [(a, b) for a, b in zip(self.left.table, self.right.table)]

    def describe(self):
        if hasattr(self.left, "table"):
            return f"{self.src!r}->{self.tgt!r}{self.pairs()}"
        return f"{self.src!r}->{self.tgt!r}<{self.left!r},{self.right!r}>"

    __repr__ = describe


class RelCell:
    """A cell ``top => bottom`` over the vertical frame ``(f, g)`` given by
    the apex arrow ``alpha``."""

    __slots__ = ("top", "bottom", "f", "g", "alpha")

    def __init__(self, top, bottom, f, g, alpha):
        self.top, self.bottom, self.f, self.g, self.alpha = top, bottom, f, g, alpha

    def key(self):
        return (self.top, self.bottom, self.f, self.g, self.alpha)

    def __eq__(self, other):
        return isinstance(other, RelCell) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def frame(self):
        return (self.top, self.bottom, self.f, self.g)

    def describe(self):
        return {"top": repr(self.top), "bottom": repr(self.bottom), "f": repr(self.f),
                "g": repr(self.g), "alpha": repr(self.alpha)}

    def __repr__(self):
        return f"Cell({self.top!r} => {self.bottom!r} over ({self.f!r}, {self.g!r}) by {self.alpha!r})"


class RelDouble:
    """``Rel_{E,M}(C)`` over the given carriers.

    ``span_cap`` bounds the apex size when enumerating relations for a
    system whose M contains non-monic arrows (enumeration is then a probe
    set rather than the whole hom-set).
    """

    def __init__(self, base, system, carriers=None, span_cap=None, validate=True, probes=None):
        self.base = base
        self.system = system
        self.carriers = sorted(base.objects() if carriers is None else carriers, key=base.sort_key)
        if not self.carriers:
            raise CategoryError("no carriers: the vertical terminal object is missing")
        if validate:
            validate_system(base, system, probes or self.carriers)
        for flag in ("is_ofs", "is_stable"):
            if system.flag(flag) is not True:
                w = system.flags.get(flag)
                raise CategoryError(f"system is not verified ({flag}): {None if w is None else w.witness!r}")
        term = base.terminal()
        if not term:
            raise CategoryError("base category has no terminal object")
        if term.apex not in self.carriers:
            raise CategoryError("the terminal object is not among the carriers")
        self.one = term.apex
        self.right_proper = system.flag("right_proper")
        if span_cap is None:
            span_cap = max((getattr(c, "size", 1) for c in self.carriers), default=1)
        self.span_cap = span_cap
        self._img = {}
        self._canon = {}
        self._comp = {}
        self._homs = {}
        self._cells = {}
        self._units = {}
        self.cache = {}

    # -- plumbing -----------------------------------------------------------
    def product(self, a, b):
        cone = self.base.product(a, b)
        if not cone:
            raise CategoryError(f"missing product {a!r} x {b!r}")
        return cone

    def pair(self, l, r, a=None, b=None):
        a = self.base.cod(l) if a is None else a
        b = self.base.cod(r) if b is None else b
        cone = self.product(a, b)
        u = self.base.mediate(cone, [l, r], self.base.dom(l))
        if u is None:
            raise InconsistencyError("product pairing missing")
        return u

    def times(self, f, g):
        """``f x g`` between the chosen products."""
        c = self.base
        src = self.product(c.dom(f), c.dom(g))
        p1, p2 = src.legs
        return self.pair(c.compose(p1, f), c.compose(p2, g), c.cod(f), c.cod(g))

    def fill(self, e, m, u, v):
        found = self.base.fillers(e, m, u, v)
        if len(found) != 1:
            raise InconsistencyError(f"expected a unique filler, found {len(found)}")
        return found[0]

    def in_E(self, f):
        return self.system.in_E(self.base, f)

    def in_M(self, f):
        return self.system.in_M(self.base, f)

    # -- canonical forms ------------------------------------------------------
    def _canonical(self, m):
        got = self._canon.get(m)
        if got is None:
            c = self.base
            if hasattr(c, "canonical_subobject"):
                got = c.canonical_subobject(m)
            else:
                got = None
                target = c.cod(m)
                for x in sorted(c.objects(), key=c.sort_key):
                    for cand in c.hom(x, target):
                        if not self.in_M(cand):
                            continue
                        isos = [i for i in c.lifts(m, cand) if c.is_iso(i)]
                        if isos:
                            got = (cand, isos[0])
                            break
                    if got:
                        break
                if got is None:
                    raise InconsistencyError(f"no canonical representative for {m!r}")
            self._canon[m] = got
        return got

    def relation(self, a, b, pairing):
        """The relation with the given (canonical) pairing into ``a x b``."""
        c = self.base
        p1, p2 = self.product(a, b).legs
        return MRelation(a, b, c.dom(pairing), c.compose(pairing, p1), c.compose(pairing, p2), pairing)

    def image(self, p, a, b):
        """Canonical M-image of ``p : X -> a x b``: ``(relation, e)`` with
        ``e`` in E and ``e ; relation.pairing == p``."""
        key = (p, a, b)
        got = self._img.get(key)
        if got is None:
            try:
                e0, m0 = factorise(self.base, self.system, p)
            except FactorisationError as exc:
                raise InconsistencyError(str(exc)) from None
            canon, iso = self._canonical(m0)
            got = (self.relation(a, b, canon), self.base.compose(e0, iso))
            self._img[key] = got
        return got

    def canonicalize(self, l, r):
        """Canonical M-image of the span ``(l, r)``."""
        c = self.base
        a, b = c.cod(l), c.cod(r)
        return self.image(self.pair(l, r, a, b), a, b)

    def is_canonical(self, rel):
        return self.image(rel.pairing, rel.src, rel.tgt)[0] == rel

    # -- horizontal structure ---------------------------------------------------
    def unit_data(self, a):
        got = self._units.get(a)
        if got is None:
            i = self.base.identity(a)
            got = self.image(self.pair(i, i, a, a), a, a)
            self._units[a] = got
        return got

    def unit(self, a):
        return self.unit_data(a)[0]

    def compose_data(self, r, s):
        """``(r;s, pullback cone, e)`` where ``e`` maps the pullback apex
        onto the composite's apex."""
        key = (r, s)
        got = self._comp.get(key)
        if got is None:
            if r.tgt != s.src:
                raise CategoryError(f"cannot compose {r!r} with {s!r}")
            c = self.base
            cone = c.pullback(r.right, s.left)
            if not cone:
                raise CategoryError("missing pullback for horizontal composition")
            pl, pr = cone.legs
            p = self.pair(c.compose(pl, r.left), c.compose(pr, s.right), r.src, s.tgt)
            rel, e = self.image(p, r.src, s.tgt)
            got = (rel, cone, e)
            self._comp[key] = got
        return got

    def compose_h(self, r, s):
        return self.compose_data(r, s)[0]

    def hom(self, a, b):
        key = (a, b)
        got = self._homs.get(key)
        if got is None:
            c = self.base
            prod = self.product(a, b).apex
            seen = []
            found = set()
            if hasattr(c, "subobjects"):
                cands = c.subobjects(prod, bool(self.right_proper), self.span_cap)
            else:
                cands = [m for x in sorted(c.objects(), key=c.sort_key) for m in c.hom(x, prod)]
            for m in cands:
                if not self.in_M(m):
                    continue
                canon = self._canonical(m)[0]
                if canon not in found:
                    found.add(canon)
                    seen.append(self.relation(a, b, canon))
            got = seen
            self._homs[key] = got
        return list(got)

    def all_relations(self, objects=None):
        objs = self.carriers if objects is None else objects
        return [r for a in objs for b in objs for r in self.hom(a, b)]

    def probe_objects(self):
        """Carriers together with the apexes of the enumerated relations."""
        out = list(self.carriers)
        for r in self.all_relations():
            if r.apex not in out:
                out.append(r.apex)
        return out

    def terminal_map(self, a):
        return self.base.terminal_map(a)

    # -- cells ------------------------------------------------------------------
    def cells(self, r, s, f, g):
        key = (r, s, f, g)
        got = self._cells.get(key)
        if got is None:
            c = self.base
            if c.dom(f) != r.src or c.dom(g) != r.tgt or c.cod(f) != s.src or c.cod(g) != s.tgt:
                raise CategoryError("ill-typed frame")
            h = c.compose(r.pairing, self.times(f, g))
            got = [RelCell(r, s, f, g, a) for a in c.lifts(h, s.pairing)]
            self._cells[key] = got
        return list(got)

    def is_cell(self, cell):
        c = self.base
        return c.compose(cell.alpha, cell.bottom.pairing) == c.compose(cell.top.pairing, self.times(cell.f, cell.g))

    def identity_cell(self, r):
        c = self.base
        return RelCell(r, r, c.identity(r.src), c.identity(r.tgt), c.identity(r.apex))

    def unit_cell(self, f):
        """The horizontal identity cell ``Id_f : Id_A => Id_B`` over ``(f, f)``."""
        c = self.base
        a, b = c.dom(f), c.cod(f)
        ua, ea = self.unit_data(a)
        ub, eb = self.unit_data(b)
        alpha = self.fill(ea, ub.pairing, c.compose(f, eb), c.compose(ua.pairing, self.times(f, f)))
        return RelCell(ua, ub, f, f, alpha)

    def vcompose(self, c1, c2):
        if c1.bottom != c2.top:
            raise CategoryError("vertical composite of non-matching cells")
        c = self.base
        return RelCell(c1.top, c2.bottom, c.compose(c1.f, c2.f), c.compose(c1.g, c2.g),
                       c.compose(c1.alpha, c2.alpha))

    def vcompose_all(self, *cells):
        out = cells[0]
        for x in cells[1:]:
            out = self.vcompose(out, x)
        return out

    def hcompose(self, c1, c2):
        if c1.g != c2.f:
            raise CategoryError("horizontal composite of non-matching cells")
        c = self.base
        top, cone_t, e_t = self.compose_data(c1.top, c2.top)
        bot, cone_b, e_b = self.compose_data(c1.bottom, c2.bottom)
        tl, tr = cone_t.legs
        legs = [c.compose(tl, c1.alpha), c.compose(tr, c2.alpha)]
        w = c.mediate(cone_b, legs, cone_t.apex)
        if w is None:
            raise InconsistencyError("no mediating arrow between composite pullbacks")
        u = c.compose(w, e_b)
        v = c.compose(top.pairing, self.times(c1.f, c2.g))
        return RelCell(top, bot, c1.f, c2.g, self.fill(e_t, bot.pairing, u, v))

    def inverse_cell(self, cell):
        c = self.base
        inv = c.inverse(cell.alpha)
        fi, gi = c.inverse(cell.f), c.inverse(cell.g)
        if inv is None or fi is None or gi is None:
            raise CategoryError("cell is not invertible")
        return RelCell(cell.bottom, cell.top, fi, gi, inv)

    # -- coherence cells -------------------------------------------------------
    def left_unitor(self, r):
        """``Id_A ; r => r`` over identities (inverse of the canonical
        comparison ``r -> Id_A ; r``)."""
        c = self.base
        u, eu = self.unit_data(r.src)
        comp, cone, e = self.compose_data(u, r)
        s = c.mediate(cone, [c.compose(r.left, eu), c.identity(r.apex)], r.apex)
        return self._unitor(comp, r, c.compose(s, e))

    def right_unitor(self, r):
        """``r ; Id_B => r`` over identities."""
        c = self.base
        u, eu = self.unit_data(r.tgt)
        comp, cone, e = self.compose_data(r, u)
        s = c.mediate(cone, [c.identity(r.apex), c.compose(r.right, eu)], r.apex)
        return self._unitor(comp, r, c.compose(s, e))

    def _unitor(self, comp, r, k):
        c = self.base
        if c.compose(k, comp.pairing) != r.pairing:
            raise InconsistencyError("unit comparison does not commute")
        inv = c.inverse(k)
        if inv is None:
            raise InconsistencyError(f"unit comparison for {r!r} is not invertible")
        return RelCell(comp, r, c.identity(r.src), c.identity(r.tgt), inv)

    def associator(self, r, s, t):
        """``(r;s);t => r;(s;t)`` over identities."""
        c = self.base
        rs, p_rs, e_rs = self.compose_data(r, s)
        st, p_st, e_st = self.compose_data(s, t)
        left, p_l, e_l = self.compose_data(rs, t)
        right, p_r, e_r = self.compose_data(r, st)
        a1, a2 = p_rs.legs
        # triple pullback W of r, s, t
        w = c.pullback(c.compose(a2, s.right), t.left)
        w1, w3 = w.legs
        med = c.mediate
        to_l = med(p_l, [c.compose(w1, e_rs), w3], w.apex)
        to_st = med(p_st, [c.compose(w1, a2), w3], w.apex)
        to_r = med(p_r, [c.compose(w1, a1), c.compose(to_st, e_st)], w.apex)
        e_w = c.compose(to_l, e_l)
        u = c.compose(to_r, e_r)
        alpha = self.fill(e_w, right.pairing, u, left.pairing)
        return RelCell(left, right, c.identity(r.src), c.identity(t.tgt), alpha)

    def is_identity_cell(self, cell):
        c = self.base
        return (cell.top == cell.bottom and c.is_identity(cell.alpha) and c.is_identity(cell.f)
                and c.is_identity(cell.g))


def build_rel_double(base, system, carriers=None, **kw):
    return RelDouble(base, system, carriers, **kw)


def set_relational_compose(r_pairs, s_pairs):
    """Oracle: composite of relations given as sets of pairs."""
    return sorted({(a, c) for (a, b) in r_pairs for (b2, c) in s_pairs if b == b2})


# ---------------------------------------------------------------------------
# laws


def check_double_laws(D, seed=0, interchange_samples=300, relations=None):
    """Associativity and unit laws on all composable probe triples (as
    equalities of canonical forms, with the associator/unitor cells checked
    invertible), plus interchange on sampled cell quadruples."""
    with Timer() as t:
        rels = D.all_relations() if relations is None else relations
        by_src = {}
        for r in rels:
            by_src.setdefault(r.src, []).append(r)
        failure = None
        triples = 0
        for r in rels:
            if D.compose_h(D.unit(r.src), r) != r:
                failure = ("left unit law", r)
                break
            if D.compose_h(r, D.unit(r.tgt)) != r:
                failure = ("right unit law", r)
                break
            if not D.base.is_iso(D.left_unitor(r).alpha) or not D.base.is_iso(D.right_unitor(r).alpha):
                failure = ("unitor not invertible", r)
                break
        if failure is None:
            for r in rels:
                for s in by_src.get(r.tgt, ()):
                    rs = D.compose_h(r, s)
                    for u in by_src.get(s.tgt, ()):
                        triples += 1
                        if D.compose_h(rs, u) != D.compose_h(r, D.compose_h(s, u)):
                            failure = ("associativity", (r, s, u))
                            break
                    if failure:
                        break
                if failure:
                    break
        if failure is None:
            rng = random.Random(seed)
            sample = rels if len(rels) <= 40 else rng.sample(rels, 40)
            for r in sample:
                for s in by_src.get(r.tgt, ())[:4]:
                    for u in by_src.get(s.tgt, ())[:4]:
                        if not D.base.is_iso(D.associator(r, s, u).alpha):
                            failure = ("associator not invertible", (r, s, u))
        checked = 0
        if failure is None:
            failure, checked = _interchange(D, rels, seed, interchange_samples)
    return PropertyReport("double_laws", verdict(failure is None), failure,
                          [repr(o) for o in D.carriers], t.ms,
                          {"triples": triples, "interchange_checked": checked})


def _all_cells_from(D, r, rels, limit=None):
    c = D.base
    out = []
    for s in rels:
        for f in c.hom(r.src, s.src):
            for g in c.hom(r.tgt, s.tgt):
                out.extend(D.cells(r, s, f, g))
                if limit and len(out) >= limit:
                    return out
    return out


def _interchange(D, rels, seed, samples):
    rng = random.Random(seed)
    by_src = {}
    for r in rels:
        by_src.setdefault(r.src, []).append(r)
    checked = 0
    attempts = 0
    while checked < samples and attempts < samples * 20:
        attempts += 1
        r1 = rng.choice(rels)
        if not by_src.get(r1.tgt):
            continue
        r2 = rng.choice(by_src[r1.tgt])
        a_cells = _all_cells_from(D, r1, rels)
        if not a_cells:
            continue
        a = rng.choice(a_cells)
        b_cells = [x for x in _all_cells_from(D, r2, rels) if x.f == a.g]
        if not b_cells:
            continue
        b = rng.choice(b_cells)
        c_cells = [x for x in _all_cells_from(D, a.bottom, rels)]
        if not c_cells:
            continue
        c = rng.choice(c_cells)
        d_cells = [x for x in _all_cells_from(D, b.bottom, rels) if x.f == c.g]
        if not d_cells:
            continue
        d = rng.choice(d_cells)
        lhs = D.vcompose(D.hcompose(a, b), D.hcompose(c, d))
        rhs = D.hcompose(D.vcompose(a, c), D.vcompose(b, d))
        checked += 1
        if lhs != rhs:
            return ("interchange", (a, b, c, d)), checked
    return None, checked
