"""Structural backends: finite sets and finite preorders.

Elements of an object of size ``n`` are ``0 .. n-1``.  Limits are built
concretely (lexicographic element order), so every cone returned here is a
genuine limit; :mod:`dcrel.limits` re-checks them in the tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .basecat import BUDGET, Category, CategoryError, check_budget
from .limits import Cone


@dataclass(frozen=True)
class FinSetObj:
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise CategoryError("negative size")

    def __repr__(self):
        return f"[{self.size}]"


def _closure(size, pairs):
    rel = set(pairs) | {(i, i) for i in range(size)}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


@dataclass(frozen=True)
class FinPreordObj:
    size: int
    leq: frozenset

    def __post_init__(self):
        if self.size < 0:
            raise CategoryError("negative size")
        for i, j in self.leq:
            if not (0 <= i < self.size and 0 <= j < self.size):
                raise CategoryError(f"order pair {(i, j)} out of range")
        if any((i, i) not in self.leq for i in range(self.size)):
            raise CategoryError("preorder is not reflexive")
        for (a, b) in self.leq:
            for (c, d) in self.leq:
                if b == c and (a, d) not in self.leq:
                    raise CategoryError("preorder is not transitive")

    @classmethod
    def generated(cls, size, pairs=()):
        return cls(size, _closure(size, pairs))

    def __repr__(self):
        name = _PREORDER_NAMES.get(self)
        if name:
            return name
        strict = sorted(p for p in self.leq if p[0] != p[1])
        return f"P{self.size}{strict}" if strict else f"D{self.size}"


EMPTY = FinPreordObj.generated(0)
POINT = FinPreordObj.generated(1)
DISC2 = FinPreordObj.generated(2)
CHAIN2 = FinPreordObj.generated(2, [(0, 1)])
CODISC2 = FinPreordObj.generated(2, [(0, 1), (1, 0)])
PREORDER_CARRIERS = (EMPTY, POINT, DISC2, CHAIN2, CODISC2)
_PREORDER_NAMES = {EMPTY: "empty", POINT: "point", DISC2: "disc2", CHAIN2: "chain2", CODISC2: "codisc2"}


class FinMap:
    """A function between finite objects, stored as its value table."""

    __slots__ = ("dom", "cod", "table", "_hash")

    def __init__(self, dom, cod, table):
        self.dom = dom
        self.cod = cod
        self.table = tuple(table)
        self._hash = hash((self.table, dom.size, cod.size))

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, FinMap) and self._hash == other._hash and self.table == other.table
                and self.dom == other.dom and self.cod == other.cod)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.dom!r}->{self.cod!r}{list(self.table)}"


def finset_map(dom, cod, table):
    table = tuple(table)
    if len(table) != dom.size:
        raise CategoryError(f"table of length {len(table)} for domain of size {dom.size}")
    for v in table:
        if not (isinstance(v, int) and 0 <= v < cod.size):
            raise CategoryError(f"value {v!r} out of range for codomain {cod!r}")
    return FinMap(dom, cod, table)


class ConcreteCategory(Category):
    exhaustive = False

    def __init__(self, carriers):
        self.carriers = list(carriers)
        self._hom_cache = {}
        self._prod_cache = {}
        self._pb_cache = {}

    # -- objects --------------------------------------------------------
    def objects(self):
        return list(self.carriers)

    def order_of(self, a):
        raise NotImplementedError

    def make_object(self, size, leq=None):
        raise NotImplementedError

    def is_monotone(self, dom, cod, table):
        return True

    def map(self, dom, cod, table):
        f = finset_map(dom, cod, table)
        if not self.is_monotone(dom, cod, f.table):
            raise CategoryError(f"{f!r} is not monotone")
        return f

    # -- basic structure --------------------------------------------------
    def identity(self, a):
        return FinMap(a, a, range(a.size))

    def compose(self, f, g):
        if f.cod != g.dom:
            raise CategoryError(f"cannot compose {f!r} with {g!r}")
        gt = g.table
        return FinMap(f.dom, g.cod, [gt[x] for x in f.table])

    def hom(self, a, b):
        key = (a, b)
        got = self._hom_cache.get(key)
        if got is None:
            check_budget(f"hom({a!r}, {b!r})", b.size ** a.size)
            got = [FinMap(a, b, t) for t in itertools.product(range(b.size), repeat=a.size)
                   if self.is_monotone(a, b, t)]
            self._hom_cache[key] = got
        return list(got)

    def sort_key(self, x):
        if isinstance(x, FinMap):
            return (1, self.sort_key(x.dom), self.sort_key(x.cod), x.table)
        return (0, x.size, tuple(sorted(getattr(x, "leq", ()))))

    # -- limits -----------------------------------------------------------
    def _cone_from_elements(self, elements, factors, diagram):
        """Cone whose apex has the given tuples as elements, ordered as given,
        with the order induced componentwise from ``factors``."""
        leq = None
        if factors and self.order_of(factors[0]) is not None:
            leq = [(i, j) for i, x in enumerate(elements) for j, y in enumerate(elements)
                   if all((x[k], y[k]) in self.order_of(factors[k]) for k in range(len(factors)))]
        apex = self.make_object(len(elements), leq)
        legs = tuple(FinMap(apex, fac, [e[k] for e in elements]) for k, fac in enumerate(factors))
        index = {e: i for i, e in enumerate(elements)}
        return Cone(apex, legs, diagram, index)

    def terminal(self):
        apex = self.make_object(1, [(0, 0)])
        return Cone(apex, (), ("terminal",), {(): 0})

    def terminal_map(self, a):
        return FinMap(a, self.make_object(1, [(0, 0)]), [0] * a.size)

    def product(self, a, b):
        key = (a, b)
        got = self._prod_cache.get(key)
        if got is None:
            elements = [(i, j) for i in range(a.size) for j in range(b.size)]
            got = self._cone_from_elements(elements, (a, b), ("product", a, b))
            self._prod_cache[key] = got
        return got

    def pullback(self, f, g):
        if f.cod != g.cod:
            raise CategoryError("pullback of a non-cospan")
        key = (f, g)
        got = self._pb_cache.get(key)
        if got is None:
            elements = [(x, y) for x in range(f.dom.size) for y in range(g.dom.size)
                        if f.table[x] == g.table[y]]
            got = self._cone_from_elements(elements, (f.dom, g.dom), ("pullback", f, g))
            self._pb_cache[key] = got
        return got

    def equalizer(self, f, g):
        elements = [(x,) for x in range(f.dom.size) if f.table[x] == g.table[x]]
        return self._cone_from_elements(elements, (f.dom,), ("equalizer", f, g))

    def mediate(self, cone, legs, dom=None):
        if cone.index is None:
            # a cone found by search rather than built here
            return super().mediate(cone, legs, dom)
        x = dom if dom is not None else legs[0].dom
        table = []
        for t in range(x.size):
            i = cone.index.get(tuple(leg.table[t] for leg in legs))
            if i is None:
                return None
            table.append(i)
        if not self.is_monotone(x, cone.apex, table):
            return None
        return FinMap(x, cone.apex, table)

    # -- lifting ------------------------------------------------------------
    def _assemble(self, dom, cod, choices):
        size = 1
        for c in choices:
            size *= len(c)
        check_budget("diagonal search", size, BUDGET.filler_cap)
        out = []
        for t in itertools.product(*choices):
            if self.is_monotone(dom, cod, t):
                out.append(FinMap(dom, cod, t))
        return out

    def lifts(self, h, m):
        pre = {}
        for i, v in enumerate(m.table):
            pre.setdefault(v, []).append(i)
        choices = [pre.get(v, ()) for v in h.table]
        return self._assemble(h.dom, m.dom, choices)

    def fillers(self, e, m, u, v):
        pre_m = {}
        for i, val in enumerate(m.table):
            pre_m.setdefault(val, []).append(i)
        forced = {}
        for x, y in enumerate(e.table):
            want = u.table[x]
            if forced.setdefault(y, want) != want:
                return []
        choices = []
        for y in range(e.cod.size):
            if y in forced:
                d = forced[y]
                if m.table[d] != v.table[y]:
                    return []
                choices.append((d,))
            else:
                choices.append(pre_m.get(v.table[y], ()))
        return self._assemble(e.cod, m.dom, choices)

    # -- predicates ---------------------------------------------------------
    @staticmethod
    def is_injective(f):
        return len(set(f.table)) == len(f.table)

    @staticmethod
    def is_surjective(f):
        return len(set(f.table)) == f.cod.size

    def is_mono(self, f):
        return self.is_injective(f)

    def is_epi(self, f):
        return self.is_surjective(f)

    def inverse(self, f):
        if not (self.is_injective(f) and self.is_surjective(f)):
            return None
        inv = [0] * f.cod.size
        for x, y in enumerate(f.table):
            inv[y] = x
        if not self.is_monotone(f.cod, f.dom, inv):
            return None
        return FinMap(f.cod, f.dom, inv)

    def is_iso(self, f):
        return self.inverse(f) is not None

    def is_embedding(self, f):
        """Injective and order-reflecting."""
        if not self.is_injective(f):
            return False
        dl, cl = self.order_of(f.dom), self.order_of(f.cod)
        if dl is None:
            return True
        n = f.dom.size
        return all(((f.table[i], f.table[j]) in cl) == ((i, j) in dl) for i in range(n) for j in range(n))

    def builtin(self, name):
        """Predicate for a builtin arrow class name."""
        preds = {
            "all": lambda f: True,
            "iso": self.is_iso,
            "mono": self.is_mono,
            "epi": self.is_epi,
            "regepi": self.is_regular_epi,
            "split_mono": self.is_split_mono,
            "split_epi": self.is_split_epi,
            "injective": self.is_injective,
            "surj": self.is_surjective,
            "embedding": self.is_embedding,
        }
        try:
            return preds[name]
        except KeyError:
            raise CategoryError(f"unknown builtin class {name!r}") from None

    # -- images and canonical subobjects -------------------------------------
    def image(self, f):
        """Surjection onto the image followed by the embedding of the image
        (order induced from the codomain)."""
        values = sorted(set(f.table))
        pos = {v: i for i, v in enumerate(values)}
        cl = self.order_of(f.cod)
        leq = None if cl is None else [(pos[a], pos[b]) for a in values for b in values if (a, b) in cl]
        img = self.make_object(len(values), leq)
        return FinMap(f.dom, img, [pos[v] for v in f.table]), FinMap(img, f.cod, values)

    def canonical_subobject(self, m):
        """Canonical representative of ``m`` up to isomorphism over its
        codomain: returns ``(c, i)`` with ``i`` an iso and ``i ; c == m``."""
        n = m.dom.size
        order = sorted(range(n), key=lambda x: m.table[x])
        dl = self.order_of(m.dom)
        blocks = [list(g) for _, g in itertools.groupby(order, key=lambda x: m.table[x])]
        best = None
        if dl is None or all(len(b) == 1 for b in blocks):
            candidates = [order]
        else:
            size = 1
            for b in blocks:
                for k in range(2, len(b) + 1):
                    size *= k
            check_budget("canonical relabelling", size, BUDGET.filler_cap)
            candidates = ([x for blk in combo for x in blk]
                          for combo in itertools.product(*(itertools.permutations(b) for b in blocks)))
        for cand in candidates:
            rank = [0] * n
            for pos, x in enumerate(cand):
                rank[x] = pos
            leq = None if dl is None else tuple(sorted((rank[a], rank[b]) for (a, b) in dl))
            key = leq if leq is not None else ()
            if best is None or key < best[0]:
                best = (key, rank, cand)
        _, rank, cand = best
        leq = None if dl is None else list(best[0])
        apex = self.make_object(n, leq)
        iso = FinMap(m.dom, apex, rank)
        canon = FinMap(apex, m.cod, [m.table[x] for x in cand])
        return canon, iso

    def subobjects(self, p, injective_only, max_size):
        """Candidate canonical arrows into ``p``: subsets (with the induced
        order) when ``injective_only``, otherwise multisets of at most
        ``max_size`` elements."""
        pl = self.order_of(p)
        out = []
        if injective_only:
            sizes = range(p.size + 1)
            combos = (c for k in sizes for c in itertools.combinations(range(p.size), k))
        else:
            combos = (c for k in range(max_size + 1)
                      for c in itertools.combinations_with_replacement(range(p.size), k))
        for c in combos:
            leq = None if pl is None else [(i, j) for i, a in enumerate(c) for j, b in enumerate(c) if (a, b) in pl]
            apex = self.make_object(len(c), leq)
            out.append(FinMap(apex, p, c))
        return out


class FinSet(ConcreteCategory):
    """Finite sets and functions; carriers are ``[0] .. [max_carrier]``."""

    backend = "finset"

    def __init__(self, max_carrier=2, carriers=None):
        if carriers is None:
            carriers = [FinSetObj(k) for k in range(max_carrier + 1)]
        super().__init__(carriers)

    def order_of(self, a):
        return None

    def make_object(self, size, leq=None):
        return FinSetObj(size)

    def obj(self, size):
        return FinSetObj(size)

    def is_split_mono(self, f):
        return self.is_injective(f) and (f.dom.size > 0 or f.cod.size == 0)

    def is_split_epi(self, f):
        return self.is_surjective(f)

    def is_regular_epi(self, f):
        return self.is_surjective(f)


class FinPreord(ConcreteCategory):
    """Finite preorders and monotone maps; default carriers are the five
    preorders on at most two elements."""

    backend = "finpreord"

    def __init__(self, carriers=PREORDER_CARRIERS):
        super().__init__(carriers)

    def order_of(self, a):
        return a.leq

    def make_object(self, size, leq=None):
        if leq is None:
            leq = [(i, i) for i in range(size)]
        return FinPreordObj(size, frozenset(leq))

    def is_monotone(self, dom, cod, table):
        cl = cod.leq
        return all((table[i], table[j]) in cl for (i, j) in dom.leq)

    def is_regular_epi(self, f):
        """Surjective with the codomain order generated by the image order."""
        if not self.is_surjective(f):
            return False
        generated = _closure(f.cod.size, [(f.table[i], f.table[j]) for (i, j) in f.dom.leq])
        return generated == f.cod.leq
