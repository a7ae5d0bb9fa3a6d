"""Base-category abstraction and the explicit composition-table backend.

Composition is always written in diagrammatic order: ``compose(f, g)`` is
"first ``f``, then ``g``".
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field


class CategoryError(Exception):
    """Malformed category data (unresolved references, bad typing)."""


class EnumerationBudgetExceeded(Exception):
    """A search or enumeration would exceed the configured cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


@dataclass
class Budget:
    hom_cap: int = 4096
    filler_cap: int = 10**6
    oracle: bool = True

    @classmethod
    def from_env(cls, value=None):
        """Parse ``DCREL_BUDGET``: either a bare hom cap or ``hom=N,filler=M``."""
        value = os.environ.get("DCREL_BUDGET") if value is None else value
        budget = cls()
        if not value:
            return budget
        value = value.strip()
        if value.isdigit():
            budget.hom_cap = int(value)
            return budget
        for part in value.split(","):
            key, _, num = part.partition("=")
            key = key.strip()
            if key not in ("hom", "filler") or not num.strip().isdigit():
                raise ValueError(f"bad DCREL_BUDGET entry {part!r}")
            setattr(budget, f"{key}_cap", int(num))
        return budget


BUDGET = Budget.from_env()


def check_budget(what, size, cap=None):
    cap = BUDGET.hom_cap if cap is None else cap
    if size > cap:
        raise EnumerationBudgetExceeded(what, size, cap)


class Category:
    """Interface shared by all backends.

    Subclasses provide ``objects``, ``hom``, ``dom``, ``cod``, ``identity``,
    ``compose`` and ``sort_key``.  Everything else has a generic
    (exhaustive-search) implementation here that the concrete backends
    override with structural shortcuts.
    """

    backend = "abstract"
    exhaustive = True

    # -- required -------------------------------------------------------
    def objects(self):
        raise NotImplementedError

    def hom(self, a, b):
        raise NotImplementedError

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def identity(self, a):
        raise NotImplementedError

    def compose(self, f, g):
        raise NotImplementedError

    def sort_key(self, x):
        raise NotImplementedError

    # -- derived --------------------------------------------------------
    @property
    def probe_set(self):
        return list(self.objects())

    def compose_all(self, *fs):
        out = fs[0]
        for g in fs[1:]:
            out = self.compose(out, g)
        return out

    def morphisms(self, objs=None):
        objs = self.probe_set if objs is None else objs
        return [f for a in objs for b in objs for f in self.hom(a, b)]

    def is_identity(self, f):
        return self.dom(f) == self.cod(f) and f == self.identity(self.dom(f))

    def lifts(self, h, m):
        """All ``d`` with ``d ; m == h`` (``d : dom h -> dom m``)."""
        return [d for d in self.hom(self.dom(h), self.dom(m)) if self.compose(d, m) == h]

    def mediate(self, cone, legs, dom=None):
        """The unique arrow into ``cone.apex`` whose composites with the cone
        legs are ``legs``; ``None`` when it does not exist or is not unique."""
        if not legs and dom is None:
            raise CategoryError("mediate needs a leg or an explicit domain")
        x = self.dom(legs[0]) if legs else dom
        found = [u for u in self.hom(x, cone.apex)
                 if all(self.compose(u, p) == q for p, q in zip(cone.legs, legs))]
        return found[0] if len(found) == 1 else None

    # limits default to exhaustive search (see module ``limits``)
    def terminal(self):
        from .limits import search_limit
        return search_limit(self, ("terminal",))

    def product(self, a, b):
        from .limits import search_limit
        return search_limit(self, ("product", a, b))

    def pullback(self, f, g):
        from .limits import search_limit
        return search_limit(self, ("pullback", f, g))

    def equalizer(self, f, g):
        from .limits import search_limit
        return search_limit(self, ("equalizer", f, g))

    def fillers(self, e, m, u, v):
        """All diagonals ``d`` of the square ``e;v == u;m`` with ``e;d == u``
        and ``d;m == v``."""
        return [d for d in self.lifts(v, m) if self.compose(e, d) == u]

    def terminal_map(self, a):
        t = self.terminal()
        (u,) = self.hom(a, t.apex)
        return u

    # -- morphism predicates (exhaustive quantification) -----------------
    def is_mono(self, f):
        a = self.dom(f)
        for x in self.probe_set:
            hs = self.hom(x, a)
            seen = {}
            for g in hs:
                k = self.compose(g, f)
                if k in seen and seen[k] != g:
                    return False
                seen[k] = g
        return True

    def is_epi(self, f):
        b = self.cod(f)
        for x in self.probe_set:
            seen = {}
            for g in self.hom(b, x):
                k = self.compose(f, g)
                if k in seen and seen[k] != g:
                    return False
                seen[k] = g
        return True

    def inverse(self, f):
        a, b = self.dom(f), self.cod(f)
        for g in self.hom(b, a):
            if self.compose(f, g) == self.identity(a) and self.compose(g, f) == self.identity(b):
                return g
        return None

    def is_iso(self, f):
        return self.inverse(f) is not None

    def is_split_mono(self, f):
        a, b = self.dom(f), self.cod(f)
        return any(self.compose(f, r) == self.identity(a) for r in self.hom(b, a))

    def is_split_epi(self, f):
        a, b = self.dom(f), self.cod(f)
        return any(self.compose(s, f) == self.identity(b) for s in self.hom(b, a))

    def is_regular_epi(self, f):
        from .limits import kernel_pair, is_coequalizer_of
        kp = kernel_pair(self, f)
        if kp is None:
            return False
        k1, k2 = kp.legs
        return is_coequalizer_of(self, f, k1, k2)

    def builtin(self, name):
        """Predicate deciding membership in a builtin arrow class."""
        preds = {
            "all": lambda f: True,
            "iso": self.is_iso,
            "mono": self.is_mono,
            "epi": self.is_epi,
            "regepi": self.is_regular_epi,
            "split_mono": self.is_split_mono,
            "split_epi": self.is_split_epi,
        }
        try:
            return preds[name]
        except KeyError:
            raise CategoryError(f"unknown builtin class {name!r}") from None

    def __repr__(self):
        return f"<{type(self).__name__} {self.backend}>"


# ---------------------------------------------------------------------------
# table backend


@dataclass(frozen=True, order=True)
class TObj:
    index: int
    name: str = field(compare=False)

    def __repr__(self):
        return self.name


@dataclass(frozen=True, order=True)
class TMor:
    index: int
    name: str = field(compare=False)
    dom: TObj = field(compare=False)
    cod: TObj = field(compare=False)

    def __repr__(self):
        return self.name


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def __bool__(self):
        return self.valid


class TableCategory(Category):
    """A finite category given by an explicit composition table.

    ``morphisms`` is a list of ``(name, dom, cod)``; ``identity`` maps object
    names to morphism names; ``compose`` maps ``(f, g)`` name pairs to the
    name of ``f ; g``.  Construction only checks that references resolve;
    the category axioms are checked by :func:`validate_table_category`.
    """

    backend = "table"
    exhaustive = True

    def __init__(self, objects, morphisms, identity, compose, name="C"):
        self.name = name
        self._objs = [TObj(i, o) for i, o in enumerate(objects)]
        self._obj_by_name = {o.name: o for o in self._objs}
        if len(self._obj_by_name) != len(self._objs):
            raise CategoryError("duplicate object name")
        self._mors = []
        self._mor_by_name = {}
        for i, (m, d, c) in enumerate(morphisms):
            if m in self._mor_by_name:
                raise CategoryError(f"duplicate morphism name {m!r}")
            for end in (d, c):
                if end not in self._obj_by_name:
                    raise CategoryError(f"morphism {m!r} references unknown object {end!r}")
            mor = TMor(i, m, self._obj_by_name[d], self._obj_by_name[c])
            self._mors.append(mor)
            self._mor_by_name[m] = mor
        self._id = {}
        for o, m in identity.items():
            if o not in self._obj_by_name:
                raise CategoryError(f"identity for unknown object {o!r}")
            if m not in self._mor_by_name:
                raise CategoryError(f"identity of {o!r} is unknown morphism {m!r}")
            self._id[self._obj_by_name[o]] = self._mor_by_name[m]
        for o in self._objs:
            if o not in self._id:
                raise CategoryError(f"object {o.name!r} has no identity")
        self._comp = {}
        for (f, g), h in compose.items():
            for m in (f, g, h):
                if m not in self._mor_by_name:
                    raise CategoryError(f"composition entry ({f}, {g}) = {h} references unknown morphism {m!r}")
            self._comp[(self._mor_by_name[f], self._mor_by_name[g])] = self._mor_by_name[h]
        from .limits import LimitChoice
        self._limits = LimitChoice(self)
        self._homs = {}
        for a in self._objs:
            for b in self._objs:
                self._homs[(a, b)] = [m for m in self._mors if m.dom == a and m.cod == b]

    # raw access for validation
    @property
    def raw_compose(self):
        return self._comp

    def obj(self, name):
        return self._obj_by_name[name]

    def mor(self, name):
        return self._mor_by_name[name]

    def objects(self):
        return list(self._objs)

    def all_morphisms(self):
        return list(self._mors)

    def hom(self, a, b):
        return list(self._homs[(a, b)])

    def identity(self, a):
        return self._id[a]

    def compose(self, f, g):
        if f.cod != g.dom:
            raise CategoryError(f"cannot compose {f} : {f.dom}->{f.cod} with {g} : {g.dom}->{g.cod}")
        if f == self._id[f.cod]:
            return g
        if g == self._id[g.dom]:
            return f
        try:
            return self._comp[(f, g)]
        except KeyError:
            raise CategoryError(f"composition of {f} and {g} undefined") from None

    def sort_key(self, x):
        return (0 if isinstance(x, TObj) else 1, x.index)

    def terminal(self):
        return self._limits.get(("terminal",))

    def product(self, a, b):
        return self._limits.get(("product", a, b))

    def pullback(self, f, g):
        return self._limits.get(("pullback", f, g))

    def equalizer(self, f, g):
        return self._limits.get(("equalizer", f, g))


def validate_table_category(cat):
    """Report every identity/associativity/typing violation of ``cat``."""
    report = ValidationReport()
    ids = {cat.identity(o) for o in cat.objects()}
    mors = cat.all_morphisms()
    comp = cat.raw_compose
    for o in cat.objects():
        i = cat.identity(o)
        if i.dom != o or i.cod != o:
            report.violations.append(f"identity {i} of {o} is not an endomorphism of {o}")
    for (f, g), h in comp.items():
        if f.cod != g.dom:
            report.violations.append(f"compose {f} {g} = {h}: {f} and {g} are not composable")
        elif h.dom != f.dom or h.cod != g.cod:
            report.violations.append(f"compose {f} {g} = {h}: typing {h.dom}->{h.cod} should be {f.dom}->{g.cod}")
    # unit laws as stored in the table (the accessor short-circuits identities)
    for f in mors:
        left = comp.get((cat.identity(f.dom), f))
        if left is not None and left != f:
            report.violations.append(f"left unit law at {f}")
        right = comp.get((f, cat.identity(f.cod)))
        if right is not None and right != f:
            report.violations.append(f"right unit law at {f}")
    for f in mors:
        for g in mors:
            if f.cod != g.dom or f in ids or g in ids:
                continue
            if (f, g) not in comp:
                report.violations.append(f"composition of {f} and {g} undefined")
    if report.violations:
        return report
    for f in mors:
        for g in mors:
            if f.cod != g.dom:
                continue
            fg = cat.compose(f, g)
            for h in mors:
                if g.cod != h.dom:
                    continue
                if cat.compose(fg, h) != cat.compose(f, cat.compose(g, h)):
                    report.violations.append(f"associativity at ({f}, {g}, {h})")
    return report


@dataclass(frozen=True)
class CategoryHandle:
    """A category together with the object set universal checks range over."""

    category: Category
    probe_set: tuple
    exhaustive: bool

    @classmethod
    def of(cls, cat, probes=None):
        if cat.backend == "table":
            return cls(cat, tuple(cat.objects()), True)
        probes = tuple(cat.probe_set if probes is None else probes)
        return cls(cat, probes, False)

    def describe(self):
        return {"backend": self.category.backend, "exhaustive": self.exhaustive,
                "probes": [repr(o) for o in self.probe_set]}


PREDICATES = ("mono", "epi", "iso", "split_mono", "split_epi")


def morphism_predicate(cat, f, which):
    if which not in PREDICATES:
        raise ValueError(f"unknown predicate {which!r}")
    return getattr(cat, f"is_{which}")(f)


def enumerate_hom(cat, a, b):
    return cat.hom(a, b)


def product_hom(cat, pairs):
    """Cartesian product of hom-sets, used when enumerating cones."""
    return itertools.product(*(cat.hom(a, b) for a, b in pairs))
