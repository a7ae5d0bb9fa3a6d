"""Arrow classes, orthogonality and orthogonal factorisation systems."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .basecat import CategoryError
from .limits import Absent
from .report import PropertyReport, Timer, verdict

BUILTINS = ("mono", "epi", "iso", "regepi", "all", "split_mono", "split_epi")


class FactorisationError(Exception):
    """A morphism has no factorisation although the system was validated."""


class ArrowClass:
    """A class of arrows: an explicit member set, a builtin predicate name,
    or an arbitrary predicate.  Membership is memoised per arrow."""

    def __init__(self, name, builtin=None, members=None, predicate=None):
        if sum(x is not None for x in (builtin, members, predicate)) != 1:
            raise ValueError("give exactly one of builtin, members, predicate")
        self.name = name
        self.builtin = builtin
        self.members = None if members is None else frozenset(members)
        self.predicate = predicate
        self._memo = {}

    @classmethod
    def of(cls, builtin):
        return cls(builtin, builtin=builtin)

    def contains(self, cat, f):
        got = self._memo.get(f)
        if got is None:
            if self.members is not None:
                got = f in self.members
            elif self.builtin is not None:
                got = bool(cat.builtin(self.builtin)(f))
            else:
                got = bool(self.predicate(f))
            self._memo[f] = got
        return got

    def describe(self):
        if self.builtin is not None:
            return f"builtin({self.builtin})"
        if self.members is not None:
            return "{" + ", ".join(sorted(repr(m) for m in self.members)) + "}"
        return self.name

    def __repr__(self):
        return f"ArrowClass({self.describe()})"


@dataclass
class Flag:
    value: object = None  # True / False / None (unchecked)
    witness: object = None

    def describe(self):
        return {"value": self.value, "witness": None if self.witness is None else repr(self.witness)}


@dataclass
class FactSystem:
    E: ArrowClass
    M: ArrowClass
    flags: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def flag(self, name):
        return self.flags.get(name, Flag()).value

    def set_flag(self, name, value, witness=None):
        self.flags[name] = Flag(value, None if value else witness)

    def in_E(self, cat, f):
        return self.E.contains(cat, f)

    def in_M(self, cat, f):
        return self.M.contains(cat, f)


def probe_morphisms(cat, probes=None):
    probes = cat.probe_set if probes is None else probes
    probes = sorted(probes, key=cat.sort_key)
    return [f for a in probes for b in probes for f in cat.hom(a, b)]


# ---------------------------------------------------------------------------
# orthogonality


def orthogonality_witness(cat, e, m):
    """``None`` if ``e`` is left orthogonal to ``m``; otherwise a commuting
    square ``(u, v)`` together with its number of diagonal fillers."""
    a, b = cat.dom(e), cat.cod(e)
    c, d = cat.dom(m), cat.cod(m)
    for u in cat.hom(a, c):
        um = cat.compose(u, m)
        for v in cat.hom(b, d):
            if cat.compose(e, v) != um:
                continue
            n = len(cat.fillers(e, m, u, v))
            if n != 1:
                return (u, v, n)
    return None


def orthogonal(cat, e, m):
    return orthogonality_witness(cat, e, m) is None


@dataclass
class OfsReport:
    ok: bool
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    probes: tuple = ()

    def __bool__(self):
        return self.ok


def find_factorisations(cat, E, M, f, objects):
    """All pairs ``(e, m)`` with ``e;m == f`` through the given objects."""
    a, b = cat.dom(f), cat.cod(f)
    out = []
    for x in sorted(objects, key=cat.sort_key):
        ms = [m for m in cat.hom(x, b) if M.contains(cat, m)]
        if not ms:
            continue
        for e in cat.hom(a, x):
            if not E.contains(cat, e):
                continue
            for m in ms:
                if cat.compose(e, m) == f:
                    out.append((e, m))
    return out


def _structural_factorisation(cat, E, M, f):
    names = (E.builtin, M.builtin)
    if names == ("iso", "all"):
        return cat.identity(cat.dom(f)), f
    if names == ("all", "iso"):
        return f, cat.identity(cat.cod(f))
    if hasattr(cat, "image"):
        if cat.backend == "finset" and E.builtin in ("epi", "surj", "regepi", "split_epi") \
                and M.builtin in ("mono", "injective", "embedding"):
            return cat.image(f)
        if cat.backend == "finpreord" and E.builtin in ("epi", "surj") and M.builtin == "embedding":
            return cat.image(f)
    return None


def check_ofs(cat, E, M, probes=None, strict=False, factor_objects=None):
    """Verify the OFS axioms for ``(E, M)`` over the probe morphisms.

    Checks: isos in both classes, closure under composition, pairwise
    orthogonality, existence of a factorisation of every probe morphism,
    and that each class is exactly the orthogonal of the other.  Strict
    containments are warnings, or failures under ``strict``.
    """
    probes = tuple(cat.probe_set if probes is None else probes)
    mors = probe_morphisms(cat, probes)
    rep = OfsReport(True, probes=probes)

    def fail(what, witness):
        rep.ok = False
        rep.failures.append((what, witness))

    def note(what, witness):
        if strict:
            fail(what, witness)
        else:
            rep.warnings.append((what, witness))

    es = [f for f in mors if E.contains(cat, f)]
    ms = [f for f in mors if M.contains(cat, f)]
    for f in mors:
        if cat.is_iso(f):
            if not E.contains(cat, f):
                fail("iso not in E", f)
            if not M.contains(cat, f):
                fail("iso not in M", f)
    for cls, members, label in ((E, es, "E"), (M, ms, "M")):
        for f in members:
            for g in members:
                if cat.cod(f) == cat.dom(g) and not cls.contains(cat, cat.compose(f, g)):
                    fail(f"{label} not closed under composition", (f, g))
    for e in es:
        for m in ms:
            w = orthogonality_witness(cat, e, m)
            if w is not None:
                fail("orthogonality", {"e": e, "m": m, "square": w[:2], "fillers": w[2]})
    objs = probes if factor_objects is None else factor_objects
    for f in mors:
        got = _structural_factorisation(cat, E, M, f)
        if got is not None:
            e, m = got
            if not (E.contains(cat, e) and M.contains(cat, m) and cat.compose(e, m) == f):
                fail("structural factorisation is wrong", (f, e, m))
        elif not find_factorisations(cat, E, M, f, objs):
            fail("no factorisation", f)
    if rep.ok:
        for f in mors:
            left = all(orthogonal(cat, f, m) for m in ms)
            if left and not E.contains(cat, f):
                note("E is strictly smaller than the left orthogonal of M", f)
            right = all(orthogonal(cat, e, f) for e in es)
            if right and not M.contains(cat, f):
                note("M is strictly smaller than the right orthogonal of E", f)
    return rep


def factorise(cat, S, f, objects=None):
    """Canonical ``(e, m)`` with ``e;m == f``: structural shortcut where exact,
    otherwise the first factorisation in canonical order."""
    got = _structural_factorisation(cat, S.E, S.M, f)
    if got is not None:
        return got
    objs = cat.objects() if objects is None else objects
    found = find_factorisations(cat, S.E, S.M, f, objs)
    if not found:
        raise FactorisationError(f"{f!r} has no ({S.E.describe()}, {S.M.describe()}) factorisation")
    return found[0]


# ---------------------------------------------------------------------------
# stability, properness


def pullback_along(cat, e, g):
    """The pullback of ``e`` along ``g`` (an arrow into ``cod g == cod e``)
    as a cone ``(p : P -> dom g, q : P -> dom e)``, or ``Absent``."""
    cone = cat.pullback(g, e)
    if not cone:
        return Absent(("pullback", g, e))
    return cone


def check_stable(cat, S, probes=None):
    """Every probe ``e`` in ``E`` pulls back into ``E`` along every probe arrow."""
    probes = tuple(cat.probe_set if probes is None else probes)
    mors = probe_morphisms(cat, probes)
    for e in mors:
        if not S.in_E(cat, e):
            continue
        for x in probes:
            for g in cat.hom(x, cat.cod(e)):
                cone = pullback_along(cat, e, g)
                if not cone:
                    return Flag(None, {"missing pullback": (e, g)})
                if not S.in_E(cat, cone.legs[0]):
                    return Flag(False, {"e": e, "along": g, "pulled back": cone.legs[0]})
    return Flag(True)


def properness_taxonomy(cat, S, probes=None):
    """Flags ``left_proper``, ``right_proper``, ``proper``,
    ``anti_right_proper`` with a witness for each failure."""
    mors = probe_morphisms(cat, probes)
    out = {}

    def first(pred):
        for f in mors:
            if pred(f):
                return f
        return None

    w = first(lambda f: S.in_E(cat, f) and not cat.is_epi(f))
    out["left_proper"] = Flag(w is None, w)
    w = first(lambda f: S.in_M(cat, f) and not cat.is_mono(f))
    out["right_proper"] = Flag(w is None, w)
    out["proper"] = Flag(out["left_proper"].value and out["right_proper"].value,
                         out["left_proper"].witness or out["right_proper"].witness)
    w = first(lambda f: cat.is_mono(f) and not S.in_M(cat, f))
    out["anti_right_proper"] = Flag(w is None, w)
    for k, v in out.items():
        S.flags[k] = v
    return out


def check_regepi_equivalence(cat, S, probes=None):
    """Both sides of: anti-right-proper iff every arrow of E is a regular epi."""
    with Timer() as t:
        mors = probe_morphisms(cat, probes)
        arp = next((f for f in mors if cat.is_mono(f) and not S.in_M(cat, f)), None)
        nonreg = next((f for f in mors if S.in_E(cat, f) and not cat.is_regular_epi(f)), None)
        left, right = arp is None, nonreg is None
    details = {"anti_right_proper": left, "E_in_regular_epis": right,
               "mono_outside_M": arp, "E_not_regular": nonreg}
    return PropertyReport("regepi_equivalence", verdict(left == right),
                          None if left == right else details,
                          [repr(o) for o in (cat.probe_set if probes is None else probes)], t.ms, details)


def validate_system(cat, S, probes=None, strict=False):
    """Run the OFS check, stability and the properness taxonomy, setting the
    status flags of ``S``."""
    rep = check_ofs(cat, S.E, S.M, probes, strict)
    S.set_flag("is_ofs", rep.ok, rep.failures[:1] or None)
    S.notes.extend(rep.warnings)
    if rep.ok:
        st = check_stable(cat, S, probes)
        S.flags["is_stable"] = st
        properness_taxonomy(cat, S, probes)
    return rep


def is_stable_system_witness(cat, M, probes=None):
    """``None`` if ``M`` contains isos, is closed under composition and is
    pullback-stable over the probes; otherwise a witness."""
    probes = tuple(cat.probe_set if probes is None else probes)
    mors = probe_morphisms(cat, probes)
    ms = [f for f in mors if M.contains(cat, f)]
    for f in mors:
        if cat.is_iso(f) and not M.contains(cat, f):
            return ("iso not in M", f)
    for f, g in itertools.product(ms, ms):
        if cat.cod(f) == cat.dom(g) and not M.contains(cat, cat.compose(f, g)):
            return ("not closed under composition", (f, g))
    for m in ms:
        for x in probes:
            for g in cat.hom(x, cat.cod(m)):
                cone = pullback_along(cat, m, g)
                if not cone:
                    return ("missing pullback", (m, g))
                if not M.contains(cat, cone.legs[0]):
                    return ("not pullback-stable", (m, g))
    return None


def ofs_from_stable_system(cat, M, probes=None):
    """``(left orthogonal of M, M)`` validated as an OFS, or ``Absent``.

    The left class is computed over the probe morphisms only.
    """
    probes = tuple(cat.probe_set if probes is None else probes)
    w = is_stable_system_witness(cat, M, probes)
    if w is not None:
        raise CategoryError(f"not a stable system: {w[0]} at {w[1]!r}")
    ms = [f for f in probe_morphisms(cat, probes) if M.contains(cat, f)]
    E = ArrowClass(f"perp({M.name})", predicate=lambda f: all(orthogonal(cat, f, m) for m in ms))
    rep = check_ofs(cat, E, M, probes)
    if not rep.ok:
        return Absent(("ofs_from_stable_system", rep.failures[0]))
    S = FactSystem(E, M)
    S.set_flag("is_ofs", True)
    S.notes.append("left class computed over materialized probe morphisms only")
    return S


def make_system(cat, e_name, m_name, probes=None, strict=False):
    S = FactSystem(ArrowClass.of(e_name), ArrowClass.of(m_name))
    validate_system(cat, S, probes, strict)
    return S
