"""Text format for finite categories, arrow classes and factorisation systems.

::

    # the poset 0 <= 1
    category chain2 {
      objects a b
      hom u : a -> b
    }
    class monos in chain2 = builtin(mono)
    class isos in chain2 = { id_a id_b }
    system S on chain2 = (monos, isos)

Every object ``x`` gets an identity ``id_x``.  ``compose f g = h`` means
"first ``f``, then ``g``" and is only needed for non-identity pairs; a
missing entry is filled in when exactly one arrow has the right type.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .basecat import CategoryError, TableCategory, validate_table_category
from .factsys import ArrowClass, FactSystem, validate_system

KEYWORDS = {"category", "objects", "hom", "compose", "class", "in", "builtin", "system", "on"}
BUILTIN_CLASSES = ("all", "iso", "mono", "epi", "regepi", "split_mono", "split_epi")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[{}():=,])
""", re.VERBOSE)


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


@dataclass
class Diagnostic:
    loc: Loc
    message: str

    def __str__(self):
        return f"{self.loc}: {self.message}"


class DslError(Exception):
    """One or more located diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class HomDecl:
    name: str
    dom: str
    cod: str
    loc: Loc = field(default=None, compare=False, repr=False)


@dataclass
class ComposeDecl:
    first: str
    second: str
    result: str
    loc: Loc = field(default=None, compare=False, repr=False)


@dataclass
class CategoryDecl:
    name: str
    objects: list
    homs: list = field(default_factory=list)
    composes: list = field(default_factory=list)
    loc: Loc = field(default=None, compare=False, repr=False)
    object_locs: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass
class ClassDecl:
    name: str
    category: str
    members: list = None
    builtin: str = None
    loc: Loc = field(default=None, compare=False, repr=False)


@dataclass
class SystemDecl:
    name: str
    category: str
    left: str
    right: str
    loc: Loc = field(default=None, compare=False, repr=False)


@dataclass
class SpecAst:
    categories: list = field(default_factory=list)
    classes: list = field(default_factory=list)
    systems: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# lexing and parsing


def tokenize(text):
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslError([Diagnostic(Loc(line, pos - start + 1), f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append((kind, m.group(), Loc(line, pos - start + 1)))
        pos = m.end()
    out.append(("eof", "", Loc(line, pos - start + 1)))
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def fail(self, tok, what):
        got = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise DslError([Diagnostic(tok[2], f"expected {what}, found {got}")])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            self.fail(tok, repr(value))
        return tok

    def name(self, what="a name"):
        tok = self.next()
        if tok[0] != "name" or tok[1] in KEYWORDS:
            self.fail(tok, what)
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] != "eof" and tok[1] == value

    def spec(self):
        ast = SpecAst()
        while self.peek()[0] != "eof":
            tok = self.peek()
            if tok[1] == "category":
                ast.categories.append(self.category())
            elif tok[1] == "class":
                ast.classes.append(self.klass())
            elif tok[1] == "system":
                ast.systems.append(self.system())
            else:
                self.fail(tok, "'category', 'class' or 'system'")
        return ast

    def category(self):
        loc = self.expect("category")[2]
        name = self.name("a category name")[1]
        self.expect("{")
        self.expect("objects")
        objs, locs = [], {}
        while self.peek()[0] == "name" and self.peek()[1] not in KEYWORDS:
            tok = self.next()
            objs.append(tok[1])
            locs.setdefault(tok[1], tok[2])
        if not objs:
            self.fail(self.peek(), "at least one object name")
        decl = CategoryDecl(name, objs, loc=loc, object_locs=locs)
        while self.at("hom"):
            hloc = self.next()[2]
            h = self.name("a hom name")[1]
            self.expect(":")
            d = self.name("a domain object")[1]
            self.expect("->")
            c = self.name("a codomain object")[1]
            decl.homs.append(HomDecl(h, d, c, hloc))
        while self.at("compose"):
            cloc = self.next()[2]
            f = self.name("a hom name")[1]
            g = self.name("a hom name")[1]
            self.expect("=")
            h = self.name("a hom name")[1]
            decl.composes.append(ComposeDecl(f, g, h, cloc))
        if self.at("hom"):
            self.fail(self.peek(), "'compose' or '}' (hom declarations come before compose equations)")
        self.expect("}")
        return decl

    def klass(self):
        loc = self.expect("class")[2]
        name = self.name("a class name")[1]
        self.expect("in")
        cat = self.name("a category name")[1]
        self.expect("=")
        if self.at("builtin"):
            self.next()
            self.expect("(")
            pred = self.name("a predicate name")
            if pred[1] not in BUILTIN_CLASSES:
                raise DslError([Diagnostic(pred[2], f"unknown predicate {pred[1]!r}; "
                                                    f"expected one of {', '.join(BUILTIN_CLASSES)}")])
            self.expect(")")
            return ClassDecl(name, cat, builtin=pred[1], loc=loc)
        self.expect("{")
        members = []
        while self.peek()[0] == "name" and self.peek()[1] not in KEYWORDS:
            members.append(self.next()[1])
        self.expect("}")
        return ClassDecl(name, cat, members=members, loc=loc)

    def system(self):
        loc = self.expect("system")[2]
        name = self.name("a system name")[1]
        self.expect("on")
        cat = self.name("a category name")[1]
        self.expect("=")
        self.expect("(")
        left = self.name("a class name")[1]
        self.expect(",")
        right = self.name("a class name")[1]
        self.expect(")")
        return SystemDecl(name, cat, left, right, loc)


def parse(text):
    """Parse ``text`` into a :class:`SpecAst`, then check names.

    Raises :class:`DslError` (never anything else) on bad input.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DslError([Diagnostic(Loc(1, 1), f"input is not UTF-8: {exc.reason}")]) from None
    ast = _Parser(tokenize(text)).spec()
    diags = check_names(ast)
    if diags:
        raise DslError(diags)
    return ast


def check_names(ast):
    """Duplicate-name and dangling-reference diagnostics."""
    diags = []
    cats = {}
    for cat in ast.categories:
        if cat.name in cats:
            diags.append(Diagnostic(cat.loc, f"duplicate category {cat.name!r}"))
            continue
        cats[cat.name] = cat
        seen = set()
        for o in cat.objects:
            if o in seen:
                diags.append(Diagnostic(cat.object_locs.get(o, cat.loc), f"duplicate object {o!r}"))
            seen.add(o)
        homs = {f"id_{o}" for o in cat.objects}
        for h in cat.homs:
            if h.name in homs:
                diags.append(Diagnostic(h.loc, f"duplicate hom {h.name!r}"))
            homs.add(h.name)
            for end in (h.dom, h.cod):
                if end not in seen:
                    diags.append(Diagnostic(h.loc, f"hom {h.name!r} uses undeclared object {end!r}"))
        for c in cat.composes:
            for ref in (c.first, c.second, c.result):
                if ref not in homs:
                    diags.append(Diagnostic(c.loc, f"compose references undeclared hom {ref!r}"))
    classes = {}
    for cl in ast.classes:
        if cl.name in classes:
            diags.append(Diagnostic(cl.loc, f"duplicate class {cl.name!r}"))
        classes[cl.name] = cl
        cat = cats.get(cl.category)
        if cat is None:
            diags.append(Diagnostic(cl.loc, f"class {cl.name!r} refers to unknown category {cl.category!r}"))
            continue
        if cl.members is not None:
            homs = {f"id_{o}" for o in cat.objects} | {h.name for h in cat.homs}
            for m in cl.members:
                if m not in homs:
                    diags.append(Diagnostic(cl.loc, f"class {cl.name!r} lists undeclared hom {m!r}"))
    names = set()
    for s in ast.systems:
        if s.name in names:
            diags.append(Diagnostic(s.loc, f"duplicate system {s.name!r}"))
        names.add(s.name)
        if s.category not in cats:
            diags.append(Diagnostic(s.loc, f"system {s.name!r} refers to unknown category {s.category!r}"))
        for ref in (s.left, s.right):
            cl = classes.get(ref)
            if cl is None:
                if ref not in BUILTIN_CLASSES:
                    diags.append(Diagnostic(s.loc, f"system {s.name!r} refers to unknown class {ref!r}"))
            elif cl.category != s.category:
                diags.append(Diagnostic(s.loc, f"class {ref!r} lives in {cl.category!r}, not {s.category!r}"))
    return diags


# ---------------------------------------------------------------------------
# printing


def to_text(ast):
    lines = []
    for cat in ast.categories:
        lines.append(f"category {cat.name} {{")
        lines.append("  objects " + " ".join(cat.objects))
        for h in cat.homs:
            lines.append(f"  hom {h.name} : {h.dom} -> {h.cod}")
        for c in cat.composes:
            lines.append(f"  compose {c.first} {c.second} = {c.result}")
        lines.append("}")
    for cl in ast.classes:
        if cl.builtin is not None:
            lines.append(f"class {cl.name} in {cl.category} = builtin({cl.builtin})")
        else:
            lines.append(f"class {cl.name} in {cl.category} = {{ {' '.join(cl.members)} }}")
    for s in ast.systems:
        lines.append(f"system {s.name} on {s.category} = ({s.left}, {s.right})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# resolution


@dataclass
class Resolved:
    categories: dict
    classes: dict
    systems: dict
    system_category: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((list(self.categories.values()), list(self.classes.values()), list(self.systems.values())))


def build_category(decl):
    """A :class:`TableCategory` from a declaration, filling in forced
    composites.  Raises :class:`DslError` with source locations."""
    diags = []
    morphisms = [(f"id_{o}", o, o) for o in decl.objects]
    morphisms += [(h.name, h.dom, h.cod) for h in decl.homs]
    identity = {o: f"id_{o}" for o in decl.objects}
    typing = {m: (d, c) for m, d, c in morphisms}
    hom_loc = {h.name: h.loc for h in decl.homs}
    compose = {}
    for c in decl.composes:
        key = (c.first, c.second)
        if key in compose and compose[key] != c.result:
            diags.append(Diagnostic(c.loc, f"conflicting equations for {c.first} then {c.second}"))
        compose[key] = c.result
        (d1, c1), (d2, c2), (d3, c3) = typing[c.first], typing[c.second], typing[c.result]
        if c1 != d2:
            diags.append(Diagnostic(c.loc, f"{c.first} and {c.second} are not composable ({c1} vs {d2})"))
        elif (d3, c3) != (d1, c2):
            diags.append(Diagnostic(c.loc, f"{c.result} : {d3} -> {c3} cannot be {c.first} then {c.second} "
                                           f"({d1} -> {c2})"))
    by_type = {}
    for m, d, c in morphisms:
        by_type.setdefault((d, c), []).append(m)
    for h1 in decl.homs:
        for h2 in decl.homs:
            if h1.cod != h2.dom or (h1.name, h2.name) in compose:
                continue
            cands = by_type.get((h1.dom, h2.cod), [])
            if len(cands) == 1:
                compose[(h1.name, h2.name)] = cands[0]
            else:
                what = "no arrow has" if not cands else f"{len(cands)} arrows have"
                diags.append(Diagnostic(h2.loc or hom_loc.get(h1.name) or decl.loc,
                                        f"compose {h1.name} {h2.name} must be given explicitly: "
                                        f"{what} type {h1.dom} -> {h2.cod}"))
    if diags:
        raise DslError(diags)
    try:
        cat = TableCategory(decl.objects, morphisms, identity, compose, decl.name)
    except CategoryError as exc:
        raise DslError([Diagnostic(decl.loc, str(exc))]) from None
    rep = validate_table_category(cat)
    if not rep.valid:
        raise DslError([Diagnostic(_violation_loc(decl, v), f"category {decl.name}: {v}")
                        for v in rep.violations])
    return cat


def _violation_loc(decl, message):
    """Source location of the equation (or hom) a violation message names."""
    names = re.findall(r"[A-Za-z_][A-Za-z0-9_']*", message)
    for a, b in zip(names, names[1:]):
        for c in decl.composes:
            if (c.first, c.second) == (a, b):
                return c.loc
    homs = {h.name: h.loc for h in decl.homs}
    for n in names:
        if n in homs:
            return homs[n]
    return decl.loc


def build_class(decl, cat):
    if decl.builtin is not None:
        return ArrowClass(decl.name, builtin=decl.builtin)
    return ArrowClass(decl.name, members=[cat.mor(m) for m in decl.members])


def resolve(ast, validate=True):
    """Materialise every category, class and system of ``ast``.  Systems are
    validated (OFS, stability, properness flags) unless ``validate`` is off."""
    cats = {}
    diags = []
    for decl in ast.categories:
        try:
            cats[decl.name] = build_category(decl)
        except DslError as exc:
            diags.extend(exc.diagnostics)
    if diags:
        raise DslError(diags)
    classes = {decl.name: build_class(decl, cats[decl.category]) for decl in ast.classes}
    systems = {}
    for decl in ast.systems:
        cat = cats[decl.category]
        left = classes.get(decl.left) or ArrowClass.of(decl.left)
        right = classes.get(decl.right) or ArrowClass.of(decl.right)
        S = FactSystem(left, right)
        if validate:
            validate_system(cat, S)
        systems[decl.name] = S
    return Resolved(cats, classes, systems, {d.name: d.category for d in ast.systems})


def load(text, validate=True):
    return resolve(parse(text), validate)
