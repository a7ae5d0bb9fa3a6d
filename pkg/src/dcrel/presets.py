"""Named instances for the CLI and the tests, with their expected verdicts."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .basecat import CategoryError
from .concrete import FinPreord, FinSet, FinSetObj, PREORDER_CARRIERS
from .dsl import load
from .factsys import ArrowClass, FactSystem, validate_system
from .reldbl import RelDouble

CHAIN2_TEXT = """\
# the poset 0 <= 1; 1 is terminal
category chain2 {
  objects c0 c1
  hom u01 : c0 -> c1
}
system spans on chain2 = (iso, all)
system trivial on chain2 = (all, iso)
"""

CHAIN3_TEXT = """\
# the poset 0 <= 1 <= 2; composites are forced
category chain3 {
  objects c0 c1 c2
  hom u01 : c0 -> c1
  hom u12 : c1 -> c2
  hom u02 : c0 -> c2
}
system spans on chain3 = (iso, all)
system trivial on chain3 = (all, iso)
"""


@dataclass
class Preset:
    name: str
    description: str
    base: object
    e: str
    m: str
    system_name: str = None
    suite_cap: int = None
    expected: dict = field(default_factory=dict)

    def system(self):
        return FactSystem(ArrowClass.of(self.e), ArrowClass.of(self.m))

    def build(self, e=None, m=None):
        """Validate the system and return the double category of relations."""
        S = FactSystem(ArrowClass.of(e or self.e), ArrowClass.of(m or self.m))
        validate_system(self.base, S, self.base.objects())
        return RelDouble(self.base, S, validate=False)


# Observation rows; every preset's suite must also PASS.
FINSET_ROW = dict(unit_pure=True, locally_preordered=True, locally_posetal=True, cauchy=True,
                  left_proper=True, right_proper=True, proper=True, anti_right_proper=True)
SPAN_ROW = dict(unit_pure=True, locally_preordered=False, locally_posetal=False, cauchy=True,
                left_proper=True, right_proper=False, proper=False, anti_right_proper=True)
ALLISO_ROW = dict(unit_pure=False, locally_preordered=True, locally_posetal=False, cauchy=False,
                  left_proper=False, right_proper=True, proper=False, anti_right_proper=False)
PREORD_ROW = dict(unit_pure=True, locally_preordered=True, locally_posetal=True, cauchy=False,
                  left_proper=True, right_proper=True, proper=True, anti_right_proper=False)
# In a poset every arrow is monic and epic, so both trivial systems are proper.
CHAIN_SPAN_ROW = dict(unit_pure=True, locally_preordered=True, locally_posetal=True, cauchy=True,
                      left_proper=True, right_proper=True, proper=True, anti_right_proper=True)
CHAIN_TRIVIAL_ROW = dict(unit_pure=True, locally_preordered=True, locally_posetal=True, cauchy=False,
                         left_proper=True, right_proper=True, proper=True, anti_right_proper=False)


def _table_preset(name, text, system, row, description):
    res = load(text, validate=False)
    (cat,) = res.categories.values()
    S = res.systems[system]
    return Preset(name, description, cat, S.E.builtin, S.M.builtin, system, expected=row)


def _finset(k, e="epi", m="mono", name=None, row=None, desc=None):
    return Preset(name or f"finset{k}", desc or f"finite sets of size <= {k}, (epi, mono)",
                  FinSet(k), e, m, expected=dict(row or {}))


PRESETS = {
    "finset2": lambda: _finset(2, row=FINSET_ROW),
    "span2": lambda: _finset(2, "iso", "all", "span2", SPAN_ROW, "finite sets of size <= 2, (iso, all): spans"),
    "alliso2": lambda: _finset(2, "all", "iso", "alliso2", ALLISO_ROW,
                               "finite sets of size <= 2, (all, iso): every relation is a map pair"),
    "preord2": lambda: Preset("preord2", "the five preorders on <= 2 elements, (surj, embedding)",
                              FinPreord(PREORDER_CARRIERS), "surj", "embedding", suite_cap=300,
                              expected=dict(PREORD_ROW)),
    "chain2": lambda: _table_preset("chain2", CHAIN2_TEXT, "spans", CHAIN_SPAN_ROW, "the poset 0 <= 1, (iso, all)"),
    "chain3": lambda: _table_preset("chain3", CHAIN3_TEXT, "spans", CHAIN_SPAN_ROW,
                                    "the poset 0 <= 1 <= 2, (iso, all)"),
    "chain2-trivial": lambda: _table_preset("chain2-trivial", CHAIN2_TEXT, "trivial", CHAIN_TRIVIAL_ROW,
                                            "the poset 0 <= 1, (all, iso)"),
    "chain3-trivial": lambda: _table_preset("chain3-trivial", CHAIN3_TEXT, "trivial", CHAIN_TRIVIAL_ROW,
                                            "the poset 0 <= 1 <= 2, (all, iso)"),
}

# Parametrised families: no expectation row.
FAMILIES = ("finset", "finpreord")


def get_preset(name, max_carrier=None):
    if name == "finset":
        return _finset(2 if max_carrier is None else max_carrier)
    if name == "finpreord":
        if max_carrier not in (None, 2):
            raise CategoryError("finpreord presets only support --max-carrier 2")
        p = PRESETS["preord2"]()
        p.name = "finpreord"
        return p
    if name not in PRESETS:
        raise KeyError(name)
    if max_carrier is not None:
        raise CategoryError(f"preset {name!r} has a fixed carrier set; --max-carrier applies to "
                            f"{' and '.join(FAMILIES)}")
    return PRESETS[name]()


def preset_names():
    return sorted(PRESETS) + list(FAMILIES)


# ---------------------------------------------------------------------------
# naming arrows

_FINSET_ARROW = re.compile(r"^(surj|inj|const)(\d)(\d)$")
_TABLE_ARROW = re.compile(r"^\s*(\S+)\s*->\s*(\S+)\s*:\s*\[?([\d,\s]*)\]?\s*$")


def _carrier(base, name):
    for c in base.objects():
        if repr(c) == name or repr(c) == f"[{name}]":
            return c
    if isinstance(base, FinSet) and name.isdigit():
        return FinSetObj(int(name))
    raise CategoryError(f"unknown object {name!r}")


def parse_arrow(base, text):
    """Resolve an arrow name.

    * table categories: a declared hom name;
    * finite sets: ``surjNM`` (i -> min(i, M-1)), ``injNM`` (i -> i),
      ``constNM`` (everything to 0);
    * any concrete backend: ``DOM -> COD : v0,v1,...`` with objects named by
      size (finite sets) or by carrier name (preorders).
    """
    text = text.strip()
    if hasattr(base, "mor"):
        try:
            return base.mor(text)
        except (CategoryError, KeyError):
            raise CategoryError(f"unknown arrow {text!r}") from None
    m = _FINSET_ARROW.match(text)
    if m and isinstance(base, FinSet):
        kind, n, k = m.group(1), int(m.group(2)), int(m.group(3))
        dom, cod = FinSetObj(n), FinSetObj(k)
        if kind == "surj":
            if k == 0 and n > 0 or n < k:
                raise CategoryError(f"no surjection [{n}] -> [{k}]")
            table = [min(i, k - 1) for i in range(n)]
        elif kind == "inj":
            if n > k:
                raise CategoryError(f"no injection [{n}] -> [{k}]")
            table = list(range(n))
        else:
            if k == 0 and n > 0:
                raise CategoryError(f"no map [{n}] -> [0]")
            table = [0] * n
        return base.map(dom, cod, table)
    m = _TABLE_ARROW.match(text)
    if m is None:
        raise CategoryError(f"cannot read arrow {text!r}")
    dom, cod = _carrier(base, m.group(1)), _carrier(base, m.group(2))
    values = [int(v) for v in m.group(3).replace(",", " ").split()]
    return base.map(dom, cod, values)
