"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL`` line (listing the
failed sub-checks) and then asserts.  Nothing is relaxed: a sub-check that
does not hold fails the test.
"""
import time

import pytest

from dcrel.basecat import TableCategory, validate_table_category
from dcrel.concrete import FinSet
from dcrel.construct import (cauchise, check_cau_cauchy, check_cau_comprehension, check_cau_strong_tabulators,
                             check_cau_unit_pure, check_cauchy, check_comprehensive_factorisation,
                             check_equipment_identities, check_fin_fib_system, check_recognition_oracle,
                             base_comparison, factorisation_comparison, maps_theorem_check, theorem_suite,
                             vertical_isomorphism)
from dcrel.dsl import DslError, load
from dcrel.equip import all_cells, companion
from dcrel.factsys import check_regepi_equivalence
from dcrel.presets import get_preset
from dcrel.props import bc_diamond, classify_vertical, probe_arrows
from dcrel.reldbl import RelDouble, check_double_laws, set_relational_compose


class Criterion:
    def __init__(self, number, capsys):
        self.number = number
        self.capsys = capsys
        self.results = []

    def check(self, name, ok):
        self.results.append((name, bool(ok)))
        return ok

    def finish(self):
        failed = [name for name, ok in self.results if not ok]
        line = f"CRITERION {self.number}: {'PASS' if not failed else 'FAIL'}"
        line += f" ({len(self.results)} checks)" if not failed else f" failed: {', '.join(failed)}"
        with self.capsys.disabled():
            print("\n" + line)
        assert not failed, line


@pytest.fixture
def criterion(capsys):
    return lambda n: Criterion(n, capsys)


def _holds(suite, name):
    return suite.reports[name].holds


def test_criterion_1_finset(criterion):
    cr = criterion(1)
    p = get_preset("finset2")
    start = time.perf_counter()
    D = p.build()
    res = theorem_suite(D, jobs=1)
    S, c = D.system, D.base
    cr.check("stable OFS", S.flag("is_ofs") and S.flag("is_stable"))
    cr.check("proper", S.flag("proper"))
    cr.check("anti-right-proper", S.flag("anti_right_proper"))
    cr.check("double-category laws (exhaustive)", _holds(res, "double_laws") and _holds(res, "double_laws_exhaustive"))
    cr.check("cartesian (local products and terminals)", _holds(res, "local_products"))
    cr.check("BC pullbacks", _holds(res, "bc_pullbacks"))
    cr.check("discrete", _holds(res, "discrete"))
    cr.check("strong tabulators", _holds(res, "strong_tabulators"))
    cr.check("comprehension (both variants agree)", _holds(res, "comprehension_full")
             and _holds(res, "comprehension_left_sided") and _holds(res, "comprehension_variants_agree"))
    obs = res.observations
    cr.check("unit-pure", obs["unit_pure"] is True)
    cr.check("locally posetal", obs["locally_posetal"] is True)
    cr.check("Cauchy", obs["cauchy"] is True)
    classes = {f: classify_vertical(D, f) for f in probe_arrows(D)}
    cr.check("Fib = injections", all(v["fibration"] == c.is_injective(f) for f, v in classes.items()))
    cr.check("Fin = Cov = surjections", all(v["final"] == v["cover"] == c.is_surjective(f)
                                            for f, v in classes.items()))
    rels = D.all_relations()
    cr.check("compose_h is set-relational composition on all pairs",
             all(sorted(D.compose_h(r, s).pairs()) == set_relational_compose(r.pairs(), s.pairs())
                 for r in rels for s in rels if r.tgt == s.src))
    cr.check("suite PASS", res.passed)
    cr.check("runtime <= 60 s", time.perf_counter() - start <= 60)
    cr.finish()


def test_criterion_2_span(criterion):
    cr = criterion(2)
    start = time.perf_counter()
    D = get_preset("span2").build()
    res = theorem_suite(D)
    c = D.base
    obs = res.observations
    cr.check("unit-pure", obs["unit_pure"] is True)
    cr.check("Cauchy", obs["cauchy"] is True)
    w = obs["locally_preordered_witness"]
    cr.check("locally preordered fails with two distinct cells on one frame",
             obs["locally_preordered"] is False and w is not None and len(w["cells"]) == 2
             and w["cells"][0] != w["cells"][1])
    arrows = probe_arrows(D)
    classes = {f: classify_vertical(D, f) for f in arrows}
    cr.check("covers = all vertical arrows", all(v["cover"] for v in classes.values()))
    cr.check("inclusions = monos", all(v["inclusion"] == c.is_mono(f) for f, v in classes.items()))
    cr.check("runtime <= 60 s", time.perf_counter() - start <= 60)
    cr.finish()


def test_criterion_3_alliso(criterion):
    cr = criterion(3)
    D = get_preset("alliso2").build()
    res = theorem_suite(D)
    obs = res.observations
    up = res.reports.get("system_is_ofs")
    cr.check("system verified", up is not None and up.holds)
    cell = D.cache["unit_pure"].witness and D.cache["unit_pure"].witness.get("cell")
    cr.check("unit-pure fails with a witness over f != g",
             obs["unit_pure"] is False and cell is not None and cell.f != cell.g and D.is_cell(cell))
    cr.check("left-proper fails", obs["left_proper"] is False)
    bic = next(b for b in res.biconditionals if b["name"] == "left_proper_iff_unit_pure")
    cr.check("biconditional holds with both sides false",
             bic["agree"] is True and bic["left_proper"] is False and bic["unit_pure"] is False)
    cr.finish()


def test_criterion_4_preord(criterion):
    cr = criterion(4)
    start = time.perf_counter()
    p = get_preset("preord2")
    D = p.build()
    res = theorem_suite(D, cap=p.suite_cap)
    S, c = D.system, D.base
    obs = res.observations
    cr.check("proper", S.flag("proper") is True)
    cr.check("not anti-right-proper", S.flag("anti_right_proper") is False)
    cr.check("locally posetal", obs["locally_posetal"] is True)
    cauchy = check_cauchy(D)
    w = cauchy.witness
    cr.check("not Cauchy, with a non-representable adjoint",
             cauchy.fails and w is not None and w.representing is None
             and all(companion(D, f) != w.p for f in c.hom(w.p.src, w.p.tgt)))
    reg = check_regepi_equivalence(c, S, D.carriers)
    cr.check("regular-epi equivalence: both sides false and agreeing",
             reg.holds and reg.details["anti_right_proper"] is False and reg.details["E_in_regular_epis"] is False)
    mt = maps_theorem_check(D)
    legs = [leg for _, leg in mt.details.get("monic_cover_legs_not_iso", [])]
    cr.check("adjoint tabulator leg that is a monic cover and not an iso",
             mt.holds and legs and all(c.is_mono(x) and not c.is_iso(x) for x in legs))
    cr.check("suite PASS", res.passed)
    cr.check("runtime <= 5 min", time.perf_counter() - start <= 300)
    cr.finish()


def test_criterion_5_comprehensive_factorisation(criterion):
    cr = criterion(5)
    for name in ("finset2", "span2", "preord2"):
        D = get_preset(name).build()
        bad = []
        for f in probe_arrows(D):
            iso, failure = factorisation_comparison(D, f)
            if failure is not None or not D.base.is_iso(iso):
                bad.append(f)
        cr.check(f"{name}: every probe arrow matches the system factorisation", not bad)
        cr.check(f"{name}: report", check_comprehensive_factorisation(D).holds)
        cr.check(f"{name}: (Fin, Fib) is an OFS equal to (E, M)", check_fin_fib_system(D).holds)
    cr.finish()


def test_criterion_6_cauchisation(criterion):
    cr = criterion(6)
    D = get_preset("preord2").build()
    K = cauchise(D)
    for rep in (check_cau_unit_pure(K), check_cau_cauchy(K), check_cau_strong_tabulators(K),
                check_cau_comprehension(K, "left_sided")):
        cr.check(f"preord2: {rep.property}", rep.holds)
    cr.check("preord2: Cau(Cau) = Cau", vertical_isomorphism(K, cauchise(K)) is None)
    F = get_preset("finset2").build()
    KF = cauchise(F)
    cr.check("finset2: vertical category isomorphic to the base", base_comparison(KF)["isomorphism"] is True)
    cr.check("finset2: Cau(Cau) = Cau", vertical_isomorphism(KF, cauchise(KF)) is None)
    cr.finish()


def test_criterion_7_oracle(criterion):
    cr = criterion(7)
    D = get_preset("finset2").build()
    rep = check_recognition_oracle(D, cap=None)
    cr.check("exhaustive over every cell", rep.probes == f"{len(all_cells(D))} cells")
    cr.check("zero disagreements", rep.holds)
    cr.finish()


def test_criterion_8_identities(criterion):
    cr = criterion(8)
    D = get_preset("finset2").build()
    reports = {r.property: r for r in check_equipment_identities(D, cap=None)}
    for name in ("companion_equations", "triangle_identities", "modular_law", "dagger", "dagger_of_companion",
                 "tilt_round_trip"):
        cr.check(name, name in reports and reports[name].holds)
    cr.finish()


def test_criterion_9_negative_controls(criterion, monkeypatch):
    cr = criterion(9)
    # a corrupted composition table
    bad = TableCategory(["m"], [("e", "m", "m"), ("s", "m", "m"), ("t", "m", "m")], {"m": "e"},
                        {("s", "s"): "t", ("s", "t"): "s", ("t", "s"): "t", ("t", "t"): "t"})
    rep = validate_table_category(bad)
    cr.check("corrupted table: associativity witness",
             any(v.startswith("associativity at (") for v in rep.violations))
    text = "category broken {\n objects m\n hom s : m -> m\n hom t : m -> m\n compose s s = t\n" \
           " compose s t = s\n compose t s = t\n compose t t = t\n}\n"
    try:
        load(text)
        located = False
    except DslError as exc:
        located = all(d.loc.line in (5, 6) and "associativity" in d.message for d in exc.diagnostics)
    cr.check("corrupted table in the text format: located diagnostics", located)
    # a commuting square that is not a pullback
    F = get_preset("finset2").build()
    c = F.base
    two = c.obj(2)
    bang = F.terminal_map(two)
    ok, cell = bc_diamond(F, c.identity(two), c.identity(two), bang, bang)
    cr.check("non-pullback square: BC comparison is not invertible",
             ok is False and cell is not None and not c.is_iso(cell.alpha))
    # a corrupted horizontal composition
    D = RelDouble(FinSet(2), F.system, validate=False)
    honest = RelDouble.compose_h
    target = next(r for r in D.hom(two, two) if sorted(r.pairs()) == [(0, 1)])
    wrong = next(r for r in D.hom(two, two) if sorted(r.pairs()) == [(1, 0)])
    monkeypatch.setattr(RelDouble, "compose_h", lambda self, r, s: wrong if honest(self, r, s) == target
                        else honest(self, r, s))
    laws = check_double_laws(D)
    cr.check("corrupted composition: law failure with witness", laws.fails and laws.witness is not None)
    cr.finish()
