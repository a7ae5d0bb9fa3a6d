"""Equipment structure of a relation double category.

Companions, conjoints, restrictions and extensions are computed directly
from the factorisation system; every cell that the construction needs is
obtained as the unique diagonal filler of an ``E``-against-``M`` square.
Cartesian and opcartesian cells are recognised twice: structurally (the
pairing square is a pullback / the apex arrow lies in ``E``) and, when
asked, by brute force over probe cells.
"""
from __future__ import annotations

from dataclasses import dataclass

from .basecat import CategoryError
from .reldbl import InconsistencyError, RelCell, check_double_laws
from .report import SKIPPED, PropertyReport, Timer, verdict

@dataclass
class RecognitionVerdict:
    structural: bool
    oracle: object = SKIPPED  # bool or "skipped"
    probes: str = ""

    @property
    def agree(self):
        return self.oracle == SKIPPED or self.oracle == self.structural

    def __bool__(self):
        return bool(self.structural)


# ---------------------------------------------------------------------------
# small helpers


def generated_cell(D, top, e_top, bottom, f, g, u):
    """The cell ``top => bottom`` over ``(f, g)`` whose apex arrow ``a``
    satisfies ``e_top ; a == u``; ``e_top`` must be in E."""
    c = D.base
    v = c.compose(top.pairing, D.times(f, g))
    if c.compose(e_top, v) != c.compose(u, bottom.pairing):
        raise InconsistencyError("generating square does not commute")
    return RelCell(top, bottom, f, g, D.fill(e_top, bottom.pairing, u, v))


def cells_between(D, r, s, f, g):
    return D.cells(r, s, f, g)


def vertical_frames(D, r, s):
    c = D.base
    return [(f, g) for f in c.hom(r.src, s.src) for g in c.hom(r.tgt, s.tgt)]


def all_cells(D, relations=None):
    """Every cell between the given relations, in deterministic order."""
    rels = D.all_relations() if relations is None else relations
    out = []
    for r in rels:
        for s in rels:
            for f, g in vertical_frames(D, r, s):
                out.extend(D.cells(r, s, f, g))
    return out


def check_double_laws_exhaustive(D, relations=None):
    """Unit, associativity and interchange laws on every composable
    configuration, with every associator checked invertible.

    Interchange is decided through frames: when no frame carries two cells,
    both sides of an interchange equation are the unique cell on the same
    composite frame, so it is enough that the composite frame of every
    horizontally or vertically composable pair of cells carries a cell.  On
    an instance where some frame carries two cells the report is
    ``skipped``: the reduction does not apply there.
    """
    c = D.base
    rels = D.all_relations() if relations is None else relations
    base = check_double_laws(D, interchange_samples=0, relations=rels)
    if not base.holds:
        return base
    with Timer() as t:
        failure = None
        thick = None
        by_src = {}
        for r in rels:
            by_src.setdefault(r.src, []).append(r)
        associators = 0
        for r in rels:
            for s in by_src.get(r.tgt, ()):
                for u in by_src.get(s.tgt, ()):
                    associators += 1
                    if not c.is_iso(D.associator(r, s, u).alpha):
                        failure = ("associator not invertible", (r, s, u))
                        break
                if failure:
                    break
            if failure:
                break
        cells = all_cells(D, rels)
        frames = {}
        for x in cells:
            key = (x.top, x.bottom, x.f, x.g)
            if key in frames and thick is None:
                thick = (frames[key], x)
            frames[key] = x
        h_pairs = v_pairs = 0
        if failure is None and thick is None:
            by_top, by_side = {}, {}
            for x in cells:
                by_top.setdefault(x.top, []).append(x)
                by_side.setdefault((x.top.src, x.f), []).append(x)
            for a in cells:
                for b in by_top.get(a.bottom, ()):
                    v_pairs += 1
                    if (a.top, b.bottom, c.compose(a.f, b.f), c.compose(a.g, b.g)) not in frames:
                        failure = ("vertical composite frame has no cell", (a, b))
                        break
                if failure:
                    break
        if failure is None and thick is None:
            for a in cells:
                for b in by_side.get((a.top.tgt, a.g), ()):
                    h_pairs += 1
                    key = (D.compose_h(a.top, b.top), D.compose_h(a.bottom, b.bottom), a.f, b.g)
                    if key not in frames:
                        failure = ("horizontal composite frame has no cell", (a, b))
                        break
                if failure:
                    break
    details = dict(base.details, associators=associators, cells=len(cells), vertical_pairs=v_pairs,
                   horizontal_pairs=h_pairs, interchange_checked="all, through thin frames")
    if failure is None and thick is not None:
        details["reason"] = "some frame carries two cells"
        return PropertyReport("double_laws_exhaustive", SKIPPED, thick, base.probes, base.ms + t.ms, details)
    return PropertyReport("double_laws_exhaustive", verdict(failure is None), failure, base.probes,
                          base.ms + t.ms, details)


# ---------------------------------------------------------------------------
# companions and conjoints


def companion_data(D, f):
    c = D.base
    a, b = c.dom(f), c.cod(f)
    return D.image(D.pair(c.identity(a), f, a, b), a, b)


def conjoint_data(D, f):
    c = D.base
    a, b = c.dom(f), c.cod(f)
    return D.image(D.pair(f, c.identity(a), b, a), b, a)


def companion(D, f):
    """``f_!``: the M-image of the graph ``<id, f>``."""
    return companion_data(D, f)[0]


def conjoint(D, f):
    """``f^*``: the M-image of ``<f, id>``."""
    return conjoint_data(D, f)[0]


def companion_cells(D, f):
    """``(beta, alpha)`` with ``beta : Id_X => f_!`` over ``(id, f)`` and
    ``alpha : f_! => Id_Y`` over ``(f, id)``."""
    c = D.base
    x, y = c.dom(f), c.cod(f)
    ux, ex = D.unit_data(x)
    uy, ey = D.unit_data(y)
    comp, ec = companion_data(D, f)
    beta = generated_cell(D, ux, ex, comp, c.identity(x), f, ec)
    alpha = generated_cell(D, comp, ec, uy, f, c.identity(y), c.compose(f, ey))
    return beta, alpha


def conjoint_cells(D, f):
    """``(gamma, delta)`` with ``gamma : Id_X => f^*`` over ``(f, id)`` and
    ``delta : f^* => Id_Y`` over ``(id, f)``."""
    c = D.base
    x, y = c.dom(f), c.cod(f)
    ux, ex = D.unit_data(x)
    uy, ey = D.unit_data(y)
    conj, ec = conjoint_data(D, f)
    gamma = generated_cell(D, ux, ex, conj, f, c.identity(x), ec)
    delta = generated_cell(D, conj, ec, uy, c.identity(y), f, c.compose(f, ey))
    return gamma, delta


def check_companion_equations(D, f):
    """The vertical and horizontal equations of both companion/conjoint
    cell pairs.  Returns ``None`` or the name of the failing equation."""
    beta, alpha = companion_cells(D, f)
    gamma, delta = conjoint_cells(D, f)
    unit = D.unit_cell(f)
    if D.vcompose(beta, alpha) != unit:
        return "companion: beta then alpha is not Id_f"
    if D.vcompose(gamma, delta) != unit:
        return "conjoint: gamma then delta is not Id_f"
    comp, conj = beta.bottom, gamma.bottom
    lhs = D.vcompose_all(D.inverse_cell(D.left_unitor(comp)), D.hcompose(beta, alpha), D.right_unitor(comp))
    if lhs != D.identity_cell(comp):
        return "companion: [beta | alpha] is not the identity of f_!"
    lhs = D.vcompose_all(D.inverse_cell(D.right_unitor(conj)), D.hcompose(delta, gamma), D.left_unitor(conj))
    if lhs != D.identity_cell(conj):
        return "conjoint: [delta | gamma] is not the identity of f^*"
    return None


def adjunction_cells(D, f):
    """Unit ``Id_X => f_! ; f^*`` and counit ``f^* ; f_! => Id_Y`` built
    from the companion and conjoint cells."""
    beta, alpha = companion_cells(D, f)
    gamma, delta = conjoint_cells(D, f)
    ux, uy = beta.top, alpha.bottom
    eta = D.vcompose(D.inverse_cell(D.left_unitor(ux)), D.hcompose(beta, gamma))
    eps = D.vcompose(D.hcompose(delta, alpha), D.left_unitor(uy))
    return eta, eps


def triangle_failure(D, p, q, eta, eps):
    """``None`` when ``eta : Id_A => p;q`` and ``eps : q;p => Id_B`` satisfy
    both triangle identities, else which one fails."""
    ip, iq = D.identity_cell(p), D.identity_cell(q)
    t1 = D.vcompose_all(
        D.inverse_cell(D.left_unitor(p)),
        D.hcompose(eta, ip),
        D.associator(p, q, p),
        D.hcompose(ip, eps),
        D.right_unitor(p),
    )
    if t1 != ip:
        return "first triangle identity"
    t2 = D.vcompose_all(
        D.inverse_cell(D.right_unitor(q)),
        D.hcompose(iq, eta),
        D.inverse_cell(D.associator(q, p, q)),
        D.hcompose(eps, iq),
        D.left_unitor(q),
    )
    if t2 != iq:
        return "second triangle identity"
    return None


def check_triangles(D, f):
    eta, eps = adjunction_cells(D, f)
    return triangle_failure(D, companion(D, f), conjoint(D, f), eta, eps)


# ---------------------------------------------------------------------------
# restriction and extension


def restrict(D, p, f, g):
    """Restriction ``p(f, g)`` with its cartesian cell ``p(f, g) => p``."""
    c = D.base
    fg = D.times(f, g)
    cone = c.pullback(fg, p.pairing)
    if not cone:
        raise CategoryError("missing pullback for restriction")
    q0, q1 = cone.legs
    rel, e = D.image(q0, c.dom(f), c.dom(g))
    return rel, generated_cell(D, rel, e, p, f, g, q1)


def extend(D, q, f, g):
    """Extension of ``q`` along ``(f, g)`` with its opcartesian cell."""
    c = D.base
    rel, e = D.image(c.compose(q.pairing, D.times(f, g)), c.cod(f), c.cod(g))
    return rel, RelCell(q, rel, f, g, e)


def is_pullback_square(D, cell):
    c = D.base
    cone = c.pullback(D.times(cell.f, cell.g), cell.bottom.pairing)
    if not cone:
        return False
    u = c.mediate(cone, [cell.top.pairing, cell.alpha], cell.top.apex)
    return u is not None and c.is_iso(u)


def _oracle_relations(D, relations):
    return D.all_relations() if relations is None else relations


def cartesian_oracle(D, cell, relations=None):
    """Universal property: every cell into ``cell.bottom`` whose frame
    factors through ``(f, g)`` factors uniquely through ``cell``."""
    c = D.base
    r, s = cell.top, cell.bottom
    for r2 in _oracle_relations(D, relations):
        for h in c.hom(r2.src, r.src):
            hf = c.compose(h, cell.f)
            for k in c.hom(r2.tgt, r.tgt):
                got = {}
                for chi in D.cells(r2, r, h, k):
                    psi = D.vcompose(chi, cell)
                    got[psi] = got.get(psi, 0) + 1
                wanted = D.cells(r2, s, hf, c.compose(k, cell.g))
                if len(got) != len(wanted) or any(got.get(psi) != 1 for psi in wanted):
                    return False
    return True


def opcartesian_oracle(D, cell, relations=None):
    """Dual universal property: cells out of ``cell.top`` factor uniquely."""
    c = D.base
    r, s = cell.top, cell.bottom
    for t in _oracle_relations(D, relations):
        for h in c.hom(s.src, t.src):
            fh = c.compose(cell.f, h)
            for k in c.hom(s.tgt, t.tgt):
                got = {}
                for chi in D.cells(s, t, h, k):
                    psi = D.vcompose(cell, chi)
                    got[psi] = got.get(psi, 0) + 1
                wanted = D.cells(r, t, fh, c.compose(cell.g, k))
                if len(got) != len(wanted) or any(got.get(psi) != 1 for psi in wanted):
                    return False
    return True


def is_cartesian(D, cell, oracle=False, relations=None):
    structural = is_pullback_square(D, cell)
    out = RecognitionVerdict(structural)
    if oracle:
        out.oracle = cartesian_oracle(D, cell, relations)
        out.probes = "relations over carriers" if relations is None else f"{len(relations)} relations"
    return out


def is_opcartesian(D, cell, oracle=False, relations=None):
    structural = bool(D.in_E(cell.alpha))
    out = RecognitionVerdict(structural)
    if oracle:
        out.oracle = opcartesian_oracle(D, cell, relations)
        out.probes = "relations over carriers" if relations is None else f"{len(relations)} relations"
    return out


# ---------------------------------------------------------------------------
# tabulators


def tabulator(D, p):
    """``(apex, l, r, cell)`` with ``cell : Id_apex => p`` over ``(l, r)``."""
    c = D.base
    u, e = D.unit_data(p.apex)
    cell = generated_cell(D, u, e, p, p.left, p.right, c.identity(p.apex))
    return p.apex, p.left, p.right, cell


def tabulation_failure(D, cell, probes=None):
    """``None`` if ``cell : Id_T => p`` over ``(l, r)`` is one-dimensionally
    universal over the probe objects; otherwise ``(X, cell, count)``."""
    c = D.base
    t = c.dom(cell.f)
    if cell.top != D.unit(t):
        raise CategoryError("a tabulating cell must have a horizontal unit on top")
    p = cell.bottom
    probes = D.probe_objects() if probes is None else probes
    for x in probes:
        ux = D.unit(x)
        got = {}
        for u in c.hom(x, t):
            img = D.vcompose(D.unit_cell(u), cell)
            got[img] = got.get(img, 0) + 1
        for f in c.hom(x, p.src):
            for g in c.hom(x, p.tgt):
                for cl in D.cells(ux, p, f, g):
                    if got.get(cl, 0) != 1:
                        return (x, cl, got.get(cl, 0))
    return None


def is_tabulating(D, cell, probes=None):
    return tabulation_failure(D, cell, probes) is None


def is_strong_tabulator(D, cell, oracle=False, relations=None):
    return is_tabulating(D, cell) and bool(is_opcartesian(D, cell, oracle, relations))


# ---------------------------------------------------------------------------
# tensor, local products


def tensor_data(D, p, q):
    """``p x q : A x C -/-> B x D`` with the E-part from ``apex p x apex q``."""
    c = D.base
    pp = D.product(p.apex, q.apex)
    a1, a2 = pp.legs
    left = D.pair(c.compose(a1, p.left), c.compose(a2, q.left), p.src, q.src)
    right = D.pair(c.compose(a1, p.right), c.compose(a2, q.right), p.tgt, q.tgt)
    src = D.product(p.src, q.src).apex
    tgt = D.product(p.tgt, q.tgt).apex
    return D.image(D.pair(left, right, src, tgt), src, tgt)


def tensor(D, p, q):
    return tensor_data(D, p, q)[0]


def tensor_cell(D, c1, c2):
    """``c1 x c2 : top1 x top2 => bottom1 x bottom2`` over ``(f1 x f2, g1 x g2)``."""
    c = D.base
    top, e_top = tensor_data(D, c1.top, c2.top)
    bot, e_bot = tensor_data(D, c1.bottom, c2.bottom)
    u = c.compose(D.times(c1.alpha, c2.alpha), e_bot)
    return generated_cell(D, top, e_top, bot, D.times(c1.f, c2.f), D.times(c1.g, c2.g), u)


def diagonal(D, a):
    i = D.base.identity(a)
    return D.pair(i, i, a, a)


def local_product(D, p, q):
    """``p ^ q``: restriction of ``p x q`` along the diagonals."""
    if (p.src, p.tgt) != (q.src, q.tgt):
        raise CategoryError("local product of non-parallel relations")
    return restrict(D, tensor(D, p, q), diagonal(D, p.src), diagonal(D, p.tgt))[0]


def local_product_direct(D, p, q):
    """Cross-check: image of the pullback of the two pairings."""
    c = D.base
    cone = c.pullback(p.pairing, q.pairing)
    return D.image(c.compose(cone.legs[0], p.pairing), p.src, p.tgt)[0]


def local_terminal(D, a, b):
    one = D.one
    return restrict(D, D.unit(one), D.terminal_map(a), D.terminal_map(b))[0]


# ---------------------------------------------------------------------------
# self-duality and the dagger


def self_dual_data(D, x):
    """``(eta, eps)``: ``eta : 1 -/-> X x X`` extends ``Id_X`` along
    ``(!, diagonal)`` and ``eps : X x X -/-> 1`` along ``(diagonal, !)``."""
    ux = D.unit(x)
    bang = D.terminal_map(x)
    eta = extend(D, ux, bang, diagonal(D, x))[0]
    eps = extend(D, ux, diagonal(D, x), bang)[0]
    return eta, eps


def dagger_swap(D, p):
    """``p`` with its legs exchanged."""
    return D.canonicalize(p.right, p.left)[0]


def dagger(D, p, discrete=True):
    """The converse of ``p : X -/-> Y`` obtained by bending ``p`` with the
    self-duality data, checked against the leg swap."""
    if not discrete:
        raise CategoryError("dagger needs a discrete instance (run check_discrete first)")
    got = dagger_formula(D, p)
    swap = dagger_swap(D, p)
    if got != swap:
        raise InconsistencyError(f"dagger of {p!r} by self-duality {got!r} differs from the swap {swap!r}")
    return got


def dagger_formula(D, p):
    c = D.base
    x, y = p.src, p.tgt
    one = D.one
    eta_x, _ = self_dual_data(D, x)
    _, eps_y = self_dual_data(D, y)
    to_y1 = D.pair(c.identity(y), D.terminal_map(y), y, one)
    xx = D.product(x, x).apex
    yxx = D.product(y, xx)
    yx = D.product(y, x).apex
    # reassociation Y x (X x X) -> (Y x X) x X
    p1, p23 = yxx.legs
    q2, q3 = D.product(x, x).legs
    assoc = D.pair(D.pair(p1, c.compose(p23, q2), y, x), c.compose(p23, q3), yx, x)
    one_x = D.product(one, x)
    steps = [
        companion(D, to_y1),
        tensor(D, D.unit(y), eta_x),
        companion(D, assoc),
        tensor(D, tensor(D, D.unit(y), p), D.unit(x)),
        tensor(D, eps_y, D.unit(x)),
        companion(D, one_x.legs[1]),
    ]
    out = steps[0]
    for s in steps[1:]:
        if out.tgt != s.src:
            raise InconsistencyError("dagger composite is ill-typed")
        out = D.compose_h(out, s)
    return out


# ---------------------------------------------------------------------------
# tilting cells Id_A => p over (f, g) into cells Id_A => p-bar over (<f, g>, !)


def bar(D, p):
    """``p-bar : X x Y -/-> 1``, the composite ``(p x Id_Y) ; eps_Y``."""
    _, eps_y = self_dual_data(D, p.tgt)
    return D.compose_h(tensor(D, p, D.unit(p.tgt)), eps_y)


def _eps_cell(D, g):
    """``eps_g : eps_A => eps_Y`` over ``(g x g, id_1)``."""
    c = D.base
    a, y = c.dom(g), c.cod(g)
    ua = D.unit(a)
    eps_a, oa = extend(D, ua, diagonal(D, a), D.terminal_map(a))
    eps_y, oy = extend(D, D.unit(y), diagonal(D, y), D.terminal_map(y))
    u = c.compose(D.unit_cell(g).alpha, oy.alpha)
    return generated_cell(D, eps_a, oa.alpha, eps_y, D.times(g, g), c.identity(D.one), u)


def _unit_tensor_cell(D, a):
    """``kappa : Id_{A x A} => Id_A x Id_A`` over identities."""
    c = D.base
    aa = D.product(a, a).apex
    uaa, eaa = D.unit_data(aa)
    ua, ea = D.unit_data(a)
    tt, et = tensor_data(D, ua, ua)
    u = c.compose(D.times(ea, ea), et)
    return generated_cell(D, uaa, eaa, tt, c.identity(aa), c.identity(aa), u)


def tilt_cell(D, cell, discrete=True):
    """Tilt ``cell : Id_A => p`` over ``(f, g)`` to ``Id_A => p-bar`` over
    ``(<f, g>, !)``."""
    if not discrete:
        raise CategoryError("tilting needs a discrete instance (run check_discrete first)")
    c = D.base
    a = c.dom(cell.f)
    ua = D.unit(a)
    if cell.top != ua or c.dom(cell.g) != a:
        raise CategoryError("tilt_cell expects a cell out of a horizontal unit")
    _, opc = extend(D, ua, diagonal(D, a), D.terminal_map(a))
    eps_a = opc.bottom
    lam_inv = D.inverse_cell(D.left_unitor(eps_a))
    kappa = _unit_tensor_cell(D, a)
    body = D.vcompose(kappa, tensor_cell(D, cell, D.unit_cell(cell.g)))
    h = D.hcompose(body, _eps_cell(D, cell.g))
    out = D.vcompose_all(opc, lam_inv, h)
    expected = bar(D, cell.bottom)
    if out.bottom != expected:
        raise InconsistencyError("tilted cell does not land in p-bar")
    return out


def untilt_cell(D, tilted, p):
    """Inverse of :func:`tilt_cell` by search among cells ``Id_A => p``."""
    c = D.base
    a = c.dom(tilted.f)
    p1, p2 = D.product(p.src, p.tgt).legs
    f, g = c.compose(tilted.f, p1), c.compose(tilted.f, p2)
    found = [cl for cl in D.cells(D.unit(a), p, f, g) if tilt_cell(D, cl) == tilted]
    if len(found) != 1:
        raise InconsistencyError(f"tilt is not invertible here: {len(found)} preimages")
    return found[0]


def tilt_bijection_failure(D, a, p):
    """``None`` when tilting is a bijection from cells ``Id_A => p`` onto
    cells ``Id_A => p-bar`` with frames ``(<f, g>, !)``; else a witness."""
    c = D.base
    ua = D.unit(a)
    pb = bar(D, p)
    bang = D.terminal_map(a)
    images = {}
    for f in c.hom(a, p.src):
        for g in c.hom(a, p.tgt):
            for cl in D.cells(ua, p, f, g):
                t = tilt_cell(D, cl)
                if t in images:
                    return ("tilt not injective", cl)
                images[t] = cl
                if untilt_cell(D, t, p) != cl:
                    return ("round trip", cl)
    for h in c.hom(a, pb.src):
        for t in D.cells(ua, pb, h, bang):
            if t not in images:
                return ("tilt not surjective", t)
    return None


# ---------------------------------------------------------------------------
# further identities


def modular_failure(D, f, r, s):
    """``None`` when ``f^* r ^ s`` and ``f^* (r ^ f_! s)`` agree, where
    ``f : A -> B``, ``r : A -/-> C`` and ``s : B -/-> C``."""
    lhs = local_product(D, D.compose_h(conjoint(D, f), r), s)
    rhs = D.compose_h(conjoint(D, f), local_product(D, r, D.compose_h(companion(D, f), s)))
    return None if lhs == rhs else (lhs, rhs)


def comma_failure(D, f, g):
    """The tabulator apex of ``Id_C(f, g)`` against the pullback of ``f, g``."""
    c = D.base
    rel, _ = restrict(D, D.unit(c.cod(f)), f, g)
    cone = c.pullback(f, g)
    u = c.mediate(D.product(c.dom(f), c.dom(g)), list(cone.legs), cone.apex)
    lifted = c.lifts(u, rel.pairing)
    if len(lifted) == 1 and c.is_iso(lifted[0]):
        return None
    return (f, g, rel)
