"""Higher invariants: norm form, similarity factors, splitting towers,
quasi-Pfister divisibility, the P_r / Delta / c invariants, strong
neighbour tests and rational descent.

Certificates carried by emptiness answers:
  * lndeg-too-large: a positive r below the norm exponent can only occur
    when lndeg <= (dim + 1) / 2;
  * case-analysis: the exact determinations at r in {n, n+1, ..., lndeg}
    (neighbour detection) where membership is decided outright;
  * divisibility: a nonempty P_r forces lndeg into [r, r + y_r] and forces
    2^r to divide the Izhboldin dimension.
Witness searches beyond the certificates are bounded; Unknown is an honest
outcome.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import forms, function_field, linalg2
from .field_tower import embed
from .forms import QuasilinearForm, pfister


class Budget:
    __slots__ = ("depth", "candidates")

    def __init__(self, depth=2, candidates=512):
        self.depth = depth
        self.candidates = candidates


DEFAULT_BUDGET = Budget()


class NormFormResult:
    __slots__ = ("two_basis", "lndeg", "ndeg", "form")

    def __init__(self, two_basis, form):
        self.two_basis = list(two_basis)
        self.lndeg = len(self.two_basis)
        self.ndeg = 1 << self.lndeg
        self.form = form


def norm_form(phi, mode=None):
    """Greedy 2-basis of the norm field N = F^2(a_1 a_2, ..., a_1 a_n)."""
    entries = [e for e in phi.entries if not e.is_zero()]
    if not entries:
        raise ValueError("norm form of the zero form")
    tower = phi.tower
    a1 = entries[0]
    gens = [a1 * e for e in entries[1:]]
    chosen = []
    products = [tower.one()]
    for g in gens:
        if g.is_zero():
            continue
        if linalg2.membership_in_square_span(
            g, linalg2.SquareSpanQuery(products, tower), mode
        ):
            continue
        chosen.append(g)
        products = products + [p * g for p in products]
    return NormFormResult(chosen, pfister(tower, chosen))


def lndeg(phi, mode=None):
    return norm_form(phi, mode).lndeg


def two_basis_span_form(tower, gens):
    """The quasi-Pfister form on a 2-independent generator list."""
    return pfister(tower, gens)


def sim_form(phi, mode=None):
    """Quasi-Pfister form whose value set is G(phi), the similarity factors.

    G(phi) is the intersection of the a_i^{-1} D(phi); exact mode only.
    """
    tower = phi.tower
    entries = list(phi.entries)
    queries = []
    for a in entries:
        inv = a.inv()
        queries.append(
            linalg2.SquareSpanQuery([inv * b for b in entries], tower))
    basis = linalg2.square_span_intersection(queries, linalg2.RankMode.exact())
    chosen = []
    products = [tower.one()]
    exact = linalg2.RankMode.exact()
    for b in basis:
        if linalg2.membership_in_square_span(
            b, linalg2.SquareSpanQuery(products, tower), exact
        ):
            continue
        chosen.append(b)
        products = products + [p * b for p in products]
    if (1 << len(chosen)) != max(len(basis), 1):
        raise ArithmeticError("similarity factors are not a subfield")
    result = pfister(tower, chosen)
    if not divides(result, phi, exact):
        raise ArithmeticError("form is not divisible by its similarity form")
    return result


def divides(pi, phi, mode=None):
    """phi divisible by the quasi-Pfister form pi: anis(pi (x) phi) = phi."""
    prod = forms.tensor(pi, phi)
    d = linalg2.span_dim_over_squares(prod.query(), mode)
    return int(d) == phi.dim


def is_quasi_pfister(phi, mode=None):
    """Anisotropic phi is quasi-Pfister iff its value set is a subfield."""
    n = phi.dim
    if n & (n - 1):
        return False
    q = phi.query()
    for i, a in enumerate(phi.entries):
        for b in phi.entries[i:]:
            if not linalg2.membership_in_square_span(a * b, q, mode):
                return False
    return True


def is_qp_neighbour(phi, mode=None):
    """dim in (2^s, 2^{s+1}] is a neighbour of a quasi-Pfister form iff
    lndeg equals s + 1."""
    if phi.dim < 2:
        raise ValueError("neighbour test needs dim >= 2")
    s = (phi.dim - 1).bit_length() - 1
    return lndeg(phi, mode) == s + 1


def izhboldin_dim(phi, mode=None):
    """dim(phi) minus the first higher index i_1."""
    return phi.dim - function_field.i0_over(phi, phi, mode)


class SplittingTower:
    __slots__ = ("fields", "forms", "indices", "izh", "i1", "complete")

    def __init__(self, fields, forms_, indices, complete):
        self.fields = fields
        self.forms = forms_
        self.indices = indices
        self.izh = forms_[1].dim if len(forms_) > 1 else None
        self.i1 = indices[0] if indices else None
        self.complete = complete

    @property
    def height(self):
        return len(self.indices)


def splitting_tower(phi, mode=None, max_steps=None, exact_verify=False):
    """Iterate F_j = F_{j-1}(anis(phi_{F_{j-1}})) until the form splits."""
    from .field_tower import DepthGuardExceeded

    cur = forms.anisotropic_part(phi, mode)
    fields = [phi.tower]
    forms_ = [cur]
    indices = []
    complete = True
    steps = 0
    while cur.dim > 1:
        if max_steps is not None and steps >= max_steps:
            complete = False
            break
        try:
            nxt, ext = function_field.anis_over(cur, cur, mode)
        except DepthGuardExceeded:
            complete = False
            break
        i_j = cur.dim - nxt.dim
        if i_j <= 0:
            raise ArithmeticError("splitting step failed to shrink the form")
        if exact_verify:
            exact_dim = linalg2.span_dim_over_squares(
                nxt.query(), linalg2.RankMode.exact())
            if int(exact_dim) != nxt.dim:
                raise ArithmeticError("exact verification rejected a step")
        indices.append(i_j)
        fields.append(ext.result)
        forms_.append(nxt)
        cur = nxt
        steps += 1
    return SplittingTower(fields, forms_, indices, complete)


class SearchOutcome:
    """Witness / Empty(certificate) / Unknown, for P_r-type questions."""

    __slots__ = ("status", "witness", "certificate", "detail")

    WITNESS = "witness"
    EMPTY = "empty"
    UNKNOWN = "unknown"

    LNDEG_TOO_LARGE = "LndegTooLarge"
    DIVISIBILITY = "DivisibilityObstruction"
    CASE_ANALYSIS = "CaseAnalysis"

    def __init__(self, status, witness=None, certificate=None, detail=""):
        self.status = status
        self.witness = witness
        self.certificate = certificate
        self.detail = detail

    @classmethod
    def found(cls, witness, detail=""):
        return cls(cls.WITNESS, witness=witness, detail=detail)

    @classmethod
    def empty(cls, certificate, detail=""):
        return cls(cls.EMPTY, certificate=certificate, detail=detail)

    @classmethod
    def unknown(cls, detail=""):
        return cls(cls.UNKNOWN, detail=detail)

    def __repr__(self):
        if self.status == self.WITNESS:
            return "SearchOutcome(witness %s)" % self.witness.text()
        if self.status == self.EMPTY:
            return "SearchOutcome(empty: %s)" % self.certificate
        return "SearchOutcome(unknown)"


def pr_member(pi, phi, mode=None):
    """[pi] in P_r(phi): dim anis(pi (x) phi) < dim phi + 2^r."""
    r = pi.dim.bit_length() - 1
    if pi.dim != 1 << r:
        raise ValueError("first argument must be an r-fold quasi-Pfister form")
    prod = forms.tensor(pi, phi)
    dim_anis = int(linalg2.span_dim_over_squares(prod.query(), mode))
    ok = dim_anis < phi.dim + (1 << r)
    if ok:
        y_r = (phi.dim - 1) >> r
        if dim_anis != (y_r + 1) << r:
            raise ArithmeticError(
                "member with unexpected tensor dimension %d" % dim_anis)
    return ok


def _extend_two_basis(tower, base_gens, count, mode):
    """Extend a 2-independent list by rational variables (exchange property)."""
    chosen = list(base_gens)
    products = [tower.one()]
    for g in chosen:
        products = products + [p * g for p in products]
    added = 0
    for j in range(tower.m):
        if added == count:
            break
        v = tower.rational_var(j)
        if linalg2.membership_in_square_span(
            v, linalg2.SquareSpanQuery(products, tower), mode
        ):
            continue
        chosen.append(v)
        products = products + [p * v for p in products]
        added += 1
    return chosen if added == count else None


def pr_status(phi, r, budget=None, mode=None, norm=None, izh_hint=None):
    """Decide P_r(phi) != empty: certificates first, then a bounded search."""
    budget = budget or DEFAULT_BUDGET
    tower = phi.tower
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return SearchOutcome.found(
            QuasilinearForm(tower, (tower.one(),)), "constant invariant")
    nf = norm or norm_form(phi, mode)
    ln = nf.lndeg
    if r == ln:
        return SearchOutcome.found(nf.form, "norm form")
    if r > ln:
        if r > tower.m:
            return SearchOutcome.empty(
                SearchOutcome.CASE_ANALYSIS,
                "foldness exceeds log2 [L:L^2] = %d" % tower.m)
        if r > 12:
            from .field_tower import DepthGuardExceeded

            raise DepthGuardExceeded("witness would need 2^%d entries" % r)
        ext = _extend_two_basis(tower, nf.two_basis, r - ln, mode)
        if ext is not None:
            return SearchOutcome.found(
                pfister(tower, ext), "norm form extended by transcendentals")
        return SearchOutcome.empty(
            SearchOutcome.CASE_ANALYSIS,
            "no room above the norm field: [L:L^2] too small")
    if phi.dim < 2:
        return SearchOutcome.empty(SearchOutcome.CASE_ANALYSIS, "dim 1")
    n = (phi.dim - 1).bit_length() - 1
    # cheap global emptiness: positive r below lndeg needs a small norm degree
    if 2 * ln > phi.dim + 1:
        return SearchOutcome.empty(
            SearchOutcome.LNDEG_TOO_LARGE,
            "lndeg %d > (dim+1)/2 = %s" % (ln, (phi.dim + 1) / 2))
    if n + 1 <= r <= ln - 1:
        return SearchOutcome.empty(
            SearchOutcome.CASE_ANALYSIS,
            "r strictly between the dimension exponent and lndeg")
    if r == n:
        if ln == n + 1:
            witness = pfister(tower, nf.two_basis[:n])
            if (1 << r) * phi.dim <= 64 and not pr_member(witness, phi, mode):
                raise ArithmeticError("neighbour witness failed membership")
            return SearchOutcome.found(witness, "quasi-Pfister neighbour")
        return SearchOutcome.empty(
            SearchOutcome.CASE_ANALYSIS,
            "P_n is nonempty only for quasi-Pfister neighbours")
    # r <= n - 1 from here on
    y_r = (phi.dim - 1) >> r
    if not (r <= ln <= r + y_r):
        return SearchOutcome.empty(
            SearchOutcome.DIVISIBILITY,
            "lndeg %d outside [r, r+y_r] = [%d, %d]" % (ln, r, r + y_r))
    izh = izh_hint if izh_hint is not None else izhboldin_dim(phi, mode)
    if izh % (1 << r):
        return SearchOutcome.empty(
            SearchOutcome.DIVISIBILITY,
            "2^%d does not divide the Izhboldin dimension %d" % (r, izh))
    # bounded witness search over products of norm-field generators
    entries = [e for e in phi.entries if not e.is_zero()]
    a1 = entries[0]
    gens = []
    for e in entries[1:]:
        g = a1 * e
        if not g.is_zero():
            gens.append(g)
    pool = list(gens)
    if budget.depth >= 2:
        for i, j in itertools.combinations(range(len(gens)), 2):
            pool.append(gens[i] * gens[j])
    tried = 0
    for combo in itertools.combinations(range(len(pool)), r):
        if tried >= budget.candidates:
            return SearchOutcome.unknown(
                "budget of %d candidates exhausted" % budget.candidates)
        tried += 1
        gs = [pool[i] for i in combo]
        cand = pfister(tower, gs)
        if forms.isotropy_index(cand, mode) != 0:
            continue
        if pr_member(cand, phi, mode):
            return SearchOutcome.found(cand, "bounded search")
    return SearchOutcome.unknown("candidate pool exhausted without a witness")


class DeltaReport:
    __slots__ = ("members", "non_members", "unknown", "lndeg", "izh",
                 "outcomes", "c_value")

    def __init__(self, members, non_members, unknown, lndeg_, izh, outcomes):
        self.members = set(members)
        self.non_members = set(non_members)
        self.unknown = set(unknown)
        self.lndeg = lndeg_
        self.izh = izh
        self.outcomes = outcomes
        self.c_value = None

    def to_json(self):
        out = {
            "members": sorted(self.members),
            "non_members": sorted(self.non_members),
            "unknown": sorted(self.unknown),
        }
        return out


def delta(phi, budget=None, mode=None):
    """Delta(phi) = {r < lndeg(phi) : P_r of the first kernel form is nonempty}."""
    budget = budget or DEFAULT_BUDGET
    if phi.dim < 2:
        raise ValueError("delta needs dim >= 2")
    nf = norm_form(phi, mode)
    ln = nf.lndeg
    n = (phi.dim - 1).bit_length() - 1
    members, non_members, unknown, outcomes = set(), set(), set(), {}
    if phi.dim == 2:
        return DeltaReport({0}, set(), set(), ln, 1, {})
    izh = izhboldin_dim(phi, mode)
    if ln == n + 1:
        # neighbour: the kernel form is similar to an n-fold quasi-Pfister
        members = set(range(0, n + 1))
        for r in members:
            outcomes[r] = "neighbour shortcut"
    elif 2 * ln >= phi.dim + 4:
        members = {0, ln - 1}
        non_members = set(range(1, ln - 1))
        for r in range(ln):
            outcomes[r] = "large-lndeg shortcut"
    else:
        phi1, _ = function_field.anis_over(phi, phi, mode)
        if phi1.dim != izh:
            raise ArithmeticError("kernel form dimension disagrees with izh")
        nf1 = norm_form(phi1, mode)
        if nf1.lndeg != ln - 1:
            raise ArithmeticError("norm degree failed to drop by one")
        members.add(0)
        outcomes[0] = "constant invariant"
        izh1 = None
        for r in range(1, ln):
            needs_izh = 0 < r < min(nf1.lndeg, (phi1.dim - 1).bit_length() - 1)
            if needs_izh and izh1 is None and 2 * nf1.lndeg <= phi1.dim + 1:
                izh1 = izhboldin_dim(phi1, mode)
            out = pr_status(phi1, r, budget, mode, norm=nf1, izh_hint=izh1)
            outcomes[r] = out
            if out.status == SearchOutcome.WITNESS:
                members.add(r)
            elif out.status == SearchOutcome.EMPTY:
                non_members.add(r)
            else:
                unknown.add(r)
    report = DeltaReport(members, non_members, unknown, ln, izh, outcomes)
    _check_delta_structure(report, n, ln)
    return report


def _check_delta_structure(report, n, ln):
    if 0 not in report.members:
        raise ArithmeticError("0 must lie in Delta")
    if ln - 1 not in report.members:
        raise ArithmeticError("lndeg - 1 must lie in Delta")
    bad = report.members & set(range(n + 1, ln - 1))
    if bad:
        raise ArithmeticError("Delta members %s in the forbidden window" % bad)


def c_invariant(phi, budget=None, mode=None):
    """Threshold invariant; Fraction for lndeg <= 2, int when Delta is
    resolved below lndeg-3, else an (lo, hi) interval."""
    rep = delta(phi, budget, mode)
    ln = rep.lndeg
    if ln == 1:
        rep.c_value = Fraction(3, 4)
        return rep
    if ln == 2:
        rep.c_value = Fraction(3, 2)
        return rep
    izh = rep.izh

    def largest_multiple_below(m):
        return ((izh - 1) >> m) << m

    cutoff = ln - 3
    certified = [r for r in rep.members if r <= cutoff]
    possible = certified + [r for r in rep.unknown if r <= cutoff]
    m_cert = max(certified)
    m_poss = max(possible)
    c_hi = largest_multiple_below(m_cert)
    c_lo = largest_multiple_below(m_poss)
    rep.c_value = c_hi if c_lo == c_hi else (c_lo, c_hi)
    return rep


def strong_neighbour_check(phi, pi, mode=None):
    """dim anis(pi (x) phi) < min(dim phi + dim pi, 2 dim phi); on success the
    companion facts (isotropy over the quadric of pi, pi inside the norm
    form) are verified as well."""
    prod = forms.tensor(pi, phi)
    dim_anis = int(linalg2.span_dim_over_squares(prod.query(), mode))
    ok = dim_anis < min(phi.dim + pi.dim, 2 * phi.dim)
    if ok:
        if pi.dim >= 2 and function_field.i0_over(phi, pi, mode) == 0:
            raise ArithmeticError(
                "strong neighbour without isotropy over the quadric")
        nf = norm_form(phi, mode)
        if not forms.subform_leq(pi, nf.form, mode):
            raise ArithmeticError("strong neighbour outside the norm form")
    return ok


class DescentResult:
    __slots__ = ("polys", "specialized")

    def __init__(self, polys, specialized):
        self.polys = polys            # list of dicts: X-half-exponent -> coeff
        self.specialized = specialized


class NotDefinedOverSquares(ValueError):
    pass


def descend_over_rational(sigma, var_name, mode=None):
    """Descent along GF-rational extension: entries of sigma live in K(X^2);
    produce polynomial representatives f_i with <f_1(0),...,f_n(0)>
    anisotropic over K.  Implements the degree-reduction loop."""
    from .f2poly import EXP_BITS, EXP_MASK, Poly2, RatFunc2
    from .field_tower import FieldElement

    tower = sigma.tower
    if var_name not in tower.var_names:
        raise KeyError("unknown rational variable %r" % var_name)
    j = tower.var_names.index(var_name)
    for _, b in tower.sqrt_gens:
        for r in b.comps.values():
            if j in (r.num.variables() | r.den.variables()):
                raise NotDefinedOverSquares(
                    "the distinguished variable occurs in a square root")
    mode = linalg2.RankMode.exact()

    # write each entry as a polynomial in Z = X^2 with X-free coefficients
    polys = []
    for e in sigma.entries:
        if not e.is_rational():
            raise NotDefinedOverSquares("only rational entries are supported")
        r = e.rational_part()
        f = r.num * r.den  # entry ~ f up to the square den^2
        coeffs = {}
        for t in f.terms:
            xe = (t >> (EXP_BITS * j)) & EXP_MASK
            if xe % 2:
                raise NotDefinedOverSquares(
                    "entry has an odd power of %s" % var_name)
            base = t - (xe << (EXP_BITS * j))
            coeffs.setdefault(xe // 2, set()).symmetric_difference_update((base,))
        poly = {
            d: tower.from_poly(Poly2(ts, tower.m))
            for d, ts in coeffs.items() if ts
        }
        polys.append(poly)

    def at_zero(poly):
        return poly.get(0, tower.zero())

    def degree(poly):
        return max(poly, default=0)

    while True:
        vals = [at_zero(p) for p in polys]
        order = sorted(range(len(polys)), key=lambda i: degree(polys[i]))
        found = None
        ech_elems = []
        for pos, i in enumerate(order):
            if vals[i].is_zero():
                found = (i, [tower.zero() for _ in ech_elems], ech_elems)
                break
            coeffs = linalg2.solve_square_span(vals[i], ech_elems, mode) \
                if ech_elems else None
            if coeffs is not None:
                found = (i, coeffs, ech_elems)
                break
            ech_elems.append(vals[i])
        else:
            return DescentResult(
                polys,
                QuasilinearForm(tower, tuple(vals)))
        i, coeffs, basis = found
        basis_idx = [order[k] for k in range(len(basis))]
        # g_i = f_i + sum c_k f_{basis k}; then g_i(0) = 0, strip one Z
        newpoly = dict(polys[i])
        for c, bidx in zip(coeffs, basis_idx):
            if c.is_zero():
                continue
            for d, coeff in polys[bidx].items():
                acc = newpoly.get(d, tower.zero()) + c * coeff
                if acc.is_zero():
                    newpoly.pop(d, None)
                else:
                    newpoly[d] = acc
        if not at_zero(newpoly).is_zero():
            raise ArithmeticError("descent elimination failed")
        newpoly.pop(0, None)
        if not newpoly:
            raise ArithmeticError("descent produced zero: form was isotropic")
        polys[i] = {d - 1: c for d, c in newpoly.items()}
